"""Linear-time extension computation by successive theory reduction.

Outcome rules are cloned into one rule per goal-like mode; convertible
belief rules spawn conversion clones with modalized bodies; the conflict
relation between modes is expanded into superiority pairs between rules
with complementary heads.  Facts seed an event queue of settled
conclusions; each event erases satisfied body elements, deletes rules with
contradicted bodies, and shrinks the residual Herbrand base.  Rules whose
bodies have emptied fire on their first still-open chain position, refuting
the complement and, when every standing attacker is defeated by an
applicable superior or conflicting rule, proving the literal.

Firing positions, attack viability, and defeat are evaluated positionally
against the original chains using the settled marks (the truncation and
removal surgeries realized as computed views).  The coarser whole-rule
guards would block firing in configurations the proof conditions decide,
so equivalence with the reference engine is the design target throughout.
"""

from __future__ import annotations

import gc
import random
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (
    CONFLICT,
    MODAL_MODES,
    BodyElement,
    Literal,
    Mode,
    Rule,
    RuleKind,
    Theory,
    check_consistency,
    conflict_sources,
    herbrand_literals,
)
from .refengine import Extension

_GOAL_MODES = (Mode.D, Mode.G, Mode.I, Mode.SI)
_CONFLICT_TARGETS = {m: tuple(w for (s, w) in sorted(CONFLICT, key=lambda p: p[1].value) if s is m) for m in Mode}
#: the rule's own mode plus every mode its conclusions override
_ATTACK_TARGETS = {m: (m,) + _CONFLICT_TARGETS[m] for m in Mode}


# An event is a plain tuple (kind, mode, literal) with kind "+" or "-", and
# body elements live in the engine as (mode, literal, negated) tuples;
# plain tuples keep the hot paths cheap on large theories.
Event = tuple[str, Mode, Literal]
BodyKey = tuple[Mode, Literal, bool]


def _body_key(e: BodyElement) -> BodyKey:
    return (e.mode, e.literal, e.negated)


@dataclass(slots=True)
class EngineRule:
    """One mode-realized rule: a source rule, one of its clones, or a conversion clone."""

    rid: int
    source_label: str
    mode: Mode
    is_conversion: bool
    body: set[BodyKey]
    chain: tuple[Literal, ...]
    alive: bool = True
    viable_upto: int = 0  # positions 1..viable_upto can still support or attack
    cleared_upto: int = 0  # longest prefix whose elements are settled past
    beaten: set[Literal] = field(default_factory=set)  # desire support lost to a superior
    pos: dict[Literal, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.viable_upto = len(self.chain)
        self.pos = {lit: i for i, lit in enumerate(self.chain, start=1)}

    def contains(self, lit: Literal) -> bool:
        return lit in self.pos


class EngineState:
    """Mutable run state: rules, indexes, expanded superiority, settled marks."""

    def __init__(self, theory: Theory):
        self.theory = theory
        self.herbrand = herbrand_literals(theory)
        # (mode, literal) pairs already proved or refuted; the residual
        # Herbrand base is everything else
        self.settled: set[tuple[Mode, Literal]] = set()
        self.plus: set[tuple[Mode, Literal]] = set()
        self.minus: set[tuple[Mode, Literal]] = set()
        self.rules: list[EngineRule] = []
        self.body_index: dict[BodyKey, set[int]] = {}
        self.chain_index: dict[tuple[Mode, Literal], set[int]] = {}
        self.atom_rules: dict[str, set[int]] = {}
        self.sup_of: dict[int, set[int]] = {}
        self.inf_of: dict[int, set[int]] = {}
        self.support: dict[tuple[Mode, Literal], int] = {}
        self.events: deque[Event] = deque()
        self.exam_queue: deque[int] = deque()
        self.in_queue: set[int] = set()
        self.d_marked: set[int] = set()
        self.rng: Optional[random.Random] = None
        self.size_trace: Optional[list[int]] = None
        self._build()

    # -- construction ------------------------------------------------------

    def _add_rule(self, source: str, mode: Mode, conv: bool, body: Iterable[BodyKey], chain: tuple[Literal, ...]) -> EngineRule:
        er = EngineRule(len(self.rules), source, mode, conv, set(body), chain)
        self.rules.append(er)
        for e in er.body:
            self.body_index.setdefault(e, set()).add(er.rid)
        for lit in er.chain:
            self.chain_index.setdefault((mode, lit), set()).add(er.rid)
            self.atom_rules.setdefault(lit.atom, set()).add(er.rid)
        for e in er.body:
            self.atom_rules.setdefault(e[1].atom, set()).add(er.rid)
        self.sup_of[er.rid] = set()
        self.inf_of[er.rid] = set()
        return er

    def _build(self) -> None:
        derived: dict[str, list[EngineRule]] = {}
        for r in self.theory.rules:
            here: list[EngineRule] = []
            body = {_body_key(e) for e in r.body}
            if r.kind is RuleKind.B:
                here.append(self._add_rule(r.label, Mode.B, False, body, r.head.items))
                if r.body and all(e.is_plain for e in r.body):
                    for x in MODAL_MODES:
                        conv_body = {(x, e.literal, False) for e in r.body}
                        here.append(self._add_rule(r.label, x, True, conv_body, r.head.items))
            elif r.kind is RuleKind.O:
                here.append(self._add_rule(r.label, Mode.O, False, body, r.head.items))
            else:
                for x in _GOAL_MODES:
                    here.append(self._add_rule(r.label, x, False, body, r.head.items))
            derived[r.label] = here
        # Superiority resolves fights within one conclusion mode, so source
        # pairs expand only to same-mode realizations (clones included).
        for a, b in self.theory.superiority:
            for ra in derived[a]:
                for rb in derived[b]:
                    if ra.mode is rb.mode:
                        self._add_pair(ra.rid, rb.rid)
        # Conflict(strong, weak) becomes superiority between rules with
        # complementary chains; pairs between agreeing rules would wrongly
        # block defenders, hence the overlap requirement.
        for strong, weak in CONFLICT:
            for er in self.rules:
                if er.mode is not strong:
                    continue
                for lit in er.chain:
                    for rid in self.chain_index.get((weak, lit.complement()), ()):
                        self._add_pair(er.rid, rid)
        for er in self.rules:
            for lit in er.chain:
                self.support[(er.mode, lit)] = self.support.get((er.mode, lit), 0) + 1
        for er in self.rules:
            self._enqueue_exam(er.rid)

    def _add_pair(self, stronger: int, weaker: int) -> None:
        if stronger == weaker:
            return
        self.sup_of[weaker].add(stronger)
        self.inf_of[stronger].add(weaker)

    # -- bookkeeping -------------------------------------------------------

    def _enqueue_exam(self, rid: int) -> None:
        if rid not in self.in_queue and self.rules[rid].alive:
            self.in_queue.add(rid)
            self.exam_queue.append(rid)

    def _enqueue_atom(self, atom: str) -> None:
        for rid in self.atom_rules.get(atom, ()):
            self._enqueue_exam(rid)

    def _dec_support(self, mode: Mode, lit: Literal) -> None:
        key = (mode, lit)
        self.support[key] = self.support.get(key, 0) - 1
        if self.support[key] <= 0 and key not in self.settled:
            self.push_refuted(lit, mode)

    def _kill_rule(self, rid: int) -> None:
        er = self.rules[rid]
        if not er.alive:
            return
        er.alive = False
        for p in range(1, er.viable_upto + 1):
            lit = er.chain[p - 1]
            if er.mode is Mode.D and lit in er.beaten:
                continue
            self._dec_support(er.mode, lit)
        er.viable_upto = 0
        for other in self.sup_of.pop(rid, set()):
            self.inf_of[other].discard(rid)
        for other in self.inf_of.pop(rid, set()):
            self.sup_of[other].discard(rid)
            self._enqueue_exam(other)
        self.sup_of[rid] = set()
        self.inf_of[rid] = set()
        for lit in er.chain:
            self._enqueue_atom(lit.atom)

    def _beat(self, rid: int, lit: Literal) -> None:
        er = self.rules[rid]
        if er.mode is not Mode.D or lit in er.beaten or not er.contains(lit):
            return
        er.beaten.add(lit)
        if er.alive:
            self._dec_support(Mode.D, lit)

    # -- settled-mark predicates over original chains ----------------------

    def _witness(self, mode: Mode, c: Literal) -> bool:
        """A settled fact that discards every later chain position."""
        if mode is Mode.O:
            return (Mode.O, c) in self.minus or (Mode.B, c) in self.plus
        if mode is Mode.G:
            return (Mode.G, c) in self.plus
        if mode is Mode.I:
            return (Mode.I, c) in self.plus or (Mode.B, c.complement()) in self.minus
        if mode is Mode.SI:
            return (Mode.SI, c) in self.plus or (
                (Mode.B, c.complement()) in self.minus and (Mode.O, c.complement()) in self.minus
            )
        return False

    def _cleared(self, mode: Mode, c: Literal) -> bool:
        """A settled fact that lets the chain progress past this element."""
        if mode is Mode.O:
            return (Mode.O, c) in self.plus and (Mode.B, c) in self.minus
        if mode is Mode.G:
            return (Mode.G, c) in self.minus
        if mode is Mode.I:
            return (Mode.I, c) in self.minus and (Mode.B, c.complement()) in self.plus
        if mode is Mode.SI:
            return (Mode.SI, c) in self.minus and (
                (Mode.B, c.complement()) in self.plus or (Mode.O, c.complement()) in self.plus
            )
        return False

    def _refresh_viability(self, er: EngineRule) -> None:
        """Shrink the viable range to the first discard witness."""
        if not er.alive or er.mode is Mode.D:
            return
        upto = er.viable_upto
        for p in range(1, upto + 1):
            if self._witness(er.mode, er.chain[p - 1]):
                for q in range(p + 1, upto + 1):
                    self._dec_support(er.mode, er.chain[q - 1])
                er.viable_upto = p
                break

    def _attack_viable(self, er: EngineRule, lit: Literal) -> bool:
        """Whether the rule still stands behind `lit` at its chain position."""
        if not er.alive or not er.contains(lit):
            return False
        if er.mode is Mode.D:
            return True
        self._refresh_viability(er)
        return er.pos[lit] <= er.viable_upto

    def _applicable_at(self, er: EngineRule, lit: Literal) -> bool:
        """Body emptied and every earlier chain element cleared (index-free for D)."""
        if not er.alive or er.body or not er.contains(lit):
            return False
        if er.mode is Mode.D:
            return True
        p = er.pos[lit]
        return all(self._cleared(er.mode, er.chain[k]) for k in range(p - 1))

    def _defeated(self, rid: int, lit: Literal) -> bool:
        """Some superior or conflicting rule is applicable at `lit` against this attacker."""
        for t in self.sup_of.get(rid, ()):
            if self._applicable_at(self.rules[t], lit):
                return True
        return False

    # -- events ------------------------------------------------------------

    def push_proved(self, lit: Literal, mode: Mode) -> None:
        self.events.append(("+", mode, lit))

    def push_refuted(self, lit: Literal, mode: Mode) -> None:
        self.events.append(("-", mode, lit))

    def effective_size(self) -> int:
        """Size of the residual problem; strictly decreases per processed event."""
        n = 6 * len(self.herbrand) - len(self.settled)
        for er in self.rules:
            if not er.alive:
                continue
            viable = er.viable_upto
            if er.mode is Mode.D:
                viable = len(er.chain) - len(er.beaten)
            n += 1 + len(er.body) + viable
        return n

    def _process(self, ev: Event) -> bool:
        kind, mode, lit = ev
        pair = (mode, lit)
        if pair in self.settled:
            return False
        self.settled.add(pair)
        if kind == "+":
            self.plus.add(pair)
            comp = lit.complement()
            if mode is not Mode.D:
                self.push_refuted(comp, mode)
            if mode is Mode.B:
                self.push_refuted(comp, Mode.I)
            if mode is Mode.B or mode is Mode.O:
                self.push_refuted(comp, Mode.SI)
            self._erase_satisfied((mode, lit, False))
            # contradicted bodies: the complement set of the settled element
            if mode is Mode.B:
                self._kill_bodies_with((Mode.B, comp, False))
            elif mode is Mode.D:
                self._kill_bodies_with((Mode.D, lit, True))
            else:
                self._kill_bodies_with((mode, lit, True))
                self._kill_bodies_with((mode, comp, False))
        else:
            self.minus.add(pair)
            if mode is not Mode.B:
                self._erase_satisfied((mode, lit, True))
            self._kill_bodies_with((mode, lit, False))
        self._enqueue_atom(lit.atom)
        if self.size_trace is not None:
            self.size_trace.append(self.effective_size())
        return True

    def _erase_satisfied(self, key: BodyKey) -> None:
        hit = self.body_index.get(key)
        if not hit:
            return
        for rid in tuple(hit):
            er = self.rules[rid]
            if er.alive and key in er.body:
                er.body.discard(key)
                if not er.body:
                    self._enqueue_exam(rid)
                    for c in er.chain:
                        self._enqueue_atom(c.atom)

    def _kill_bodies_with(self, key: BodyKey) -> None:
        hit = self.body_index.get(key)
        if not hit:
            return
        for rid in tuple(hit):
            if key in self.rules[rid].body:
                self._kill_rule(rid)

    # -- firing ------------------------------------------------------------

    def _exam(self, rid: int) -> None:
        er = self.rules[rid]
        if not er.alive:
            return
        self._refresh_viability(er)
        if er.body:
            return
        if er.mode is Mode.D:
            self._exam_desire(er)
        else:
            self._exam_positional(er)

    def _exam_desire(self, er: EngineRule) -> None:
        if er.rid not in self.d_marked:
            self.d_marked.add(er.rid)
            for weaker in tuple(self.inf_of.get(er.rid, ())):
                target = self.rules[weaker]
                if target.mode is Mode.D:
                    for m in target.chain:
                        if er.contains(m.complement()):
                            self._beat(weaker, m)
        for m in er.chain:
            if (Mode.D, m) in self.settled or m in er.beaten:
                continue
            blocked = any(
                self.rules[s].mode is Mode.D and self.rules[s].alive and self.rules[s].contains(m.complement())
                for s in self.sup_of.get(er.rid, ())
            )
            if not blocked:
                self.push_proved(m, Mode.D)

    def _fire_refute(self, er: EngineRule, c: Literal) -> None:
        """Refute ~c on behalf of this rule, applicable at c's position.

        Blocked while some standing defender of ~c is superior to this rule
        or carries a conflicting stronger mode; retried on later exams.
        """
        comp = c.complement()
        settled = self.settled
        targets = None
        for m in _ATTACK_TARGETS[er.mode]:
            if (m, comp) not in settled:
                if targets is None:
                    targets = [m]
                else:
                    targets.append(m)
        if targets is None:
            return
        sups = self.sup_of.get(er.rid)
        if sups:
            rules = self.rules
            for s in sups:
                if self._attack_viable(rules[s], comp):
                    return
        for m in targets:
            self.push_refuted(comp, m)

    def _exam_positional(self, er: EngineRule) -> None:
        # Applicability at a position is monotone: body emptied and every
        # earlier element cleared.  The rule attacks the complement of each
        # element on that frontier (settled elements included) and can prove
        # only the first unsettled one.
        i = er.cleared_upto
        candidate: Optional[Literal] = None
        at_end = True
        while i < len(er.chain):
            c = er.chain[i]
            if (er.mode, c) not in self.settled:
                candidate = c
                at_end = False
                break
            if self._cleared(er.mode, c):
                i += 1
                er.cleared_upto = i
                continue
            # Settled but not progressable: either a discard witness (dead
            # tail) or waiting on the complement side (e.g. an obligation
            # not yet known violated).
            at_end = False
            break
        frontier = min(er.cleared_upto + (0 if at_end else 1), len(er.chain))
        for p in range(frontier):
            self._fire_refute(er, er.chain[p])
        if candidate is None:
            return
        # Proving the candidate needs every standing attacker defeated by an
        # applicable superior or conflicting rule; this rule's own superiors
        # do not matter unless they attack.
        attackers: set[int] = set()
        for x in (er.mode,) + conflict_sources(er.mode):
            attackers |= self.chain_index.get((x, candidate.complement()), set())
        for a in attackers:
            if not self._attack_viable(self.rules[a], candidate.complement()):
                continue
            if not self._defeated(a, candidate):
                return
        self.push_proved(candidate, er.mode)

    # -- main loop ---------------------------------------------------------

    def drain(self) -> None:
        while self.events or self.exam_queue:
            if self.events:
                self._process(self.events.popleft())
                continue
            if self.rng is not None and len(self.exam_queue) > 1:
                k = self.rng.randrange(len(self.exam_queue))
                self.exam_queue[0], self.exam_queue[k] = self.exam_queue[k], self.exam_queue[0]
            rid = self.exam_queue.popleft()
            self.in_queue.discard(rid)
            self._exam(rid)

    def _standing_pairs(self) -> set[tuple[Mode, Literal]]:
        standing: set[tuple[Mode, Literal]] = set()
        for er in self.rules:
            if not er.alive:
                continue
            self._refresh_viability(er)
            upto = len(er.chain) if er.mode is Mode.D else er.viable_upto
            for p in range(1, upto + 1):
                lit = er.chain[p - 1]
                if er.mode is Mode.D and lit in er.beaten:
                    continue
                standing.add((er.mode, lit))
        return standing

    def _missing_pairs(self) -> list[tuple[Mode, Literal]]:
        standing = self._standing_pairs()
        settled = self.settled
        out = []
        for l in self.herbrand:
            for m in Mode:
                pair = (m, l)
                if pair not in settled and pair not in standing:
                    out.append(pair)
        return out

    def sweep_unsupported(self) -> None:
        """Refute residual pairs with no standing supporter (recomputed, not counted)."""
        missing = self._missing_pairs()
        missing.sort(key=lambda p: (p[0].value, p[1].atom, p[1].positive))
        for mode, lit in missing:
            self.push_refuted(lit, mode)

    def bulk_refute_unsupported(self) -> None:
        """Settle every unsupported residual pair directly, without the queue.

        Refutations carry no cascades and every rule is re-examined by the
        main loop afterwards, so the queue adds nothing for these pairs.
        Body effects (erasure, rule death) still apply.
        """
        body_index = self.body_index
        minus = self.minus
        settled = self.settled
        for pair in self._missing_pairs():
            mode, lit = pair
            settled.add(pair)
            minus.add(pair)
            if mode is not Mode.B and (mode, lit, True) in body_index:
                self._erase_satisfied((mode, lit, True))
            if (mode, lit, False) in body_index:
                self._kill_bodies_with((mode, lit, False))

    def extension(self) -> Extension:
        plus = {m: frozenset(l for (x, l) in self.plus if x is m) for m in Mode}
        minus = {m: frozenset(l for (x, l) in self.minus if x is m) for m in Mode}
        return Extension(self.herbrand, plus, minus)


def initialize(theory: Theory) -> EngineState:
    """Clone outcome and convertible belief rules, expand superiority, index everything."""
    return EngineState(theory)


def assert_facts(state: EngineState) -> EngineState:
    """Facts are immediately settled conclusions (negated modal facts refute, D included)."""
    ordered = sorted(
        state.theory.facts,
        key=lambda f: (f.mode.value, f.literal.atom, f.literal.positive, f.negated),
    )
    for f in ordered:
        if f.negated:
            state.push_refuted(f.literal, f.mode)
        elif f.is_plain:
            state.push_proved(f.literal, Mode.B)
        else:
            state.push_proved(f.literal, f.mode)
    return state


def proved(state: EngineState, lit: Literal, mode: Mode) -> EngineState:
    """Record +mode lit and apply every consequence (cascades, body and rule pruning)."""
    state.push_proved(lit, mode)
    state.drain()
    return state


def refuted(state: EngineState, lit: Literal, mode: Mode) -> EngineState:
    """Record -mode lit and apply every consequence."""
    state.push_refuted(lit, mode)
    state.drain()
    return state


def run(
    theory: Theory,
    rng: Optional[random.Random] = None,
    trace_sizes: bool = False,
) -> Extension:
    """Compute the extension; `rng` shuffles rule examination for confluence tests."""
    report = check_consistency(theory)
    if not report.ok:
        warnings.warn(
            "inconsistent theory; extension is best-effort: "
            + "; ".join(str(v) for v in report.violations),
            stacklevel=2,
        )
    # the run allocates heavily and creates no reference cycles; pausing the
    # cyclic collector keeps large theories close to linear cost
    gc_was_enabled = gc.isenabled()
    if gc_was_enabled:
        gc.disable()
    try:
        state = initialize(theory)
        state.rng = rng
        if trace_sizes:
            state.size_trace = [state.effective_size()]
        assert_facts(state)
        state.drain()
        state.bulk_refute_unsupported()
        state.drain()
        while True:
            settled_before = len(state.plus) + len(state.minus)
            state.sweep_unsupported()
            for er in state.rules:
                state._enqueue_exam(er.rid)
            state.drain()
            if len(state.plus) + len(state.minus) == settled_before:
                break
        return state.extension()
    finally:
        if gc_was_enabled:
            gc.enable()


def compute_extension_linear(theory: Theory, rng: Optional[random.Random] = None) -> Extension:
    return run(theory, rng=rng)
