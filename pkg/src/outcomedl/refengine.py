"""Reference engine: a direct fixpoint evaluation of the proof conditions.

This is the correctness oracle.  It evaluates provability (+) and
refutability (-) clauses literally over the original theory, scanning the
modal Herbrand base until nothing new can be added.  No transformations, no
indexes beyond simple lookups, no performance ambitions: worst-case cost is
polynomial of low degree and that is fine here.

Three-valued discipline: `applicable` and `discarded` are independent
constructive queries; mid-fixpoint both can be false for the same rule.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    CONFLICT,
    Literal,
    Mode,
    Rule,
    RuleKind,
    Theory,
    check_consistency,
    conflict_sources,
    herbrand_literals,
)


@dataclass
class DerivationState:
    """Monotone record of settled conclusions: (mode, literal) in plus/minus."""

    plus: set[tuple[Mode, Literal]] = field(default_factory=set)
    minus: set[tuple[Mode, Literal]] = field(default_factory=set)


@dataclass(frozen=True)
class Extension:
    """Per-mode partition of the Herbrand literals into proved / refuted / undecided."""

    herbrand: frozenset[Literal]
    plus: dict[Mode, frozenset[Literal]]
    minus: dict[Mode, frozenset[Literal]]

    def undecided(self, mode: Mode) -> frozenset[Literal]:
        return self.herbrand - self.plus[mode] - self.minus[mode]

    @staticmethod
    def from_state(herbrand: frozenset[Literal], state: DerivationState) -> "Extension":
        plus = {m: frozenset(l for (x, l) in state.plus if x is m) for m in Mode}
        minus = {m: frozenset(l for (x, l) in state.minus if x is m) for m in Mode}
        return Extension(herbrand, plus, minus)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Extension):
            return NotImplemented
        return (
            self.herbrand == other.herbrand
            and all(self.plus[m] == other.plus[m] for m in Mode)
            and all(self.minus[m] == other.minus[m] for m in Mode)
        )


def body_applicable(rule: Rule, state: DerivationState) -> bool:
    """Every antecedent element holds: X l proved, !X l refuted, plain l believed."""
    for e in rule.body:
        if e.negated:
            if (e.mode, e.literal) not in state.minus:
                return False
        else:
            if (e.mode, e.literal) not in state.plus:
                return False
    return True


def body_discarded(rule: Rule, state: DerivationState) -> bool:
    """Some antecedent element is constructively refuted (not the negation of applicable)."""
    for e in rule.body:
        if e.negated:
            if (e.mode, e.literal) in state.plus:
                return True
        else:
            if (e.mode, e.literal) in state.minus:
                return True
    return False


def conv_applicable(rule: Rule, mode: Mode, state: DerivationState) -> bool:
    """Belief rule usable for `mode`: non-empty all-plain body, each literal proved in `mode`."""
    if rule.kind is not RuleKind.B or not rule.body:
        return False
    for e in rule.body:
        if not e.is_plain:
            return False
        if (mode, e.literal) not in state.plus:
            return False
    return True


def conv_discarded(rule: Rule, mode: Mode, state: DerivationState) -> bool:
    if rule.kind is not RuleKind.B or not rule.body:
        return True
    if any(not e.is_plain for e in rule.body):
        return True
    return any((mode, e.literal) in state.minus for e in rule.body if e.is_plain)


def _prefix(rule: Rule, index: int) -> tuple[Literal, ...]:
    if not 1 <= index <= len(rule.head):
        raise IndexError(f"chain index {index} out of range for rule {rule.label}")
    return rule.head.items[: index - 1]


def applicable(rule: Rule, mode: Mode, index: int, state: DerivationState) -> bool:
    """Constructive firing condition at a chain position, per conclusion mode.

    For O, every earlier chain element must be a violated obligation; for
    G/I/SI each earlier element must be refuted in the same mode and (for
    I/SI) its complement established by a conflicting stronger mode.  G has
    no conflicting mode, so only the same-mode refutation is required.
    """
    prefix = _prefix(rule, index)
    if mode is Mode.B:
        return rule.kind is RuleKind.B and body_applicable(rule, state)
    if mode is Mode.O:
        if rule.kind is RuleKind.O and body_applicable(rule, state):
            if all(
                (Mode.O, c) in state.plus and (Mode.B, c) in state.minus for c in prefix
            ):
                return True
        return conv_applicable(rule, mode, state)
    if mode is Mode.D:
        if rule.kind is RuleKind.U and body_applicable(rule, state):
            return True
        return conv_applicable(rule, mode, state)
    # G, I, SI
    if rule.kind is RuleKind.U and body_applicable(rule, state):
        ok = True
        for c in prefix:
            if (mode, c) not in state.minus:
                ok = False
                break
            sources = conflict_sources(mode)
            if sources and not any((s, c.complement()) in state.plus for s in sources):
                ok = False
                break
        if ok:
            return True
    return conv_applicable(rule, mode, state)


def discarded(rule: Rule, mode: Mode, index: int, state: DerivationState) -> bool:
    """Strong negation of `applicable`, evaluated constructively."""
    prefix = _prefix(rule, index)
    if mode is Mode.B:
        return rule.kind is not RuleKind.B or body_discarded(rule, state)
    if mode is Mode.O:
        body_side = rule.kind is not RuleKind.O or body_discarded(rule, state)
        if not body_side:
            body_side = any(
                (Mode.O, c) in state.minus or (Mode.B, c) in state.plus for c in prefix
            )
        return body_side and conv_discarded(rule, mode, state)
    if mode is Mode.D:
        body_side = rule.kind is not RuleKind.U or body_discarded(rule, state)
        return body_side and conv_discarded(rule, mode, state)
    # G, I, SI
    body_side = rule.kind is not RuleKind.U or body_discarded(rule, state)
    if not body_side:
        sources = conflict_sources(mode)
        for c in prefix:
            if (mode, c) in state.plus:
                body_side = True
                break
            if sources and all((s, c.complement()) in state.minus for s in sources):
                body_side = True
                break
    return body_side and conv_discarded(rule, mode, state)


class _Index:
    """Static lookups over the original theory; chains never change here."""

    def __init__(self, theory: Theory):
        self.theory = theory
        self.containing: dict[Literal, list[tuple[Rule, int]]] = {}
        for r in theory.rules:
            for i, lit in enumerate(r.head, start=1):
                self.containing.setdefault(lit, []).append((r, i))
        self.sup = {(a, b) for a, b in theory.superiority}
        self.fact_plain: set[Literal] = set()
        self.fact_modal: set[tuple[Mode, Literal]] = set()
        self.fact_negmodal: set[tuple[Mode, Literal]] = set()
        for f in theory.facts:
            if f.is_plain:
                self.fact_plain.add(f.literal)
            elif f.negated:
                self.fact_negmodal.add((f.mode, f.literal))
            else:
                self.fact_modal.add((f.mode, f.literal))

    def rules_with(self, lit: Literal) -> list[tuple[Rule, int]]:
        return self.containing.get(lit, [])

    def beats(self, a: Rule, b: Rule) -> bool:
        return (a.label, b.label) in self.sup

    def fact_holds(self, mode: Mode, lit: Literal) -> bool:
        if mode is Mode.B:
            return lit in self.fact_plain
        return (mode, lit) in self.fact_modal

    def fact_negated(self, mode: Mode, lit: Literal) -> bool:
        return (mode, lit) in self.fact_negmodal


def _attack_modes(mode: Mode) -> tuple[Mode, ...]:
    return (mode,) + conflict_sources(mode)


def _counterattacked(
    idx: _Index, q: Literal, s: Rule, black: Mode, state: DerivationState
) -> bool:
    """Some rule for q defeats attacker s seen as mode `black`.

    Defeat by superiority requires the counterattacker to be applicable for
    the attack mode itself (directly or through conversion); rules fighting
    in different modes do not compare.  A counterattacker applicable for a
    mode that conflicts with the attack mode defeats outright.
    """
    for t, k in idx.rules_with(q):
        if idx.beats(t, s) and applicable(t, black, k, state):
            return True
        for diamond, weaker in CONFLICT:
            if weaker is black and applicable(t, diamond, k, state):
                return True
    return False


def _holds_plus(idx: _Index, mode: Mode, q: Literal, state: DerivationState) -> bool:
    if idx.fact_holds(mode, q):
        return True
    if mode is Mode.D:
        if idx.fact_negated(Mode.D, q):
            return False
        for r, i in idx.rules_with(q):
            if not applicable(r, Mode.D, i, state):
                continue
            if all(
                discarded(s, Mode.D, j, state) or not idx.beats(s, r)
                for s, j in idx.rules_with(q.complement())
            ):
                return True
        return False
    if idx.fact_negated(mode, q):
        return False
    for black in _attack_modes(mode):
        if idx.fact_holds(black, q.complement()):
            return False
    if not any(applicable(r, mode, i, state) for r, i in idx.rules_with(q)):
        return False
    for s, j in idx.rules_with(q.complement()):
        for black in _attack_modes(mode):
            if discarded(s, black, j, state):
                continue
            if not _counterattacked(idx, q, s, black, state):
                return False
    return True


def _undefended(idx: _Index, q: Literal, s: Rule, black: Mode, state: DerivationState) -> bool:
    """No rule for q repels attacker s (strong-negation dual of _counterattacked)."""
    for t, k in idx.rules_with(q):
        if idx.beats(t, s) and not discarded(t, black, k, state):
            return False
        for diamond, weaker in CONFLICT:
            if weaker is black and not discarded(t, diamond, k, state):
                return False
    return True


def _holds_minus(idx: _Index, mode: Mode, q: Literal, state: DerivationState) -> bool:
    if idx.fact_holds(mode, q):
        return False
    if mode is Mode.D:
        if idx.fact_negated(Mode.D, q):
            return True
        for r, i in idx.rules_with(q):
            if discarded(r, Mode.D, i, state):
                continue
            if not any(
                applicable(s, Mode.D, j, state) and idx.beats(s, r)
                for s, j in idx.rules_with(q.complement())
            ):
                return False
        return True
    if idx.fact_negated(mode, q):
        return True
    if any(idx.fact_holds(black, q.complement()) for black in _attack_modes(mode)):
        return True
    if all(discarded(r, mode, i, state) for r, i in idx.rules_with(q)):
        return True
    for s, j in idx.rules_with(q.complement()):
        for black in _attack_modes(mode):
            if applicable(s, black, j, state) and _undefended(idx, q, s, black, state):
                return True
    return False


def holds_plus(mode: Mode, q: Literal, theory: Theory, state: DerivationState) -> bool:
    """Provability clause for +mode q against the current state."""
    return _holds_plus(_Index(theory), mode, q, state)


def holds_minus(mode: Mode, q: Literal, theory: Theory, state: DerivationState) -> bool:
    """Refutability clause for -mode q against the current state."""
    return _holds_minus(_Index(theory), mode, q, state)


def compute_extension_reference(
    theory: Theory, scan_order: Optional[random.Random] = None
) -> Extension:
    """Least fixpoint of the proof conditions over the modal Herbrand base.

    `scan_order` shuffles the scan for confluence testing; the result is
    order-independent because the conditions are monotone in the state.
    """
    report = check_consistency(theory)
    if not report.ok:
        warnings.warn(
            "inconsistent theory; extension is best-effort: "
            + "; ".join(str(v) for v in report.violations),
            stacklevel=2,
        )
    herbrand = herbrand_literals(theory)
    idx = _Index(theory)
    state = DerivationState()
    pairs = [(m, l) for m in Mode for l in sorted(herbrand)]
    if scan_order is not None:
        scan_order.shuffle(pairs)
    changed = True
    while changed:
        changed = False
        for mode, lit in pairs:
            if (mode, lit) not in state.plus and _holds_plus(idx, mode, lit, state):
                state.plus.add((mode, lit))
                changed = True
            if (mode, lit) not in state.minus and _holds_minus(idx, mode, lit, state):
                state.minus.add((mode, lit))
                changed = True
    return Extension.from_state(herbrand, state)
