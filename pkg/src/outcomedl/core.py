"""Core types for the outcome logic: literals, modes, rules, theories.

The language has six conclusion modes (belief, obligation, desire, goal,
intention, social intention), three rule kinds (belief, obligation, outcome),
and rule heads that are preference chains: each element is the next
acceptable alternative when its predecessor fails.  All values here are
immutable; engines build their own mutable state on top.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence


class Mode(Enum):
    """Conclusion modes. B is the empty operator: a plain literal is a B-conclusion."""

    B = "B"
    O = "O"
    D = "D"
    G = "G"
    I = "I"
    SI = "SI"

    # members are singletons; identity hashing keeps hot set lookups cheap
    __hash__ = object.__hash__

    def __str__(self) -> str:
        return self.value


#: Modes that may appear written in front of a literal (B is written bare).
MODAL_MODES = (Mode.O, Mode.D, Mode.G, Mode.I, Mode.SI)

#: (stronger, weaker): conclusions of the first mode override the second.
#: Realistic agents: B beats I and SI.  Social agents: O beats SI.
CONFLICT = frozenset({(Mode.B, Mode.I), (Mode.B, Mode.SI), (Mode.O, Mode.SI)})

#: Belief rules may be reused to conclude in any other mode.
CONVERT = frozenset((Mode.B, x) for x in Mode if x is not Mode.B)


@lru_cache(maxsize=None)
def conflict_sources(mode: Mode) -> tuple[Mode, ...]:
    """Modes whose conclusions override `mode` (empty for B, O, D, G)."""
    return tuple(s for (s, w) in sorted(CONFLICT, key=lambda p: p[0].value) if w is mode)


class RuleKind(Enum):
    """Syntactic rule kind: belief, obligation, or outcome."""

    B = "B"
    O = "O"
    U = "U"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True, slots=True)
class Literal:
    """A propositional atom or its negation."""

    atom: str
    positive: bool = True
    _hash: int = field(init=False, repr=False, compare=False, default=0)
    _comp: "Literal | None" = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        if not self.atom or not all(c.isalnum() or c == "_" for c in self.atom):
            raise ValueError(f"bad atom name: {self.atom!r}")
        object.__setattr__(self, "_hash", hash((self.atom, self.positive)))

    def complement(self) -> "Literal":
        cached = self._comp
        if cached is None:
            cached = Literal(self.atom, not self.positive)
            object.__setattr__(self, "_comp", cached)
            object.__setattr__(cached, "_comp", self)
        return cached

    def __str__(self) -> str:
        return self.atom if self.positive else "~" + self.atom


def _literal_hash(self: Literal) -> int:
    return self._hash


Literal.__hash__ = _literal_hash  # type: ignore[assignment]


def complement(lit: Literal) -> Literal:
    """The complement ~l; an involution."""
    return lit.complement()


@dataclass(frozen=True, slots=True)
class BodyElement:
    """One antecedent element: a literal, a modal literal, or a negated modal literal.

    `negated` is the outer negation of the whole modal literal (written !X l),
    satisfied when l is demonstrably not provable in mode X.  Plain literals
    carry mode B and are never negated.
    """

    mode: Mode
    literal: Literal
    negated: bool = False

    def __post_init__(self) -> None:
        if self.mode is Mode.B and self.negated:
            raise ValueError("plain (belief) elements cannot be negated: B is the empty operator")

    @staticmethod
    def plain(lit: Literal) -> "BodyElement":
        return BodyElement(Mode.B, lit)

    @staticmethod
    def modal(mode: Mode, lit: Literal, negated: bool = False) -> "BodyElement":
        return BodyElement(mode, lit, negated)

    @property
    def is_plain(self) -> bool:
        return self.mode is Mode.B

    def __lt__(self, other: "BodyElement") -> bool:
        if not isinstance(other, BodyElement):
            return NotImplemented
        return (self.mode.value, self.literal, self.negated) < (
            other.mode.value,
            other.literal,
            other.negated,
        )

    def __str__(self) -> str:
        if self.is_plain:
            return str(self.literal)
        bang = "!" if self.negated else ""
        return f"{bang}{self.mode.value} {self.literal}"


@lru_cache(maxsize=None)
def complement_set(e: BodyElement) -> frozenset[BodyElement]:
    """Elements whose establishment contradicts e.

    D m     -> {!D m}           (opposite desires may coexist)
    X m     -> {!X m, X ~m}     for X in {O, G, I, SI}
    !X m    -> {X m}
    plain m -> {~m}
    """
    if e.negated:
        return frozenset({BodyElement(e.mode, e.literal)})
    if e.mode is Mode.B:
        return frozenset({BodyElement.plain(e.literal.complement())})
    if e.mode is Mode.D:
        return frozenset({BodyElement(Mode.D, e.literal, negated=True)})
    return frozenset(
        {
            BodyElement(e.mode, e.literal, negated=True),
            BodyElement(e.mode, e.literal.complement()),
        }
    )


class MalformedChainError(ValueError):
    """Raised when a chain would be empty at construction time."""


@dataclass(frozen=True)
class OutcomeChain:
    """An ordered preference chain of distinct literals (the rule head)."""

    items: tuple[Literal, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise MalformedChainError("outcome chain must be non-empty")
        if len(set(self.items)) != len(self.items):
            raise ValueError("outcome chain elements must be distinct; normalize first")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, lit: Literal) -> bool:
        return lit in self.items

    def index(self, lit: Literal) -> int:
        """1-based position of lit."""
        return self.items.index(lit) + 1

    def truncate(self, lit: Literal) -> "OutcomeChain":
        """Drop every element strictly after lit; no-op when lit is absent."""
        if lit not in self.items:
            return self
        return OutcomeChain(self.items[: self.items.index(lit) + 1])

    def remove(self, lit: Literal) -> Optional["OutcomeChain"]:
        """Delete lit, keeping order; None marks a now-headless rule."""
        if lit not in self.items:
            return self
        rest = tuple(x for x in self.items if x != lit)
        return OutcomeChain(rest) if rest else None

    def __str__(self) -> str:
        return " (+) ".join(str(x) for x in self.items)


def normalize_chain(items: Sequence[Literal]) -> OutcomeChain:
    """Build a chain, dropping later duplicates (contraction keeps the leftmost)."""
    if not items:
        raise MalformedChainError("outcome chain must be non-empty")
    seen: list[Literal] = []
    for lit in items:
        if lit not in seen:
            seen.append(lit)
    return OutcomeChain(tuple(seen))


def truncate(chain: OutcomeChain, lit: Literal) -> OutcomeChain:
    return chain.truncate(lit)


def remove(chain: OutcomeChain, lit: Literal) -> Optional[OutcomeChain]:
    return chain.remove(lit)


@dataclass(frozen=True)
class Rule:
    """A defeasible rule: label, kind, antecedent set, preference-chain head."""

    label: str
    kind: RuleKind
    body: frozenset[BodyElement]
    head: OutcomeChain

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("rule label must be non-empty")
        if self.kind is RuleKind.B and len(self.head) != 1:
            raise ValueError(f"belief rule {self.label} must have a single-literal head")

    def __str__(self) -> str:
        arrow = {RuleKind.B: "=>", RuleKind.O: "=O>", RuleKind.U: "=U>"}[self.kind]
        body = ", ".join(str(e) for e in sorted(self.body)) if self.body else ""
        sep = " " if body else ""
        return f"{self.label}: {body}{sep}{arrow} {self.head}"


@dataclass(frozen=True)
class Theory:
    """Facts, rules, and an (acyclic, label-referenced) superiority relation."""

    facts: frozenset[BodyElement] = frozenset()
    rules: tuple[Rule, ...] = ()
    superiority: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self) -> None:
        labels = [r.label for r in self.rules]
        if len(labels) != len(set(labels)):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise ValueError(f"duplicate rule labels: {dupes}")
        known = set(labels)
        for a, b in self.superiority:
            if a not in known or b not in known:
                raise ValueError(f"superiority refers to unknown rule: ({a}, {b})")

    def rule(self, label: str) -> Rule:
        for r in self.rules:
            if r.label == label:
                return r
        raise KeyError(label)

    def superiors_of(self, label: str) -> frozenset[str]:
        return frozenset(a for a, b in self.superiority if b == label)


@dataclass(frozen=True)
class TaggedConclusion:
    """A signed derivation outcome: +/- mode literal."""

    sign: str
    mode: Mode
    literal: Literal

    def __post_init__(self) -> None:
        if self.sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")

    def __str__(self) -> str:
        return f"{self.sign}{self.mode} {self.literal}"


def theory_size(theory: Theory) -> int:
    """Literal occurrences everywhere (a modal literal counts once) plus the rule count."""
    n = len(theory.facts)
    for r in theory.rules:
        n += len(r.body) + len(r.head)
    return n + len(theory.rules)


def herbrand_literals(theory: Theory) -> frozenset[Literal]:
    """Both polarities of every atom occurring anywhere in the theory."""
    atoms: set[str] = set()
    for f in theory.facts:
        atoms.add(f.literal.atom)
    for r in theory.rules:
        for e in r.body:
            atoms.add(e.literal.atom)
        for lit in r.head:
            atoms.add(lit.atom)
    return frozenset(Literal(a, pos) for a in atoms for pos in (True, False))


def herbrand_base(theory: Theory) -> tuple[frozenset[Literal], frozenset[tuple[Mode, Literal]]]:
    """The Herbrand literals and every (mode, literal) pair over them."""
    lits = herbrand_literals(theory)
    modal = frozenset((m, l) for m in Mode for l in lits)
    return lits, modal


@dataclass(frozen=True)
class ConsistencyViolation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class ConsistencyReport:
    violations: tuple[ConsistencyViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


#: Modes for which a fact and the fact of the complement conflict.  The formal
#: condition lists G, I, SI; O is included as well because coherence of
#: obligations (no literal obligatory together with its complement) relies on it.
_OPPOSITE_FACT_MODES = (Mode.O, Mode.G, Mode.I, Mode.SI)


def check_consistency(theory: Theory) -> ConsistencyReport:
    """Flag complementary fact pairs and superiority cycles. Violations are data."""
    violations: list[ConsistencyViolation] = []
    facts = theory.facts
    for f in sorted(facts):
        if f.is_plain:
            if BodyElement.plain(f.literal.complement()) in facts and f.literal.positive:
                violations.append(
                    ConsistencyViolation(
                        "complementary-facts", f"{f.literal} and {f.literal.complement()}"
                    )
                )
        else:
            if BodyElement(f.mode, f.literal, negated=not f.negated) in facts and not f.negated:
                violations.append(
                    ConsistencyViolation(
                        "negated-modal-facts", f"{f} and !{f.mode} {f.literal}"
                    )
                )
            if (
                not f.negated
                and f.mode in _OPPOSITE_FACT_MODES
                and BodyElement(f.mode, f.literal.complement()) in facts
                and f.literal.positive
            ):
                violations.append(
                    ConsistencyViolation(
                        "opposite-modal-facts",
                        f"{f.mode} {f.literal} and {f.mode} {f.literal.complement()}",
                    )
                )
    graph: dict[str, set[str]] = {}
    for a, b in theory.superiority:
        graph.setdefault(a, set()).add(b)
    try:
        graphlib.TopologicalSorter(graph).prepare()
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        violations.append(
            ConsistencyViolation("superiority-cycle", " > ".join(cycle))
        )
    return ConsistencyReport(tuple(violations))
