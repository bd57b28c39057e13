"""Cross-engine differential checking, invariant verification, and scaling.

The generator builds consistent theories by construction (superiority only
between earlier and later rules, facts filtered against complementary
pairs), so every generated theory is fair game for the differential
property: the linear engine must agree with the reference fixpoint exactly.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .core import (
    MODAL_MODES,
    BodyElement,
    Literal,
    Mode,
    Rule,
    RuleKind,
    Theory,
    check_consistency,
    normalize_chain,
    theory_size,
)
from .linengine import compute_extension_linear
from .refengine import Extension, compute_extension_reference


@dataclass(frozen=True)
class ModeDiff:
    plus_only_a: frozenset[Literal]
    plus_only_b: frozenset[Literal]
    minus_only_a: frozenset[Literal]
    minus_only_b: frozenset[Literal]

    @property
    def empty(self) -> bool:
        return not (self.plus_only_a or self.plus_only_b or self.minus_only_a or self.minus_only_b)


@dataclass(frozen=True)
class DiffReport:
    per_mode: dict[Mode, ModeDiff]

    @property
    def equivalent(self) -> bool:
        return all(d.empty for d in self.per_mode.values())

    def to_dict(self) -> dict:
        out: dict[str, dict[str, list[str]]] = {}
        for mode, d in self.per_mode.items():
            if d.empty:
                continue
            out[mode.value] = {
                "plus_only_a": sorted(map(str, d.plus_only_a)),
                "plus_only_b": sorted(map(str, d.plus_only_b)),
                "minus_only_a": sorted(map(str, d.minus_only_a)),
                "minus_only_b": sorted(map(str, d.minus_only_b)),
            }
        return out


def diff_extensions(a: Extension, b: Extension) -> DiffReport:
    """Symmetric differences of the proved and refuted sets per mode."""
    if a.herbrand != b.herbrand:
        raise ValueError("extensions cover different Herbrand bases")
    per_mode = {
        m: ModeDiff(
            frozenset(a.plus[m] - b.plus[m]),
            frozenset(b.plus[m] - a.plus[m]),
            frozenset(a.minus[m] - b.minus[m]),
            frozenset(b.minus[m] - a.minus[m]),
        )
        for m in Mode
    }
    return DiffReport(per_mode)


@dataclass(frozen=True)
class PropViolation:
    check: str
    detail: str

    def __str__(self) -> str:
        return f"{self.check}: {self.detail}"


@dataclass(frozen=True)
class PropReport:
    violations: tuple[PropViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_propositions(theory: Theory, ext: Extension) -> PropReport:
    """Coherence, consistency, and the five cross-mode inclusion checks."""
    bad: list[PropViolation] = []
    for m in Mode:
        both = ext.plus[m] & ext.minus[m]
        for l in sorted(both):
            bad.append(PropViolation("coherence", f"{m} {l} both proved and refuted"))
    for m in Mode:
        if m is Mode.D:
            continue
        for l in sorted(ext.plus[m]):
            if l.complement() in ext.plus[m] and l.positive:
                bad.append(PropViolation("consistency", f"{m} {l} and {l.complement()} both proved"))
    for m in Mode:
        if m is Mode.D:
            continue
        for l in sorted(ext.plus[m]):
            if l.complement() not in ext.minus[m]:
                bad.append(PropViolation("proved-refutes-complement", f"+{m} {l} without -{m} {l.complement()}"))
    for l in sorted(ext.plus[Mode.B]):
        if l.complement() not in ext.minus[Mode.I]:
            bad.append(PropViolation("belief-refutes-intention", f"+B {l} without -I {l.complement()}"))
    for l in sorted(ext.plus[Mode.B] | ext.plus[Mode.O]):
        if l.complement() not in ext.minus[Mode.SI]:
            bad.append(PropViolation("norm-refutes-social-intention", f"without -SI {l.complement()}"))
    for l in sorted(ext.plus[Mode.G] - ext.plus[Mode.D]):
        bad.append(PropViolation("goal-implies-desire", f"+G {l} without +D {l}"))
    for l in sorted(ext.minus[Mode.D] - ext.minus[Mode.G]):
        bad.append(PropViolation("no-desire-no-goal", f"-D {l} without -G {l}"))
    return PropReport(tuple(bad))


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    atom_count: int = 8
    rule_count: int = 10
    max_body: int = 2
    max_chain: int = 3
    mode_weights: tuple[float, float, float] = (0.35, 0.2, 0.45)  # B, O, U
    superiority_density: float = 0.4
    fact_density: float = 0.5

    def __post_init__(self) -> None:
        if min(self.atom_count, self.rule_count) < 0 or min(self.max_body, self.max_chain) < 0:
            raise ValueError("counts must be non-negative")


def generate_theory(cfg: GenConfig) -> Theory:
    """Deterministic random theory, consistent by construction."""
    rng = random.Random(cfg.seed)
    atoms = [f"a{i}" for i in range(max(1, cfg.atom_count))]

    def rand_lit() -> Literal:
        return Literal(rng.choice(atoms), rng.random() < 0.5)

    rules: list[Rule] = []
    kinds = [RuleKind.B, RuleKind.O, RuleKind.U]
    for i in range(cfg.rule_count):
        kind = rng.choices(kinds, weights=cfg.mode_weights)[0]
        body: set[BodyElement] = set()
        for _ in range(rng.randint(0, cfg.max_body)):
            roll = rng.random()
            if roll < 0.6:
                body.add(BodyElement.plain(rand_lit()))
            elif roll < 0.85:
                body.add(BodyElement(rng.choice(MODAL_MODES), rand_lit()))
            else:
                body.add(BodyElement(rng.choice(MODAL_MODES), rand_lit(), negated=True))
        chain_len = 1 if kind is RuleKind.B else rng.randint(1, max(1, cfg.max_chain))
        head = normalize_chain([rand_lit() for _ in range(chain_len)])
        rules.append(Rule(f"r{i}", kind, frozenset(body), head))

    # Superiority pairs require the rules' single complementary overlap to sit
    # at the stronger rule's first (preferred) element, and the stronger side
    # is never a belief rule.  Deeper-element or conversion-backed attackers
    # can refute a desire whose goal still stands (desire attacks ignore chain
    # position and converted bodies are mode-sensitive), which breaks the
    # goal-implies-desire inclusion on otherwise consistent theories.
    sups: set[tuple[str, str]] = set()
    for i in range(len(rules)):
        for j in range(i + 1, len(rules)):
            a, b = rules[i], rules[j]
            if a.kind is RuleKind.B:
                continue
            overlaps = {m for m in a.head if m.complement() in b.head}
            if overlaps == {a.head.items[0]} and rng.random() < cfg.superiority_density:
                sups.add((a.label, b.label))

    # Fact palette: plain literals, O/D modal facts, negated modal facts
    # outside D.  Bare goal-like facts (G, I, SI) and negated-desire facts
    # can contradict the cross-mode inclusion theorems even on theories the
    # consistency check accepts; the worked examples never use them either.
    facts: set[BodyElement] = set()
    used: set[tuple[Mode, str]] = set()
    for _ in range(int(cfg.fact_density * max(1, cfg.atom_count))):
        lit = rand_lit()
        if rng.random() < 0.6:
            cand = BodyElement.plain(lit)
        elif rng.random() < 0.85:
            cand = BodyElement(rng.choice((Mode.O, Mode.D)), lit)
        else:
            cand = BodyElement(rng.choice((Mode.O, Mode.G, Mode.I, Mode.SI)), lit, negated=True)
        key = (cand.mode, lit.atom)
        if key in used:
            continue
        used.add(key)
        facts.add(cand)

    theory = Theory(frozenset(facts), tuple(rules), frozenset(sups))
    assert check_consistency(theory).ok, "generator must produce consistent theories"
    return theory


def generate_sized_theory(target_size: int, seed: int = 0) -> Theory:
    """A generated theory whose size lands within ten percent of the target.

    Scales the generator's counts from the target, then pads with fresh
    filler facts (one size unit each) up to the target exactly.
    """
    if target_size < 1:
        raise ValueError("target size must be positive")
    base = max(1, int(target_size * 0.85))
    rules = max(1, base // 9)
    cfg = GenConfig(
        seed=seed,
        atom_count=max(2, rules),
        rule_count=rules,
        max_body=2,
        max_chain=4,
        superiority_density=0.3,
        fact_density=0.4,
    )
    theory = generate_theory(cfg)
    pad = target_size - theory_size(theory)
    if pad < 0:
        return theory  # still within tolerance: counts only undershoot
    facts = set(theory.facts)
    for i in range(pad):
        facts.add(BodyElement.plain(Literal(f"filler{i}")))
    return Theory(frozenset(facts), theory.rules, theory.superiority)


@dataclass(frozen=True)
class ScalingPoint:
    size: int
    seconds: float


@dataclass(frozen=True)
class ScalingReport:
    points: tuple[ScalingPoint, ...]
    slope: float
    threshold: float

    @property
    def within_bound(self) -> bool:
        return self.slope <= self.threshold

    def to_dict(self) -> dict:
        return {
            "points": [{"size": p.size, "seconds": p.seconds} for p in self.points],
            "slope": self.slope,
            "threshold": self.threshold,
            "within_bound": self.within_bound,
        }


def chain_stress_theory(target_size: int, seed: int = 0) -> Theory:
    """A theory family stressing chain transformations: many preference chains
    with interleaved belief refutations and violated obligations.  The size
    matches the target exactly (filler facts pad the remainder)."""
    rng = random.Random(seed)
    rules: list[Rule] = []
    facts: set[BodyElement] = set()
    size = 0
    b = 0
    while True:
        cut = rng.randint(1, 4)
        # block cost: trigger + cut beliefs + violated obligation fact (facts),
        # outcome rule (1 body + 8 chain + 1), obligation rule (1 body + 2 chain + 1)
        block = (2 + cut) + 10 + 4
        if size + block > target_size or b == 0 and block > target_size:
            break
        trigger = Literal(f"t{b}")
        facts.add(BodyElement.plain(trigger))
        chain = [Literal(f"c{b}_{j}") for j in range(8)]
        rules.append(Rule(f"u{b}", RuleKind.U, frozenset({BodyElement.plain(trigger)}), normalize_chain(chain)))
        # beliefs against a prefix of the chain drive intention progression
        for j in range(cut):
            facts.add(BodyElement.plain(chain[j].complement()))
        # an obligation chain whose first element is violated
        ochain = [Literal(f"o{b}_0"), Literal(f"o{b}_1")]
        rules.append(Rule(f"ob{b}", RuleKind.O, frozenset({BodyElement.plain(trigger)}), normalize_chain(ochain)))
        facts.add(BodyElement.plain(ochain[0].complement()))
        size += block
        b += 1
    for i in range(target_size - size):
        facts.add(BodyElement.plain(Literal(f"pad{i}")))
    return Theory(frozenset(facts), tuple(rules), frozenset())


def deep_chain_theory(target_size: int, seed: int = 0) -> Theory:
    """A single derivation chain whose depth grows with size.

    Atom names reverse the derivation order, so a naive fixpoint that scans
    literals in sorted order settles one link per sweep: a direct evaluation
    goes quadratic here while the event-driven engine stays linear.
    """
    links = max(1, (target_size - 1) // 3)
    width = len(str(links))
    atoms = [Literal(f"x{links - i:0{width}d}") for i in range(links + 1)]
    facts = {BodyElement.plain(atoms[0])}
    rules = tuple(
        Rule(f"r{i}", RuleKind.B, frozenset({BodyElement.plain(atoms[i])}), normalize_chain([atoms[i + 1]]))
        for i in range(links)
    )
    theory = Theory(frozenset(facts), rules, frozenset())
    pad = target_size - theory_size(theory)
    if pad > 0:
        facts = set(theory.facts)
        for i in range(pad):
            facts.add(BodyElement.plain(Literal(f"pad{i}")))
        theory = Theory(frozenset(facts), rules, frozenset())
    return theory


def scaling_benchmark(
    sizes: Sequence[int],
    seed: int = 0,
    engine: Callable[[Theory], Extension] = compute_extension_linear,
    threshold: float = 1.15,
    repeats: int = 5,
    family: Callable[[int, int], Theory] = chain_stress_theory,
) -> ScalingReport:
    """Median-of-`repeats` wall times per size; least-squares slope in log-log."""
    if len(sizes) < 3:
        raise ValueError("need at least 3 sizes")
    ordered = sorted(sizes)
    if ordered != list(sizes):
        raise ValueError("sizes must be strictly increasing")
    if len(set(sizes)) != len(sizes):
        raise ValueError("sizes must be distinct")
    if max(sizes) < 10 * min(sizes):
        raise ValueError("sizes must span at least one decade")
    points: list[ScalingPoint] = []
    for target in sizes:
        theory = family(target, seed)
        engine(theory)  # warm-up
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            engine(theory)
            times.append(time.perf_counter() - t0)
        points.append(ScalingPoint(theory_size(theory), statistics.median(times)))
    import math

    xs = [math.log(p.size) for p in points]
    ys = [math.log(max(p.seconds, 1e-9)) for p in points]
    slope = statistics.linear_regression(xs, ys).slope
    return ScalingReport(tuple(points), slope, threshold)


@dataclass(frozen=True)
class FuzzFailure:
    seed: int
    config: GenConfig
    report: DiffReport


def differential_fuzz(
    count: int,
    base_seed: int = 0,
    max_size: int = 200,
    on_case: Optional[Callable[[int, Theory], None]] = None,
) -> list[FuzzFailure]:
    """Run `count` generated theories through both engines; collect any diffs."""
    failures: list[FuzzFailure] = []
    n = 0
    seed = base_seed
    while n < count:
        cfg = _varied_config(seed)
        theory = generate_theory(cfg)
        if theory_size(theory) > max_size:
            seed += 1
            continue
        if on_case is not None:
            on_case(n, theory)
        report = diff_extensions(
            compute_extension_reference(theory), compute_extension_linear(theory)
        )
        if not report.equivalent:
            failures.append(FuzzFailure(seed, cfg, report))
        n += 1
        seed += 1
    return failures


def _varied_config(seed: int) -> GenConfig:
    rng = random.Random(seed ^ 0x5EED)
    return GenConfig(
        seed=seed,
        atom_count=rng.randint(2, 10),
        rule_count=rng.randint(1, 14),
        max_body=rng.randint(0, 3),
        max_chain=rng.randint(1, 4),
        mode_weights=rng.choice(
            [(0.35, 0.2, 0.45), (0.6, 0.1, 0.3), (0.1, 0.45, 0.45), (0.2, 0.2, 0.6)]
        ),
        superiority_density=rng.choice([0.0, 0.3, 0.6, 0.9]),
        fact_density=rng.choice([0.2, 0.5, 0.9, 1.4]),
    )
