"""Core types: chain algebra, complements, size, Herbrand base, consistency."""

import pytest
from hypothesis import given, strategies as st

import outcomedl as odl
from outcomedl.core import (
    BodyElement,
    ConsistencyReport,
    Literal,
    MalformedChainError,
    Mode,
    OutcomeChain,
    Rule,
    RuleKind,
    Theory,
    check_consistency,
    complement,
    complement_set,
    herbrand_base,
    normalize_chain,
    remove,
    theory_size,
    truncate,
)

L = lambda s: Literal(s.lstrip("~"), not s.startswith("~"))

atoms = st.text(alphabet="abcxyz_019", min_size=1, max_size=6).filter(lambda s: s)
literals = st.builds(Literal, atoms, st.booleans())


class TestComplement:
    def test_positive(self):
        assert complement(L("p")) == L("~p")

    def test_negative(self):
        assert complement(L("~p")) == L("p")

    @given(literals)
    def test_involution(self, lit):
        assert complement(complement(lit)) == lit


class TestComplementSet:
    def test_desire(self):
        e = BodyElement(Mode.D, L("m"))
        assert complement_set(e) == frozenset({BodyElement(Mode.D, L("m"), negated=True)})

    def test_obligation(self):
        e = BodyElement(Mode.O, L("m"))
        assert complement_set(e) == frozenset(
            {BodyElement(Mode.O, L("m"), negated=True), BodyElement(Mode.O, L("~m"))}
        )

    def test_negated_modal(self):
        e = BodyElement(Mode.I, L("m"), negated=True)
        assert complement_set(e) == frozenset({BodyElement(Mode.I, L("m"))})

    def test_plain(self):
        assert complement_set(BodyElement.plain(L("m"))) == frozenset(
            {BodyElement.plain(L("~m"))}
        )

    def test_negated_desire_maps_back(self):
        e = BodyElement(Mode.D, L("m"), negated=True)
        assert complement_set(e) == frozenset({BodyElement(Mode.D, L("m"))})


class TestChains:
    def test_normalize_already_normal(self):
        c = normalize_chain([L("a"), L("b"), L("c")])
        assert c.items == (L("a"), L("b"), L("c"))

    def test_normalize_contraction_keeps_leftmost(self):
        c = normalize_chain([L("a"), L("b"), L("a")])
        assert c.items == (L("a"), L("b"))

    def test_normalize_singleton(self):
        assert normalize_chain([L("a")]).items == (L("a"),)

    def test_normalize_empty_rejected(self):
        with pytest.raises(MalformedChainError):
            normalize_chain([])

    @given(st.lists(literals, min_size=1, max_size=8))
    def test_normalize_idempotent(self, items):
        once = normalize_chain(items)
        assert normalize_chain(once.items) == once

    def test_truncate_middle(self):
        c = normalize_chain([L("b1"), L("b2"), L("b3"), L("b4")])
        assert truncate(c, L("b2")).items == (L("b1"), L("b2"))

    def test_truncate_head_singleton(self):
        c = normalize_chain([L("b1")])
        assert truncate(c, L("b1")).items == (L("b1"),)

    def test_truncate_absent_is_noop(self):
        c = normalize_chain([L("b1"), L("b2")])
        assert truncate(c, L("x")) is c

    def test_remove_middle(self):
        c = normalize_chain([L("b1"), L("b2"), L("b3"), L("b4")])
        assert remove(c, L("b2")).items == (L("b1"), L("b3"), L("b4"))

    def test_remove_last_element_empties(self):
        assert remove(normalize_chain([L("b1")]), L("b1")) is None

    def test_remove_absent_is_noop(self):
        c = normalize_chain([L("b1"), L("b2")])
        assert remove(c, L("x")) is c

    @given(st.lists(literals, min_size=1, max_size=8), literals)
    def test_truncate_is_prefix(self, items, lit):
        c = normalize_chain(items)
        t = truncate(c, lit)
        assert c.items[: len(t)] == t.items

    @given(st.lists(literals, min_size=1, max_size=8), literals)
    def test_remove_is_order_preserving_subsequence(self, items, lit):
        c = normalize_chain(items)
        r = remove(c, lit)
        rest = () if r is None else r.items
        assert all(x != lit for x in rest)
        it = iter(c.items)
        assert all(x in it for x in rest)

    @given(st.lists(literals, min_size=1, max_size=8), literals)
    def test_remove_after_truncate_drops_tail(self, items, lit):
        c = normalize_chain(items)
        r = remove(truncate(c, lit), lit)
        rest = () if r is None else r.items
        if lit in c:
            assert rest == c.items[: c.index(lit) - 1]


def _rule(label, kind, body, head):
    return Rule(label, kind, frozenset(body), normalize_chain(head))


class TestTheorySize:
    def test_worked_example(self):
        theory = Theory(
            facts=frozenset({BodyElement.plain(L("a")), BodyElement(Mode.O, L("b"))}),
            rules=(
                _rule("r1", RuleKind.O, [BodyElement.plain(L("a"))], [L("c")]),
                _rule(
                    "r2",
                    RuleKind.B,
                    [BodyElement.plain(L("a")), BodyElement(Mode.O, L("b"))],
                    [L("d")],
                ),
            ),
        )
        assert theory_size(theory) == 9

    def test_empty(self):
        assert theory_size(Theory()) == 0

    def test_single_fact(self):
        assert theory_size(Theory(facts=frozenset({BodyElement.plain(L("p"))}))) == 1


class TestHerbrand:
    def test_single_fact(self):
        lits, modal = herbrand_base(Theory(facts=frozenset({BodyElement.plain(L("p"))})))
        assert lits == frozenset({L("p"), L("~p")})
        assert len(modal) == 12

    def test_empty(self):
        lits, modal = herbrand_base(Theory())
        assert lits == frozenset() and modal == frozenset()

    def test_example3_counts(self):
        lits, modal = herbrand_base(odl.load_fixture("example3"))
        assert len(lits) == 12
        assert len(modal) == 72


class TestConsistency:
    def test_complementary_plain_facts(self):
        rep = check_consistency(
            Theory(facts=frozenset({BodyElement.plain(L("p")), BodyElement.plain(L("~p"))}))
        )
        assert not rep.ok
        assert any(v.kind == "complementary-facts" for v in rep.violations)

    def test_superiority_cycle(self):
        theory = Theory(
            rules=(
                _rule("r", RuleKind.B, [], [L("p")]),
                _rule("s", RuleKind.B, [], [L("q")]),
            ),
            superiority=frozenset({("r", "s"), ("s", "r")}),
        )
        rep = check_consistency(theory)
        assert any(v.kind == "superiority-cycle" for v in rep.violations)

    def test_opposite_desire_facts_allowed(self):
        rep = check_consistency(
            Theory(facts=frozenset({BodyElement(Mode.D, L("p")), BodyElement(Mode.D, L("~p"))}))
        )
        assert rep.ok

    def test_opposite_obligation_facts_rejected(self):
        rep = check_consistency(
            Theory(facts=frozenset({BodyElement(Mode.O, L("p")), BodyElement(Mode.O, L("~p"))}))
        )
        assert not rep.ok

    def test_negated_modal_pair_rejected(self):
        rep = check_consistency(
            Theory(
                facts=frozenset(
                    {BodyElement(Mode.I, L("p")), BodyElement(Mode.I, L("p"), negated=True)}
                )
            )
        )
        assert not rep.ok

    def test_all_bundled_fixtures_consistent(self):
        for name in odl.fixture_names():
            rep = check_consistency(odl.load_fixture(name))
            assert rep.ok, (name, [str(v) for v in rep.violations])


class TestValidation:
    def test_belief_rule_single_head(self):
        with pytest.raises(ValueError):
            _rule("r", RuleKind.B, [], [L("a"), L("b")])

    def test_duplicate_labels(self):
        with pytest.raises(ValueError):
            Theory(
                rules=(
                    _rule("r", RuleKind.B, [], [L("a")]),
                    _rule("r", RuleKind.B, [], [L("b")]),
                )
            )

    def test_unknown_superiority_label(self):
        with pytest.raises(ValueError):
            Theory(
                rules=(_rule("r", RuleKind.B, [], [L("a")]),),
                superiority=frozenset({("r", "ghost")}),
            )

    def test_plain_element_cannot_be_negated(self):
        with pytest.raises(ValueError):
            BodyElement(Mode.B, L("p"), negated=True)
