"""Reference engine: applicability machinery and the proof-condition fixpoint."""

import random

import pytest
from hypothesis import given, settings, strategies as st

import outcomedl as odl
from outcomedl.core import (
    BodyElement,
    Literal,
    Mode,
    Rule,
    RuleKind,
    Theory,
    normalize_chain,
)
from outcomedl.refengine import (
    DerivationState,
    applicable,
    body_applicable,
    body_discarded,
    compute_extension_reference,
    conv_applicable,
    conv_discarded,
    discarded,
    holds_minus,
    holds_plus,
)
from outcomedl.textio import parse_theory

L = lambda s: Literal(s.lstrip("~"), not s.startswith("~"))


def rule(label, kind, body, head):
    return Rule(label, kind, frozenset(body), normalize_chain(head))


def state(plus=(), minus=()):
    return DerivationState(set(plus), set(minus))


class TestBodyApplicability:
    def test_plain_body_needs_belief(self):
        r = rule("r", RuleKind.U, [BodyElement.plain(L("a1"))], [L("b1")])
        assert body_applicable(r, state(plus={(Mode.B, L("a1"))}))
        assert not body_applicable(r, state())

    def test_empty_body_vacuously_applicable(self):
        r = rule("r", RuleKind.U, [], [L("b")])
        assert body_applicable(r, state())
        assert not body_discarded(r, state())

    def test_modal_element(self):
        r = rule("r", RuleKind.B, [BodyElement(Mode.O, L("c"))], [L("d")])
        assert body_applicable(r, state(plus={(Mode.O, L("c"))}))

    def test_discard_by_refuted_belief(self):
        r = rule("r", RuleKind.B, [BodyElement.plain(L("c"))], [L("d")])
        assert body_discarded(r, state(minus={(Mode.B, L("c"))}))

    def test_discard_negated_modal_by_proof(self):
        r = rule("r", RuleKind.B, [BodyElement(Mode.O, L("m"), negated=True)], [L("d")])
        assert body_discarded(r, state(plus={(Mode.O, L("m"))}))

    def test_not_mutually_exclusive_midway(self):
        r = rule("r", RuleKind.B, [BodyElement.plain(L("c"))], [L("d")])
        s = state()
        assert not body_applicable(r, s) and not body_discarded(r, s)


class TestConversion:
    def test_conv_applicable(self):
        r = rule("r2", RuleKind.B, [BodyElement.plain(L("b")), BodyElement.plain(L("c"))], [L("d")])
        s = state(plus={(Mode.O, L("b")), (Mode.O, L("c"))})
        assert conv_applicable(r, Mode.O, s)

    def test_empty_body_never_converts(self):
        r = rule("r", RuleKind.B, [], [L("d")])
        assert not conv_applicable(r, Mode.O, state())
        assert conv_discarded(r, Mode.O, state())

    def test_modal_body_never_converts(self):
        r = rule("r", RuleKind.B, [BodyElement(Mode.O, L("b"))], [L("d")])
        assert not conv_applicable(r, Mode.O, state(plus={(Mode.O, L("b"))}))
        assert conv_discarded(r, Mode.O, state())

    def test_non_belief_rule_conv_discarded(self):
        r = rule("r", RuleKind.O, [BodyElement.plain(L("b"))], [L("d")])
        assert conv_discarded(r, Mode.O, state())

    def test_conv_discarded_by_refuted_body(self):
        r = rule("r", RuleKind.B, [BodyElement.plain(L("b")), BodyElement.plain(L("c"))], [L("d")])
        assert conv_discarded(r, Mode.O, state(minus={(Mode.O, L("c"))}))


class TestPositionalApplicability:
    """Chain positions in Example 3's derivation states."""

    r = rule("r", RuleKind.U, [BodyElement.plain(L("a1"))], [L("b1"), L("b2"), L("b3"), L("b4")])
    base = {(Mode.B, L("a1")), (Mode.B, L("a2")), (Mode.B, L("~b1")), (Mode.O, L("~b2"))}

    def test_intention_applicable_at_two(self):
        s = state(plus=self.base, minus={(Mode.I, L("b1"))})
        assert applicable(self.r, Mode.I, 2, s)

    def test_social_intention_applicable_at_three(self):
        s = state(
            plus=self.base,
            minus={(Mode.SI, L("b1")), (Mode.SI, L("b2")), (Mode.B, L("b1"))},
        )
        assert applicable(self.r, Mode.SI, 3, s)

    def test_goal_discarded_after_first_win(self):
        s = state(plus=self.base | {(Mode.G, L("b1"))})
        assert not applicable(self.r, Mode.G, 2, s)
        assert discarded(self.r, Mode.G, 2, s)

    def test_social_intention_discarded_after_win_at_three(self):
        s = state(plus=self.base | {(Mode.SI, L("b3"))})
        assert discarded(self.r, Mode.SI, 4, s)

    def test_belief_mode_rejects_outcome_rules(self):
        assert discarded(self.r, Mode.B, 1, state(plus=self.base))
        assert not applicable(self.r, Mode.B, 1, state(plus=self.base))

    def test_desire_ignores_position(self):
        s = state(plus=self.base)
        for i in (1, 2, 3, 4):
            assert applicable(self.r, Mode.D, i, s)

    def test_obligation_progression_needs_violation(self):
        r = rule("o", RuleKind.O, [], [L("c1"), L("c2")])
        assert not applicable(r, Mode.O, 2, state(plus={(Mode.O, L("c1"))}))
        assert applicable(
            r, Mode.O, 2, state(plus={(Mode.O, L("c1"))}, minus={(Mode.B, L("c1"))})
        )

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            applicable(self.r, Mode.D, 5, state())


class TestProofConditions:
    def test_sixth_row_social_intention(self):
        t = odl.load_fixture("sixth_row")
        ext = compute_extension_reference(t)
        assert L("q") in ext.plus[Mode.SI]

    def test_rome_goal_via_conversion(self):
        ext = compute_extension_reference(odl.load_fixture("rome"))
        assert L("go_to_Italy") in ext.plus[Mode.G]

    def test_chocolate_desire_via_conversion(self):
        ext = compute_extension_reference(odl.load_fixture("chocolate"))
        assert L("chocolate_box") in ext.plus[Mode.D]

    def test_holds_plus_from_fact(self):
        t = parse_theory("fact O p.")
        assert holds_plus(Mode.O, L("p"), t, state())

    def test_holds_minus_from_negated_fact(self):
        t = parse_theory("fact !G p.")
        assert holds_minus(Mode.G, L("p"), t, state())

    def test_holds_minus_no_rules(self):
        t = parse_theory("fact a.")
        for mode in Mode:
            assert holds_minus(mode, L("zz"), t, state())

    def test_jsick_intentions(self):
        ext = compute_extension_reference(odl.load_fixture("alice_jsick"))
        assert L("visit_John") in ext.minus[Mode.I]
        assert L("visit_parents") in ext.plus[Mode.I]

    def test_home_confinement_splits_intention_and_social(self):
        ext = compute_extension_reference(odl.load_fixture("alice_confined"))
        assert L("visit_John") in ext.plus[Mode.I]
        assert L("visit_John") in ext.minus[Mode.SI]


class TestFixpoint:
    def test_example3_exact(self):
        ext = compute_extension_reference(odl.load_fixture("example3"))
        assert ext.plus[Mode.D] == {L("b1"), L("b2"), L("b3"), L("b4")}
        assert ext.plus[Mode.G] == {L("b1"), L("b4")}
        assert ext.plus[Mode.I] == {L("b2"), L("b4")}
        assert ext.plus[Mode.SI] == {L("b3"), L("b4")}
        assert L("b1") in ext.minus[Mode.I]
        assert {L("b1"), L("b2")} <= ext.minus[Mode.SI]

    def test_cyclic_theory_undecided(self):
        ext = compute_extension_reference(odl.load_fixture("cyclic"))
        assert L("p") in ext.undecided(Mode.B)

    def test_mutual_cycle_undecided(self):
        ext = compute_extension_reference(odl.load_fixture("mutual_cycle"))
        assert L("p") in ext.undecided(Mode.B)
        assert L("q") in ext.undecided(Mode.B)

    def test_scan_order_never_changes_result(self):
        t = odl.load_fixture("appendix_b")
        base = compute_extension_reference(t)
        for seed in range(5):
            assert compute_extension_reference(t, scan_order=random.Random(seed)) == base

    def test_inconsistent_theory_warns(self):
        t = parse_theory("fact p.\nfact ~p.")
        with pytest.warns(UserWarning):
            compute_extension_reference(t)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_monotone_state_growth(self, seed):
        """Partial scans only ever extend the final extension."""
        from outcomedl.analyzer import GenConfig, generate_theory
        from outcomedl.refengine import _holds_minus, _holds_plus, _Index
        from outcomedl.core import herbrand_literals

        t = generate_theory(GenConfig(seed=seed, atom_count=4, rule_count=5))
        idx = _Index(t)
        s = DerivationState()
        herbrand = sorted(herbrand_literals(t))
        final = compute_extension_reference(t)
        for _ in range(2):  # two partial sweeps
            for mode in Mode:
                for lit in herbrand:
                    if _holds_plus(idx, mode, lit, s):
                        s.plus.add((mode, lit))
                        assert lit in final.plus[mode]
                    if _holds_minus(idx, mode, lit, s):
                        s.minus.add((mode, lit))
                        assert lit in final.minus[mode]
