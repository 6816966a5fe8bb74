"""Target evaluation, universes, desugaring and equivalence."""

from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import NAMES, TARGET_OPS_ALL, VALUES, random_target, req
from ptacl.errors import BudgetExceededError
from ptacl.targets import (
    And,
    Match,
    Name,
    Not,
    Null,
    Opt,
    Or,
    Request,
    StrongAnd,
    Sup,
    Target,
    WeakOr,
    atomic_eval_by_splitting,
    build_universe,
    desugar_target,
    eval_target,
    is_core_target,
    targets_equivalent,
    universe_requests,
)
from ptacl.tri import BOTTOM, ONE, ZERO, sup


class TestRequest:
    def test_duplicate_pairs_collapse(self):
        q = Request(frozenset({("a", "1")}) | frozenset({("a", "1")}))
        assert len(q) == 1

    def test_duplicate_names_distinct_values_allowed(self):
        q = req(("role", "nurse"), ("role", "doctor"))
        assert len(q) == 2
        assert q.values_for("role") == {"nurse", "doctor"}

    def test_empty_request_allowed(self):
        assert len(Request()) == 0
        assert Request().names == frozenset()

    def test_rejects_empty_strings(self):
        with pytest.raises(ValueError):
            req(("", "x"))
        with pytest.raises(ValueError):
            req(("x", ""))

    def test_rejects_non_strings(self):
        with pytest.raises(TypeError):
            Request(frozenset({("a", 1)}))  # type: ignore[arg-type]

    def test_sorted_iteration(self):
        q = req(("b", "2"), ("a", "1"), ("a", "0"))
        assert list(q) == [("a", "0"), ("a", "1"), ("b", "2")]


class TestAtomicEvaluation:
    def test_null_matches_everything(self):
        assert eval_target(Null(), Request()) is ONE
        assert eval_target(Null(), req(("x", "1"))) is ONE

    def test_name_present(self):
        assert eval_target(Name("employer"), req(("employer", "A"))) is ONE

    def test_name_absent_is_bottom(self):
        assert eval_target(Name("employer"), req(("confidential", "true"))) is BOTTOM

    def test_match_value_mismatch_is_zero(self):
        q = req(("employer", "A"), ("confidential", "true"))
        assert eval_target(Match("employer", "B"), q) is ZERO

    def test_empty_request_is_bottom(self):
        assert eval_target(Name("n"), Request()) is BOTTOM
        assert eval_target(Match("n", "v"), Request()) is BOTTOM

    def test_repeated_name_one_match_wins(self):
        q = req(("role", "nurse"), ("role", "doctor"))
        assert eval_target(Match("role", "doctor"), q) is ONE

    def test_name_never_zero(self):
        universe = build_universe([Name("a"), Match("a", "1")])
        for q in universe_requests(universe):
            assert eval_target(Name("a"), q) in (ONE, BOTTOM)

    def test_opt_of_missing_name_is_zero(self):
        assert eval_target(Opt(Name("role")), Request()) is ZERO


pairs_st = st.lists(
    st.tuples(st.sampled_from(("a", "b", "c")), st.sampled_from(("1", "2", "3"))),
    max_size=6,
)


class TestSplitting:
    @given(pairs_st, st.sampled_from(("a", "b")), st.sampled_from(("1", "2")))
    def test_atomic_evaluation_splits_into_singletons(self, pairs, name, value):
        q = Request(frozenset(pairs))
        for atom in (Name(name), Match(name, value)):
            assert eval_target(atom, q) is atomic_eval_by_splitting(atom, q)

    @given(pairs_st, st.sampled_from(("a", "b")), st.sampled_from(("1", "2")))
    def test_splitting_fold_explicitly(self, pairs, name, value):
        q = Request(frozenset(pairs))
        atom = Match(name, value)
        acc = BOTTOM
        for pair in q.sorted_pairs():
            acc = sup(acc, eval_target(atom, Request.of(pair)))
        assert acc is eval_target(atom, q)

    def test_splitting_rejects_compound_targets(self):
        with pytest.raises(TypeError):
            atomic_eval_by_splitting(Opt(Name("a")), Request())  # type: ignore[arg-type]


class TestCompoundEvaluation:
    def test_and_is_weak(self):
        # A missing mandatory conjunct must keep the conjunction undecided,
        # even when the other conjunct is a definite mismatch.
        t = And(Match("a", "1"), Match("b", "1"))
        assert eval_target(t, req(("a", "2"))) is BOTTOM

    def test_or_is_strong(self):
        t = Or(Match("a", "1"), Match("b", "1"))
        assert eval_target(t, req(("a", "1"))) is ONE

    def test_extended_nodes(self):
        q = req(("a", "2"))
        assert eval_target(StrongAnd(Match("a", "1"), Match("b", "1")), q) is ZERO
        assert eval_target(WeakOr(Match("a", "1"), Match("b", "1")), q) is BOTTOM
        assert eval_target(Sup(Match("a", "1"), Match("b", "1")), q) is ZERO

    def test_interface_target_is_one_or_zero(self):
        iface = Opt(And(And(Name("n1"), Name("n2")), Name("n3")))
        universe = build_universe([iface])
        for q in universe_requests(universe):
            expected = ONE if {"n1", "n2", "n3"} <= q.names else ZERO
            assert eval_target(iface, q) is expected


class TestUniverse:
    def test_match_adds_fresh_value(self):
        assert build_universe([Match("a", "1")]) == {("a", "1"), ("a", "fresh")}

    def test_name_only_gets_fresh_pair(self):
        assert build_universe([Name("a")]) == {("a", "fresh")}

    def test_two_values_one_fresh(self):
        assert build_universe([Match("a", "1"), Match("a", "2")]) == {
            ("a", "1"), ("a", "2"), ("a", "fresh"),
        }

    def test_fresh_value_avoids_mentioned_values(self):
        universe = build_universe([Match("a", "fresh")])
        assert ("a", "fresh") in universe
        assert ("a", "fresh_2") in universe

    def test_universe_requests_order(self):
        reqs = list(universe_requests({("a", "1"), ("b", "2")}))
        assert reqs[0] == Request()
        assert [len(r) for r in reqs] == [0, 1, 1, 2]


def _realizing_requests():
    """Requests driving Match('a','1') / Match('b','1') through all 9 value pairs."""
    settings = {ONE: "1", ZERO: "other", BOTTOM: None}
    for va, vb in product((ONE, ZERO, BOTTOM), repeat=2):
        pairs = []
        if settings[va] is not None:
            pairs.append(("a", settings[va]))
        if settings[vb] is not None:
            pairs.append(("b", settings[vb]))
        yield va, vb, Request(frozenset(pairs))


class TestDesugar:
    def test_core_returned_unchanged(self):
        t = Or(Not(Opt(Match("a", "1"))), Name("b"))
        assert desugar_target(t) == t

    def test_output_is_core_only(self, rng):
        for _ in range(200):
            t = random_target(rng, depth=3)
            assert is_core_target(desugar_target(t))

    @pytest.mark.parametrize("node", [And, StrongAnd, WeakOr, Sup])
    def test_binary_desugaring_agrees_on_all_nine_pairs(self, node):
        ta, tb = Match("a", "1"), Match("b", "1")
        t = node(ta, tb)
        lowered = desugar_target(t)
        for va, vb, q in _realizing_requests():
            assert eval_target(ta, q) is va and eval_target(tb, q) is vb
            assert eval_target(lowered, q) is eval_target(t, q), (node.__name__, va, vb)

    def test_desugaring_preserves_evaluation_on_universe(self, rng):
        for _ in range(150):
            t = random_target(rng, depth=3, ops=TARGET_OPS_ALL)
            lowered = desugar_target(t)
            for q in universe_requests(build_universe([t])):
                assert eval_target(lowered, q) is eval_target(t, q)


class TestEquivalence:
    def test_double_negation(self, rng):
        for _ in range(50):
            t = random_target(rng, depth=2)
            assert targets_equivalent(Not(Not(t)), t).equivalent

    def test_opt_distributes_over_and(self, rng):
        for _ in range(50):
            t = random_target(rng, depth=2)
            t2 = random_target(rng, depth=2)
            verdict = targets_equivalent(Opt(And(t, t2)), And(Opt(t), Opt(t2)))
            assert verdict.equivalent, verdict.witness

    def test_de_morgan_fails_with_witness(self):
        t1, t2 = Match("a", "1"), Match("b", "1")
        verdict = targets_equivalent(Not(And(t1, t2)), Or(Not(t1), Not(t2)))
        assert not verdict.equivalent
        assert verdict.witness is not None
        q = verdict.witness
        assert eval_target(Not(And(t1, t2)), q) is not eval_target(Or(Not(t1), Not(t2)), q)

    def test_budget_error_reports_required_size(self):
        wide = None
        for i in range(7):
            atom = Match(f"n{i}", "1")
            wide = atom if wide is None else And(wide, atom)
        with pytest.raises(BudgetExceededError) as exc_info:
            targets_equivalent(wide, Null())
        assert exc_info.value.required == 14
        assert targets_equivalent(wide, Null(), limit=14) is not None
