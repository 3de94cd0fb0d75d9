from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asylum.choice import (
    ChoiceRule,
    build_trace,
    check_axioms,
    check_trace_invariants,
    choice_rule,
    choose,
    choose_sequence,
    qualifies_for_acceptance,
    qualifies_for_wait_time,
    rules_for,
    unique_axiom_rule_oracle,
)
from asylum.errors import UniverseTooLarge, UnknownSeeker, UnknownState, UnknownWaitTime
from asylum.generator import Dims, generate_instance
from asylum.instance import contracts_at, full_contract_universe
from asylum.models import Contract


@pytest.mark.parametrize("offered, expected", [
    (("x1", "x2", "x4"), ("x1", "x4")),
    (("x2", "x4"), ("x2",)),
    (("x2", "x3"), ("x2", "x3")),
    (("x1", "x2", "x3"), ("x1",)),
])
def test_base_rule_on_example1(example1, labels, offered, expected):
    x = labels(example1)
    assert choose(example1, "m", x.set(*offered)).result == x.set(*expected)
    assert ChoiceRule(example1, "m")(x.set(*offered)) == x.set(*expected)


def test_trace_steps(example1, labels):
    x = labels(example1)
    trace = choose(example1, "m", x.set("x1", "x2", "x4"))
    assert [s.stop_reason for s in trace.steps] == ["continued", "continued", "quota-reached"]
    assert [s.picked_contract for s in trace.steps] == [x["x1"], x["x4"], None]
    assert trace.steps[1].candidates == (x["x4"],)
    assert trace.accepted == (x["x1"], x["x4"])
    assert not trace.duplicated_seeker
    assert check_trace_invariants(example1, "m", trace).passed


def test_trace_stops_without_candidates(example1, labels):
    x = labels(example1)
    trace = choose(example1, "m", x.set("x2", "x4"))
    assert trace.steps[-1].stop_reason == "no-candidates"
    assert trace.result == x.set("x2")


def test_completed_trace_keeps_seeker_in_race(example1, labels):
    x = labels(example1)
    trace = build_trace(example1, "m", x.set("x1", "x2", "x4"), completed=True)
    assert trace.rule == "completed"
    assert trace.accepted == (x["x1"], x["x2"])
    assert trace.duplicated_seeker


def test_tampered_trace_fails_invariants(example1, labels):
    x = labels(example1)
    trace = choose(example1, "m", x.set("x1", "x2", "x4"))
    tampered = trace.model_copy(update={"result": x.set("x1")})
    report = check_trace_invariants(example1, "m", tampered)
    assert not report.passed
    assert report.witnesses[0].kind == "result"


def test_other_states_contracts_are_ignored(example6):
    listed = [c for a in example6.seeker_ids for c in example6.preference(a).contracts()]
    chosen = choose_sequence(example6, "m4", listed)
    assert chosen == (Contract("a4", "m4", Fraction(3)),)


def test_unknown_references(example1):
    with pytest.raises(UnknownState):
        choose(example1, "zz", [])
    with pytest.raises(UnknownSeeker):
        choose(example1, "m", [Contract("zz", "m", Fraction(1))])


def test_rule_objects(example6):
    rules = rules_for(example6, completed=True)
    assert sorted(rules) == ["m1", "m2", "m3", "m4"]
    assert rules["m2"].name == "completed:m2"
    assert choice_rule(example6, "m1").name == "base:m1"


def test_qualification_predicates(example1, example5, labels):
    x = labels(example1)
    assert qualifies_for_acceptance(example1, "m", x.set("x1", "x4"), x.set("x1", "x4"), "a2")
    assert not qualifies_for_wait_time(example1, "m", x.set("x1", "x3"), x.set("x1"), "a2", Fraction(1))
    assert qualifies_for_wait_time(example1, "m", x.set("x1", "x4"), x.set("x1"), "a2", Fraction(3))
    # not offered
    assert not qualifies_for_wait_time(example1, "m", x.set("x1"), x.set("x1"), "a2", Fraction(3))

    y = labels(example5)
    offered = y.set("x2", "x3", "x5")
    assert qualifies_for_wait_time(example5, "m1", offered, y.set("x2"), "a3", Fraction(3))
    with pytest.raises(UnknownWaitTime):
        qualifies_for_wait_time(example5, "m1", offered, y.set("x2"), "a3", Fraction(7))
    with pytest.raises(UnknownSeeker):
        qualifies_for_wait_time(example5, "m1", offered, y.set("x2"), "zz", Fraction(3))


def test_base_rule_satisfies_axioms(example1, example6):
    assert check_axioms(example1, "m", ChoiceRule(example1, "m"), full_contract_universe(example1)).passed
    universe = contracts_at(full_contract_universe(example6), "m1")
    assert check_axioms(example6, "m1", ChoiceRule(example6, "m1"), universe).passed


def test_broken_rules_violate_axioms(example1):
    universe = full_contract_universe(example1)
    empty = check_axioms(example1, "m", lambda offered: frozenset(), universe)
    assert [w.kind for w in empty.witnesses] == ["respecting-priorities"]
    greedy = check_axioms(example1, "m", lambda offered: frozenset(offered), universe)
    assert "feasibility" in {w.kind for w in greedy.witnesses}


def test_late_wait_violates_early_filling(example1, labels):
    x = labels(example1)

    def late(offered):
        chosen = ChoiceRule(example1, "m")(offered)
        if chosen == {x["x1"]} and x["x2"] in offered:
            return frozenset({x["x2"]})
        return chosen

    report = check_axioms(example1, "m", late, full_contract_universe(example1))
    assert "early-filling" in {w.kind for w in report.witnesses}


def test_unique_rule_oracle(example1):
    report = unique_axiom_rule_oracle(example1, "m", full_contract_universe(example1))
    assert report.passed
    assert report.stats["passing_rules"] == 1


def test_universe_guard(example6):
    with pytest.raises(UniverseTooLarge):
        check_axioms(example6, "m1", ChoiceRule(example6, "m1"), full_contract_universe(example6), max_universe=8)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), profile=st.sampled_from(["unrestricted", "homogeneous"]))
def test_generated_rules_satisfy_axioms(seed, profile):
    inst = generate_instance(seed, profile=profile, dims=Dims(3, 2, 2))
    for m in inst.state_ids:
        universe = contracts_at(full_contract_universe(inst), m)
        assert check_axioms(inst, m, ChoiceRule(inst, m), universe).passed
