"""
Desk-scale sweeps over seeded instances plus the bundled example claims.
"""
import numpy as np
import pytest

from asylum.audit.manipulation import audit_nom, audit_strategy_proofness
from asylum.audit.properties import is_substitutable, satisfies_IRC, satisfies_LAD
from asylum.audit.stability import enumerate_stable, is_stable, naive_blocking_scan
from asylum.bundled import bundled_example, example_names, numbered_contracts
from asylum.choice import ChoiceRule, check_axioms, rules_for, unique_axiom_rule_oracle
from asylum.completion import is_completion_on, lemma1_displacement_check
from asylum.errors import PreconditionUnmet
from asylum.generator import Dims, generate_instance
from asylum.instance import contracts_at, full_contract_universe
from asylum.mechanism import CumulativeOffer, order_invariance
from asylum.models import Allocation, Preference
from asylum.reproduce import reproduce

SMALL = Dims(3, 2, 2)


def _state_universes(inst):
    universe = full_contract_universe(inst)
    return [(m, contracts_at(universe, m)) for m in inst.state_ids]


@pytest.mark.parametrize("name", example_names())
def test_bundled_claims_hold(name):
    failed = [(c.name, c.expected, c.observed) for c in reproduce(name) if not c.holds]
    assert failed == []


@pytest.mark.parametrize("seed", range(200))
def test_base_rule_satisfies_the_axioms(seed):
    profile = ("unrestricted", "homogeneous", "large-priority", "small-priority")[seed % 4]
    inst = generate_instance(seed, profile=profile, dims=SMALL)
    for m, universe in _state_universes(inst):
        assert check_axioms(inst, m, ChoiceRule(inst, m), universe).passed


@pytest.mark.parametrize("seed", range(20))
def test_base_rule_is_the_only_rule(seed):
    inst = generate_instance(1000 + seed, dims=SMALL)
    for m, universe in _state_universes(inst):
        report = unique_axiom_rule_oracle(inst, m, universe)
        assert report.passed, report.witnesses[:1]
        assert report.stats["passing_rules"] == 1


@pytest.mark.parametrize("seed", range(200))
def test_completion_properties(seed):
    profile = ("unrestricted", "large-priority", "small-priority", "homogeneous")[seed % 4]
    inst = generate_instance(seed, profile=profile, dims=SMALL)
    for m, universe in _state_universes(inst):
        base = ChoiceRule(inst, m)
        completed = ChoiceRule(inst, m, completed=True)
        assert satisfies_IRC(inst, m, base, universe).passed
        assert satisfies_IRC(inst, m, completed, universe).passed
        assert is_completion_on(inst, m, completed, base, universe).passed
        if profile in ("large-priority", "homogeneous"):
            assert is_substitutable(inst, m, completed, universe).passed
        if profile in ("small-priority", "homogeneous"):
            assert satisfies_LAD(inst, m, completed, universe).passed


def test_single_displacement_sampled_pairs():
    rng = np.random.default_rng(2024)
    checked = draw = 0
    while checked < 500 and draw < 20_000:
        draw += 1
        inst = generate_instance(int(rng.integers(0, 10_000)), dims=Dims(4, 2, 2))
        m = inst.state_ids[int(rng.integers(0, len(inst.state_ids)))]
        universe = sorted(contracts_at(full_contract_universe(inst), m))
        x_star = universe[int(rng.integers(0, len(universe)))]
        offered = [c for c in universe if c != x_star and rng.random() < 0.5]
        try:
            report = lemma1_displacement_check(inst, m, offered, x_star)
        except PreconditionUnmet:
            continue
        checked += 1
        assert report.passed, (draw, report.witnesses)
    assert checked == 500


@pytest.mark.parametrize("seed", range(200))
def test_homogeneous_markets(seed):
    dims = Dims(2 + seed % 3, 1 + (seed // 3) % 3, 1 + (seed // 9) % 3)
    inst = generate_instance(seed, profile="homogeneous", dims=dims)
    mechanism = CumulativeOffer("base")
    outcome = mechanism(inst)
    assert is_stable(inst, rules_for(inst), outcome).passed
    assert order_invariance(inst).passed
    assert audit_strategy_proofness(inst, mechanism, domain="full", max_length=3) == []


def test_example5_has_no_stable_allocation():
    assert enumerate_stable(bundled_example("notstableex")) == []


def test_example6_manipulations():
    inst = bundled_example("notstrategyproofex")
    x = numbered_contracts(inst)
    y1 = Allocation(contracts=frozenset(x[n] for n in ("x2", "x6", "x8", "x9")))
    assert enumerate_stable(inst) == [y1]
    lie = Preference.of("a2", [x["x5"], x["x6"], x["x4"]])
    reports = audit_strategy_proofness(inst, CumulativeOffer("base"), seekers=["a2"])
    assert lie in [r.misreport for r in reports]


def test_large_priority_markets_are_not_obviously_manipulable():
    gaps = []
    for seed in range(100):
        inst = generate_instance(seed, profile="large-priority", dims=SMALL, max_ranking=2)
        mechanism = CumulativeOffer("base")
        assert is_stable(inst, rules_for(inst), mechanism(inst)).passed, seed
        reports = audit_nom(inst, mechanism, max_length=2, include_non_obvious=True)
        assert [r for r in reports if r.obvious] == [], seed
        gaps.extend(reports)
    if not gaps:
        inst = bundled_example("example6")
        gaps = audit_nom(inst, CumulativeOffer("base"), max_length=3, seekers=["a2"], include_non_obvious=True)
    assert any(not r.obvious for r in gaps)


@pytest.mark.parametrize("seed", range(100))
def test_outcome_is_among_stable_allocations(seed):
    profile = "homogeneous" if seed % 2 else "large-priority"
    inst = generate_instance(seed, profile=profile, dims=SMALL)
    assert CumulativeOffer("base")(inst) in enumerate_stable(inst)


def test_blocking_scan_agrees_on_random_pairs():
    rng = np.random.default_rng(10)
    for seed in range(100):
        inst = generate_instance(5000 + seed, dims=SMALL)
        rules = rules_for(inst)
        own = {a: sorted(c for c in full_contract_universe(inst) if c.seeker == a) for a in inst.seeker_ids}
        for _ in range(10):
            picks = [int(rng.integers(0, len(own[a]) + 1)) for a in inst.seeker_ids]
            alloc = Allocation(contracts=frozenset(
                own[a][p] for a, p in zip(inst.seeker_ids, picks) if p < len(own[a])
            ))
            blocking = {w.contract for w in is_stable(inst, rules, alloc).witnesses if w.kind == "blocking"}
            assert blocking == naive_blocking_scan(inst, rules, alloc)
