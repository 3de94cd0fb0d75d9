from fractions import Fraction

import numpy as np
import pytest

from asylum.audit.stability import (
    StableSelecting,
    allocation_space_size,
    enumerate_stable,
    is_stable,
    iter_allocations,
    naive_blocking_scan,
    stable_selecting_mechanism,
)
from asylum.choice import rules_for
from asylum.errors import SpaceTooLarge
from asylum.generator import Dims, generate_instance
from asylum.instance import full_contract_universe, with_preference
from asylum.models import Allocation, Contract, Preference


def test_example1_has_one_stable_allocation(example1, labels):
    x = labels(example1)
    assert enumerate_stable(example1) == [Allocation(contracts=x.set("x1", "x4"))]


def test_example5_has_none(example5):
    assert enumerate_stable(example5) == []


def test_example5_blocking_contract(example5, labels):
    x = labels(example5)
    alloc = Allocation(contracts=x.set("x1", "x3", "x7"))
    report = is_stable(example5, rules_for(example5), alloc)
    assert [(w.kind, w.contract) for w in report.witnesses] == [("blocking", x["x6"])]
    assert naive_blocking_scan(example5, rules_for(example5), alloc) == {x["x6"]}


def test_unlisted_contract_is_not_individually_rational(example6):
    alloc = Allocation(contracts=frozenset({Contract("a4", "m1", Fraction(1))}))
    report = is_stable(example6, rules_for(example6), alloc)
    assert ("individual-rationality", "a4") in {(w.kind, w.seeker) for w in report.witnesses}


def test_better_wait_blocks(example1, labels):
    x = labels(example1)
    report = is_stable(example1, rules_for(example1), Allocation(contracts=x.set("x2", "x3")))
    assert [(w.kind, w.contract) for w in report.witnesses] == [("blocking", x["x1"])]


def test_example6_stable_sets(example6, labels):
    x = labels(example6)
    y1 = Allocation(contracts=x.set("x2", "x6", "x8", "x9"))
    y2 = Allocation(contracts=x.set("x1", "x5", "x7", "x9"))
    lie = with_preference(example6, Preference.of("a2", [x["x5"], x["x6"], x["x4"]]))
    assert enumerate_stable(example6) == [y1]
    assert enumerate_stable(lie) == [y1, y2]
    assert StableSelecting("lexicographic-min")(lie) == y1
    assert StableSelecting("lexicographic-max")(lie) == y2


def test_stable_selecting_falls_back(example5, labels):
    x = labels(example5)
    mechanism = stable_selecting_mechanism("lexicographic-max")
    assert mechanism(example5) == Allocation(contracts=x.set("x2", "x4", "x5", "x7"))
    with pytest.raises(ValueError):
        StableSelecting("median")


def test_allocation_space(example6):
    assert allocation_space_size(example6) == 4 * 4 * 3 * 2
    allocations = list(iter_allocations(example6))
    assert len(allocations) == len(set(allocations))
    assert frozenset() in allocations
    with pytest.raises(SpaceTooLarge):
        list(iter_allocations(example6, max_allocations=10))


def _random_allocation(inst, rng):
    universe = sorted(full_contract_universe(inst))
    chosen = []
    for a in inst.seeker_ids:
        own = [c for c in universe if c.seeker == a]
        pick = int(rng.integers(0, len(own) + 1))
        if pick < len(own):
            chosen.append(own[pick])
    return Allocation(contracts=frozenset(chosen))


@pytest.mark.parametrize("seed", range(20))
def test_blocking_matches_naive_scan(seed):
    inst = generate_instance(seed, dims=Dims(3, 2, 2))
    rules = rules_for(inst)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        alloc = _random_allocation(inst, rng)
        blocking = {w.contract for w in is_stable(inst, rules, alloc).witnesses if w.kind == "blocking"}
        assert blocking == naive_blocking_scan(inst, rules, alloc)
