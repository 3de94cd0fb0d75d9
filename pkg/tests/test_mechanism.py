import pytest

from asylum.errors import AsylumMatchError
from asylum.mechanism import (
    ORDER_POLICIES,
    CumulativeOffer,
    cumulative_offer,
    highest_id,
    lowest_id,
    order_invariance,
    round_robin,
    run_with_rule_variants,
)
from asylum.choice import rules_for
from asylum.models import Allocation


def test_order_policies():
    assert round_robin(["a1", "a3"], None) == "a1"
    assert round_robin(["a1", "a3"], "a1") == "a3"
    assert round_robin(["a1", "a2"], "a2") == "a1"
    assert lowest_id(["a2", "a1"], "a1") == "a1"
    assert highest_id(["a2", "a1"], None) == "a2"


def test_example1_rounds(example1, labels):
    x = labels(example1)
    trace = run_with_rule_variants(example1, "base", "round-robin")
    assert [(r.proposer, r.proposed) for r in trace.rounds] == [("a1", x["x1"]), ("a2", x["x3"]), ("a2", x["x4"])]
    assert trace.rounds[1].rejected == (x["x3"],)
    assert trace.rounds[1].tentatively_held == {"m": (x["x1"],)}
    assert trace.rounds[2].cumulative_offers == {"m": (x["x1"], x["x3"], x["x4"])}
    assert trace.outcome.contracts == x.set("x1", "x4")
    assert trace.duplicates_dropped == ()


@pytest.mark.parametrize("order", sorted(ORDER_POLICIES))
def test_example1_outcome_under_every_order(example1, labels, order):
    x = labels(example1)
    assert run_with_rule_variants(example1, "base", order).outcome.contracts == x.set("x1", "x4")


def test_completed_variant_on_example1(example1, labels):
    x = labels(example1)
    trace = run_with_rule_variants(example1, "completed", record=False)
    assert trace.rounds == ()
    assert trace.variant == "completed"
    assert trace.outcome.contracts == x.set("x1", "x4")


def test_duplicate_holdings_are_dropped(example5, labels):
    x = labels(example5)
    trace = run_with_rule_variants(example5, "base", "round-robin")
    assert trace.duplicates_dropped == ("a3",)
    assert trace.outcome.contracts == x.set("x2", "x4", "x5", "x7")
    assert len(trace.rounds) == 7


def test_example6_truthful_outcome(example6, labels):
    x = labels(example6)
    assert CumulativeOffer("base")(example6) == Allocation(contracts=x.set("x2", "x6", "x8", "x9"))


def test_custom_policy_and_rules(example1, labels):
    x = labels(example1)

    def last_first(eligible, last):
        return max(eligible)

    trace = cumulative_offer(example1, rules_for(example1), order=last_first)
    assert trace.policy == "last_first"
    assert trace.rounds[0].proposer == "a2"
    assert trace.outcome.contracts == x.set("x1", "x4")


def test_unknown_names(example1):
    with pytest.raises(AsylumMatchError):
        run_with_rule_variants(example1, "sideways")
    with pytest.raises(AsylumMatchError):
        run_with_rule_variants(example1, "base", "alphabetical")


def test_default_order_comes_from_settings(example1, monkeypatch):
    from asylum.config import get_settings

    monkeypatch.setenv("ASYLUM_ORDER_POLICY", "highest-id")
    get_settings.cache_clear()
    trace = run_with_rule_variants(example1)
    assert trace.policy == "highest-id"
    assert trace.rounds[0].proposer == "a2"


def test_mechanism_object_caches_per_profile(example6):
    mechanism = CumulativeOffer("base", "lowest-id")
    first = mechanism(example6)
    assert mechanism(example6) is first
    assert mechanism.name == "cumulative-offer[base,lowest-id]"
    assert mechanism.trace(example6).outcome == first


def test_order_invariance(example1, example6):
    assert order_invariance(example1).passed
    report = order_invariance(example6)
    assert report.stats["policies"] == ["round-robin", "lowest-id", "highest-id"]
