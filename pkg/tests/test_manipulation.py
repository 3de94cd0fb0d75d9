import pytest

from asylum.audit.manipulation import (
    audit_nom,
    audit_strategy_proofness,
    best_case_reachability,
    domain_size,
    misreport_domain,
)
from asylum.audit.stability import StableSelecting
from asylum.errors import DomainTooLarge, UnknownSeeker
from asylum.generator import Dims, generate_instance
from asylum.instance import with_preference
from asylum.mechanism import CumulativeOffer
from asylum.models import Allocation, Preference


def test_listed_domain_contains_truncations(example1):
    domain = misreport_domain(example1, "a1")
    assert len(domain) == domain_size(example1, "a1") == 5
    assert Preference(seeker="a1") in domain
    assert example1.preference("a1") in domain


def test_full_domain_and_length(example6):
    assert domain_size(example6, "a4", "full", max_length=1) == 1 + 8
    assert len(misreport_domain(example6, "a4", "full", max_length=2)) == 1 + 8 + 8 * 7
    assert domain_size(example6, "a1", "listed", max_length=3) == 16


def test_domain_guards(example6):
    with pytest.raises(DomainTooLarge):
        misreport_domain(example6, "a1", max_profiles=3)
    with pytest.raises(UnknownSeeker):
        misreport_domain(example6, "zz")
    with pytest.raises(ValueError):
        misreport_domain(example6, "a1", kind="psychic")


def test_homogeneous_market_is_strategy_proof(example1):
    mechanism = CumulativeOffer("base")
    assert audit_strategy_proofness(example1, mechanism, domain="full") == []
    assert audit_nom(example1, mechanism, include_non_obvious=True) == []


def test_a2_manipulates_cumulative_offer(example6, labels):
    x = labels(example6)
    lie = Preference.of("a2", [x["x5"], x["x6"], x["x4"]])
    reports = audit_strategy_proofness(example6, CumulativeOffer("base"), seekers=["a2"])
    found = [r for r in reports if r.misreport == lie]
    assert len(found) == 1
    assert found[0].truthful_outcome == x["x6"]
    assert found[0].manipulated_outcome == x["x5"]
    assert found[0].domain == "listed(max_length=4)"


def test_stable_selections_are_manipulable(example6, labels):
    x = labels(example6)
    lie_a2 = Preference.of("a2", [x["x5"], x["x6"], x["x4"]])
    lie_a1 = Preference.of("a1", [x["x1"], x["x3"], x["x2"]])
    picks_y2 = audit_strategy_proofness(example6, StableSelecting("lexicographic-max"), seekers=["a2"])
    assert lie_a2 in [r.misreport for r in picks_y2]
    picks_y1 = audit_strategy_proofness(
        with_preference(example6, lie_a2), StableSelecting("lexicographic-min"), seekers=["a1"]
    )
    assert lie_a1 in [r.misreport for r in picks_y1]


def test_a2_manipulation_is_not_obvious(example6, labels):
    x = labels(example6)
    lie = Preference.of("a2", [x["x5"], x["x6"], x["x4"]])
    mechanism = CumulativeOffer("base")
    obvious = audit_nom(example6, mechanism, max_length=3, seekers=["a2"])
    assert lie not in [r.misreport for r in obvious]

    reports = audit_nom(example6, mechanism, max_length=3, seekers=["a2"], include_non_obvious=True)
    report = next(r for r in reports if r.misreport == lie)
    assert not report.obvious
    assert (report.worst_truthful, report.worst_misreport) == (x["x6"], x["x6"])
    assert (report.best_truthful, report.best_misreport) == (x["x4"], x["x5"])


def test_best_case_reachability(example1, example6):
    report = best_case_reachability(example1, CumulativeOffer("base"), "a1")
    assert report.passed
    assert report.stats["reachable"] is True
    assert report.stats["best"] == "(a1,m,1)"
    assert best_case_reachability(example6, CumulativeOffer("base"), "a2", max_length=2).passed


def test_best_case_flags_a_mechanism_that_never_matches(example1):
    report = best_case_reachability(example1, lambda inst: Allocation(contracts=frozenset()), "a1")
    assert not report.passed
    assert report.witnesses[0].kind == "best-case"
    assert report.stats["accepted_alone"] is True
    assert report.stats["best"] == "unmatched"


@pytest.mark.parametrize("seed", range(20))
def test_best_case_matches_the_prediction_on_generated_markets(seed):
    inst = generate_instance(seed, dims=Dims(3, 2, 2), max_ranking=2)
    mechanism = CumulativeOffer("base")
    for seeker in inst.seeker_ids:
        report = best_case_reachability(inst, mechanism, seeker, max_length=2)
        assert report.passed, (seeker, report.witnesses)
        assert report.stats["reachable"] == report.stats["accepted_alone"]
