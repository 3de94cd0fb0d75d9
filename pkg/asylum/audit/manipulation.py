"""
Strategy-proofness and non-obvious-manipulability audits by exhaustive
misreport search.

A mechanism here is any callable Instance -> Allocation. Misreports are drawn
from a per-seeker domain of rankings; the `listed` domain permutes subsets of
the seeker's true list, the `full` domain ranks any of her (state, wait)
pairs. Verdicts are relative to the domain swept.
"""
import logging
from itertools import permutations, product
from math import perm, prod
from typing import Iterable, List, Optional, Sequence, Tuple

from asylum.choice import ChoiceRule
from asylum.config import get_settings
from asylum.errors import DomainTooLarge
from asylum.instance import best_of, prefers, require_seeker, with_preference, worst_of
from asylum.mechanism import Mechanism
from asylum.models import Instance, Outcome, Preference
from asylum.schemas import AuditReport, ManipulationReport, Witness

logger = logging.getLogger(__name__)

DOMAINS = ("listed", "full")


def _pairs(inst: Instance, seeker: str, kind: str) -> List[Tuple[str, object]]:
    if kind == "listed":
        return list(inst.preference(seeker).ranking)
    if kind == "full":
        return [(m, w) for m in inst.state_ids for w in inst.waits.times]
    raise ValueError(f"unknown misreport domain {kind!r}; expected one of {DOMAINS}")


def domain_size(inst: Instance, seeker: str, kind: str = "listed", max_length: Optional[int] = None) -> int:
    n = len(_pairs(inst, seeker, kind))
    length = get_settings().misreport_max_length if max_length is None else max_length
    return sum(perm(n, r) for r in range(min(n, length) + 1))


def misreport_domain(
    inst: Instance,
    seeker: str,
    kind: str = "listed",
    max_length: Optional[int] = None,
    max_profiles: Optional[int] = None,
) -> List[Preference]:
    """
    Every ranking a seeker may report, the empty list and her true ranking included.

    Raises:
        DomainTooLarge: more rankings than `max_profiles`
    """
    require_seeker(inst, seeker)
    pairs = _pairs(inst, seeker, kind)
    length = get_settings().misreport_max_length if max_length is None else max_length
    bound = get_settings().max_profiles if max_profiles is None else max_profiles
    size = domain_size(inst, seeker, kind, length)
    if size > bound:
        raise DomainTooLarge(f"misreport domain of {seeker}", size, bound)
    return [
        Preference(seeker=seeker, ranking=ranking)
        for r in range(min(len(pairs), length) + 1)
        for ranking in permutations(pairs, r)
    ]


def _domain_label(kind: str, max_length: Optional[int]) -> str:
    length = get_settings().misreport_max_length if max_length is None else max_length
    return f"{kind}(max_length={length})"


def audit_strategy_proofness(
    inst: Instance,
    mechanism: Mechanism,
    domain: str = "listed",
    max_length: Optional[int] = None,
    max_profiles: Optional[int] = None,
    seekers: Optional[Sequence[str]] = None,
) -> List[ManipulationReport]:
    """
    Every profitable unilateral misreport at the instance's profile.

    Args:
        inst: Instance holding the true profile
        mechanism: Callable Instance -> Allocation
        domain: "listed" or "full"
        max_length: Longest misreported ranking
        max_profiles: Guard on the total number of misreports tried
        seekers: Restrict the search to these seekers

    Returns:
        list of ManipulationReport, in seeker then misreport order
    """
    bound = get_settings().max_profiles if max_profiles is None else max_profiles
    seekers = list(inst.seeker_ids if seekers is None else seekers)
    total = sum(domain_size(inst, a, domain, max_length) for a in seekers)
    if total > bound:
        raise DomainTooLarge("misreport sweep", total, bound)

    truthful = mechanism(inst)
    label = _domain_label(domain, max_length)
    reports: List[ManipulationReport] = []
    for seeker in seekers:
        true_pref = inst.preference(seeker)
        others = tuple(inst.preference(b) for b in inst.seeker_ids if b != seeker)
        honest = truthful.of(seeker)
        for misreport in misreport_domain(inst, seeker, domain, max_length, bound):
            if misreport.ranking == true_pref.ranking:
                continue
            manipulated = mechanism(with_preference(inst, misreport)).of(seeker)
            if prefers(true_pref, manipulated, honest):
                reports.append(ManipulationReport(
                    seeker=seeker,
                    true_pref=true_pref,
                    misreport=misreport,
                    profile_of_others=others,
                    truthful_outcome=honest,
                    manipulated_outcome=manipulated,
                    domain=label,
                ))
    logger.info("strategy-proofness sweep over %d misreports found %d manipulations", total, len(reports))
    return reports


def _sweep_others(
    inst: Instance, seeker: str, domain: str, max_length: Optional[int], bound: int
) -> List[Tuple[Preference, ...]]:
    others = [b for b in inst.seeker_ids if b != seeker]
    domains = [misreport_domain(inst, b, domain, max_length, bound) for b in others]
    size = prod(len(d) for d in domains)
    if size > bound:
        raise DomainTooLarge(f"profiles of others than {seeker}", size, bound)
    return [tuple(profile) for profile in product(*domains)]


def _outcomes(inst: Instance, mechanism: Mechanism, report: Preference,
              profiles: Iterable[Tuple[Preference, ...]]) -> List[Outcome]:
    results = []
    for profile in profiles:
        prefs = tuple(sorted(profile + (report,), key=lambda p: p.seeker))
        results.append(mechanism(inst.replace(preferences=prefs)).of(report.seeker))
    return results


def audit_nom(
    inst: Instance,
    mechanism: Mechanism,
    domain: str = "listed",
    max_length: Optional[int] = None,
    max_profiles: Optional[int] = None,
    seekers: Optional[Sequence[str]] = None,
    include_non_obvious: bool = False,
) -> List[ManipulationReport]:
    """
    Obvious manipulations: a misreport whose worst case or best case, taken
    over every report of the others in the domain and ranked by the seeker's
    true preference, beats the truthful worst or best case.

    With include_non_obvious=True also every misreport that is profitable at
    some profile of the others without being obvious.
    """
    bound = get_settings().max_profiles if max_profiles is None else max_profiles
    label = _domain_label(domain, max_length)
    reports: List[ManipulationReport] = []
    for seeker in (inst.seeker_ids if seekers is None else seekers):
        true_pref = inst.preference(seeker)
        profiles = _sweep_others(inst, seeker, domain, max_length, bound)
        reports_of_seeker = misreport_domain(inst, seeker, domain, max_length, bound)
        if len(profiles) * len(reports_of_seeker) > bound:
            raise DomainTooLarge(f"NOM sweep for {seeker}", len(profiles) * len(reports_of_seeker), bound)

        honest = _outcomes(inst, mechanism, true_pref, profiles)
        worst_truthful = worst_of(true_pref, honest)
        best_truthful = best_of(true_pref, honest)
        for misreport in reports_of_seeker:
            if misreport.ranking == true_pref.ranking:
                continue
            lying = _outcomes(inst, mechanism, misreport, profiles)
            gains = [i for i, (h, l) in enumerate(zip(honest, lying)) if prefers(true_pref, l, h)]
            if not gains:
                continue
            worst_misreport = worst_of(true_pref, lying)
            best_misreport = best_of(true_pref, lying)
            obvious = prefers(true_pref, worst_misreport, worst_truthful) or prefers(
                true_pref, best_misreport, best_truthful
            )
            if not obvious and not include_non_obvious:
                continue
            at = gains[0]
            reports.append(ManipulationReport(
                seeker=seeker,
                true_pref=true_pref,
                misreport=misreport,
                profile_of_others=profiles[at],
                truthful_outcome=honest[at],
                manipulated_outcome=lying[at],
                worst_truthful=worst_truthful,
                worst_misreport=worst_misreport,
                best_truthful=best_truthful,
                best_misreport=best_misreport,
                obvious=obvious,
                domain=label,
            ))
    logger.info("NOM sweep found %d reports (%d obvious)", len(reports), sum(r.obvious for r in reports))
    return reports


def best_case_reachability(
    inst: Instance,
    mechanism: Mechanism,
    seeker: str,
    domain: str = "listed",
    max_length: Optional[int] = None,
    max_profiles: Optional[int] = None,
) -> AuditReport:
    """
    Truthful best case B(a; P_a) from a sweep over the others' reports,
    checked against a prediction that never runs the mechanism: her top
    contract x is reachable iff the state of x accepts it when offered alone,
    ĉ_m({x}) = {x}. The others all reporting nothing is in every domain.

    The prediction holds for cumulative offer; a stable-selecting mechanism
    may pick another stable allocation at that profile.
    """
    require_seeker(inst, seeker)
    bound = get_settings().max_profiles if max_profiles is None else max_profiles
    true_pref = inst.preference(seeker)
    profiles = _sweep_others(inst, seeker, domain, max_length, bound)
    outcomes = _outcomes(inst, mechanism, true_pref, profiles)
    best = best_of(true_pref, outcomes)
    top = true_pref.contracts()[0] if true_pref.ranking else None
    reachable = top is not None and best == top
    accepted_alone = top is not None and top in ChoiceRule(inst, top.state)([top])
    witnesses: List[Witness] = []
    if reachable != accepted_alone:
        witnesses.append(Witness(
            kind="best-case", seeker=seeker, contract=top,
            expected=f"top contract reachable iff accepted alone (accepted_alone={accepted_alone})",
            observed=f"best case {best.label() if best else 'unmatched'}",
        ))
    return AuditReport.build(
        "best_case_reachability", witnesses,
        profiles=len(profiles), reachable=reachable, accepted_alone=accepted_alone,
        best=best.label() if best else "unmatched", domain=_domain_label(domain, max_length),
    )
