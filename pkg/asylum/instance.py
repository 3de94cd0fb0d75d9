"""
Validation and set-algebra helpers over an Instance.

The notation follows the model: X'_a, X'_m, X'_w are the contracts of a seeker,
state or wait time inside X', and A(X') is the set of seekers holding some
contract in X'.
"""
import logging
from collections import Counter
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from asylum.errors import (
    InvalidAllocation,
    InvariantIssue,
    UnknownSeeker,
    UnknownState,
    WrongSeeker,
    validation_error,
)
from asylum.models import (
    Allocation,
    Contract,
    Instance,
    MemberState,
    Outcome,
    Preference,
    format_wait,
)

logger = logging.getLogger(__name__)


def collect_issues(inst: Instance, strict: bool = True) -> List[InvariantIssue]:
    """Every violated invariant of `inst`, references first, aggregate sums last."""
    issues: List[InvariantIssue] = []
    seeker_ids = [s.id for s in inst.seekers]
    state_ids = [m.id for m in inst.states]
    known_seekers = set(seeker_ids)
    known_states = set(state_ids)
    waits = list(inst.waits.times)

    for seeker_id, n in Counter(seeker_ids).items():
        if n > 1:
            issues.append(InvariantIssue("DanglingReference", f"seeker {seeker_id} declared {n} times"))
    for state_id, n in Counter(state_ids).items():
        if n > 1:
            issues.append(InvariantIssue("DanglingReference", f"state {state_id} declared {n} times"))

    for seeker in inst.seekers:
        if not isinstance(seeker.burden_size, int) or seeker.burden_size < 1:
            issues.append(InvariantIssue("InvalidBurden", f"seeker {seeker.id} has burden size {seeker.burden_size}"))

    if any(later <= earlier for earlier, later in zip(waits, waits[1:])):
        issues.append(InvariantIssue("UnsortedWaits", "wait times must be strictly increasing"))

    for state in inst.states:
        for wait, slots in state.capacities.items():
            if wait not in inst.waits:
                issues.append(InvariantIssue(
                    "DanglingReference", f"state {state.id} has capacity for undeclared wait {format_wait(wait)}"
                ))
            if slots < 0:
                issues.append(InvariantIssue("CapacityDeficit", f"state {state.id} has negative capacity at {format_wait(wait)}"))
        if state.quota < 0:
            issues.append(InvariantIssue("QuotaDeficit", f"state {state.id} has negative quota {state.quota}"))

        unknown = [a for a in state.priority if a not in known_seekers]
        for seeker_id in unknown:
            issues.append(InvariantIssue("DanglingReference", f"priority of {state.id} names unknown seeker {seeker_id}"))
        repeated = sorted(a for a, n in Counter(state.priority).items() if n > 1)
        missing = sorted(known_seekers - set(state.priority))
        if repeated or missing:
            issues.append(InvariantIssue(
                "InvalidPriority",
                f"priority of {state.id} must rank every seeker once (repeated={repeated}, missing={missing})",
            ))

    seen_prefs: Set[str] = set()
    for pref in inst.preferences:
        if pref.seeker not in known_seekers:
            issues.append(InvariantIssue("DanglingReference", f"preference for unknown seeker {pref.seeker}"))
        if pref.seeker in seen_prefs:
            issues.append(InvariantIssue("DuplicatePreferenceEntry", f"seeker {pref.seeker} has two preferences"))
        seen_prefs.add(pref.seeker)
        for (state_id, wait), n in Counter(pref.ranking).items():
            if state_id not in known_states:
                issues.append(InvariantIssue("DanglingReference", f"{pref.seeker} ranks unknown state {state_id}"))
            if wait not in inst.waits:
                issues.append(InvariantIssue("DanglingReference", f"{pref.seeker} ranks undeclared wait {format_wait(wait)}"))
            if n > 1:
                issues.append(InvariantIssue(
                    "DuplicatePreferenceEntry", f"{pref.seeker} ranks ({state_id},{format_wait(wait)}) {n} times"
                ))

    if strict:
        n_seekers = len(known_seekers)
        for state in inst.states:
            total = state.total_capacity
            if total < state.quota:
                issues.append(InvariantIssue(
                    "CapacityDeficit", f"state {state.id} has {total} slots for quota {state.quota}"
                ))
            if total < n_seekers:
                issues.append(InvariantIssue(
                    "CapacityDeficit", f"state {state.id} has {total} slots for {n_seekers} seekers"
                ))
        total_quota = sum(m.quota for m in inst.states)
        total_burden = sum(s.burden_size for s in inst.seekers)
        if total_quota < total_burden:
            issues.append(InvariantIssue(
                "QuotaDeficit", f"aggregate quota {total_quota} is below aggregate burden {total_burden}"
            ))

    return issues


def validate_instance(raw: Instance, strict: bool = True) -> Instance:
    """
    Check every model invariant and return the instance unchanged if it holds.

    Args:
        raw: Instance to check
        strict: Also enforce the aggregate quota and per-state capacity sums.
            Single-state choice-rule fragments are checked with strict=False.

    Returns:
        Instance: `raw` itself

    Raises:
        InstanceValidationError: listing every violated invariant
    """
    issues = collect_issues(raw, strict=strict)
    if issues:
        logger.debug("instance rejected with %d issues", len(issues))
        raise validation_error(issues)
    return raw


def full_contract_universe(inst: Instance) -> FrozenSet[Contract]:
    """X = A × M × W."""
    return frozenset(
        Contract(a, m, w) for a, m, w in product(inst.seeker_ids, inst.state_ids, inst.waits.times)
    )


def listed_contract_universe(inst: Instance) -> FrozenSet[Contract]:
    """Every contract that appears in some seeker's ranking."""
    return frozenset(c for a in inst.seeker_ids for c in inst.preference(a).contracts())


def contracts_at(contracts: Iterable[Contract], state_id: str) -> FrozenSet[Contract]:
    """X'_m."""
    return frozenset(c for c in contracts if c.state == state_id)


def contracts_of(contracts: Iterable[Contract], seeker_id: str) -> FrozenSet[Contract]:
    """X'_a."""
    return frozenset(c for c in contracts if c.seeker == seeker_id)


def contracts_with_wait(contracts: Iterable[Contract], wait: Fraction) -> FrozenSet[Contract]:
    """X'_w."""
    return frozenset(c for c in contracts if c.wait == wait)


def seekers_in(contracts: Iterable[Contract]) -> FrozenSet[str]:
    """A(X')."""
    return frozenset(c.seeker for c in contracts)


def burden_of(inst: Instance, contracts: Iterable[Contract]) -> int:
    """Σ s(a_x) over the contracts, counting a seeker once per contract."""
    return sum(inst.burden(c.seeker) for c in contracts)


def require_seeker(inst: Instance, seeker_id: str) -> None:
    if not inst.has_seeker(seeker_id):
        raise UnknownSeeker(f"unknown seeker {seeker_id}")


def require_state(inst: Instance, state_id: str) -> MemberState:
    if not inst.has_state(state_id):
        raise UnknownState(f"unknown state {state_id}")
    return inst.state(state_id)


def _rank_value(pref: Preference, outcome: Outcome) -> int:
    # Listed contracts rank by position, unmatched right after them, and
    # unlisted contracts below unmatched.
    if outcome is None:
        return len(pref.ranking)
    if outcome.seeker != pref.seeker:
        raise WrongSeeker(f"{outcome.label()} is not a contract of {pref.seeker}")
    position = pref.position(outcome)
    return len(pref.ranking) + 1 if position is None else position


def prefers(pref: Preference, x: Outcome, y: Outcome) -> bool:
    """True iff x is strictly preferred to y under `pref` (None means unmatched)."""
    return _rank_value(pref, x) < _rank_value(pref, y)


def weakly_prefers(pref: Preference, x: Outcome, y: Outcome) -> bool:
    return _rank_value(pref, x) <= _rank_value(pref, y)


def worst_of(pref: Preference, outcomes: Iterable[Outcome]) -> Outcome:
    return max(outcomes, key=lambda o: (_rank_value(pref, o), o or ()))


def best_of(pref: Preference, outcomes: Iterable[Outcome]) -> Outcome:
    return min(outcomes, key=lambda o: (_rank_value(pref, o), o or ()))


def allocation_issues(inst: Instance, contracts: Iterable[Contract]) -> List[str]:
    """Single pass over the contract set; an empty list means a valid allocation."""
    problems: List[str] = []
    holders: Set[str] = set()
    load: Dict[tuple, int] = {}
    for c in sorted(contracts):
        if not inst.has_seeker(c.seeker) or not inst.has_state(c.state) or c.wait not in inst.waits:
            problems.append(f"{c.label()} references undeclared entities")
            continue
        if c.seeker in holders:
            problems.append(f"{c.seeker} holds more than one contract")
        holders.add(c.seeker)
        key = (c.state, c.wait)
        load[key] = load.get(key, 0) + 1
        if load[key] == inst.state(c.state).capacity(c.wait) + 1:
            problems.append(f"{c.state} exceeds capacity at wait {format_wait(c.wait)}")
    return problems


def is_allocation(inst: Instance, contracts: Iterable[Contract]) -> bool:
    return not allocation_issues(inst, contracts)


def check_allocation(inst: Instance, contracts: Iterable[Contract]) -> Allocation:
    contracts = frozenset(contracts)
    problems = allocation_issues(inst, contracts)
    if problems:
        raise InvalidAllocation("; ".join(problems))
    return Allocation(contracts=contracts)


def has_homogeneous_burden(inst: Instance) -> bool:
    return len({s.burden_size for s in inst.seekers}) <= 1


def satisfies_large_burden_priority(inst: Instance, state_id: str) -> bool:
    """a π_m a' implies s(a) ≥ s(a'): higher priority never has a smaller burden."""
    order = require_state(inst, state_id).priority
    sizes = [inst.burden(a) for a in order]
    return all(sizes[i] >= sizes[j] for i in range(len(sizes)) for j in range(i + 1, len(sizes)))


def satisfies_small_burden_priority(inst: Instance, state_id: str) -> bool:
    """a π_m a' implies s(a) ≤ s(a')."""
    order = require_state(inst, state_id).priority
    sizes = [inst.burden(a) for a in order]
    return all(sizes[i] <= sizes[j] for i in range(len(sizes)) for j in range(i + 1, len(sizes)))


def with_preference(inst: Instance, pref: Preference) -> Instance:
    """The profile (P̂_a, P_{-a}): replace one seeker's ranking."""
    require_seeker(inst, pref.seeker)
    others = tuple(p for p in inst.preferences if p.seeker != pref.seeker)
    return inst.replace(preferences=tuple(sorted(others + (pref,), key=lambda p: p.seeker)))


def with_waiting_room(
    inst: Instance,
    state_id: str = "waiting-room",
    wait: Optional[Fraction] = None,
    priority: Optional[Tuple[str, ...]] = None,
) -> Instance:
    """
    Add a fictitious state that absorbs everybody: quota Σ s(a) and as many slots (never fewer than |A|)
    at one wait time (the longest by default). Seekers are appended to the
    bottom of their rankings at that contract.
    """
    if inst.has_state(state_id):
        raise UnknownState(f"state {state_id} already exists")
    if wait is None:
        if not inst.waits.times:
            raise UnknownState("cannot add a waiting room without wait times")
        wait = inst.waits.times[-1]
    quota = sum(s.burden_size for s in inst.seekers)
    room = MemberState(
        id=state_id,
        quota=quota,
        capacities={w: (quota if w == wait else 0) for w in inst.waits.times},
        priority=tuple(inst.seeker_ids) if priority is None else tuple(priority),
    )
    prefs = tuple(
        Preference(seeker=a, ranking=inst.preference(a).ranking + ((state_id, wait),))
        for a in inst.seeker_ids
    )
    return inst.replace(states=inst.states + (room,), preferences=prefs)
