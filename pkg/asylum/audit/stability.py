"""
Stability of allocations and brute-force enumeration of the stable set.

An allocation Y is stable when it is individually rational (every contract is
listed by its seeker and every state would keep its own part, C_m(Y) = Y_m)
and no seeker has a listed contract x she prefers to her own with
x ∈ C_{m_x}(Y ∪ {x}).
"""
import logging
from math import prod
from typing import Dict, FrozenSet, List, Mapping, Optional, Set

from asylum.choice import Rule, rules_for
from asylum.config import get_settings
from asylum.errors import SpaceTooLarge
from asylum.instance import contracts_at, contracts_of, full_contract_universe, weakly_prefers
from asylum.mechanism import CumulativeOffer
from asylum.models import Allocation, Contract, Instance, format_contracts, format_outcome
from asylum.schemas import AuditReport, Witness

logger = logging.getLogger(__name__)

SELECTIONS = ("lexicographic-min", "lexicographic-max")


def _violations(
    inst: Instance, rules: Mapping[str, Rule], contracts: FrozenSet[Contract], first_only: bool = False
) -> List[Witness]:
    found: List[Witness] = []
    assignment = {c.seeker: c for c in contracts}

    for c in sorted(contracts):
        if not inst.preference(c.seeker).lists(c):
            found.append(Witness(
                kind="individual-rationality", seeker=c.seeker, contract=c,
                expected="only listed contracts", observed=f"{c.label()} is unlisted",
            ))
            if first_only:
                return found
    for m in inst.state_ids:
        own = contracts_at(contracts, m)
        kept = frozenset(rules[m](contracts))
        if kept != own:
            found.append(Witness(
                kind="individual-rationality", state=m, offered=tuple(sorted(own)),
                outputs=(tuple(sorted(kept)),),
                expected=format_contracts(own), observed=format_contracts(kept),
            ))
            if first_only:
                return found

    for seeker in inst.seeker_ids:
        pref = inst.preference(seeker)
        current = assignment.get(seeker)
        for x in pref.contracts():
            if weakly_prefers(pref, current, x):
                break
            if x in rules[x.state](contracts | {x}):
                found.append(Witness(
                    kind="blocking", seeker=seeker, state=x.state, contract=x,
                    expected=f"{x.label()} rejected from Y ∪ {{x}}",
                    observed=f"chosen; {seeker} prefers it to {format_outcome(current)}",
                ))
                if first_only:
                    return found
    return found


def is_stable(inst: Instance, rules: Mapping[str, Rule], alloc: Allocation) -> AuditReport:
    """Every blocking contract and individual-rationality failure of `alloc`."""
    witnesses = _violations(inst, rules, alloc.contracts)
    return AuditReport.build("is_stable", witnesses, allocation=str(alloc))


def naive_blocking_scan(inst: Instance, rules: Mapping[str, Rule], alloc: Allocation) -> Set[Contract]:
    """Double loop over seekers and the whole contract universe, comparing ranking positions directly."""
    blocking: Set[Contract] = set()
    universe = full_contract_universe(inst)
    for seeker in inst.seeker_ids:
        pref = inst.preference(seeker)
        held = sorted(contracts_of(alloc.contracts, seeker))
        held_position = pref.position(held[0]) if held else len(pref.ranking)
        if held_position is None:
            held_position = len(pref.ranking) + 1
        for x in universe:
            if x.seeker != seeker or x in alloc.contracts:
                continue
            position = pref.position(x)
            if position is None or position >= held_position:
                continue
            if x in rules[x.state](set(alloc.contracts) | {x}):
                blocking.add(x)
    return blocking


def allocation_space_size(inst: Instance) -> int:
    return prod(len(inst.preference(a).ranking) + 1 for a in inst.seeker_ids)


def iter_allocations(inst: Instance, max_allocations: Optional[int] = None):
    """
    Every allocation built from listed contracts, capacities respected.

    Raises:
        SpaceTooLarge: the unpruned space exceeds the guard
    """
    bound = get_settings().max_allocations if max_allocations is None else max_allocations
    size = allocation_space_size(inst)
    if size > bound:
        raise SpaceTooLarge("allocation space", size, bound)

    seekers = inst.seeker_ids
    options = [[None] + list(inst.preference(a).contracts()) for a in seekers]
    load: Dict[tuple, int] = {}
    chosen: List[Contract] = []

    def extend(i: int):
        if i == len(seekers):
            yield frozenset(chosen)
            return
        for option in options[i]:
            if option is None:
                yield from extend(i + 1)
                continue
            key = (option.state, option.wait)
            if load.get(key, 0) >= inst.state(option.state).capacity(option.wait):
                continue
            load[key] = load.get(key, 0) + 1
            chosen.append(option)
            yield from extend(i + 1)
            chosen.pop()
            load[key] -= 1

    return extend(0)


def enumerate_stable(
    inst: Instance, rules: Optional[Mapping[str, Rule]] = None, max_allocations: Optional[int] = None
) -> List[Allocation]:
    """All stable allocations in canonical order (ĉ_m rules unless given)."""
    rules = rules_for(inst) if rules is None else rules
    stable = [
        Allocation(contracts=contracts)
        for contracts in iter_allocations(inst, max_allocations)
        if not _violations(inst, rules, contracts, first_only=True)
    ]
    stable.sort(key=Allocation.key)
    logger.info("found %d stable allocations", len(stable))
    return stable


class StableSelecting:
    """
    A stable mechanism: pick the smallest or largest stable allocation in the
    canonical order, or fall back to the cumulative offer outcome when the
    stable set is empty.
    """

    def __init__(self, selection: str = "lexicographic-min", variant: str = "base",
                 max_allocations: Optional[int] = None):
        if selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")
        self.selection = selection
        self.variant = variant
        self.max_allocations = max_allocations
        self.name = f"stable-selecting[{selection}]"
        self.fallback = CumulativeOffer(variant)
        self._rules = None
        self._outcomes: Dict[tuple, Allocation] = {}

    def __call__(self, inst: Instance) -> Allocation:
        rules = self.fallback.rules(inst)
        if rules is not self._rules:
            self._rules = rules
            self._outcomes = {}
        key = inst.profile_key()
        outcome = self._outcomes.get(key)
        if outcome is not None:
            return outcome
        stable = enumerate_stable(inst, rules, self.max_allocations)
        if stable:
            outcome = stable[0] if self.selection == "lexicographic-min" else stable[-1]
        else:
            logger.warning("no stable allocation; %s falls back to cumulative offer", self.name)
            outcome = self.fallback(inst)
        self._outcomes[key] = outcome
        return outcome


def stable_selecting_mechanism(selection: str = "lexicographic-min", variant: str = "base") -> StableSelecting:
    return StableSelecting(selection, variant)

