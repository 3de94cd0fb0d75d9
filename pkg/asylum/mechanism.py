"""
Asylum-seeker-proposing cumulative offer mechanism.

In every round one seeker with no tentatively held contract proposes her best
contract not yet proposed; each state holds its choice from everything ever
offered to it. The run ends when no seeker can propose.
"""
import logging
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple, Union

from asylum.choice import Rule, rules_for
from asylum.config import get_settings
from asylum.errors import AsylumMatchError, NonTermination
from asylum.instance import prefers
from asylum.models import Allocation, Contract, Instance, format_contracts
from asylum.schemas import AuditReport, MechanismRound, MechanismTrace, Witness

logger = logging.getLogger(__name__)

OrderPolicy = Callable[[Sequence[str], Optional[str]], str]
Mechanism = Callable[[Instance], Allocation]


def round_robin(eligible: Sequence[str], last: Optional[str]) -> str:
    """Next eligible id after the last proposer, wrapping around."""
    ordered = sorted(eligible)
    if last is None:
        return ordered[0]
    for seeker in ordered:
        if seeker > last:
            return seeker
    return ordered[0]


def lowest_id(eligible: Sequence[str], last: Optional[str]) -> str:
    return min(eligible)


def highest_id(eligible: Sequence[str], last: Optional[str]) -> str:
    return max(eligible)


ORDER_POLICIES: Dict[str, OrderPolicy] = {
    "round-robin": round_robin,
    "lowest-id": lowest_id,
    "highest-id": highest_id,
}


def resolve_policy(order: Union[str, OrderPolicy, None]) -> Tuple[str, OrderPolicy]:
    if order is None:
        order = get_settings().order_policy
    if callable(order):
        return getattr(order, "__name__", "custom"), order
    try:
        return order, ORDER_POLICIES[order]
    except KeyError:
        raise AsylumMatchError(f"unknown order policy {order!r}; expected one of {sorted(ORDER_POLICIES)}")


def cumulative_offer(
    inst: Instance,
    rules: Mapping[str, Rule],
    order: Union[str, OrderPolicy, None] = None,
    record: bool = True,
    variant: str = "custom",
) -> MechanismTrace:
    """
    Run the cumulative offer mechanism with one choice rule per state.

    Args:
        inst: Instance whose reported preferences drive the proposals
        rules: Map state id -> choice rule
        order: Policy name or callable picking the next proposer
        record: Keep the per-round table (off for profile sweeps)
        variant: Label stored on the trace

    Returns:
        MechanismTrace: rounds and the final allocation

    Raises:
        NonTermination: more than |A|·|M|·|W| rounds
    """
    policy_name, policy = resolve_policy(order)
    seekers = inst.seeker_ids
    rankings = {a: inst.preference(a).contracts() for a in seekers}
    next_index = {a: 0 for a in seekers}
    offers: Dict[str, Set[Contract]] = {m: set() for m in inst.state_ids}
    held: Dict[str, FrozenSet[Contract]] = {m: frozenset() for m in inst.state_ids}
    holding: Dict[str, int] = {}
    bound = len(seekers) * len(inst.state_ids) * len(inst.waits)
    rounds: List[MechanismRound] = []
    last: Optional[str] = None
    n = 0

    while True:
        eligible = [a for a in seekers if not holding.get(a) and next_index[a] < len(rankings[a])]
        if not eligible:
            break
        n += 1
        if n > bound:
            raise NonTermination(f"cumulative offer exceeded {bound} rounds")
        seeker = policy(eligible, last)
        proposal = rankings[seeker][next_index[seeker]]
        next_index[seeker] += 1
        last = seeker

        m = proposal.state
        offers[m].add(proposal)
        before = held[m]
        after = frozenset(rules[m](offers[m]))
        held[m] = after
        for c in before - after:
            holding[c.seeker] -= 1
        for c in after - before:
            holding[c.seeker] = holding.get(c.seeker, 0) + 1
        rejected = tuple(sorted((before | {proposal}) - after))
        logger.debug("round %d: %s proposes %s, %s holds %s", n, seeker, proposal.label(), m, format_contracts(after))

        if record:
            rounds.append(MechanismRound(
                index=n,
                proposer=seeker,
                proposed=proposal,
                cumulative_offers={s: tuple(sorted(offers[s])) for s in inst.state_ids},
                tentatively_held={s: tuple(sorted(held[s])) for s in inst.state_ids},
                rejected=rejected,
            ))

    outcome, dropped = _resolve_outcome(inst, held)
    logger.info("cumulative offer (%s, %s) finished after %d rounds: %s", variant, policy_name, n, outcome)
    return MechanismTrace(
        variant=variant,
        policy=policy_name,
        rounds=tuple(rounds),
        outcome=outcome,
        duplicates_dropped=dropped,
    )


def _resolve_outcome(inst: Instance, held: Mapping[str, FrozenSet[Contract]]) -> Tuple[Allocation, Tuple[str, ...]]:
    """∪_m C_m(X_m), keeping each seeker's most preferred contract if she holds several."""
    best: Dict[str, Contract] = {}
    dropped: Set[str] = set()
    for m in sorted(held):
        for c in sorted(held[m]):
            current = best.get(c.seeker)
            if current is None:
                best[c.seeker] = c
                continue
            dropped.add(c.seeker)
            if prefers(inst.preference(c.seeker), c, current):
                best[c.seeker] = c
    if dropped:
        logger.warning("seekers held several contracts at the end: %s", ", ".join(sorted(dropped)))
    return Allocation(contracts=frozenset(best.values())), tuple(sorted(dropped))


def run_with_rule_variants(
    inst: Instance, variant: str = "base", order: Union[str, OrderPolicy, None] = None, record: bool = True
) -> MechanismTrace:
    """Cumulative offer with ĉ_m (`base`) or ĉ'_m (`completed`) at every state."""
    if variant not in ("base", "completed"):
        raise AsylumMatchError(f"unknown rule variant {variant!r}")
    return cumulative_offer(inst, rules_for(inst, completed=variant == "completed"), order, record, variant)


class CumulativeOffer:
    """
    The mechanism φ^c as a callable Instance -> Allocation.

    Choice rules are rebuilt only when the member states change, and outcomes
    are memoised per preference profile, so sweeping many profiles over one
    set of states stays cheap.
    """

    def __init__(self, variant: str = "base", order: Union[str, OrderPolicy, None] = None):
        self.variant = variant
        self.policy_name, self.order = resolve_policy(order)
        self.name = f"cumulative-offer[{variant},{self.policy_name}]"
        self._states = None
        self._seekers = None
        self._rules: Dict[str, Rule] = {}
        self._outcomes: Dict[tuple, Allocation] = {}

    def rules(self, inst: Instance) -> Dict[str, Rule]:
        if self._states != inst.states or self._seekers != inst.seekers:
            self._states = inst.states
            self._seekers = inst.seekers
            self._rules = rules_for(inst, completed=self.variant == "completed")
            self._outcomes = {}
        return self._rules

    def trace(self, inst: Instance, record: bool = True) -> MechanismTrace:
        return cumulative_offer(inst, self.rules(inst), self.order, record, self.variant)

    def __call__(self, inst: Instance) -> Allocation:
        rules = self.rules(inst)
        key = inst.profile_key()
        outcome = self._outcomes.get(key)
        if outcome is None:
            outcome = cumulative_offer(inst, rules, self.order, False, self.variant).outcome
            self._outcomes[key] = outcome
        return outcome


def order_invariance(
    inst: Instance, variant: str = "base", policies: Optional[Sequence[Union[str, OrderPolicy]]] = None
) -> AuditReport:
    """Run every order policy and report outcomes that differ from the first one."""
    policies = list(policies) if policies is not None else list(ORDER_POLICIES)
    outcomes = []
    for order in policies:
        name, _ = resolve_policy(order)
        outcomes.append((name, run_with_rule_variants(inst, variant, order, record=False).outcome))
    reference_name, reference = outcomes[0]
    witnesses = [
        Witness(
            kind="order-dependence",
            outputs=(reference.key(), outcome.key()),
            expected=f"{reference_name}: {reference}",
            observed=f"{name}: {outcome}",
        )
        for name, outcome in outcomes[1:]
        if outcome != reference
    ]
    return AuditReport.build("order_invariance", witnesses, policies=[name for name, _ in outcomes])
