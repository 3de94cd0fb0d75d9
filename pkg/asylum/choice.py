"""
Member-state choice rule ĉ_m, its qualification predicates and the axiom checks.

A choice rule is any callable mapping a contract set X' to the subset a state
chooses from X'_m. `ChoiceRule` is the memoised implementation of ĉ_m (and,
with completed=True, of the completion ĉ'_m); the checkers accept any callable.
"""
import logging
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Set, Tuple

from asylum.config import get_settings
from asylum.enumeration import guard_universe, iter_subsets
from asylum.errors import UnknownSeeker, UnknownWaitTime
from asylum.instance import contracts_at, contracts_of, contracts_with_wait, require_state, seekers_in
from asylum.models import Contract, Instance, format_contracts
from asylum.schemas import AuditReport, ChoiceStep, ChoiceTrace, Witness

logger = logging.getLogger(__name__)

Rule = Callable[[Iterable[Contract]], FrozenSet[Contract]]


class RawStep(NamedTuple):
    k: int
    accepted: Tuple[Contract, ...]
    candidates: Tuple[Contract, ...]
    seeker: Optional[str]
    contract: Optional[Contract]
    stop_reason: str


def run_steps(
    inst: Instance,
    state_id: str,
    offered: Iterable[Contract],
    completed: bool = False,
    quota_stop: bool = True,
) -> Iterator[RawStep]:
    """
    Drive the step loop of ĉ_m (or ĉ'_m when `completed`).

    At step k the accepted set X^{k-1} and candidate set Z^{k-1} are formed;
    the loop stops when the burden of X^{k-1} reaches the quota (unless
    `quota_stop` is off) or Z^{k-1} is empty. Otherwise the highest-priority
    seeker in A(Z^{k-1}) gets her lowest-wait candidate.
    """
    state = require_state(inst, state_id)
    pool = sorted(c for c in set(offered) if c.state == state_id)
    for c in pool:
        if not state.ranks(c.seeker):
            raise UnknownSeeker(f"{c.seeker} is not ranked by {state_id}")

    accepted: List[Contract] = []
    accepted_set: Set[Contract] = set()
    holders: Set[str] = set()
    load: Dict[Fraction, int] = {}
    burden = 0
    k = 1
    while True:
        candidates = tuple(
            c for c in pool
            if state.capacity(c.wait) > load.get(c.wait, 0)
            and (c not in accepted_set if completed else c.seeker not in holders)
        )
        if quota_stop and burden >= state.quota:
            yield RawStep(k, tuple(accepted), candidates, None, None, "quota-reached")
            return
        if not candidates:
            yield RawStep(k, tuple(accepted), candidates, None, None, "no-candidates")
            return
        seeker = min((c.seeker for c in candidates), key=state.rank)
        own = [c for c in candidates if c.seeker == seeker]
        pick = min(own, key=lambda c: c.wait)
        assert sum(1 for c in own if c.wait == pick.wait) == 1
        yield RawStep(k, tuple(accepted), candidates, seeker, pick, "continued")

        accepted.append(pick)
        accepted_set.add(pick)
        holders.add(seeker)
        load[pick.wait] = load.get(pick.wait, 0) + 1
        burden += inst.burden(seeker)
        k += 1


def choose_sequence(
    inst: Instance,
    state_id: str,
    offered: Iterable[Contract],
    completed: bool = False,
    quota_stop: bool = True,
) -> Tuple[Contract, ...]:
    """Accepted contracts in acceptance order, without building a trace."""
    last = None
    for last in run_steps(inst, state_id, offered, completed, quota_stop):
        pass
    return last.accepted


def build_trace(
    inst: Instance,
    state_id: str,
    offered: Iterable[Contract],
    completed: bool = False,
    quota_stop: bool = True,
) -> ChoiceTrace:
    offered = frozenset(offered)
    steps = tuple(
        ChoiceStep(
            k=raw.k,
            accepted_so_far=raw.accepted,
            candidates=raw.candidates,
            picked_seeker=raw.seeker,
            picked_contract=raw.contract,
            stop_reason=raw.stop_reason,
        )
        for raw in run_steps(inst, state_id, offered, completed, quota_stop)
    )
    trace = ChoiceTrace(
        state=state_id,
        rule="completed" if completed else "base",
        offered=tuple(sorted(offered)),
        steps=steps,
        result=frozenset(steps[-1].accepted_so_far),
    )
    logger.debug("%s %s chose %s from %s", trace.rule, state_id, format_contracts(trace.result), format_contracts(offered))
    return trace


def choose(inst: Instance, state_id: str, offered: Iterable[Contract]) -> ChoiceTrace:
    """Run ĉ_m on X' and return the full step trace; `.result` is ĉ_m(X')."""
    return build_trace(inst, state_id, offered, completed=False)


class ChoiceRule:
    """
    Memoised ĉ_m (or ĉ'_m) as a callable X' -> chosen set.

    The rule only reads the state's quota, capacities and priority plus the
    seekers' burden sizes, so one object can be shared by every instance that
    differs from `inst` in preferences only.
    """

    def __init__(self, inst: Instance, state_id: str, completed: bool = False):
        require_state(inst, state_id)
        self.inst = inst
        self.state_id = state_id
        self.completed = completed
        self.name = f"{'completed' if completed else 'base'}:{state_id}"
        self._cache: Dict[FrozenSet[Contract], FrozenSet[Contract]] = {}

    def __call__(self, offered: Iterable[Contract]) -> FrozenSet[Contract]:
        key = frozenset(c for c in offered if c.state == self.state_id)
        chosen = self._cache.get(key)
        if chosen is None:
            chosen = frozenset(choose_sequence(self.inst, self.state_id, key, self.completed))
            self._cache[key] = chosen
        return chosen

    def __repr__(self) -> str:
        return f"ChoiceRule({self.name})"


def choice_rule(inst: Instance, state_id: str, completed: bool = False) -> ChoiceRule:
    return ChoiceRule(inst, state_id, completed)


def rules_for(inst: Instance, completed: bool = False) -> Dict[str, ChoiceRule]:
    """One rule per member state."""
    return {m: ChoiceRule(inst, m, completed) for m in inst.state_ids}


# ---------------------------------------------------------------------------
# Qualification predicates
# ---------------------------------------------------------------------------

def qualifies_for_acceptance(
    inst: Instance, state_id: str, offered: Iterable[Contract], chosen: Iterable[Contract], seeker: str
) -> bool:
    """Burden of higher-priority seekers already chosen stays below q_m."""
    state = require_state(inst, state_id)
    if not state.ranks(seeker):
        raise UnknownSeeker(f"unknown seeker {seeker}")
    ahead = {c.seeker for c in chosen if c.state == state_id and state.prioritises(c.seeker, seeker)}
    return sum(inst.burden(a) for a in ahead) < state.quota


def qualifies_for_wait_time(
    inst: Instance,
    state_id: str,
    offered: Iterable[Contract],
    chosen: Iterable[Contract],
    seeker: str,
    wait: Fraction,
) -> bool:
    """She is offered (m, w) and fewer than r_m^w higher-priority seekers hold w."""
    state = require_state(inst, state_id)
    if wait not in inst.waits:
        raise UnknownWaitTime(f"unknown wait time {wait}")
    if not state.ranks(seeker):
        raise UnknownSeeker(f"unknown seeker {seeker}")
    if Contract(seeker, state_id, wait) not in set(offered):
        return False
    ahead = {
        c.seeker for c in contracts_with_wait(contracts_at(chosen, state_id), wait)
        if state.prioritises(c.seeker, seeker)
    }
    return len(ahead) < state.capacity(wait)


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------

AXIOMS = ("feasibility", "early-filling", "respecting-priorities")


def axiom_violations(
    inst: Instance, state_id: str, offered: FrozenSet[Contract], chosen: FrozenSet[Contract]
) -> Dict[str, Witness]:
    """The axioms violated by choosing `chosen` from `offered`, one witness each."""
    state = inst.state(state_id)
    offered_m = frozenset(c for c in offered if c.state == state_id)
    found: Dict[str, Witness] = {}
    key = tuple(sorted(offered))

    def witness(kind: str, expected: str, observed: str, **fields) -> Witness:
        return Witness(kind=kind, state=state_id, offered=key, outputs=(tuple(sorted(chosen)),),
                       expected=expected, observed=observed, **fields)

    stray = sorted(chosen - offered_m)
    seekers = [c.seeker for c in chosen]
    per_wait: Dict[Fraction, int] = {}
    for c in chosen:
        per_wait[c.wait] = per_wait.get(c.wait, 0) + 1
    over = sorted(w for w, n in per_wait.items() if n > state.capacity(w))
    if stray:
        found["feasibility"] = witness("feasibility", "chosen ⊆ X'_m", f"{stray[0].label()} not offered at {state_id}",
                                       contract=stray[0])
    elif len(seekers) != len(set(seekers)):
        dup = sorted(a for a in set(seekers) if seekers.count(a) > 1)[0]
        found["feasibility"] = witness("feasibility", "at most one contract per seeker",
                                       f"{dup} holds {seekers.count(dup)}", seeker=dup)
    elif over:
        found["feasibility"] = witness("feasibility", f"at most {state.capacity(over[0])} at wait {over[0]}",
                                       f"{per_wait[over[0]]} chosen")

    for x in sorted(chosen & offered_m):
        for lower in sorted(offered_m - chosen):
            if lower.seeker == x.seeker and lower.wait < x.wait and qualifies_for_wait_time(
                inst, state_id, offered_m, chosen, x.seeker, lower.wait
            ):
                found.setdefault("early-filling", witness(
                    "early-filling", f"{x.seeker} does not qualify for wait {lower.wait}",
                    f"accepted at {x.label()} while qualifying for {lower.label()}",
                    seeker=x.seeker, contract=x, other=lower,
                ))

    holders = seekers_in(chosen)
    for seeker in sorted(seekers_in(offered_m), key=state.rank):
        qualifies = qualifies_for_acceptance(inst, state_id, offered_m, chosen, seeker) and any(
            qualifies_for_wait_time(inst, state_id, offered_m, chosen, seeker, c.wait)
            for c in contracts_of(offered_m, seeker)
        )
        holds = seeker in holders
        if holds != qualifies:
            found.setdefault("respecting-priorities", witness(
                "respecting-priorities",
                f"{seeker} holds a contract iff she qualifies",
                f"holds={holds} qualifies={qualifies}",
                seeker=seeker,
            ))
            break
    return found


def check_axioms(
    inst: Instance, state_id: str, rule: Rule, universe: Iterable[Contract], max_universe: Optional[int] = None
) -> AuditReport:
    """
    Score a choice rule against feasibility, early filling and respecting
    priorities on every subset of `universe`.

    Returns the first witness (smallest subset) for each violated axiom.
    """
    require_state(inst, state_id)
    items = guard_universe(universe, max_universe)
    first: Dict[str, Witness] = {}
    examined = 0
    for offered in iter_subsets(items):
        examined += 1
        chosen = frozenset(rule(offered))
        for axiom, w in axiom_violations(inst, state_id, offered, chosen).items():
            first.setdefault(axiom, w)
        if len(first) == len(AXIOMS):
            break
    logger.info("check_axioms on %s: %d subsets, violated %s", state_id, examined, sorted(first))
    return AuditReport.build("check_axioms", list(first.values()), subsets=examined, universe=len(items))


def unique_axiom_rule_oracle(
    inst: Instance, state_id: str, universe: Iterable[Contract], max_universe: Optional[int] = None
) -> AuditReport:
    """
    Brute-force every feasible selection for every X' and confirm ĉ_m is the
    only rule passing the axioms.

    The axioms are checked per X', so the passing rules are exactly the
    products of the passing selections per subset; uniqueness holds iff each
    subset has exactly one passing selection and it equals ĉ_m(X').
    """
    require_state(inst, state_id)
    bound = get_settings().max_oracle_universe if max_universe is None else max_universe
    items = guard_universe(universe, bound)
    base = ChoiceRule(inst, state_id)
    witnesses: List[Witness] = []
    selections = 0
    passing_rules = 1
    for offered in iter_subsets(items):
        expected = base(offered)
        offered_m = tuple(sorted(c for c in offered if c.state == state_id))
        passing = []
        for selection in iter_subsets(offered_m):
            selections += 1
            if not axiom_violations(inst, state_id, offered, selection):
                passing.append(selection)
        passing_rules *= len(passing)
        key = tuple(sorted(offered))
        if expected not in passing:
            witnesses.append(Witness(
                kind="base-rule-fails", state=state_id, offered=key,
                outputs=(tuple(sorted(expected)),), expected="ĉ_m passes the axioms", observed="it does not",
            ))
        for other in passing:
            if other != expected:
                witnesses.append(Witness(
                    kind="second-passing-rule", state=state_id, offered=key,
                    outputs=(tuple(sorted(expected)), tuple(sorted(other))),
                    expected=format_contracts(expected), observed=format_contracts(other),
                ))
    return AuditReport.build(
        "unique_axiom_rule_oracle", witnesses,
        universe=len(items), selections=selections, passing_rules=passing_rules,
    )


def check_trace_invariants(inst: Instance, state_id: str, trace: ChoiceTrace) -> AuditReport:
    """Step growth, stop-reason consistency and result consistency of a trace."""
    state = require_state(inst, state_id)
    witnesses: List[Witness] = []

    def fail(kind: str, expected: str, observed: str) -> None:
        witnesses.append(Witness(kind=kind, state=state_id, offered=trace.offered, expected=expected, observed=observed))

    if not trace.steps:
        fail("empty-trace", "at least one step", "no steps")
        return AuditReport.build("check_trace_invariants", witnesses)
    for prev, step in zip(trace.steps, trace.steps[1:]):
        if step.accepted_so_far != prev.accepted_so_far + (prev.picked_contract,):
            fail("step-growth", f"X^{step.k - 1} = X^{prev.k - 1} + x^{prev.k}", f"step {step.k} accepted set differs")
    for step in trace.steps:
        if len(step.accepted_so_far) != step.k - 1:
            fail("step-size", f"|X^{step.k - 1}| = {step.k - 1}", str(len(step.accepted_so_far)))
        if step.stop_reason == "continued" and step is trace.steps[-1]:
            fail("stop-reason", "last step stops", "continued")
        if step.stop_reason != "continued" and step is not trace.steps[-1]:
            fail("stop-reason", "only the last step stops", f"step {step.k} stops")
    last = trace.steps[-1]
    burden = sum(inst.burden(c.seeker) for c in last.accepted_so_far)
    if last.stop_reason == "quota-reached" and burden < state.quota:
        fail("stop-reason", f"burden ≥ {state.quota}", str(burden))
    if last.stop_reason == "no-candidates" and last.candidates:
        fail("stop-reason", "Z empty", format_contracts(last.candidates))
    if frozenset(last.accepted_so_far) != trace.result:
        fail("result", format_contracts(last.accepted_so_far), format_contracts(trace.result))
    return AuditReport.build("check_trace_invariants", witnesses, steps=len(trace.steps))
