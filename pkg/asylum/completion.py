"""
The completed choice rule ĉ'_m: seekers already holding a contract stay in
the race, so only accepted contracts (not their seekers) leave the candidate
pool. Also the completion check and the single-displacement alignment check.
"""
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

from asylum.choice import Rule, build_trace, choose, choose_sequence
from asylum.enumeration import guard_universe, iter_subsets
from asylum.errors import PreconditionUnmet
from asylum.instance import burden_of, require_state
from asylum.models import Contract, Instance, format_contracts
from asylum.schemas import AuditReport, ChoiceTrace, Witness

logger = logging.getLogger(__name__)


def choose_completed(inst: Instance, state_id: str, offered: Iterable[Contract]) -> ChoiceTrace:
    """Run ĉ'_m on X'; the result may hold several contracts of one seeker."""
    return build_trace(inst, state_id, offered, completed=True)


def is_completion_on(
    inst: Instance,
    state_id: str,
    completed_rule: Rule,
    base_rule: Rule,
    universe: Iterable[Contract],
    max_universe: Optional[int] = None,
) -> AuditReport:
    """Whenever the completed rule gives no seeker two contracts it must agree with the base rule."""
    require_state(inst, state_id)
    items = guard_universe(universe, max_universe)
    witnesses: List[Witness] = []
    examined = 0
    for offered in iter_subsets(items):
        examined += 1
        completed = frozenset(completed_rule(offered))
        base = frozenset(base_rule(offered))
        seekers = [c.seeker for c in completed]
        if completed != base and len(seekers) == len(set(seekers)):
            witnesses.append(Witness(
                kind="not-a-completion",
                state=state_id,
                offered=tuple(sorted(offered)),
                outputs=(tuple(sorted(completed)), tuple(sorted(base))),
                expected=format_contracts(base),
                observed=format_contracts(completed),
            ))
    return AuditReport.build("is_completion_on", witnesses, subsets=examined, universe=len(items))


def _alignment_witnesses(
    state_id: str,
    former: Sequence[Contract],
    latter: Sequence[Contract],
    l1: int,
    l2: Optional[int],
    offered: Tuple[Contract, ...],
    x_star: Contract,
) -> List[Witness]:
    """
    Compare the accepted sequences F (without x*) and L (with x*), 1-indexed.

    Before l1 they agree. When w* is full in F, L[j] = F[j-1] on l1 < j <= l2 and
    they agree again after l2. Otherwise everything after l1 is shifted by one.
    """
    witnesses: List[Witness] = []

    def mismatch(j: int, expected: Optional[Contract], observed: Optional[Contract]) -> None:
        witnesses.append(Witness(
            kind="displacement",
            state=state_id,
            offered=offered,
            contract=x_star,
            outputs=(tuple(former), tuple(latter)),
            expected=f"position {j}: {expected.label() if expected else 'nothing'}",
            observed=f"position {j}: {observed.label() if observed else 'nothing'}",
        ))

    def at(seq: Sequence[Contract], j: int) -> Optional[Contract]:
        return seq[j - 1] if 1 <= j <= len(seq) else None

    expected_length = len(former) if l2 is not None else len(former) + 1
    for j in range(1, max(len(latter), expected_length) + 1):
        if j < l1:
            expected = at(former, j)
        elif j == l1:
            expected = x_star
        elif l2 is None or j <= l2:
            expected = at(former, j - 1)
        else:
            expected = at(former, j)
        observed = at(latter, j)
        if expected != observed:
            mismatch(j, expected, observed)
    return witnesses


def _recover_indices(inst: Instance, state_id: str, former: Sequence[Contract], latter: Sequence[Contract],
                     x_star: Contract) -> Tuple[int, Optional[int]]:
    l1 = latter.index(x_star) + 1
    at_wait = [j for j, c in enumerate(former, start=1) if c.wait == x_star.wait]
    full = len(at_wait) >= inst.state(state_id).capacity(x_star.wait)
    return l1, (at_wait[-1] if full and at_wait else None)


def lemma1_displacement_check(
    inst: Instance, state_id: str, offered: Iterable[Contract], x_star: Contract
) -> AuditReport:
    """
    Adding one accepted contract x* to X' displaces at most one previously
    accepted contract of ĉ'_m.

    The alignment is checked with the quota stop disabled; `stats` also says
    whether it survives with the stop active (`quota_reading_aligned`) and
    whether the burden of X' ∪ {x*} reaches the quota (`quota_hypothesis`).

    Raises:
        PreconditionUnmet: x* is already in X', is not at this state, or is
            not chosen by ĉ_m from X' ∪ {x*}
    """
    state = require_state(inst, state_id)
    base = frozenset(c for c in offered if c.state == state_id)
    if x_star.state != state_id:
        raise PreconditionUnmet(f"{x_star.label()} is not a contract at {state_id}")
    if x_star in base:
        raise PreconditionUnmet(f"{x_star.label()} is already offered")
    extended = base | {x_star}
    if x_star not in choose(inst, state_id, extended).result:
        raise PreconditionUnmet(f"{x_star.label()} is not chosen from X' ∪ {{x*}}")

    former = choose_sequence(inst, state_id, base, completed=True, quota_stop=False)
    latter = choose_sequence(inst, state_id, extended, completed=True, quota_stop=False)
    if x_star not in latter:
        raise PreconditionUnmet(f"{x_star.label()} is not accepted by the completed run")
    l1, l2 = _recover_indices(inst, state_id, former, latter, x_star)
    key = tuple(sorted(base))
    witnesses = _alignment_witnesses(state_id, former, latter, l1, l2, key, x_star)

    quota_former = choose_sequence(inst, state_id, base, completed=True)
    quota_latter = choose_sequence(inst, state_id, extended, completed=True)
    quota_aligned = False
    if x_star in quota_latter:
        q1, q2 = _recover_indices(inst, state_id, quota_former, quota_latter, x_star)
        quota_aligned = not _alignment_witnesses(state_id, quota_former, quota_latter, q1, q2, key, x_star)

    logger.debug("lemma1 on %s with x*=%s: l1=%s l2=%s", state_id, x_star.label(), l1, l2)
    return AuditReport.build(
        "lemma1_displacement_check",
        witnesses,
        l1=l1,
        l2=l2,
        wait_full=l2 is not None,
        quota_hypothesis=burden_of(inst, extended) >= state.quota,
        quota_reading_aligned=quota_aligned,
    )
