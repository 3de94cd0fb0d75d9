"""
Exhaustive choice-rule property checks over every subset of a small universe:
substitutability, unilateral substitutability, the law of aggregate demand,
irrelevance of rejected contracts, and the pinned-completion search.

Witness layout shared by every check: `offered` is X', `contract` is the added
x, `other` is the second added x' (substitutability only), and `outputs` holds
the two rule outputs being compared, the one for the smaller offered set first.
"""
import logging
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from asylum.choice import ChoiceRule, Rule
from asylum.enumeration import guard_universe, iter_subsets
from asylum.instance import require_state
from asylum.models import Contract, Instance, format_contracts
from asylum.schemas import AuditReport, Witness

logger = logging.getLogger(__name__)

Table = Dict[FrozenSet[Contract], FrozenSet[Contract]]


def rule_table(rule: Rule, items: Tuple[Contract, ...]) -> Table:
    """rule(X') for every X' ⊆ items."""
    return {offered: frozenset(rule(offered)) for offered in iter_subsets(items)}


def _prepare(inst: Instance, state_id: str, rule: Rule, universe: Iterable[Contract],
             max_universe: Optional[int]) -> Tuple[Tuple[Contract, ...], Table]:
    require_state(inst, state_id)
    items = guard_universe(universe, max_universe)
    return items, rule_table(rule, items)


def _sorted(contracts: Iterable[Contract]) -> Tuple[Contract, ...]:
    return tuple(sorted(contracts))


def _substitutability_witnesses(
    state_id: str,
    items: Tuple[Contract, ...],
    table: Table,
    kind: str,
    admissible: Callable[[FrozenSet[Contract], Contract, Contract], bool],
) -> List[Witness]:
    witnesses: List[Witness] = []
    for offered in table:
        rest = [c for c in items if c not in offered]
        for x in rest:
            with_x = offered | {x}
            if x in table[with_x]:
                continue
            for other in rest:
                if other == x or not admissible(offered, x, other):
                    continue
                with_both = with_x | {other}
                if x in table[with_both]:
                    witnesses.append(Witness(
                        kind=kind,
                        state=state_id,
                        offered=_sorted(offered),
                        contract=x,
                        other=other,
                        outputs=(_sorted(table[with_x]), _sorted(table[with_both])),
                        expected=f"{x.label()} rejected from {format_contracts(with_both)}",
                        observed=f"chosen there but rejected from {format_contracts(with_x)}",
                    ))
    return witnesses


def is_substitutable(
    inst: Instance, state_id: str, rule: Rule, universe: Iterable[Contract], max_universe: Optional[int] = None
) -> AuditReport:
    """Fails iff some x is chosen from X' ∪ {x, x'} but not from X' ∪ {x}."""
    items, table = _prepare(inst, state_id, rule, universe, max_universe)
    witnesses = _substitutability_witnesses(state_id, items, table, "substitutability", lambda *_: True)
    return AuditReport.build("is_substitutable", witnesses, subsets=len(table), universe=len(items))


def is_unilaterally_substitutable(
    inst: Instance, state_id: str, rule: Rule, universe: Iterable[Contract], max_universe: Optional[int] = None
) -> AuditReport:
    """Substitutability restricted to seekers a_x without a contract in X'."""
    items, table = _prepare(inst, state_id, rule, universe, max_universe)

    def seeker_absent(offered: FrozenSet[Contract], x: Contract, other: Contract) -> bool:
        return all(c.seeker != x.seeker for c in offered)

    witnesses = _substitutability_witnesses(state_id, items, table, "unilateral-substitutability", seeker_absent)
    return AuditReport.build("is_unilaterally_substitutable", witnesses, subsets=len(table), universe=len(items))


def satisfies_LAD(
    inst: Instance, state_id: str, rule: Rule, universe: Iterable[Contract], max_universe: Optional[int] = None
) -> AuditReport:
    """Fails iff |rule(X' ∪ {x})| < |rule(X')| for some x ∉ X'."""
    items, table = _prepare(inst, state_id, rule, universe, max_universe)
    witnesses: List[Witness] = []
    for offered, chosen in table.items():
        for x in items:
            if x in offered:
                continue
            grown = table[offered | {x}]
            if len(grown) < len(chosen):
                witnesses.append(Witness(
                    kind="law-of-aggregate-demand", state=state_id, offered=_sorted(offered), contract=x,
                    outputs=(_sorted(chosen), _sorted(grown)),
                    expected=f"at least {len(chosen)} chosen", observed=f"{len(grown)} chosen",
                ))
    return AuditReport.build("satisfies_LAD", witnesses, subsets=len(table), universe=len(items))


def satisfies_IRC(
    inst: Instance, state_id: str, rule: Rule, universe: Iterable[Contract], max_universe: Optional[int] = None
) -> AuditReport:
    """Fails iff removing a rejected contract x changes the choice: rule(X' ∪ {x}) ≠ rule(X')."""
    items, table = _prepare(inst, state_id, rule, universe, max_universe)
    witnesses: List[Witness] = []
    for offered, chosen in table.items():
        for x in items:
            if x in offered:
                continue
            grown = table[offered | {x}]
            if x not in grown and grown != chosen:
                witnesses.append(Witness(
                    kind="irrelevance-of-rejected-contracts", state=state_id, offered=_sorted(offered),
                    contract=x, outputs=(_sorted(chosen), _sorted(grown)),
                    expected=format_contracts(chosen), observed=format_contracts(grown),
                ))
    return AuditReport.build("satisfies_IRC", witnesses, subsets=len(table), universe=len(items))


def _pinned(contracts: FrozenSet[Contract]) -> bool:
    seekers = [c.seeker for c in contracts]
    return len(seekers) == len(set(seekers))


def pinned_completion_witness(
    inst: Instance,
    state_id: str,
    prop: str,
    universe: Iterable[Contract],
    base_rule: Optional[Rule] = None,
    max_universe: Optional[int] = None,
) -> AuditReport:
    """
    Search for a violation of `prop` ("substitutability" or "LAD") that uses
    only sets with at most one contract per seeker. Every completion of the
    base rule must agree with it there, so a witness shows that no completion
    has the property.
    """
    if prop not in ("substitutability", "LAD"):
        raise ValueError(f"unknown property {prop!r}")
    base_rule = ChoiceRule(inst, state_id) if base_rule is None else base_rule
    items, table = _prepare(inst, state_id, base_rule, universe, max_universe)
    pinned: Table = {offered: chosen for offered, chosen in table.items() if _pinned(offered)}
    witnesses: List[Witness] = []
    for offered, chosen in pinned.items():
        for x in items:
            with_x = offered | {x}
            if x in offered or with_x not in pinned:
                continue
            if prop == "LAD":
                if len(pinned[with_x]) < len(chosen):
                    witnesses.append(Witness(
                        kind="pinned-LAD", state=state_id, offered=_sorted(offered), contract=x,
                        outputs=(_sorted(chosen), _sorted(pinned[with_x])),
                        expected=f"at least {len(chosen)} chosen", observed=f"{len(pinned[with_x])} chosen",
                    ))
                continue
            if x in pinned[with_x]:
                continue
            for other in items:
                with_both = with_x | {other}
                if other in with_x or with_both not in pinned:
                    continue
                if x in pinned[with_both]:
                    witnesses.append(Witness(
                        kind="pinned-substitutability", state=state_id, offered=_sorted(offered),
                        contract=x, other=other,
                        outputs=(_sorted(pinned[with_x]), _sorted(pinned[with_both])),
                        expected=f"{x.label()} rejected from {format_contracts(with_both)}",
                        observed=f"chosen there but rejected from {format_contracts(with_x)}",
                    ))
    logger.info("pinned search for %s on %s: %d pinned sets, %d witnesses", prop, state_id, len(pinned), len(witnesses))
    return AuditReport.build("pinned_completion_witness", witnesses, pinned_sets=len(pinned), universe=len(items))


def recheck_witness(rule: Rule, witness: Witness) -> bool:
    """
    Re-run `rule` on the sets a witness names and confirm the defining
    inequality of its kind still fails there. Independent of the table the
    audit built.
    """
    offered = frozenset(witness.offered)
    x, other = witness.contract, witness.other
    if x is None:
        raise ValueError(f"{witness.kind} witness carries no contract")
    with_x = offered | {x}
    if x in offered:
        return False
    if witness.kind in ("substitutability", "unilateral-substitutability", "pinned-substitutability"):
        if other is None or other in with_x:
            return False
        with_both = with_x | {other}
        if witness.kind == "unilateral-substitutability" and x.seeker in {c.seeker for c in offered}:
            return False
        if witness.kind == "pinned-substitutability" and not _pinned(with_both):
            return False
        return x not in rule(with_x) and x in rule(with_both)
    if witness.kind in ("law-of-aggregate-demand", "pinned-LAD"):
        if witness.kind == "pinned-LAD" and not _pinned(with_x):
            return False
        return len(rule(with_x)) < len(rule(offered))
    if witness.kind == "irrelevance-of-rejected-contracts":
        grown = frozenset(rule(with_x))
        return x not in grown and grown != frozenset(rule(offered))
    raise ValueError(f"no definition to recheck for witness kind {witness.kind!r}")
