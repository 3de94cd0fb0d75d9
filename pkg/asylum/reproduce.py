"""
End-to-end claims for every bundled example, diffed against the expected
values. `reproduce(name)` returns one Claim per checked statement.
"""
import logging
from typing import Callable, Dict, Iterable, List, NamedTuple

from asylum.audit.manipulation import audit_nom, audit_strategy_proofness
from asylum.audit.properties import (
    is_substitutable,
    is_unilaterally_substitutable,
    pinned_completion_witness,
    satisfies_IRC,
    satisfies_LAD,
)
from asylum.audit.stability import StableSelecting, enumerate_stable, is_stable
from asylum.bundled import bundled_example, numbered_contracts, resolve_name
from asylum.choice import ChoiceRule, check_axioms, rules_for
from asylum.completion import is_completion_on, lemma1_displacement_check
from asylum.instance import full_contract_universe, listed_contract_universe, with_preference
from asylum.mechanism import CumulativeOffer, run_with_rule_variants
from asylum.models import Allocation, Contract, Instance, Preference, format_contracts, format_outcome
from asylum.schemas import AuditReport

logger = logging.getLogger(__name__)


class Claim(NamedTuple):
    example: str
    name: str
    expected: str
    observed: str
    holds: bool


class _Claims:
    def __init__(self, example: str, inst: Instance):
        self.example = example
        self.inst = inst
        self.x = numbered_contracts(inst)
        self.items: List[Claim] = []

    def set(self, *names: str) -> frozenset:
        return frozenset(self.x[n] for n in names)

    def check(self, name: str, expected, observed, render: Callable = str) -> None:
        self.items.append(Claim(self.example, name, render(expected), render(observed), expected == observed))

    def sets(self, name: str, expected: Iterable[Contract], observed: Iterable[Contract]) -> None:
        self.check(name, frozenset(expected), frozenset(observed), format_contracts)

    def verdict(self, name: str, expected: str, report: AuditReport) -> None:
        self.check(name, expected, report.verdict)

    def witness(self, name: str, report: AuditReport, offered, contract=None, other=None) -> None:
        first = report.witnesses[0] if report.witnesses else None
        observed = (first.offered, first.contract, first.other) if first else None
        expected = (tuple(sorted(offered)), contract, other)
        self.check(name, expected, observed, _render_witness)


def _render_witness(value) -> str:
    if value is None:
        return "no witness"
    offered, contract, other = value
    text = f"X'={format_contracts(offered)}"
    if contract is not None:
        text += f", x={contract.label()}"
    if other is not None:
        text += f", x'={other.label()}"
    return text


def _allocations(allocs: Iterable[Allocation]) -> str:
    return "[" + ", ".join(str(a) for a in allocs) + "]"


def _example1(c: _Claims) -> None:
    inst, x = c.inst, c.x
    base = ChoiceRule(inst, "m")
    universe = full_contract_universe(inst)
    for offered, expected in ((("x1", "x2", "x4"), ("x1", "x4")), (("x2", "x4"), ("x2",)),
                              (("x2", "x3"), ("x2", "x3")), (("x1", "x2", "x3"), ("x1",))):
        c.sets(f"ĉ_m({{{','.join(offered)}}})", c.set(*expected), base(c.set(*offered)))
    c.witness("substitutability fails", is_substitutable(inst, "m", base, universe),
              [x["x2"]], x["x4"], x["x1"])
    lad = satisfies_LAD(inst, "m", base, universe)
    c.witness("LAD fails", lad, [x["x2"], x["x3"]], x["x1"])
    c.check("LAD witness count", 1, len(lad.witnesses))
    c.witness("unilateral substitutability fails",
              is_unilaterally_substitutable(inst, "m", base, universe), [x["x2"]], x["x4"], x["x1"])
    c.verdict("IRC holds", "pass", satisfies_IRC(inst, "m", base, universe))
    c.verdict("axioms hold", "pass", check_axioms(inst, "m", base, universe))
    outcome = run_with_rule_variants(inst, "base", record=False).outcome
    c.sets("cumulative offer outcome", c.set("x1", "x4"), outcome.contracts)
    c.check("unique stable allocation", [outcome], enumerate_stable(inst), _allocations)


def _example2(c: _Claims) -> None:
    inst = c.inst
    completed = ChoiceRule(inst, "m", completed=True)
    universe = full_contract_universe(inst)
    for offered, expected in ((("x1", "x2", "x4"), ("x1", "x2")), (("x2", "x4"), ("x2",)),
                              (("x1", "x2", "x3"), ("x1", "x2"))):
        c.sets(f"ĉ'_m({{{','.join(offered)}}})", c.set(*expected), completed(c.set(*offered)))
    c.verdict("substitutability holds", "pass", is_substitutable(inst, "m", completed, universe))
    c.verdict("LAD holds", "pass", satisfies_LAD(inst, "m", completed, universe))
    c.verdict("IRC holds", "pass", satisfies_IRC(inst, "m", completed, universe))
    c.verdict("completion of ĉ_m", "pass", is_completion_on(inst, "m", completed, ChoiceRule(inst, "m"), universe))
    report = lemma1_displacement_check(inst, "m", c.set("x2", "x4"), c.x["x1"])
    c.verdict("single displacement", "pass", report)
    c.check("l1", 1, report.stats["l1"])


def _example3(c: _Claims) -> None:
    inst, x = c.inst, c.x
    base = ChoiceRule(inst, "m")
    universe = listed_contract_universe(inst)
    c.sets("ĉ_m({x2,x3})", c.set("x2"), base(c.set("x2", "x3")))
    c.sets("ĉ_m({x1,x2,x3})", c.set("x1", "x3"), base(c.set("x1", "x2", "x3")))
    pinned = pinned_completion_witness(inst, "m", "substitutability", universe)
    c.witness("no substitutable completion", pinned, [x["x2"]], x["x3"], x["x1"])
    c.check("pinned witness count", 1, len(pinned.witnesses))
    c.verdict("unilateral substitutability fails", "fail",
              is_unilaterally_substitutable(inst, "m", base, universe))
    c.verdict("ĉ'_m satisfies IRC", "pass", satisfies_IRC(inst, "m", ChoiceRule(inst, "m", True), universe))


def _example4(c: _Claims) -> None:
    inst, x = c.inst, c.x
    universe = listed_contract_universe(inst)
    pinned = pinned_completion_witness(inst, "m", "LAD", universe)
    c.witness("no completion satisfies LAD", pinned, [x["x2"], x["x3"]], x["x1"])
    c.check("pinned witness count", 1, len(pinned.witnesses))
    c.witness("ĉ'_m violates LAD", satisfies_LAD(inst, "m", ChoiceRule(inst, "m", True), universe),
              [x["x2"], x["x3"]], x["x1"])


def _example5(c: _Claims) -> None:
    inst = c.inst
    rules = rules_for(inst)
    c.check("stable allocations", [], enumerate_stable(inst, rules), _allocations)
    report = is_stable(inst, rules, Allocation(contracts=c.set("x1", "x3", "x7")))
    blocking = frozenset(w.contract for w in report.witnesses)
    c.sets("{x1,x3,x7} is blocked by", c.set("x6"), blocking)
    outcome = run_with_rule_variants(inst, "base", record=False).outcome
    c.verdict("cumulative offer outcome is unstable", "fail", is_stable(inst, rules, outcome))


def _example6(c: _Claims) -> None:
    inst, x = c.inst, c.x
    rules = rules_for(inst)
    y1 = Allocation(contracts=c.set("x2", "x6", "x8", "x9"))
    y2 = Allocation(contracts=c.set("x1", "x5", "x7", "x9"))
    lie_a2 = Preference.of("a2", [x["x5"], x["x6"], x["x4"]])
    lie_a1 = Preference.of("a1", [x["x1"], x["x3"], x["x2"]])
    after_a2 = with_preference(inst, lie_a2)
    after_both = with_preference(after_a2, lie_a1)

    c.check("stable allocations, truthful", [y1], enumerate_stable(inst, rules), _allocations)
    c.check("stable allocations, a2 misreports", [y1, y2], enumerate_stable(after_a2, rules), _allocations)
    c.check("stable allocations, a1 and a2 misreport", [y2], enumerate_stable(after_both, rules), _allocations)

    cumulative = CumulativeOffer("base")
    c.check("cumulative offer, truthful", y1, cumulative(inst))
    c.check("cumulative offer, a2 misreports", y2, cumulative(after_a2))

    picks_y2 = audit_strategy_proofness(inst, StableSelecting("lexicographic-max"), seekers=["a2"])
    c.check("Y2-selecting: a2 profits from x5-x6-x4", True, any(r.misreport == lie_a2 for r in picks_y2))
    picks_y1 = audit_strategy_proofness(after_a2, StableSelecting("lexicographic-min"), seekers=["a1"])
    c.check("Y1-selecting: a1 profits from x1-x3-x2", True, any(r.misreport == lie_a1 for r in picks_y1))

    nom = audit_nom(inst, cumulative, max_length=3, seekers=["a2"], include_non_obvious=True)
    found = [r for r in nom if r.misreport == lie_a2]
    c.check("a2's manipulation of cumulative offer is found", 1, len(found))
    if found:
        report = found[0]
        c.check("a2's manipulation is not obvious", False, report.obvious)
        c.check("worst cases (truthful, misreport)", (x["x6"], x["x6"]),
                (report.worst_truthful, report.worst_misreport),
                lambda pair: ", ".join(format_outcome(o) for o in pair))
        c.check("best cases (truthful, misreport)", (x["x4"], x["x5"]),
                (report.best_truthful, report.best_misreport),
                lambda pair: ", ".join(format_outcome(o) for o in pair))


CLAIMS: Dict[str, Callable[[_Claims], None]] = {
    "example1": _example1,
    "example2": _example2,
    "example3": _example3,
    "example4": _example4,
    "example5": _example5,
    "example6": _example6,
}


def reproduce(name: str) -> List[Claim]:
    """Run every claim of a bundled example."""
    key = resolve_name(name)
    claims = _Claims(key, bundled_example(key))
    CLAIMS[key](claims)
    failed = [claim.name for claim in claims.items if not claim.holds]
    if failed:
        logger.warning("%s: %d claims do not hold: %s", key, len(failed), "; ".join(failed))
    return claims.items
