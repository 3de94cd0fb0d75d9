"""
Plain-text rendering of traces and audit results for the command line.

Every report ends with one machine-readable line: VERDICT: pass|fail <count>.
"""
from typing import Iterable, List, Optional, Sequence

import pandas as pd

from asylum.models import Allocation, Contract, format_contracts, format_outcome
from asylum.schemas import AuditReport, ChoiceTrace, ManipulationReport, MechanismTrace


def _render(frame: pd.DataFrame) -> str:
    if frame.empty:
        return "(none)"
    return frame.to_string(index=False)


def _contracts(contracts: Optional[Iterable[Contract]]) -> str:
    return format_contracts(contracts or ())


def _ranking(pref) -> str:
    return " - ".join(c.label() for c in pref.contracts()) or "(empty)"


def verdict_line(passed: bool, count: int) -> str:
    return f"VERDICT: {'pass' if passed else 'fail'} {count}"


def choice_trace_table(trace: ChoiceTrace) -> str:
    frame = pd.DataFrame([
        {
            "k": step.k,
            "accepted": _contracts(step.accepted_so_far),
            "candidates": _contracts(step.candidates),
            "seeker": step.picked_seeker or "-",
            "contract": step.picked_contract.label() if step.picked_contract else "-",
            "stop": step.stop_reason,
        }
        for step in trace.steps
    ])
    header = f"{trace.rule} choice at {trace.state} from {_contracts(trace.offered)}"
    return f"{header}\n{_render(frame)}\nresult: {_contracts(trace.result)}"


def mechanism_trace_table(trace: MechanismTrace) -> str:
    rows = []
    for r in trace.rounds:
        row = {"round": r.index, "proposer": r.proposer, "proposed": r.proposed.label()}
        for state, held in sorted(r.tentatively_held.items()):
            row[state] = _contracts(held)
        rows.append(row)
    text = _render(pd.DataFrame(rows))
    if trace.duplicates_dropped:
        text += f"\nduplicate holdings dropped for: {', '.join(trace.duplicates_dropped)}"
    return text


def allocation_table(alloc: Allocation, seekers: Sequence[str]) -> str:
    frame = pd.DataFrame([{"seeker": a, "contract": format_outcome(alloc.of(a))} for a in seekers])
    return _render(frame)


def audit_report_table(report: AuditReport) -> str:
    frame = pd.DataFrame([
        {
            "kind": w.kind,
            "state": w.state or "-",
            "seeker": w.seeker or "-",
            "X'": _contracts(w.offered),
            "x": w.contract.label() if w.contract else "-",
            "x'": w.other.label() if w.other else "-",
            "expected": w.expected,
            "observed": w.observed,
        }
        for w in report.witnesses
    ])
    stats = ", ".join(f"{k}={v}" for k, v in sorted(report.stats.items()))
    return f"{report.operation}: {report.verdict} ({stats})\n{_render(frame)}"


def manipulation_table(reports: Sequence[ManipulationReport], with_cases: bool = False) -> str:
    rows: List[dict] = []
    for r in reports:
        row = {
            "seeker": r.seeker,
            "misreport": _ranking(r.misreport),
            "truthful": format_outcome(r.truthful_outcome),
            "manipulated": format_outcome(r.manipulated_outcome),
        }
        if with_cases:
            row.update({
                "worst(P)": format_outcome(r.worst_truthful),
                "worst(P^)": format_outcome(r.worst_misreport),
                "best(P)": format_outcome(r.best_truthful),
                "best(P^)": format_outcome(r.best_misreport),
                "obvious": r.obvious,
            })
        rows.append(row)
    return _render(pd.DataFrame(rows))
