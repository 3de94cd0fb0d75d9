"""
Report records (choice traces, mechanism traces, audit reports) and the wire
documents of the canonical instance file format.
"""
from typing import Any, Dict, FrozenSet, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, computed_field, model_validator

from asylum.models import Allocation, Contract, Frozen, Outcome, Preference

StopReason = Literal["quota-reached", "no-candidates", "continued"]
RuleKind = Literal["base", "completed"]
Verdict = Literal["pass", "fail"]


class ChoiceStep(Frozen):
    k: int
    accepted_so_far: Tuple[Contract, ...]  # X^{k-1}, in acceptance order
    candidates: Tuple[Contract, ...]  # Z^{k-1}, sorted
    picked_seeker: Optional[str] = None  # a^k
    picked_contract: Optional[Contract] = None  # x^k
    stop_reason: StopReason


class ChoiceTrace(Frozen):
    state: str
    rule: RuleKind
    offered: Tuple[Contract, ...]
    steps: Tuple[ChoiceStep, ...]
    result: FrozenSet[Contract]

    @computed_field
    @property
    def accepted(self) -> Tuple[Contract, ...]:
        """Contracts in the order they were accepted."""
        return self.steps[-1].accepted_so_far if self.steps else ()

    @computed_field
    @property
    def duplicated_seeker(self) -> bool:
        seekers = [c.seeker for c in self.result]
        return len(seekers) != len(set(seekers))


class MechanismRound(Frozen):
    index: int
    proposer: str
    proposed: Contract
    cumulative_offers: Dict[str, Tuple[Contract, ...]]  # X^k_m
    tentatively_held: Dict[str, Tuple[Contract, ...]]  # C_m(X^k_m)
    rejected: Tuple[Contract, ...] = ()


class MechanismTrace(Frozen):
    variant: str
    policy: str
    rounds: Tuple[MechanismRound, ...]
    outcome: Allocation
    duplicates_dropped: Tuple[str, ...] = ()


class Witness(Frozen):
    """One counterexample. Fields that do not apply to the check stay empty."""

    kind: str
    state: Optional[str] = None
    seeker: Optional[str] = None
    offered: Tuple[Contract, ...] = ()
    contract: Optional[Contract] = None
    other: Optional[Contract] = None
    outputs: Tuple[Tuple[Contract, ...], ...] = ()
    expected: str = ""
    observed: str = ""

    def sort_key(self) -> tuple:
        return (
            self.kind,
            self.state or "",
            self.seeker or "",
            len(self.offered),
            self.offered,
            self.contract or (),
            self.other or (),
        )


class AuditReport(Frozen):
    operation: str
    verdict: Verdict
    witnesses: Tuple[Witness, ...] = ()
    stats: Dict[str, Any] = {}

    @model_validator(mode="after")
    def _verdict_matches_witnesses(self):
        if (self.verdict == "fail") != bool(self.witnesses):
            raise ValueError("verdict must be fail exactly when there are witnesses")
        return self

    @classmethod
    def build(cls, operation: str, witnesses: List[Witness], **stats: Any) -> "AuditReport":
        ordered = tuple(sorted(witnesses, key=Witness.sort_key))
        return cls(
            operation=operation,
            verdict="fail" if ordered else "pass",
            witnesses=ordered,
            stats=stats,
        )

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


class ManipulationReport(Frozen):
    seeker: str
    true_pref: Preference
    misreport: Preference
    profile_of_others: Tuple[Preference, ...]
    truthful_outcome: Outcome
    manipulated_outcome: Outcome
    worst_truthful: Outcome = None
    worst_misreport: Outcome = None
    best_truthful: Outcome = None
    best_misreport: Outcome = None
    obvious: bool = False
    domain: str = "listed"


# ---------------------------------------------------------------------------
# Canonical instance document
# ---------------------------------------------------------------------------

class Document(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SeekerDoc(Document):
    id: str
    burden: int


class CapacityDoc(Document):
    wait: Union[str, int]
    slots: int


class StateDoc(Document):
    id: str
    quota: int
    capacities: List[CapacityDoc]
    priority: List[str]


class RankingEntryDoc(Document):
    state: str
    wait: Union[str, int]


class PreferenceDoc(Document):
    seeker: str
    ranking: List[RankingEntryDoc]


class InstanceDoc(Document):
    seekers: List[SeekerDoc]
    states: List[StateDoc]
    waits: List[Union[str, int]]
    preferences: List[PreferenceDoc]
