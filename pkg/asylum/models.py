"""
Core data model: asylum seekers, member states, wait times, rankings, contracts
and allocations.

Wait times are exact rationals (`fractions.Fraction`). Every entity is immutable
once built; lookup indexes are derived in `model_post_init`.
"""
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, PrivateAttr, field_validator


def parse_wait(value: Union[str, int, Fraction]) -> Fraction:
    """Parse a wait time given as "p/q", an integer string, an int or a Fraction."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"wait times must be exact rationals, got {value!r}")
    if isinstance(value, Fraction):
        result = value
    elif isinstance(value, int):
        result = Fraction(value)
    elif isinstance(value, str):
        try:
            result = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational wait time: {value!r}")
    else:
        raise ValueError(f"not a rational wait time: {value!r}")
    if result < 0:
        raise ValueError(f"wait times are non-negative, got {value!r}")
    return result


def format_wait(value: Fraction) -> str:
    """Canonical text form: "3" for integers, "1/2" otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Contract(NamedTuple):
    """A triple (asylum seeker, member state, wait time).

    Tuple order doubles as the canonical ordering (seeker id, state id, wait).
    """

    seeker: str
    state: str
    wait: Fraction

    def label(self) -> str:
        return f"({self.seeker},{self.state},{format_wait(self.wait)})"


# An outcome for one seeker: her contract, or None when unmatched.
Outcome = Optional[Contract]


def sort_contracts(contracts: Iterable[Contract]) -> List[Contract]:
    return sorted(contracts)


def format_contracts(contracts: Iterable[Contract]) -> str:
    return "{" + ", ".join(c.label() for c in sort_contracts(contracts)) + "}"


def format_outcome(outcome: Outcome) -> str:
    return "unmatched" if outcome is None else outcome.label()


class Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class AsylumSeeker(Frozen):
    id: str
    burden_size: int


class WaitTimeAxis(Frozen):
    times: Tuple[Fraction, ...]

    @field_validator("times", mode="before")
    @classmethod
    def _coerce(cls, v):
        return tuple(parse_wait(t) for t in v)

    def __contains__(self, wait: Fraction) -> bool:
        return wait in self.times

    def __iter__(self):
        return iter(self.times)

    def __len__(self) -> int:
        return len(self.times)


class MemberState(Frozen):
    id: str
    quota: int
    capacities: Dict[Fraction, int]
    priority: Tuple[str, ...]

    _rank: Dict[str, int] = PrivateAttr(default_factory=dict)

    @field_validator("capacities", mode="before")
    @classmethod
    def _coerce_caps(cls, v):
        return {parse_wait(w): slots for w, slots in dict(v).items()}

    def model_post_init(self, __context) -> None:
        rank: Dict[str, int] = {}
        for position, seeker_id in enumerate(self.priority):
            rank.setdefault(seeker_id, position)
        self._rank = rank

    def capacity(self, wait: Fraction) -> int:
        return self.capacities.get(wait, 0)

    def rank(self, seeker_id: str) -> int:
        """Position in π_m, 0 being the highest priority."""
        return self._rank[seeker_id]

    def ranks(self, seeker_id: str) -> bool:
        return seeker_id in self._rank

    def prioritises(self, a: str, b: str) -> bool:
        """a π_m b."""
        return self._rank[a] < self._rank[b]

    @property
    def total_capacity(self) -> int:
        return sum(self.capacities.values())


class Preference(Frozen):
    """A seeker's ranking over (state, wait) pairs, best first, possibly truncated."""

    seeker: str
    ranking: Tuple[Tuple[str, Fraction], ...] = ()

    _position: Dict[Tuple[str, Fraction], int] = PrivateAttr(default_factory=dict)

    @field_validator("ranking", mode="before")
    @classmethod
    def _coerce_ranking(cls, v):
        return tuple((str(state), parse_wait(wait)) for state, wait in v)

    def model_post_init(self, __context) -> None:
        position: Dict[Tuple[str, Fraction], int] = {}
        for index, pair in enumerate(self.ranking):
            position.setdefault(pair, index)
        self._position = position

    def position(self, contract: Contract) -> Optional[int]:
        return self._position.get((contract.state, contract.wait))

    def lists(self, contract: Contract) -> bool:
        return contract.seeker == self.seeker and (contract.state, contract.wait) in self._position

    def contracts(self) -> Tuple[Contract, ...]:
        return tuple(Contract(self.seeker, state, wait) for state, wait in self.ranking)

    @classmethod
    def of(cls, seeker: str, contracts: Iterable[Contract]) -> "Preference":
        return cls(seeker=seeker, ranking=tuple((c.state, c.wait) for c in contracts))


class Instance(Frozen):
    """The full problem ⟨A, M, W, s, q, r, P, π⟩."""

    seekers: Tuple[AsylumSeeker, ...]
    states: Tuple[MemberState, ...]
    waits: WaitTimeAxis
    preferences: Tuple[Preference, ...]

    _seekers: Dict[str, AsylumSeeker] = PrivateAttr(default_factory=dict)
    _states: Dict[str, MemberState] = PrivateAttr(default_factory=dict)
    _preferences: Dict[str, Preference] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        self._seekers = {s.id: s for s in self.seekers}
        self._states = {m.id: m for m in self.states}
        self._preferences = {p.seeker: p for p in self.preferences}

    @property
    def seeker_ids(self) -> List[str]:
        return sorted(self._seekers)

    @property
    def state_ids(self) -> List[str]:
        return sorted(self._states)

    def has_seeker(self, seeker_id: str) -> bool:
        return seeker_id in self._seekers

    def has_state(self, state_id: str) -> bool:
        return state_id in self._states

    def seeker(self, seeker_id: str) -> AsylumSeeker:
        return self._seekers[seeker_id]

    def state(self, state_id: str) -> MemberState:
        return self._states[state_id]

    def burden(self, seeker_id: str) -> int:
        return self._seekers[seeker_id].burden_size

    def preference(self, seeker_id: str) -> Preference:
        pref = self._preferences.get(seeker_id)
        return pref if pref is not None else Preference(seeker=seeker_id)

    def profile_key(self) -> Tuple[Tuple[Tuple[str, Fraction], ...], ...]:
        """Hashable view of the preference profile in seeker-id order."""
        return tuple(self.preference(a).ranking for a in self.seeker_ids)

    def replace(self, **changes) -> "Instance":
        """Rebuild with some fields replaced so the lookup indexes stay in sync."""
        fields = {
            "seekers": self.seekers,
            "states": self.states,
            "waits": self.waits,
            "preferences": self.preferences,
        }
        fields.update(changes)
        return Instance(**fields)


class Allocation(Frozen):
    """A feasible contract set: at most one contract per seeker, capacities respected."""

    contracts: FrozenSet[Contract] = frozenset()

    def of(self, seeker_id: str) -> Outcome:
        for contract in self.contracts:
            if contract.seeker == seeker_id:
                return contract
        return None

    def assignment(self) -> Dict[str, Contract]:
        return {c.seeker: c for c in self.contracts}

    def key(self) -> Tuple[Contract, ...]:
        return tuple(sort_contracts(self.contracts))

    def __str__(self) -> str:
        return format_contracts(self.contracts)
