"""
Seeded random instances for property sweeps.

Profiles:
  - homogeneous: every seeker has the same burden size
  - large-priority: every π_m ranks larger burdens first
  - small-priority: every π_m ranks smaller burdens first
  - unrestricted: burdens and priorities drawn independently
"""
import logging
from fractions import Fraction
from typing import List, NamedTuple, Optional

import numpy as np

from asylum.errors import InfeasibleDims
from asylum.instance import validate_instance, with_waiting_room
from asylum.models import AsylumSeeker, Instance, MemberState, Preference, WaitTimeAxis

logger = logging.getLogger(__name__)

PROFILES = ("homogeneous", "large-priority", "small-priority", "unrestricted")


class Dims(NamedTuple):
    seekers: int
    states: int
    waits: int


def parse_dims(text: str) -> Dims:
    """"3x2x2" -> Dims(seekers=3, states=2, waits=2)."""
    try:
        parts = [int(p) for p in text.lower().split("x")]
    except ValueError:
        raise InfeasibleDims(f"dims must look like AxMxW, got {text!r}")
    if len(parts) != 3:
        raise InfeasibleDims(f"dims must look like AxMxW, got {text!r}")
    return Dims(*parts)


def _priority(rng: np.random.Generator, ids: List[str], burdens: dict, profile: str) -> tuple:
    order = [ids[i] for i in rng.permutation(len(ids))]
    if profile == "large-priority":
        order.sort(key=lambda a: -burdens[a])
    elif profile == "small-priority":
        order.sort(key=lambda a: burdens[a])
    return tuple(order)


def generate_instance(
    seed: int,
    profile: str = "unrestricted",
    dims: Dims = Dims(3, 2, 2),
    max_burden: int = 3,
    max_ranking: Optional[int] = None,
    max_quota: Optional[int] = None,
    waiting_room: bool = False,
) -> Instance:
    """
    Deterministic pseudo-random valid instance.

    Args:
        seed: Seed for numpy's default_rng
        profile: One of PROFILES
        dims: Number of seekers, states and wait times
        max_burden: Largest burden size drawn
        max_ranking: Longest ranking drawn (defaults to |M|·|W|)
        max_quota: Largest quota drawn before the aggregate top-up
        waiting_room: Append a catch-all state as the last state

    Raises:
        InfeasibleDims: dims cannot carry a valid instance
    """
    if profile not in PROFILES:
        raise InfeasibleDims(f"unknown profile {profile!r}; expected one of {PROFILES}")
    n_seekers, n_states, n_waits = dims
    if min(dims) < 0 or max_burden < 1:
        raise InfeasibleDims(f"dimensions must be non-negative, got {tuple(dims)}")
    if n_seekers > 0 and (n_states == 0 or n_waits == 0):
        raise InfeasibleDims("seekers need at least one state and one wait time")

    rng = np.random.default_rng(seed)
    ids = [f"a{i + 1}" for i in range(n_seekers)]
    states = [f"m{i + 1}" for i in range(n_states)]
    waits = tuple(Fraction(i + 1) for i in range(n_waits))

    if profile == "homogeneous":
        size = int(rng.integers(1, max_burden + 1))
        burdens = {a: size for a in ids}
    else:
        burdens = {a: int(rng.integers(1, max_burden + 1)) for a in ids}
    total_burden = sum(burdens.values())

    if n_waits == 0:
        top_quota = 0
    else:
        top_quota = max_quota if max_quota is not None else max(1, total_burden)
    quotas = [int(rng.integers(0, top_quota + 1)) for _ in states]
    deficit = total_burden - sum(quotas)
    while deficit > 0:
        quotas[int(rng.integers(0, n_states))] += 1
        deficit -= 1

    members = []
    for m, quota in zip(states, quotas):
        slots = [int(rng.integers(0, n_seekers + 1)) for _ in waits]
        while sum(slots) < max(quota, n_seekers):
            slots[int(rng.integers(0, n_waits))] += 1
        members.append(MemberState(
            id=m,
            quota=quota,
            capacities=dict(zip(waits, slots)),
            priority=_priority(rng, ids, burdens, profile),
        ))

    pairs = [(m, w) for m in states for w in waits]
    longest = len(pairs) if max_ranking is None else min(max_ranking, len(pairs))
    preferences = []
    for a in ids:
        length = int(rng.integers(1, longest + 1)) if longest else 0
        picks = rng.permutation(len(pairs))[:length]
        preferences.append(Preference(seeker=a, ranking=tuple(pairs[i] for i in picks)))

    inst = Instance(
        seekers=tuple(AsylumSeeker(id=a, burden_size=burdens[a]) for a in ids),
        states=tuple(members),
        waits=WaitTimeAxis(times=waits),
        preferences=tuple(preferences),
    )
    if waiting_room:
        inst = with_waiting_room(inst, priority=_priority(rng, ids, burdens, profile))
    logger.debug("generated %s instance seed=%s dims=%s", profile, seed, tuple(dims))
    return validate_instance(inst)
