"""
Guarded exhaustive enumeration shared by the audits.
"""
from itertools import chain, combinations
from typing import FrozenSet, Iterable, Iterator, Optional, Sequence, Tuple, TypeVar

from asylum.config import get_settings
from asylum.errors import UniverseTooLarge
from asylum.models import Contract

T = TypeVar("T")


def guard_universe(universe: Iterable[Contract], bound: Optional[int] = None) -> Tuple[Contract, ...]:
    """Sort the universe canonically, refusing it when it exceeds `bound`."""
    ordered = tuple(sorted(set(universe)))
    limit = get_settings().max_universe if bound is None else bound
    if len(ordered) > limit:
        raise UniverseTooLarge("contract universe", len(ordered), limit)
    return ordered


def iter_subsets(items: Sequence[T]) -> Iterator[FrozenSet[T]]:
    """All subsets by size, then lexicographically in the order of `items`."""
    return (
        frozenset(combo)
        for combo in chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))
    )
