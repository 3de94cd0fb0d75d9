"""
Bundled instances reproducing the worked examples, plus the x1, x2, ...
contract numbering used to talk about them.
"""
from pathlib import Path
from typing import Dict, List, NamedTuple

from asylum.errors import UnknownExample
from asylum.instance_io import load_instance
from asylum.models import Contract, Instance

DATA_DIR = Path(__file__).parent / "data"


class BundledExample(NamedTuple):
    file: str
    strict: bool
    description: str


EXAMPLES: Dict[str, BundledExample] = {
    "example1": BundledExample("example1.json", True, "one state, two seekers: ĉ_m is not substitutable and violates LAD"),
    "example2": BundledExample("example1.json", True, "the same market under the completion ĉ'_m"),
    "example3": BundledExample("example3.json", False, "no completion of ĉ_m is substitutable"),
    "example4": BundledExample("example4.json", False, "no completion of ĉ_m satisfies LAD"),
    "example5": BundledExample("example5.json", True, "no stable allocation exists"),
    "example6": BundledExample("example6.json", True, "no stable mechanism is strategy-proof"),
}

ALIASES: Dict[str, str] = {
    "notstableex": "example5",
    "notstrategyproofex": "example6",
    "example7": "example6",
}


def resolve_name(name: str) -> str:
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in EXAMPLES:
        known = sorted(EXAMPLES) + sorted(ALIASES)
        raise UnknownExample(f"unknown example {name!r}; known: {', '.join(known)}")
    return key


def bundled_example(name: str) -> Instance:
    """Load a bundled instance by name or alias."""
    entry = EXAMPLES[resolve_name(name)]
    return load_instance(DATA_DIR / entry.file, strict=entry.strict)


def example_names() -> List[str]:
    return sorted(EXAMPLES)


def numbered_contracts(inst: Instance) -> Dict[str, Contract]:
    """x1, x2, ... over the seekers' rankings, seekers in id order, best first."""
    labels: Dict[str, Contract] = {}
    for seeker in inst.seeker_ids:
        for contract in inst.preference(seeker).contracts():
            labels[f"x{len(labels) + 1}"] = contract
    return labels
