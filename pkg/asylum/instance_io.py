"""
Canonical instance documents: JSON with fields seekers, states, waits and
preferences, in that order, entities sorted by id.
"""
import json
import logging
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from asylum.errors import InstanceFileError, InstanceSyntaxError, InstanceValidationError
from asylum.instance import validate_instance
from asylum.models import AsylumSeeker, Instance, MemberState, Preference, WaitTimeAxis, format_wait, parse_wait
from asylum.schemas import (
    CapacityDoc,
    InstanceDoc,
    PreferenceDoc,
    RankingEntryDoc,
    SeekerDoc,
    StateDoc,
)

logger = logging.getLogger(__name__)


def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def _wait(value, path: str):
    try:
        return parse_wait(value)
    except ValueError as e:
        raise InstanceSyntaxError(f"{path}: {e}")


def document_to_instance(doc: InstanceDoc) -> Instance:
    """Convert a parsed document into an (unvalidated) Instance."""
    seekers = tuple(AsylumSeeker(id=s.id, burden_size=s.burden) for s in doc.seekers)
    states = []
    for i, s in enumerate(doc.states):
        capacities = {}
        for j, cap in enumerate(s.capacities):
            wait = _wait(cap.wait, f"states.{i}.capacities.{j}.wait")
            if wait in capacities:
                raise InstanceSyntaxError(f"states.{i}.capacities.{j}.wait: wait {cap.wait} listed twice")
            capacities[wait] = cap.slots
        states.append(MemberState(id=s.id, quota=s.quota, capacities=capacities, priority=tuple(s.priority)))
    waits = WaitTimeAxis(times=tuple(_wait(w, f"waits.{i}") for i, w in enumerate(doc.waits)))
    preferences = tuple(
        Preference(
            seeker=p.seeker,
            ranking=tuple(
                (entry.state, _wait(entry.wait, f"preferences.{i}.ranking.{j}.wait"))
                for j, entry in enumerate(p.ranking)
            ),
        )
        for i, p in enumerate(doc.preferences)
    )
    return Instance(seekers=seekers, states=tuple(states), waits=waits, preferences=preferences)


def instance_to_document(inst: Instance) -> InstanceDoc:
    return InstanceDoc(
        seekers=[SeekerDoc(id=s.id, burden=s.burden_size) for s in sorted(inst.seekers, key=lambda s: s.id)],
        states=[
            StateDoc(
                id=m.id,
                quota=m.quota,
                capacities=[CapacityDoc(wait=format_wait(w), slots=m.capacities[w]) for w in sorted(m.capacities)],
                priority=list(m.priority),
            )
            for m in sorted(inst.states, key=lambda m: m.id)
        ],
        waits=[format_wait(w) for w in sorted(inst.waits.times)],
        preferences=[
            PreferenceDoc(
                seeker=a,
                ranking=[RankingEntryDoc(state=m, wait=format_wait(w)) for m, w in inst.preference(a).ranking],
            )
            for a in inst.seeker_ids
        ],
    )


def parse_instance(text: str, source: str = "<string>", strict: bool = True) -> Instance:
    """
    Parse and validate an instance document.

    Raises:
        InstanceSyntaxError: not JSON, or not the canonical schema (message
            carries line/column or the offending field path)
        InstanceFileError: well-formed but violates the model invariants
    """
    if not text.strip():
        raise InstanceSyntaxError(f"{source}: empty document")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceSyntaxError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}")
    try:
        doc = InstanceDoc.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise InstanceSyntaxError(f"{source}: {_field_path(first['loc'])}: {first['msg']}")
    try:
        inst = document_to_instance(doc)
    except InstanceSyntaxError as e:
        raise InstanceSyntaxError(f"{source}: {e}")
    except ValidationError as e:
        first = e.errors()[0]
        raise InstanceSyntaxError(f"{source}: {_field_path(first['loc'])}: {first['msg']}")
    try:
        return validate_instance(inst, strict=strict)
    except InstanceValidationError as e:
        raise InstanceFileError(source, e)


def serialize_instance(inst: Instance) -> str:
    """Canonical text: fixed field order, entities sorted by id, two-space indent."""
    return json.dumps(instance_to_document(inst).model_dump(), indent=2) + "\n"


def load_instance(path: Union[str, Path], strict: bool = True) -> Instance:
    path = Path(path)
    logger.debug("loading instance from %s", path)
    return parse_instance(path.read_text(encoding="utf-8"), source=str(path), strict=strict)


def write_instance(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_instance(inst), encoding="utf-8")
