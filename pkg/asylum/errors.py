"""
Exception hierarchy shared by every module.
"""
from typing import List, NamedTuple


class AsylumMatchError(Exception):
    """Base class for all errors raised by the engine."""


class InvariantIssue(NamedTuple):
    code: str
    message: str


class InstanceValidationError(AsylumMatchError):
    """An instance violates one or more model invariants.

    `issues` lists every violated invariant, not only the first one.
    """

    def __init__(self, issues: List[InvariantIssue]):
        self.issues = list(issues)
        summary = "; ".join(f"{i.code}: {i.message}" for i in self.issues)
        super().__init__(summary or "invalid instance")

    @property
    def codes(self) -> List[str]:
        return [i.code for i in self.issues]


class QuotaDeficit(InstanceValidationError):
    pass


class CapacityDeficit(InstanceValidationError):
    pass


class DanglingReference(InstanceValidationError):
    pass


class DuplicatePreferenceEntry(InstanceValidationError):
    pass


ISSUE_CLASSES = {
    "QuotaDeficit": QuotaDeficit,
    "CapacityDeficit": CapacityDeficit,
    "DanglingReference": DanglingReference,
    "DuplicatePreferenceEntry": DuplicatePreferenceEntry,
}


def validation_error(issues: List[InvariantIssue]) -> InstanceValidationError:
    """Pick the most specific subclass from the first reported issue."""
    cls = ISSUE_CLASSES.get(issues[0].code, InstanceValidationError) if issues else InstanceValidationError
    return cls(issues)


class WrongSeeker(AsylumMatchError):
    pass


class UnknownSeeker(AsylumMatchError):
    pass


class UnknownState(AsylumMatchError):
    pass


class UnknownWaitTime(AsylumMatchError):
    pass


class EnumerationTooLarge(AsylumMatchError):
    """An exhaustive search would exceed its configured guard."""

    def __init__(self, what: str, size: int, bound: int):
        self.size = size
        self.bound = bound
        super().__init__(f"{what} has {size} elements, bound is {bound}")


class UniverseTooLarge(EnumerationTooLarge):
    pass


class SpaceTooLarge(EnumerationTooLarge):
    pass


class DomainTooLarge(EnumerationTooLarge):
    pass


class PreconditionUnmet(AsylumMatchError):
    pass


class NonTermination(AsylumMatchError):
    pass


class InfeasibleDims(AsylumMatchError):
    pass


class UnknownExample(AsylumMatchError):
    pass


class InstanceSyntaxError(AsylumMatchError):
    """The document is not well-formed or does not match the canonical schema."""


class InstanceFileError(AsylumMatchError):
    """A well-formed document describes an invalid instance."""

    def __init__(self, source: str, cause: InstanceValidationError):
        self.cause = cause
        super().__init__(f"{source}: {cause}")


class InvalidAllocation(AsylumMatchError):
    """A contract set breaks the allocation invariants."""
