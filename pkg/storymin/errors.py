from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple


class StoryminError(Exception):
    """Base class for every error raised by storymin."""


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    location: Optional[str] = None

    def record(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, "location": self.location}


@dataclass
class ValidationReport:
    """Collected invariant violations. An empty report means the input is valid."""

    violations: List[Violation] = field(default_factory=list)

    def add(self, code: str, message: str, location: Optional[str] = None) -> None:
        self.violations.append(Violation(code, message, location))

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> Tuple[str, ...]:
        return tuple(v.code for v in self.violations)

    def records(self) -> List[Dict[str, Any]]:
        return [v.record() for v in self.violations]

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


class StoryError(StoryminError):
    """A story file could not be read.

    ``location`` is either ``"line:column"`` for syntax errors or a JSON pointer
    into the document for structural ones.
    """

    def __init__(self, code: str, message: str, location: Optional[str] = None):
        super().__init__(f"{message} ({location})" if location else message)
        self.code = code
        self.message = message
        self.location = location

    def record(self) -> Dict[str, Any]:
        return Violation(self.code, self.message, self.location).record()


class StoryValidationError(StoryminError):
    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(v.message for v in report))
        self.report = report


class InstanceError(StoryminError):
    pass


class OrderingError(StoryminError):
    def __init__(self, message: str, witness: Optional[Tuple[int, int, int]] = None):
        super().__init__(message if witness is None else f"{message}: {witness}")
        self.witness = witness


class OracleBudgetError(StoryminError):
    pass


class SolverError(StoryminError):
    pass
