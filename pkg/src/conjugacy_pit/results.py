"""Result and formatting types shared by the CLI and the self-check tree."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional


class CheckFormat(str, Enum):
    """Options for formatting the output of the selfcheck command."""

    tree = "tree"
    json = "json"


class SchemaType(str, Enum):
    """Input formats whose schema can be printed."""

    tuple = "tuple"
    circuit = "circuit"
    diagonal = "diagonal"
    hitting_set = "hitting-set"


class ConvertTarget(str, Enum):
    """Circuit representations the convert command can produce."""

    abp = "abp"
    trace_power = "trace_power"


@dataclass
class FormatTracker:
    """Output formatting for the application."""

    verbose: bool
    format: CheckFormat
    rich_map = {
        "green": "🟢",
        "red": "🔴",
        "check_mark": "✔️",
        "multiply": "✖️",
    }


class AssertionStatus(Enum):
    """Status string for an assertion."""

    PASS = "pass"
    FAIL = "fail"


@dataclass
class AssertionResult:
    """The outcome of one self-check instance.

    Args:
        name: instance label within its check
        passed: whether every assertion of the instance held
        exceptions: what the instance raised, empty when it passed
        seed: seed that regenerates the instance
    """

    name: str
    passed: bool
    exceptions: List[BaseException] = field(default_factory=list)
    seed: Optional[int] = None

    @property
    def status(self) -> str:
        """Result of the instance."""
        return AssertionStatus.PASS.value if self.passed else AssertionStatus.FAIL.value
