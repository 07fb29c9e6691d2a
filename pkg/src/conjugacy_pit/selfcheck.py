"""Wrap the oracle checks so that their results can be aggregated in a tree."""

import logging
import random
from dataclasses import dataclass, field
from typing import List
from uuid import UUID, uuid4

from rich.console import Console
from rich.logging import RichHandler

from conjugacy_pit.checks import SUITES, Check
from conjugacy_pit.results import AssertionResult, AssertionStatus, CheckFormat, FormatTracker

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)


@dataclass
class NodeResultInfo:
    """Check result information for display in a Tree node.

    Args:
        node_tag: text for displaying the check's identity in a node of the Tree
        exception_msgs: a list of exception messages aggregated from the failing instances
    """

    node_tag: str = ""
    exception_msgs: List[str] = field(default_factory=list)


@dataclass
class SelfCheck:
    """One oracle check of a suite, run over many seeded instances."""

    suite: str
    body: Check
    uuid: UUID = field(default_factory=uuid4)
    results: List[AssertionResult] = field(default_factory=list)

    @property
    def name(self) -> str:
        """Check name as shown in the tree."""
        return self.body.__name__.replace("_", "-")

    def run(self, instances: int, seed: int):
        """Run the check on ``instances`` instances derived from ``seed``."""
        seeds = random.Random(f"{seed}:{self.suite}:{self.name}")
        for i in range(instances):
            instance_seed = seeds.randrange(2**32)
            try:
                self.body(random.Random(instance_seed))
            except Exception as e:
                self.results.append(
                    AssertionResult(f"#{i}", passed=False, exceptions=[e], seed=instance_seed)
                )
            else:
                self.results.append(AssertionResult(f"#{i}", passed=True, seed=instance_seed))
        log.info(f"{self.suite}/{self.name}: {self.passed_count}/{len(self.results)} passed")

    @property
    def passed_count(self) -> int:
        """Number of instances that passed."""
        return sum(result.passed for result in self.results)

    def succeeded(self) -> bool:
        """Return the check's status.

        A check succeeds when it ran at least once and no instance failed.
        """
        return bool(self.results) and all(result.passed for result in self.results)

    def result_text(self, output_fmt: FormatTracker) -> NodeResultInfo:
        """Check results (formatted with Pretty-print) as text."""
        exception_msgs = []
        for result in self.results:
            if result.status == AssertionStatus.PASS.value:
                continue
            for exception in result.exceptions:
                suffix = (
                    f"({self.suite}/{self.name} {result.name}, seed {result.seed}): "
                    f"{type(exception).__name__} {exception}"
                )
                if output_fmt.format.lower() == CheckFormat.json.value:
                    exception_msgs.append(f"Exception {suffix}")
                elif output_fmt.verbose:
                    exception_msgs.append(f"[b]Exception[/b] {suffix}")

        symbol = output_fmt.rich_map["green" if self.succeeded() else "red"]
        node_tag = f"{symbol} {self.name}"
        if output_fmt.verbose:
            node_tag += f" ({self.passed_count}/{len(self.results)})"
        return NodeResultInfo(node_tag, exception_msgs)


def build_checks(suites: List[str]) -> List[SelfCheck]:
    """Instantiate every check of the named suites, in registry order."""
    return [SelfCheck(suite, body) for suite in suites for body in SUITES[suite]]
