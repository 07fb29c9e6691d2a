"""Helper module for displaying the self-check results in a tree."""

import json
import logging
from typing import Dict, List, Optional

from rich.console import Console
from rich.logging import RichHandler
from treelib.tree import Tree

from conjugacy_pit.constants import ROOT_NODE_ID, ROOT_NODE_TAG
from conjugacy_pit.results import AssertionStatus, CheckFormat, FormatTracker
from conjugacy_pit.selfcheck import SelfCheck

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)
console = Console()


class ResultAggregator:
    """Build a tree representation of check results and display it."""

    def __init__(
        self,
        checks: List[SelfCheck],
        output_fmt: FormatTracker,
        tree: Optional[Tree] = None,
    ):
        """Receive executed checks and instantiate the tree representation.

        Suite nodes hang off the root; one leaf per check hangs off its suite.
        """
        self._checks = checks
        self._output_fmt = output_fmt
        self._exceptions: List[str] = []
        self._tree = tree if tree is not None else Tree()
        if not self._tree.nodes:
            self._tree.create_node(ROOT_NODE_TAG, ROOT_NODE_ID)

    def _build_tree(self) -> Dict[str, int]:
        """Create one node per suite and one leaf per check, counting passing checks."""
        pass_key = AssertionStatus.PASS.value
        fail_key = AssertionStatus.FAIL.value
        results = {pass_key: 0, fail_key: 0}
        for check in self._checks:
            node_info = check.result_text(self._output_fmt)
            self._exceptions.extend(node_info.exception_msgs)
            results[pass_key if check.succeeded() else fail_key] += 1
            if check.suite not in self._tree:
                self._tree.create_node(check.suite, check.suite, self._tree.root)
            self._tree.create_node(node_info.node_tag, str(check.uuid), check.suite, check)
        return results

    def print_results(self) -> Dict[str, int]:
        """Print the results in the selected format and return the pass/fail counts."""
        results = self._build_tree()
        passed = results[AssertionStatus.PASS.value]
        failed = results[AssertionStatus.FAIL.value]
        total = passed + failed
        match self._output_fmt.format.lower():
            case CheckFormat.tree.value:
                self._tree.show()
                for e in filter(None, self._exceptions):
                    console.print(e)
                pass_string = f"🟢 {passed}/{total}" if passed != 0 else ""
                fail_string = f"🔴 {failed}/{total}" if failed != 0 else ""
                if pass_string or fail_string:
                    console.print(f"\nTotal: {pass_string} {fail_string}")
            case CheckFormat.json.value:
                tree_json = json.loads(self._tree.to_json())
                if self._output_fmt.verbose or failed:
                    tree_json["exceptions"] = self._exceptions
                tree_json.update({"passed": passed, "failed": failed})
                print(json.dumps(tree_json))
        return results
