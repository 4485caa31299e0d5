import logging
from typing import Any, List

from corpus.generators import PSEUDOGROUP
from pseudogroups.pseudogroup import evaluate_conditions
from utils.reporting import CheckResult

from .base import BaseSuite

logger = logging.getLogger(__name__)


class Def21Suite(BaseSuite):
    """The four pre-pseudogroup and sheaf conditions, each reported on its own."""

    SUITE_NAME = "def21"
    ACCEPTS = (PSEUDOGROUP,)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        self._require_category_budget(value)
        report = evaluate_conditions(value)
        return self._from_report(report)
