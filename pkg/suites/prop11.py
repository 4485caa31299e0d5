import logging
from typing import Any, List

from corpus.generators import PSEUDOGROUP, GROUPOID
from groupoids.groupoid import is_etale, sections_category, check_prop11
from utils.reporting import CheckResult, FAIL

from .base import BaseSuite

logger = logging.getLogger(__name__)


class Prop11Suite(BaseSuite):
    """
    Section categories of étale groupoids satisfy the germ-target
    conditions and the sheaf condition. A pseudogroup input is checked
    directly.
    """

    SUITE_NAME = "prop11"
    ACCEPTS = (PSEUDOGROUP, GROUPOID)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        results = []
        if kind == GROUPOID:
            verdict = is_etale(value)
            results.append(self._from_verdict('etale', verdict))
            if not verdict:
                return results
            C = sections_category(value)
        else:
            C = value
        self._require_category_budget(C)
        results.extend(self._from_report(check_prop11(C)))
        failed = [r.name for r in results if r.status == FAIL]
        if failed:
            logger.info(f"prop11 on {C.name}: {len(failed)} failing checks")
        return results
