import time
import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence

from pseudogroups.pseudogroup import PrePseudogroup
from utils.errors import BudgetExceeded, EnumerationBudgetExceeded, SuiteUnavailable, ToolkitError
from utils.reporting import (
    CheckReport, CheckResult, Verdict,
    PASS, FAIL, SKIPPED, ERROR, NOT_APPLICABLE, UNAVAILABLE,
)

logger = logging.getLogger(__name__)


def category_cost(C: PrePseudogroup) -> int:
    """Number of composable triples (h, g, f) an exhaustive associativity check visits."""
    opens = C.space.opens
    size = {(U, V): len(C.hom(U, V)) for U in opens for V in opens}
    into = {V: sum(size[(U, V)] for U in opens) for V in opens}
    out_of = {W: sum(size[(W, Y)] for Y in opens) for W in opens}
    return sum(into[V] * size[(V, W)] * out_of[W] for V in opens for W in opens)


class BaseSuite(ABC):
    """
    Abstract base class for check suites.

    A suite takes one instance (pseudogroup, groupoid, ...) and returns a
    list of CheckResults. Budget refusals become 'skipped-over-budget'
    results; other toolkit errors become 'error' results. SuiteUnavailable
    is left to the caller, which decides whether it is an input error.
    """

    # Suite name - override in subclass
    SUITE_NAME = "base"

    # Instance kinds the suite accepts
    ACCEPTS: Sequence[str] = ()

    def __init__(self, config):
        """
        Initialize base suite.

        Args:
            config: Configuration object.
        """
        self.config = config

    def applies_to(self, kind: str) -> bool:
        return kind in self.ACCEPTS

    @abstractmethod
    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        """
        Run the suite's checks.

        Args:
            value: The instance.
            kind: One of the corpus kinds.

        Returns:
            List of CheckResults named '<suite>.<check>'.
        """
        pass

    def run(self, value: Any, kind: str) -> List[CheckResult]:
        """
        Evaluate with timing and error conversion.

        Raises:
            SuiteUnavailable: the instance lacks data the suite needs.
        """
        if not self.applies_to(kind):
            raise SuiteUnavailable(f"Suite {self.SUITE_NAME} does not accept a {kind}",
                                   suite=self.SUITE_NAME, kind=kind)
        started = time.perf_counter()
        try:
            results = self.evaluate(value, kind)
        except SuiteUnavailable:
            raise
        except (BudgetExceeded, EnumerationBudgetExceeded) as e:
            logger.warning(f"{self.SUITE_NAME}: {e}")
            results = [self._result('budget', SKIPPED, e.to_dict())]
        except ToolkitError as e:
            logger.error(f"{self.SUITE_NAME}: {type(e).__name__}: {e}")
            results = [self._result('run', ERROR, e.to_dict())]
        elapsed = time.perf_counter() - started
        for r in results:
            r.seconds = elapsed / max(len(results), 1)
        return results

    # Helpers -----------------------------------------------------------

    def _result(self, check: str, status: str, witness: Optional[Dict[str, Any]] = None,
                details: Optional[Dict[str, Any]] = None) -> CheckResult:
        return CheckResult(name=f"{self.SUITE_NAME}.{check}", status=status,
                           witness=witness or {}, details=details or {})

    def _from_verdict(self, check: str, verdict: Verdict, **details) -> CheckResult:
        return self._result(check, PASS if verdict else FAIL, dict(verdict.witness), details)

    def _from_report(self, report: CheckReport, prefix: str = '') -> List[CheckResult]:
        """One result per evaluated section of the report."""
        return report.to_results(f"{self.SUITE_NAME}.{prefix}")

    def _not_applicable(self, reason: str, report: Optional[CheckReport] = None) -> List[CheckResult]:
        witness: Dict[str, Any] = {'reason': reason}
        if report is not None and report.first() is not None:
            v = report.first()
            witness.update({'kind': v.kind, 'message': v.message})
        return [self._result('precondition', NOT_APPLICABLE, witness)]

    def _require_category_budget(self, C: PrePseudogroup) -> None:
        cost = category_cost(C)
        if cost > self.config.category_budget:
            raise BudgetExceeded(f"Exhaustive category check needs {cost} triples",
                                 cost=cost, budget=self.config.category_budget, pseudogroup=C.name)


def unavailable_result(suite: str, error: SuiteUnavailable) -> CheckResult:
    return CheckResult(name=f"{suite}.run", status=UNAVAILABLE, witness=error.to_dict())
