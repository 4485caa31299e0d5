import logging
from typing import Any, List

from corpus.generators import PSEUDOGROUP
from pseudogroups.pseudogroup import (
    T1, NON_T1, check_category, check_decomposition, check_underlying_functor,
    germ_target_hom, with_derived_underlying,
)
from utils.errors import SuiteUnavailable
from utils.reporting import CheckResult, Verdict, NOT_APPLICABLE

from .base import BaseSuite

logger = logging.getLogger(__name__)


class Prop24Suite(BaseSuite):
    """
    Underlying maps of a pre-pseudogroup are continuous local
    homeomorphisms and form a functor. On T1 spaces the two ways of
    computing germ targets are compared as well.
    """

    SUITE_NAME = "prop24"
    ACCEPTS = (PSEUDOGROUP,)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        C = value
        dialect = T1 if C.space.is_t1 else NON_T1
        if dialect == NON_T1 and not C.has_underlying:
            raise SuiteUnavailable("Underlying maps on a non-T1 space must be stored",
                                   space=C.space.name, pseudogroup=C.name)
        self._require_category_budget(C)
        category = check_category(C)
        if not category.ok:
            return self._not_applicable('condition (1) fails', category)
        if dialect == T1:
            verdict = check_decomposition(C)
            if not verdict:
                return [self._result('precondition', NOT_APPLICABLE,
                                     {'reason': 'condition (2) fails', **verdict.witness})]

        results = self._from_report(check_underlying_functor(C, dialect))
        if dialect == T1:
            results.append(self._from_verdict('dialects_agree', self._compare_dialects(C)))
        return results

    def _compare_dialects(self, C) -> Verdict:
        """C_x^y by postcomposition equals C_x^y filtered by the underlying map."""
        D = C if C.has_underlying else with_derived_underlying(C)
        for x in C.space.points:
            for y in C.space.points:
                by_limit = set(germ_target_hom(D, x, y, T1))
                by_filter = set(germ_target_hom(D, x, y, NON_T1))
                if by_limit != by_filter:
                    return Verdict(False, {'point': x, 'target': y,
                                           'postcomposition': len(by_limit), 'filter': len(by_filter)})
        return Verdict(True)
