import logging
from typing import Any, List

from corpus.generators import PSEUDOGROUP
from pseudogroups.pseudogroup import T1, check_category, check_decomposition, is_pseudogroup_sheaf
from pseudogroups.ppg_sheafify import (
    ppg_sheafify, check_prop45, check_unit_germ_bijection, check_order_independence,
    sheafification_deltas, check_construction_properties,
)
from utils.errors import SuiteUnavailable
from utils.reporting import CheckResult, NOT_APPLICABLE

from .base import BaseSuite

logger = logging.getLogger(__name__)


class Prop45Suite(BaseSuite):
    """
    Sheafification of a pre-pseudogroup: Ĉ is a pseudogroup sheaf, the
    unit is a bijection on germs, the closure order does not matter and
    every Ĉ(-, V) is the sheafification of C(-, V).
    """

    SUITE_NAME = "prop45"
    ACCEPTS = (PSEUDOGROUP,)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        C = value
        if not C.space.is_t1:
            raise SuiteUnavailable("Pseudogroup sheafification is defined on T1 spaces",
                                   space=C.space.name, pseudogroup=C.name)
        self._require_category_budget(C)
        category = check_category(C)
        if not category.ok:
            return self._not_applicable('condition (1) fails', category)
        decomposition = check_decomposition(C)
        if not decomposition:
            return [self._result('precondition', NOT_APPLICABLE,
                                 {'reason': 'condition (2) fails', **decomposition.witness})]

        chat, unit = ppg_sheafify(C)
        deltas = sheafification_deltas(C, chat)
        results = [self._from_verdict('unit_germ_bijection', check_unit_germ_bijection(C, chat, unit),
                                      deltas=deltas)]
        self._require_category_budget(chat)
        results.extend(self._from_report(is_pseudogroup_sheaf(chat, T1), prefix='sheafified.'))
        results.append(self._from_verdict('order_independence', check_order_independence(C)))
        results.append(self._from_verdict('hom_presheaves', check_prop45(C)))
        results.extend(self._from_report(check_construction_properties(C), prefix='construction.'))
        if deltas:
            logger.debug(f"prop45 on {C.name}: {len(deltas)} hom-sets grew")
        return results
