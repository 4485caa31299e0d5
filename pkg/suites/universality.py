import logging
from typing import Any, List

from corpus.generators import PSEUDOGROUP
from pseudogroups.pseudogroup import (
    check_category, check_decomposition, check_underlying_functor, build_homeo_l, underlying_map,
)
from pseudogroups.ppg_sheafify import PpgMorphism, ppg_sheafify, check_universality
from utils.errors import SuiteUnavailable, NoFactorization, EnumerationBudgetExceeded, WitnessFailed
from utils.helpers import map_key
from utils.reporting import CheckResult, PASS, FAIL, SKIPPED, ERROR, NOT_APPLICABLE

from .base import BaseSuite

logger = logging.getLogger(__name__)


class UniversalitySuite(BaseSuite):
    """
    Unique factorization through the unit C → Ĉ, for the unit itself and,
    when C has underlying maps, for the map into Homeo^l of the space.
    """

    SUITE_NAME = "universality"
    ACCEPTS = (PSEUDOGROUP,)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        C = value
        if not C.space.is_t1:
            raise SuiteUnavailable("Universality is checked on T1 spaces", space=C.space.name, pseudogroup=C.name)
        self._require_category_budget(C)
        category = check_category(C)
        if not category.ok:
            return self._not_applicable('condition (1) fails', category)
        decomposition = check_decomposition(C)
        if not decomposition:
            return [self._result('precondition', NOT_APPLICABLE,
                                 {'reason': 'condition (2) fails', **decomposition.witness})]

        chat, unit = ppg_sheafify(C)
        results = [self._factor('into_sheafification', C, chat, unit)]
        if check_underlying_functor(C).ok:
            homeo = build_homeo_l(C.space)
            components = {(U, V): {f: map_key(underlying_map(C, U, V, f).assignment) for f in C.hom(U, V)}
                          for U in C.space.opens for V in C.space.opens}
            results.append(self._factor('into_homeo_l', C, homeo, PpgMorphism(C, homeo, components)))
        return results

    def _factor(self, check: str, C, D, phi) -> CheckResult:
        try:
            _psi, certificate = check_universality(
                C, D, phi,
                max_hom_size=self.config.max_hom_size,
                max_opens=self.config.max_enum_opens,
                node_budget=self.config.enum_node_budget,
            )
        except EnumerationBudgetExceeded as e:
            return self._result(check, SKIPPED, e.to_dict())
        except NoFactorization as e:
            return self._result(check, FAIL, e.to_dict())
        except WitnessFailed as e:
            return self._result(check, ERROR, e.to_dict())
        status = PASS if certificate['unique'] else FAIL
        return self._result(check, status, {} if status == PASS else certificate, {'target': D.name, **certificate})
