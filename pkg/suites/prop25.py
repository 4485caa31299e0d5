import logging
from typing import Any, List

from corpus.generators import PSEUDOGROUP
from groupoids.groupoid import build_germ_bundle, check_groupoid, is_etale, check_target_factorization
from pseudogroups.pseudogroup import T1, NON_T1, is_pseudogroup_sheaf
from utils.errors import SuiteUnavailable, WitnessFailed
from utils.reporting import CheckResult, FAIL

from .base import BaseSuite

logger = logging.getLogger(__name__)


class Prop25Suite(BaseSuite):
    """The groupoid of germs of a pseudogroup sheaf is an étale topological groupoid."""

    SUITE_NAME = "prop25"
    ACCEPTS = (PSEUDOGROUP,)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        C = value
        dialect = T1 if C.space.is_t1 else NON_T1
        if dialect == NON_T1 and not C.has_underlying:
            raise SuiteUnavailable("Germ targets on a non-T1 space need stored underlying maps",
                                   space=C.space.name, pseudogroup=C.name)
        self._require_category_budget(C)
        sheaf = is_pseudogroup_sheaf(C, dialect)
        if not sheaf.ok:
            return self._not_applicable('not a pseudogroup sheaf', sheaf)

        try:
            built = build_germ_bundle(C, dialect, verify=False)
        except WitnessFailed as e:
            return [self._result('groupoid', FAIL, e.to_dict())]

        G = built.groupoid
        results = self._from_report(check_groupoid(G), prefix='groupoid.')
        results.append(self._from_verdict('etale', is_etale(G), arrows=len(G.arrows.points)))
        results.extend(self._from_report(check_target_factorization(C, dialect)))
        logger.debug(f"prop25 on {C.name}: {len(G.arrows.points)} germs, dialect {dialect}")
        return results
