"""
Corpus-only batteries: space axioms, presheaf sheafification, round trips
between groupoids and pseudogroup sheaves, and the mutation smoke test.
"""

import itertools
import logging
from typing import Any, List

from corpus.generators import SPACE, PRESHEAF, PSEUDOGROUP, GROUPOID
from corpus.mutations import Mutation, build_mutations, detect
from groupoids.groupoid import (
    is_etale, sections_category, groupoid_from_pseudogroup, roundtrip_groupoid, roundtrip_pseudogroup,
    find_groupoid_isomorphism,
)
from pseudogroups.pseudogroup import T1, NON_T1, is_pseudogroup_sheaf
from topology.finspace import FiniteSpace, EXHAUSTIVE, CANONICAL, build_space, to_preorder
from topology.sheaves import (
    Presheaf, PresheafMorphism, check_presheaf, is_sheaf, colimit_stalk_oracle, sheafify,
    check_morphism_stalkwise_iso, inclusion_morphism, check_sheafify_universality,
)
from utils.errors import (
    SuiteUnavailable, CoverBudgetExceeded, EnumerationBudgetExceeded, NoFactorization, ToolkitError,
)
from utils.reporting import CheckResult, Verdict, PASS, FAIL, SKIPPED, ERROR

from .base import BaseSuite

logger = logging.getLogger(__name__)

ORACLE_MAX_ARROWS = 8


def function_sheaf(space, values=(0, 1)) -> Presheaf:
    """All functions U → values; the target that forgets the tag of a tagged section."""
    sections = {U: [tuple(zip(sorted(U), combo)) for combo in itertools.product(values, repeat=len(U))]
                for U in space.opens}
    return Presheaf.from_restrictor(space, sections,
                                    lambda U, W, s: tuple((x, v) for x, v in s if x in W),
                                    name='functions')


def _is_tagged(P: Presheaf) -> bool:
    return all(isinstance(s, tuple) and len(s) == 2 and isinstance(s[1], int)
               for U in P.space.opens for s in P.sections[U])


class SpaceBattery(BaseSuite):
    """Topology axioms and the open-set / preorder correspondence."""

    SUITE_NAME = "space"
    ACCEPTS = (SPACE,)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        space = value
        try:
            rebuilt = build_space(space.points, space.opens)
            axioms = Verdict(rebuilt == space, {} if rebuilt == space else {'reason': 'minimal opens differ'})
        except ToolkitError as e:
            axioms = Verdict(False, e.to_dict())
        from_order = FiniteSpace.from_preorder(space.points, to_preorder(space))
        preorder = Verdict(from_order == space,
                           {} if from_order == space else {'opens': len(space.opens), 'rebuilt': len(from_order.opens)})
        return [self._from_verdict('axioms', axioms), self._from_verdict('preorder_roundtrip', preorder)]


class PresheafBattery(BaseSuite):
    """Presheaf laws, stalk and cover oracles, and sheafification."""

    SUITE_NAME = "presheaf"
    ACCEPTS = (PRESHEAF,)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        P = value
        presheaf = check_presheaf(P)
        results = self._from_report(presheaf, prefix='laws.')
        if not presheaf.ok:
            return results

        stalks = Verdict(True)
        for x in P.space.points:
            verdict = colimit_stalk_oracle(P, x)
            if not verdict:
                stalks = verdict
                break
        results.append(self._from_verdict('stalk_oracle', stalks))

        canonical = is_sheaf(P, CANONICAL)
        try:
            exhaustive = is_sheaf(P, EXHAUSTIVE, budget=self.config.cover_budget)
            agree = Verdict(bool(canonical) == bool(exhaustive),
                            {'canonical': bool(canonical), 'exhaustive': bool(exhaustive)})
            results.append(self._from_verdict('cover_oracle', agree))
        except CoverBudgetExceeded as e:
            results.append(self._result('cover_oracle', SKIPPED, e.to_dict()))

        result = sheafify(P)
        results.append(self._from_verdict('sheafified_is_sheaf', is_sheaf(result.sheaf)))
        unit = check_morphism_stalkwise_iso(result.unit, require_sheaves=False)
        results.append(self._result('unit_stalkwise', PASS if unit.stalkwise else FAIL, unit.witness))
        if canonical:
            results.append(self._result('unit_iso_on_sheaf', PASS if unit.openwise else FAIL, unit.witness))
        inclusion = check_morphism_stalkwise_iso(inclusion_morphism(result.sheaf, result.sharp))
        results.append(self._result('sharp_inclusion_equivalent', PASS if inclusion.equivalent else FAIL,
                                    inclusion.witness, {'iso': inclusion.openwise}))
        results.append(self._universality(P, result))
        return results

    def _universality(self, P: Presheaf, result) -> CheckResult:
        if _is_tagged(P):
            G = function_sheaf(P.space)
            phi = PresheafMorphism(P, G, {U: {s: s[0] for s in P.sections[U]} for U in P.space.opens})
        else:
            G, phi = result.sheaf, result.unit
        try:
            _psi, certificate = check_sheafify_universality(P, G, phi, node_budget=self.config.enum_node_budget)
        except EnumerationBudgetExceeded as e:
            return self._result('universality', SKIPPED, e.to_dict())
        except NoFactorization as e:
            return self._result('universality', FAIL, e.to_dict())
        return self._result('universality', PASS if certificate['unique'] else FAIL,
                            {} if certificate['unique'] else certificate, {'target': G.name, **certificate})


class RoundtripBattery(BaseSuite):
    """Groupoid → pseudogroup → groupoid and pseudogroup → groupoid → pseudogroup."""

    SUITE_NAME = "roundtrip"
    ACCEPTS = (GROUPOID, PSEUDOGROUP)

    def evaluate(self, value: Any, kind: str) -> List[CheckResult]:
        if kind == GROUPOID:
            return self._groupoid(value)
        return self._pseudogroup(value)

    def _groupoid(self, G) -> List[CheckResult]:
        verdict = is_etale(G)
        if not verdict:
            return self._not_applicable('groupoid is not étale')
        dialect = T1 if G.base.is_t1 else NON_T1
        try:
            witness = roundtrip_groupoid(G, dialect)
        except ToolkitError as e:
            return [self._result('g2p2g', FAIL, e.to_dict())]
        results = [self._result('g2p2g', PASS if witness.verified else FAIL, details=witness.to_dict())]
        if dialect == T1 and len(G.arrows.points) <= ORACLE_MAX_ARROWS:
            H = groupoid_from_pseudogroup(sections_category(G))
            try:
                found = find_groupoid_isomorphism(G, H, self.config.enum_node_budget)
                results.append(self._result('iso_oracle', PASS if found is not None else FAIL))
            except EnumerationBudgetExceeded as e:
                results.append(self._result('iso_oracle', SKIPPED, e.to_dict()))
        return results

    def _pseudogroup(self, C) -> List[CheckResult]:
        dialect = T1 if C.space.is_t1 else NON_T1
        if dialect == NON_T1 and not C.has_underlying:
            raise SuiteUnavailable("Round trip off T1 needs stored underlying maps", pseudogroup=C.name)
        sheaf = is_pseudogroup_sheaf(C, dialect)
        if not sheaf.ok:
            return self._not_applicable('not a pseudogroup sheaf', sheaf)
        try:
            witness = roundtrip_pseudogroup(C, dialect)
        except ToolkitError as e:
            return [self._result('p2g2p', FAIL, e.to_dict())]
        return [self._result('p2g2p', PASS if witness.verified else FAIL, details=witness.to_dict())]


def mutation_results(seed: int) -> List[CheckResult]:
    """One result per mutation: the original is clean and some detector rejects the mutant."""
    results = []
    for mutation in build_mutations(seed):
        results.append(_mutation_result(mutation))
    detected = sum(1 for r in results if r.status == PASS)
    logger.info(f"Mutations detected: {detected}/{len(results)}")
    return results


def _mutation_result(mutation: Mutation) -> CheckResult:
    name = f"mutation.{mutation.name}"
    try:
        outcome = detect(mutation)
    except ToolkitError as e:
        return CheckResult(name=name, status=ERROR, witness=e.to_dict())
    original_clean = not any(outcome['original'].values())
    caught = [d for d, rejected in outcome['mutant'].items() if rejected]
    status = PASS if original_clean and caught else FAIL
    witness = {} if status == PASS else {'original': outcome['original'], 'mutant': outcome['mutant']}
    return CheckResult(name=name, status=status, witness=witness,
                       details={'description': mutation.description, 'detected_by': caught,
                                **mutation.witness})
