"""
Topological groupoids over finite spaces and their correspondence with
pseudogroup sheaves.

Arrows live in their own finite space G1; structure maps are PointMaps.
The fibre product G1 ×_X G1 carries the subspace topology of the product,
whose minimal opens are (U_g × U_f) ∩ {composable pairs}.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from topology.finspace import (
    FiniteSpace, Open, PointMap, check_continuous, is_local_homeo, enumerate_maps,
    discrete_space, indiscrete_space,
)
from topology.sheaves import EtaleSpaceBundle, etale_space
from pseudogroups.groups import FiniteGroup
from pseudogroups.pseudogroup import (
    PrePseudogroup, GermArrow, Hom,
    resolve_dialect, hom_presheaf, germ_at, germ_target_limit, underlying_of,
    check_category, check_decomposition, check_sheaf_condition, build_germ_groupoid,
    is_pseudogroup_sheaf,
)
from pseudogroups.ppg_sheafify import PpgMorphism, check_ppg_morphism
from utils.errors import (
    NotEtale, NotAPseudogroupSheaf, NoSectionThroughArrow, WitnessFailed,
    CompositionUndefined, EnumerationBudgetExceeded,
)
from utils.helpers import describe, format_open
from utils.reporting import CheckReport, Verdict

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class TopGroupoid:
    """G = (G0, G1, s, t, i, inv, comp) with comp keyed by (g, f) where s(g) = t(f)."""

    base: FiniteSpace
    arrows: FiniteSpace
    s: PointMap
    t: PointMap
    i: PointMap
    inv: PointMap
    comp: Mapping[Pair, int]
    labels: Mapping[int, str] = field(default_factory=dict)
    name: str = ''

    def __repr__(self) -> str:
        return f"TopGroupoid({self.name or 'unnamed'}: {len(self.base.points)} objects, {len(self.arrows.points)} arrows)"

    @classmethod
    def from_tables(cls, base: FiniteSpace, arrows: FiniteSpace,
                    s: Mapping[int, int], t: Mapping[int, int], i: Mapping[int, int],
                    inv: Mapping[int, int], comp: Mapping[Pair, int],
                    labels: Optional[Mapping[int, str]] = None, name: str = '') -> 'TopGroupoid':
        return cls(
            base=base,
            arrows=arrows,
            s=PointMap(arrows, arrows.full, base, base.full, dict(s)),
            t=PointMap(arrows, arrows.full, base, base.full, dict(t)),
            i=PointMap(base, base.full, arrows, arrows.full, dict(i)),
            inv=PointMap(arrows, arrows.full, arrows, arrows.full, dict(inv)),
            comp=dict(comp),
            labels=dict(labels or {}),
            name=name,
        )

    def composable_pairs(self) -> List[Pair]:
        points = self.arrows.points
        return [(g, f) for g in points for f in points if self.s(g) == self.t(f)]

    def compose(self, g: int, f: int) -> int:
        try:
            return self.comp[(g, f)]
        except KeyError:
            raise CompositionUndefined(f"Arrows {g} and {f} are not composable", pair=(g, f))

    def hom(self, x: int, y: int) -> List[int]:
        return [a for a in self.arrows.points if self.s(a) == x and self.t(a) == y]

    def label(self, a: int) -> str:
        return self.labels.get(a, str(a))

    def to_dict(self) -> dict:
        return {
            'base': self.base.to_dict(),
            'arrows': self.arrows.to_dict(),
            's': {str(a): b for a, b in self.s.key()},
            't': {str(a): b for a, b in self.t.key()},
            'i': {str(a): b for a, b in self.i.key()},
            'inv': {str(a): b for a, b in self.inv.key()},
            'comp': {f"{g},{f}": h for (g, f), h in sorted(self.comp.items())},
            'labels': {str(a): text for a, text in sorted(self.labels.items())},
        }


def fiber_product_space(G: TopGroupoid) -> Tuple[FiniteSpace, List[Pair]]:
    """Composable pairs relabelled 0..n-1, with the subspace topology of G1 × G1."""
    pairs = G.composable_pairs()
    index = {pair: j for j, pair in enumerate(pairs)}
    minimal = {}
    for j, (g, f) in enumerate(pairs):
        minimal[j] = {index[(g2, f2)] for g2 in G.arrows.minimal[g] for f2 in G.arrows.minimal[f]
                      if (g2, f2) in index}
    return FiniteSpace.from_minimal_opens(minimal, name=f"{G.name or 'G'}_2"), pairs


def check_groupoid(G: TopGroupoid) -> CheckReport:
    """Algebraic axioms, then continuity of s, t, i, inv and comp."""
    report = CheckReport('groupoid')
    for kind in ('composition', 'units', 'associativity', 'inverse', 'continuity'):
        report.mark(kind)
    arrows = G.arrows.points
    pairs = G.composable_pairs()
    pair_set = set(pairs)

    for key in G.comp:
        if key not in pair_set:
            report.add('composition', "Composition defined on a non-composable pair", pair=key)
    for g, f in pairs:
        h = G.comp.get((g, f))
        if h is None:
            report.add('composition', f"Composite of {G.label(g)} ∘ {G.label(f)} is missing", pair=(g, f))
        elif h not in G.arrows.minimal:
            report.add('composition', "Composite is not an arrow", pair=(g, f), result=h)
        elif G.s(h) != G.s(f) or G.t(h) != G.t(g):
            report.add('composition', "Composite has the wrong source or target", pair=(g, f), result=h)
    if not report.ok:
        report.notes.append("remaining axioms skipped: composition table is broken")
        return report

    for x in G.base.points:
        e = G.i(x)
        if G.s(e) != x or G.t(e) != x:
            report.add('units', f"Unit at {x} is not a loop at {x}", point=x, arrow=e)
    if report.failed('units'):
        return report
    for f in arrows:
        if G.comp[(G.i(G.t(f)), f)] != f or G.comp[(f, G.i(G.s(f)))] != f:
            report.add('units', f"Unit law fails for {G.label(f)}", arrow=f)

    for g, f in pairs:
        gf = G.comp[(g, f)]
        for h in arrows:
            if G.s(h) == G.t(g) and G.comp[(h, gf)] != G.comp[(G.comp[(h, g)], f)]:
                report.add('associativity', "Composition is not associative", arrows=(h, g, f))

    for f in arrows:
        v = G.inv(f)
        if G.s(v) != G.t(f) or G.t(v) != G.s(f):
            report.add('inverse', f"Inverse of {G.label(f)} has the wrong endpoints", arrow=f, inverse=v)
        elif G.comp[(v, f)] != G.i(G.s(f)) or G.comp[(f, v)] != G.i(G.t(f)):
            report.add('inverse', f"Inverse of {G.label(f)} is not two-sided", arrow=f, inverse=v)

    for name, fmap in (('s', G.s), ('t', G.t), ('i', G.i), ('inv', G.inv)):
        verdict = check_continuous(fmap)
        if not verdict:
            report.add('continuity', f"Structure map {name} is not continuous", map=name, **verdict.witness)
    fp, fp_pairs = fiber_product_space(G)
    comp_map = PointMap(fp, fp.full, G.arrows, G.arrows.full,
                        {j: G.comp[pair] for j, pair in enumerate(fp_pairs)})
    verdict = check_continuous(comp_map)
    if not verdict:
        bad = fp_pairs[verdict.witness['point']]
        report.add('continuity', "Composition is not continuous on the fibre product", map='comp', pair=bad)
    return report


def is_etale(G: TopGroupoid) -> Verdict:
    """s and t are local homeomorphisms."""
    for name, fmap in (('s', G.s), ('t', G.t)):
        verdict = is_local_homeo(fmap)
        if not verdict:
            return Verdict(False, {'map': name, **verdict.witness})
    return Verdict(True)


# ----------------------------------------------------------------------
# Section category
# ----------------------------------------------------------------------

def sections_category(G: TopGroupoid, name: str = '') -> PrePseudogroup:
    """
    Ĝ(U, V) = continuous σ: U → t⁻¹(V) with s ∘ σ = id, stored as tuples
    of (x, σ(x)).

    Composition is (τ ∘ σ)(x) = comp(τ(t σ(x)), σ(x)); inclusions are the
    unit section; the underlying map of σ is t ∘ σ.

    Raises:
        NotEtale: s or t is not a local homeomorphism.
    """
    verdict = is_etale(G)
    if not verdict:
        raise NotEtale("Sections are only taken for étale groupoids", groupoid=G.name, **verdict.witness)
    base, arrows = G.base, G.arrows
    by_source = {x: [a for a in arrows.points if G.s(a) == x] for x in base.points}

    homs = {}
    for U in base.opens:
        for V in base.opens:
            candidates = {x: [a for a in by_source[x] if G.t(a) in V] for x in U}
            if any(not c for c in candidates.values()):
                homs[(U, V)] = ()
                continue
            found = enumerate_maps(base, U, arrows, candidates, continuous=True)
            homs[(U, V)] = tuple(sorted(tuple(sorted(sigma.items())) for sigma in found))
    incl = {(U, V): tuple((x, G.i(x)) for x in sorted(U))
            for U in base.opens for V in base.opens if U <= V}

    def composer(U, V, W, tau, sigma):
        td = dict(tau)
        return tuple((x, G.compose(td[G.t(a)], a)) for x, a in sigma)

    def underlying(U, V, sigma):
        return {x: G.t(a) for x, a in sigma}

    C = PrePseudogroup(space=base, homs=homs, incl=incl, composer=composer,
                       underlying=underlying, name=name or f"sections({G.name or 'G'})")
    logger.debug(f"Section category of {G!r}: |Ĝ(X,X)| = {len(C.hom(base.full, base.full))}")
    return C


def check_prop11(C: PrePseudogroup) -> CheckReport:
    """
    Category data, the germ-target conditions via the inverse-limit oracle,
    and sheafness of every C(-, V). Works on non-T1 spaces; on T1 spaces
    the germ-target conditions must agree with the coproduct form.
    """
    report = CheckReport('prop11')
    space = C.space
    category = check_category(C)
    report.merge(category)
    if not category.ok:
        report.notes.append("germ conditions skipped: category data is broken")
        return report

    for kind in ('injective_projections', 'jointly_surjective', 'monotone_targets', 'germ_targets'):
        report.mark(kind)
    limits = {(x, y): germ_target_limit(C, x, y) for x in space.points for y in space.points}

    for x in space.points:
        Ux = space.minimal[x]
        for V in space.opens:
            covered = set()
            for y in sorted(V):
                projections = [family[V] for family in limits[(x, y)]]
                if len(set(projections)) != len(projections):
                    report.add('injective_projections', f"Projection of germ targets at {x} → {y} is not injective",
                               point=x, target=y, open=V)
                covered.update(projections)
            missing = [f for f in C.hom(Ux, V) if f not in covered]
            if missing:
                report.add('jointly_surjective', f"Germs at {x} into {format_open(V)} reach no target",
                           point=x, open=V, germ=missing[0])

            if C.has_underlying and V:
                for f in C.hom(Ux, V):
                    image = C.underlying(Ux, V, f)[x]
                    for y in sorted(V):
                        reached = any(family[V] == f for family in limits[(x, y)])
                        if reached != (image in space.minimal[y]):
                            report.add('germ_targets', "Germ target disagrees with the underlying map",
                                       point=x, open=V, germ=f, target=y, image=image)

        for y in space.points:
            for z in space.points:
                if y == z or y not in space.minimal[z]:
                    continue
                nbhds = space.opens_containing(z)
                restricted = [tuple(family[W] for W in nbhds) for family in limits[(x, y)]]
                if len(set(restricted)) != len(restricted):
                    report.add('monotone_targets', f"Germ targets at {y} do not embed into those at {z}",
                               point=x, source=y, target=z)

    if not C.has_underlying:
        report.notes.append("germ-target biconditional skipped: no underlying maps")
    report.merge(check_sheaf_condition(C, kind='condition_3'))

    coproduct = check_decomposition(C)
    germ_conditions = all(report.passed(k) for k in
                          ('injective_projections', 'jointly_surjective', 'monotone_targets'))
    if space.is_t1:
        report.mark('coproduct_equivalence')
        if germ_conditions != bool(coproduct):
            report.add('coproduct_equivalence', "Germ conditions and the coproduct form disagree",
                       germ_conditions=germ_conditions, coproduct=bool(coproduct), **coproduct.witness)
    else:
        report.notes.append(f"coproduct form: {'holds' if coproduct else 'fails'} (not required off T1)")
    return report


# ----------------------------------------------------------------------
# From pseudogroup sheaves to groupoids
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GermBundle:
    """The groupoid of germs together with the étale space it was built from."""

    groupoid: TopGroupoid
    bundle: EtaleSpaceBundle
    dialect: str


def build_germ_bundle(C: PrePseudogroup, dialect: Optional[str] = None, verify: bool = True) -> GermBundle:
    """
    G1 is the étale space of C(-, X); s is its projection, t(f_x) = f̄(x),
    i(x) is the germ of incl(U_x, X), and inv/comp come from C*.

    Raises:
        NotAPseudogroupSheaf: `verify` is set and C fails the axioms.
        WitnessFailed: the germ groupoid is not an étale groupoid.
    """
    dialect = resolve_dialect(C, dialect)
    if verify:
        report = is_pseudogroup_sheaf(C, dialect)
        if not report.ok:
            v = report.first()
            raise NotAPseudogroupSheaf(f"{C.name or 'C'} is not a pseudogroup sheaf: {v.message}",
                                       kind=v.kind, **v.witness)
    space = C.space
    X = space.full
    bundle = etale_space(hom_presheaf(C, X))
    star = build_germ_groupoid(C, dialect, require_groupoid=True)

    s, t, inv, labels = {}, {}, {}, {}
    arrow_of: Dict[int, GermArrow] = {}
    for a, germ in enumerate(bundle.germs):
        x, value = germ.base, germ.value
        y = underlying_of(C, space.minimal[x], X, value, dialect)(x)
        s[a], t[a] = x, y
        arrow_of[a] = GermArrow(x, y, value)
        labels[a] = f"{x}→{y}:{describe(value, 24)}"
    index = {arrow: a for a, arrow in arrow_of.items()}

    i = {x: bundle.point_of(x, C.inclusion(space.minimal[x], X)) for x in space.points}
    comp = {}
    for g, f in ((g, f) for g in arrow_of for f in arrow_of if s[g] == t[f]):
        comp[(g, f)] = index[star.compose(arrow_of[g], arrow_of[f])]
    for a, arrow in arrow_of.items():
        inverse = star.inverse(arrow)
        if inverse is None:
            raise WitnessFailed("Germ has no inverse", arrow=a)
        inv[a] = index[inverse]

    G = TopGroupoid.from_tables(space, bundle.total, s, t, i, inv, comp, labels,
                                name=f"germs({C.name or 'C'})")
    groupoid_report = check_groupoid(G)
    if not groupoid_report.ok:
        v = groupoid_report.first()
        raise WitnessFailed(f"Germ groupoid violates an axiom: {v.message}", kind=v.kind, **v.witness)
    verdict = is_etale(G)
    if not verdict:
        raise WitnessFailed("Germ groupoid is not étale", **verdict.witness)
    logger.debug(f"Built {G!r} from {C!r} ({dialect})")
    return GermBundle(groupoid=G, bundle=bundle, dialect=dialect)


def groupoid_from_pseudogroup(C: PrePseudogroup, dialect: Optional[str] = None) -> TopGroupoid:
    return build_germ_bundle(C, dialect).groupoid


def check_target_factorization(C: PrePseudogroup, dialect: Optional[str] = None) -> CheckReport:
    """On every basic open [f, U]: t = f̄ ∘ s."""
    report = CheckReport('target_factorization')
    report.mark('target_factorization')
    built = build_germ_bundle(C, dialect, verify=False)
    G, bundle = built.groupoid, built.bundle
    X = C.space.full
    for U, f, members in bundle.basic_opens:
        fbar = underlying_of(C, U, X, f, built.dialect)
        for a in members:
            if G.t(a) != fbar(G.s(a)):
                report.add('target_factorization', "t disagrees with f̄ ∘ s on a basic open",
                           open=U, element=f, arrow=a)
    return report


# ----------------------------------------------------------------------
# Round trips
# ----------------------------------------------------------------------

@dataclass
class IsoWitness:
    """Mutually inverse structure-preserving maps, verified on construction."""

    kind: str
    base_map: Dict[int, int] = field(default_factory=dict)
    arrow_map: Dict[int, int] = field(default_factory=dict)
    hom_maps: Dict[Tuple[Open, Open], Dict[Hom, Hom]] = field(default_factory=dict)
    verified: bool = False
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'verified': self.verified,
            'base_map': {str(k): v for k, v in sorted(self.base_map.items())},
            'arrow_map': {str(k): v for k, v in sorted(self.arrow_map.items())},
            'hom_sizes': {f"{format_open(U)}/{format_open(V)}": len(table)
                          for (U, V), table in self.hom_maps.items() if table},
            'notes': list(self.notes),
        }


def _sections_through(C: PrePseudogroup, g: int, x: int, U: Open) -> List[Hom]:
    return [sigma for sigma in C.hom(U, C.space.full) if dict(sigma)[x] == g]


def roundtrip_groupoid(G: TopGroupoid, dialect: Optional[str] = None) -> IsoWitness:
    """
    G → Ĝ → germs(Ĝ), with g sent to the germ at s(g) of a local section
    through g.

    Raises:
        NotEtale: G is not étale.
        NoSectionThroughArrow: some arrow lies on no section over U_{s(g)}.
        WitnessFailed: the canonical map breaks some structure.
    """
    sections = sections_category(G)
    built = build_germ_bundle(sections, dialect, verify=False)
    H, bundle = built.groupoid, built.bundle
    space = G.base

    arrow_map: Dict[int, int] = {}
    for g in G.arrows.points:
        x = G.s(g)
        Ux = space.minimal[x]
        local = _sections_through(sections, g, x, Ux)
        if not local:
            raise NoSectionThroughArrow(f"No section through {G.label(g)} over {format_open(Ux)}", arrow=g)
        germs = {germ_at(sections, x, U, space.full, sigma)
                 for U in space.opens_containing(x)
                 for sigma in _sections_through(sections, g, x, U)}
        if len(germs) != 1:
            raise WitnessFailed("Sections through one arrow have different germs",
                                arrow=g, germs=len(germs))
        arrow_map[g] = bundle.point_of(x, germs.pop())

    base_map = {x: x for x in space.points}
    _verify_arrow_iso(G, H, arrow_map)
    return IsoWitness(kind='groupoid', base_map=base_map, arrow_map=arrow_map, verified=True,
                      notes=[f"{len(arrow_map)} arrows matched germs of sections"])


def _verify_arrow_iso(G: TopGroupoid, H: TopGroupoid, arrow_map: Mapping[int, int]) -> None:
    if sorted(arrow_map.values()) != list(H.arrows.points):
        raise WitnessFailed("Arrow map is not a bijection", image=len(set(arrow_map.values())),
                            arrows=len(H.arrows.points))
    for g in G.arrows.points:
        a = arrow_map[g]
        if H.s(a) != G.s(g) or H.t(a) != G.t(g):
            raise WitnessFailed("Arrow map does not preserve s and t", arrow=g)
        if arrow_map[G.inv(g)] != H.inv(a):
            raise WitnessFailed("Arrow map does not preserve inverses", arrow=g)
        if frozenset(arrow_map[b] for b in G.arrows.minimal[g]) != H.arrows.minimal[a]:
            raise WitnessFailed("Arrow map is not a homeomorphism", arrow=g)
    for x in G.base.points:
        if arrow_map[G.i(x)] != H.i(x):
            raise WitnessFailed("Arrow map does not preserve units", point=x)
    for (g, f), h in G.comp.items():
        if H.comp[(arrow_map[g], arrow_map[f])] != arrow_map[h]:
            raise WitnessFailed("Arrow map does not preserve composition", pair=(g, f))


def roundtrip_pseudogroup(C: PrePseudogroup, dialect: Optional[str] = None) -> IsoWitness:
    """
    C → germs(C) → sections, with f ∈ C(U, V) sent to x ↦ f_x.

    Raises:
        NotAPseudogroupSheaf: C fails the axioms.
        WitnessFailed: some hom-set map is not a bijection or breaks structure.
    """
    built = build_germ_bundle(C, dialect)
    G, bundle = built.groupoid, built.bundle
    D = sections_category(G)
    space = C.space
    X = space.full

    components: Dict[Tuple[Open, Open], Dict[Hom, Hom]] = {}
    for U in space.opens:
        for V in space.opens:
            table = {}
            for f in C.hom(U, V):
                into_x = C.compose(U, V, X, C.inclusion(V, X), f)
                table[f] = tuple((x, bundle.point_of(x, germ_at(C, x, U, X, into_x))) for x in sorted(U))
            images = list(table.values())
            if len(set(images)) != len(images) or set(images) != set(D.hom(U, V)):
                raise WitnessFailed("Hom-set map is not a bijection onto sections",
                                    pair=(U, V), source=len(images), target=len(D.hom(U, V)))
            components[(U, V)] = table

    phi = PpgMorphism(C, D, components)
    report = check_ppg_morphism(phi)
    if not report.ok:
        v = report.first()
        raise WitnessFailed(f"Canonical map is not a morphism: {v.message}", kind=v.kind, **v.witness)
    return IsoWitness(kind='pseudogroup', base_map={x: x for x in space.points},
                      hom_maps=components, verified=True,
                      notes=[f"{sum(len(t) for t in components.values())} hom elements matched sections"])


# ----------------------------------------------------------------------
# Morphisms
# ----------------------------------------------------------------------

@dataclass
class GroupoidFunctor:
    source: TopGroupoid
    target: TopGroupoid
    arrow_map: Dict[int, int]
    report: CheckReport

    @property
    def ok(self) -> bool:
        return self.report.ok


def check_functor(F: GroupoidFunctor) -> CheckReport:
    G, H, m = F.source, F.target, F.arrow_map
    report = CheckReport('functor')
    for kind in ('endpoints', 'units', 'composition', 'continuity'):
        report.mark(kind)
    for g in G.arrows.points:
        if H.s(m[g]) != G.s(g) or H.t(m[g]) != G.t(g):
            report.add('endpoints', "Functor moves an endpoint", arrow=g)
    for x in G.base.points:
        if m[G.i(x)] != H.i(x):
            report.add('units', "Functor does not preserve units", point=x)
    for (g, f), h in G.comp.items():
        if (m[g], m[f]) not in H.comp or H.comp[(m[g], m[f])] != m[h]:
            report.add('composition', "Functor does not preserve composition", pair=(g, f))
    verdict = check_continuous(PointMap(G.arrows, G.arrows.full, H.arrows, H.arrows.full, dict(m)))
    if not verdict:
        report.add('continuity', "Arrow map is not continuous", **verdict.witness)
    return report


def transport_morphism(phi: PpgMorphism, dialect: Optional[str] = None) -> GroupoidFunctor:
    """The germwise map f_x ↦ φ(f)_x between groupoids of germs."""
    source = build_germ_bundle(phi.source, dialect)
    target = build_germ_bundle(phi.target, dialect)
    space = phi.source.space
    X = space.full
    arrow_map = {}
    for a, germ in enumerate(source.bundle.germs):
        Ux = space.minimal[germ.base]
        arrow_map[a] = target.bundle.point_of(germ.base, phi.apply(Ux, X, germ.value))
    functor = GroupoidFunctor(source.groupoid, target.groupoid, arrow_map, CheckReport('functor'))
    functor.report = check_functor(functor)
    return functor


def find_groupoid_isomorphism(G: TopGroupoid, H: TopGroupoid,
                              node_budget: int = 200000) -> Optional[Dict[int, int]]:
    """
    Search oracle over the same base: a bijection of arrows preserving
    s, t, units, composition and the arrow topology.
    """
    if G.base != H.base or len(G.arrows.points) != len(H.arrows.points):
        return None
    order = list(G.arrows.points)
    chosen: Dict[int, int] = {}
    used = set()
    nodes = [0]

    def consistent(g: int) -> bool:
        a = chosen[g]
        if H.s(a) != G.s(g) or H.t(a) != G.t(g):
            return False
        for (p, q), r in G.comp.items():
            if p in chosen and q in chosen and r in chosen and H.comp.get((chosen[p], chosen[q])) != chosen[r]:
                return False
        for b in G.arrows.points:
            if b in chosen and (b in G.arrows.minimal[g]) != (chosen[b] in H.arrows.minimal[a]):
                return False
            if b in chosen and (g in G.arrows.minimal[b]) != (a in H.arrows.minimal[chosen[b]]):
                return False
        return True

    def extend(k: int) -> Optional[Dict[int, int]]:
        if k == len(order):
            return dict(chosen)
        g = order[k]
        for a in H.arrows.points:
            nodes[0] += 1
            if nodes[0] > node_budget:
                raise EnumerationBudgetExceeded("Groupoid isomorphism search exceeded its budget",
                                                budget=node_budget)
            if a in used:
                continue
            chosen[g] = a
            used.add(a)
            if consistent(g):
                found = extend(k + 1)
                if found is not None:
                    return found
            used.discard(a)
            del chosen[g]
        return None

    return extend(0)


# ----------------------------------------------------------------------
# Builders
# ----------------------------------------------------------------------

def unit_groupoid(space: FiniteSpace) -> TopGroupoid:
    """G1 = G0 with every structure map the identity."""
    ident = {x: x for x in space.points}
    arrows = FiniteSpace(points=space.points, minimal=dict(space.minimal), name=f"units({space.name})")
    return TopGroupoid.from_tables(space, arrows, ident, ident, ident, ident,
                                   {(x, x): x for x in space.points},
                                   {x: f"1_{x}" for x in space.points}, name=f"unit({space.name or 'X'})")


def coarse_unit_groupoid(n: int) -> TopGroupoid:
    """Unit groupoid whose arrow space is indiscrete over a discrete base; never étale once n > 1."""
    base = discrete_space(n)
    arrows = indiscrete_space(n)
    ident = {x: x for x in base.points}
    return TopGroupoid.from_tables(base, arrows, ident, ident, ident, ident,
                                   {(x, x): x for x in base.points}, name=f"coarse_unit{n}")


def pair_groupoid(n: int) -> TopGroupoid:
    """One arrow x → y for every pair of points of the discrete n-point space."""
    base = discrete_space(n)
    code = {(x, y): x * n + y for x in range(n) for y in range(n)}
    s = {a: x for (x, y), a in code.items()}
    t = {a: y for (x, y), a in code.items()}
    comp = {}
    for (y, z), g in code.items():
        for (x, y2), f in code.items():
            if y2 == y:
                comp[(g, f)] = code[(x, z)]
    return TopGroupoid.from_tables(
        base, discrete_space(n * n), s, t,
        {x: code[(x, x)] for x in range(n)},
        {a: code[(y, x)] for (x, y), a in code.items()},
        comp, {a: f"{x}→{y}" for (x, y), a in code.items()}, name=f"pair{n}")


def bundle_groupoid(space: FiniteSpace, group: FiniteGroup) -> TopGroupoid:
    """Trivial group bundle X × H, with U_(x,h) = U_x × {h}."""
    points = list(space.points)
    elements = list(group.elements)
    code = {(x, h): k * len(elements) + j for k, x in enumerate(points) for j, h in enumerate(elements)}
    minimal = {a: {code[(y, h)] for y in space.minimal[x]} for (x, h), a in code.items()}
    arrows = FiniteSpace.from_minimal_opens(minimal, name=f"{space.name}×{group.name}")
    s = {a: x for (x, h), a in code.items()}
    comp = {(code[(x, g)], code[(x, h)]): code[(x, group.mul(g, h))]
            for x in points for g in elements for h in elements}
    return TopGroupoid.from_tables(
        space, arrows, s, dict(s),
        {x: code[(x, group.identity)] for x in points},
        {a: code[(x, group.inverse(h))] for (x, h), a in code.items()},
        comp, {a: f"{x}:{h}" for (x, h), a in code.items()},
        name=f"bundle({space.name or 'X'},{group.name})")


def group_groupoid(group: FiniteGroup) -> TopGroupoid:
    """H as a one-object groupoid over the point."""
    return bundle_groupoid(discrete_space(1), group)


def action_groupoid(space: FiniteSpace, automorphism: Mapping[int, int], name: str = '') -> TopGroupoid:
    """
    Action groupoid of the cyclic group generated by a homeomorphism σ:
    arrows (x, m): x → σ^m(x), with U_(x,m) = U_x × {m}.
    """
    points = list(space.points)
    powers = [{x: x for x in points}]
    while True:
        step = {x: automorphism[powers[-1][x]] for x in points}
        if step == powers[0]:
            break
        powers.append(step)
    order = len(powers)
    code = {(x, m): k * order + m for k, x in enumerate(points) for m in range(order)}
    minimal = {a: {code[(y, m)] for y in space.minimal[x]} for (x, m), a in code.items()}
    arrows = FiniteSpace.from_minimal_opens(minimal, name=f"{space.name}⋊Z{order}")
    s = {a: x for (x, m), a in code.items()}
    t = {a: powers[m][x] for (x, m), a in code.items()}
    comp = {}
    for (x, m), f in code.items():
        y = powers[m][x]
        for m2 in range(order):
            comp[(code[(y, m2)], f)] = code[(x, (m + m2) % order)]
    inv = {a: code[(powers[m][x], (-m) % order)] for (x, m), a in code.items()}
    return TopGroupoid.from_tables(space, arrows, s, t, {x: code[(x, 0)] for x in points}, inv, comp,
                                   {a: f"{x}·σ^{m}" for (x, m), a in code.items()},
                                   name=name or f"action({space.name or 'X'},Z{order})")


def disjoint_union(parts: Iterable[TopGroupoid], name: str = '') -> TopGroupoid:
    """Coproduct of groupoids; points and arrows are renumbered consecutively."""
    base_min, arrow_min = {}, {}
    s, t, i, inv, comp, labels = {}, {}, {}, {}, {}, {}
    base_off = arrow_off = 0
    for G in parts:
        bmap = {x: base_off + k for k, x in enumerate(G.base.points)}
        amap = {a: arrow_off + k for k, a in enumerate(G.arrows.points)}
        for x in G.base.points:
            base_min[bmap[x]] = {bmap[y] for y in G.base.minimal[x]}
            i[bmap[x]] = amap[G.i(x)]
        for a in G.arrows.points:
            arrow_min[amap[a]] = {amap[b] for b in G.arrows.minimal[a]}
            s[amap[a]], t[amap[a]] = bmap[G.s(a)], bmap[G.t(a)]
            inv[amap[a]] = amap[G.inv(a)]
            labels[amap[a]] = G.label(a)
        for (g, f), h in G.comp.items():
            comp[(amap[g], amap[f])] = amap[h]
        base_off += len(G.base.points)
        arrow_off += len(G.arrows.points)
    base = FiniteSpace.from_minimal_opens(base_min, name=name or 'union')
    arrows = FiniteSpace.from_minimal_opens(arrow_min, name=f"{name or 'union'}_1")
    return TopGroupoid.from_tables(base, arrows, s, t, i, inv, comp, labels, name=name or 'union')


def pair_group_groupoid(n: int, group: FiniteGroup) -> TopGroupoid:
    """pair(n) × H over the discrete n-point space: arrows (x, y, h) from x to y."""
    base = discrete_space(n)
    elements = list(group.elements)
    triples = [(x, y, h) for x in range(n) for y in range(n) for h in elements]
    code = {triple: a for a, triple in enumerate(triples)}
    comp = {}
    for (y, z, g), ga in code.items():
        for (x, y2, h), fa in code.items():
            if y2 == y:
                comp[(ga, fa)] = code[(x, z, group.mul(g, h))]
    return TopGroupoid.from_tables(
        base, discrete_space(len(triples)),
        {a: x for (x, y, h), a in code.items()},
        {a: y for (x, y, h), a in code.items()},
        {x: code[(x, x, group.identity)] for x in range(n)},
        {a: code[(y, x, group.inverse(h))] for (x, y, h), a in code.items()},
        comp, {a: f"{x}→{y}:{h}" for (x, y, h), a in code.items()},
        name=f"pair{n}×{group.name}")
