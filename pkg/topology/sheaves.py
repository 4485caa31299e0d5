"""
Presheaves of finite sets on a finite space.

Stalks are attained at minimal opens, so a germ at x is simply a section
over U_x. Sheaf checks default to the canonical cover {U_x : x ∈ U}; the
exhaustive mode walks every irredundant cover and exists to cross-check it.
"""

import logging
import itertools
from functools import cached_property
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from utils.errors import EmptyStalkRejected, NotASheaf, NoFactorization, EnumerationBudgetExceeded
from utils.helpers import ordered, format_open, UnionFind
from utils.reporting import CheckReport, Verdict
from .finspace import (
    FiniteSpace, Open, PointMap, EMPTY, CANONICAL, EXHAUSTIVE, IRREDUNDANT,
    enumerate_covers,
)

logger = logging.getLogger(__name__)

# Section of a skyscraper over an open missing its support point.
SENTINEL = '•'

DEFAULT_NODE_BUDGET = 200000

Section = Hashable
Restrictor = Callable[[Open, Open, Section], Section]


@dataclass(frozen=True, eq=False)
class Presheaf:
    """Tabulated presheaf: section sets per open and restriction tables per pair W ⊆ U."""

    space: FiniteSpace
    sections: Mapping[Open, Tuple[Section, ...]]
    restrictions: Mapping[Tuple[Open, Open], Mapping[Section, Section]]
    name: str = ''

    def __repr__(self) -> str:
        return f"Presheaf({self.name or 'unnamed'} on {self.space!r})"

    @classmethod
    def from_restrictor(cls, space: FiniteSpace, sections: Mapping[Open, Iterable[Section]],
                        restrictor: Restrictor, name: str = '') -> 'Presheaf':
        """Tabulate a presheaf from section sets and a restriction function."""
        table = {U: tuple(sections[U]) for U in space.opens}
        restrictions = {}
        for U in space.opens:
            for W in space.opens:
                if W <= U:
                    restrictions[(U, W)] = {s: restrictor(U, W, s) for s in table[U]}
        return cls(space=space, sections=table, restrictions=restrictions, name=name)

    def restrict(self, U: Open, W: Open, s: Section) -> Section:
        return self.restrictions[(U, W)][s]

    def germ(self, x: int, U: Open, s: Section) -> Section:
        return self.restrict(U, self.space.minimal[x], s)

    def size(self, U: Open) -> int:
        return len(self.sections[U])

    def to_dict(self) -> dict:
        return {
            'space': self.space.to_dict(),
            'sections': {format_open(U): list(self.sections[U]) for U in self.space.opens},
            'restrictions': {
                f"{format_open(U)}/{format_open(W)}": dict(table)
                for (U, W), table in self.restrictions.items()
            },
        }


@dataclass(frozen=True, eq=False)
class PresheafMorphism:
    source: Presheaf
    target: Presheaf
    components: Mapping[Open, Mapping[Section, Section]]

    def apply(self, U: Open, s: Section) -> Section:
        return self.components[U][s]


def identity_morphism(P: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(P, P, {U: {s: s for s in P.sections[U]} for U in P.space.opens})


def check_presheaf(P: Presheaf) -> CheckReport:
    """Identity and functoriality of restrictions, plus table totality."""
    report = CheckReport('presheaf')
    space = P.space
    for kind in ('coverage', 'totality', 'identity', 'functoriality'):
        report.mark(kind)

    for U in space.opens:
        if U not in P.sections:
            report.add('coverage', f"No sections given for {format_open(U)}", open=U)
    if not report.ok:
        return report

    for U in space.opens:
        for W in space.opens:
            if not W <= U:
                continue
            table = P.restrictions.get((U, W))
            if table is None:
                report.add('totality', f"Missing restriction {format_open(U)} → {format_open(W)}", chain=(U, W))
                continue
            for s in P.sections[U]:
                if s not in table:
                    report.add('totality', f"Restriction {format_open(U)} → {format_open(W)} undefined on {s!r}",
                               chain=(U, W), section=s)
                elif table[s] not in P.sections[W]:
                    report.add('totality', f"Restriction of {s!r} lands outside sections of {format_open(W)}",
                               chain=(U, W), section=s, value=table[s])
    if report.failed('totality'):
        return report

    for U in space.opens:
        for s in P.sections[U]:
            if P.restrict(U, U, s) != s:
                report.add('identity', f"Restriction {format_open(U)} ⊆ {format_open(U)} moves {s!r}",
                           open=U, section=s, value=P.restrict(U, U, s))

    for U in space.opens:
        smaller = [W for W in space.opens if W <= U]
        for V in smaller:
            for W in smaller:
                if not W <= V:
                    continue
                for s in P.sections[U]:
                    direct = P.restrict(U, W, s)
                    stepwise = P.restrict(V, W, P.restrict(U, V, s))
                    if direct != stepwise:
                        report.add('functoriality', "Restriction is not functorial",
                                   chain=(W, V, U), section=s, direct=direct, stepwise=stepwise)
    return report


def matching_families(P: Presheaf, cover: Sequence[Open]) -> Iterator[Tuple[Section, ...]]:
    """Families over a cover that agree on pairwise intersections (backtracking)."""
    cover = list(cover)
    chosen: List[Section] = []

    def extend(i: int) -> Iterator[Tuple[Section, ...]]:
        if i == len(cover):
            yield tuple(chosen)
            return
        W = cover[i]
        for v in P.sections[W]:
            agrees = True
            for j in range(i):
                meet = W & cover[j]
                if P.restrict(W, meet, v) != P.restrict(cover[j], meet, chosen[j]):
                    agrees = False
                    break
            if agrees:
                chosen.append(v)
                yield from extend(i + 1)
                chosen.pop()

    yield from extend(0)


def _gluing_failure(P: Presheaf, U: Open, cover: Sequence[Open]) -> Optional[dict]:
    images: Dict[Tuple[Section, ...], Section] = {}
    for s in P.sections[U]:
        family = tuple(P.restrict(U, W, s) for W in cover)
        if family in images:
            return {'reason': 'not_separated', 'open': U, 'cover': tuple(cover),
                    'sections': (images[family], s), 'family': family}
        images[family] = s
    for family in matching_families(P, cover):
        if family not in images:
            return {'reason': 'no_gluing', 'open': U, 'cover': tuple(cover), 'family': family}
    return None


def is_sheaf(P: Presheaf, mode: str = CANONICAL, budget: Optional[int] = None) -> Verdict:
    """
    Equalizer condition over canonical covers (default) or over every
    irredundant cover (mode='exhaustive', subject to the cover budget).
    """
    space = P.space
    cover_mode = CANONICAL if mode == CANONICAL else IRREDUNDANT
    for U in space.opens:
        for cover in enumerate_covers(space, U, cover_mode, budget=budget):
            failure = _gluing_failure(P, U, cover)
            if failure:
                logger.debug(f"{P!r} fails gluing at {format_open(U)}: {failure['reason']}")
                return Verdict(False, failure)
    return Verdict(True)


def stalk(P: Presheaf, x: int) -> Tuple[Section, ...]:
    return P.sections[P.space.minimal_open(x)]


def colimit_stalk_oracle(P: Presheaf, x: int) -> Verdict:
    """
    Brute-force colimit over the neighbourhoods of x: pairs (U, s) are
    identified when they agree on some open W with x ∈ W ⊆ U ∩ U'. The
    classes must biject with sections(U_x).
    """
    space = P.space
    nbhds = space.opens_containing(x)
    nodes = [(U, s) for U in nbhds for s in P.sections[U]]
    classes = UnionFind(nodes)
    for (U, s), (V, t) in itertools.combinations(nodes, 2):
        for W in nbhds:
            if W <= U and W <= V and P.restrict(U, W, s) == P.restrict(V, W, t):
                classes.union((U, s), (V, t))
                break

    Ux = space.minimal[x]
    seen: Dict[Section, object] = {}
    for group in classes.classes():
        values = {P.restrict(U, Ux, s) for (U, s) in group}
        if len(values) != 1:
            return Verdict(False, {'point': x, 'reason': 'class_splits', 'values': values})
        value = values.pop()
        if value in seen:
            return Verdict(False, {'point': x, 'reason': 'classes_collide', 'value': value})
        seen[value] = group
    missing = set(P.sections[Ux]) - set(seen)
    if missing:
        return Verdict(False, {'point': x, 'reason': 'not_surjective', 'missing': missing})
    return Verdict(True, {'classes': len(seen)})


# ----------------------------------------------------------------------
# Étale space
# ----------------------------------------------------------------------

class Germ(NamedTuple):
    base: int
    value: Section


@dataclass(frozen=True, eq=False)
class EtaleSpaceBundle:
    """
    The space of germs of a presheaf.

    Germs are relabelled 0..n-1; `germs[i]` is the germ at point i of
    `total`. `basic_opens` lists the generating sets [f, U].
    """

    presheaf: Presheaf
    total: FiniteSpace
    germs: Tuple[Germ, ...]
    projection: PointMap
    basic_opens: Tuple[Tuple[Open, Section, Open], ...]

    @cached_property
    def index(self) -> Dict[Germ, int]:
        return {g: i for i, g in enumerate(self.germs)}

    def point_of(self, x: int, value: Section) -> int:
        return self.index[Germ(x, value)]

    def basic_open(self, U: Open, s: Section) -> Open:
        P = self.presheaf
        return frozenset(self.index[Germ(x, P.germ(x, U, s))] for x in U)


def etale_space(P: Presheaf) -> EtaleSpaceBundle:
    space = P.space
    germs = tuple(Germ(x, v) for x in space.points for v in P.sections[space.minimal[x]])
    index = {g: i for i, g in enumerate(germs)}

    basics = []
    for U in space.opens:
        if not U:
            continue
        for s in P.sections[U]:
            members = frozenset(index[Germ(x, P.germ(x, U, s))] for x in U)
            basics.append((U, s, members))

    total = FiniteSpace.from_subbasis(range(len(germs)), [b[2] for b in basics],
                                      name=f"germs({P.name or 'presheaf'})")
    projection = PointMap(total, total.full, space, space.full,
                          {i: g.base for i, g in enumerate(germs)})
    logger.debug(f"Étale space of {P!r}: {len(germs)} germs, {len(basics)} basic opens")
    return EtaleSpaceBundle(presheaf=P, total=total, germs=germs,
                            projection=projection, basic_opens=tuple(basics))


# ----------------------------------------------------------------------
# Skyscrapers, products, sheafification
# ----------------------------------------------------------------------

def _skyscraper(space: FiniteSpace, x: int, stalk_set: Iterable[Section],
                allow_empty: bool = False) -> Presheaf:
    values = tuple(stalk_set)
    if not values and not allow_empty:
        raise EmptyStalkRejected(f"Skyscraper at {x} needs a non-empty stalk", point=x)
    space.check_point(x)
    sections = {U: (values if x in U else (SENTINEL,)) for U in space.opens}

    def restrictor(U: Open, W: Open, s: Section) -> Section:
        return s if x in W else SENTINEL

    return Presheaf.from_restrictor(space, sections, restrictor, name=f"skyscraper@{x}")


def skyscraper(space: FiniteSpace, x: int, stalk_set: Iterable[Section]) -> Presheaf:
    """S(U) = stalk_set when x ∈ U, the singleton {•} otherwise."""
    return _skyscraper(space, x, stalk_set)


def product_presheaf(factors: Sequence[Presheaf], space: Optional[FiniteSpace] = None) -> Presheaf:
    """Componentwise product; the empty product is the constant singleton presheaf."""
    if factors:
        space = factors[0].space
        if any(f.space != space for f in factors):
            raise ValueError("Product factors must live on the same space")
    elif space is None:
        raise ValueError("Empty product needs an explicit space")

    sections = {U: tuple(itertools.product(*(f.sections[U] for f in factors))) for U in space.opens}

    def restrictor(U: Open, W: Open, s: Tuple[Section, ...]) -> Tuple[Section, ...]:
        return tuple(f.restrict(U, W, c) for f, c in zip(factors, s))

    return Presheaf.from_restrictor(space, sections, restrictor, name='product')


def check_naturality(phi: PresheafMorphism) -> CheckReport:
    report = CheckReport('presheaf_morphism')
    report.mark('naturality')
    F, G = phi.source, phi.target
    for U in F.space.opens:
        for s in F.sections[U]:
            if s not in phi.components.get(U, {}):
                report.add('totality', f"Component at {format_open(U)} undefined on {s!r}", open=U, section=s)
                continue
            if phi.apply(U, s) not in G.sections[U]:
                report.add('totality', "Component lands outside target sections", open=U, section=s)
    if not report.ok:
        return report
    for U in F.space.opens:
        for W in F.space.opens:
            if not W <= U:
                continue
            for s in F.sections[U]:
                if G.restrict(U, W, phi.apply(U, s)) != phi.apply(W, F.restrict(U, W, s)):
                    report.add('naturality', "Square does not commute", chain=(W, U), section=s)
    return report


@dataclass
class SheafificationResult:
    sheaf: Presheaf
    unit: PresheafMorphism
    sharp: Presheaf
    passes: int = 0

    def __iter__(self):
        return iter((self.sheaf, self.unit))


def unit_into_sharp(P: Presheaf, U: Open, s: Section) -> Tuple[Section, ...]:
    """Germ family of s over U, padded with • outside U."""
    space = P.space
    return tuple(P.germ(x, U, s) if x in U else SENTINEL for x in space.points)


def sheafify(P: Presheaf) -> SheafificationResult:
    """
    Least subsheaf of the product of skyscrapers F^# containing the image
    of F → F^#. Gluing over canonical covers is iterated over opens in
    decreasing size until nothing is added.

    The result unpacks as (sheaf, unit).
    """
    space = P.space
    factors = [_skyscraper(space, x, stalk(P, x), allow_empty=True) for x in space.points]
    sharp = product_presheaf(factors, space)
    sharp = Presheaf(sharp.space, sharp.sections, sharp.restrictions, name=f"{P.name or 'F'}#")

    sub = {U: {unit_into_sharp(P, U, s) for s in P.sections[U]} for U in space.opens}
    passes = 0
    changed = True
    while changed:
        changed = False
        passes += 1
        for U in reversed(space.opens):
            for t in sharp.sections[U]:
                if t in sub[U]:
                    continue
                if all(sharp.restrict(U, space.minimal[x], t) in sub[space.minimal[x]] for x in U):
                    sub[U].add(t)
                    changed = True

    sections = {U: ordered(sub[U]) for U in space.opens}
    restrictions = {
        (U, W): {t: sharp.restrict(U, W, t) for t in sections[U]}
        for (U, W) in sharp.restrictions
    }
    sheaf = Presheaf(space, sections, restrictions, name=f"{P.name or 'F'}^")
    unit = PresheafMorphism(P, sheaf, {
        U: {s: unit_into_sharp(P, U, s) for s in P.sections[U]} for U in space.opens
    })
    logger.debug(f"Sheafified {P!r} in {passes} passes")
    return SheafificationResult(sheaf=sheaf, unit=unit, sharp=sharp, passes=passes)


def inclusion_morphism(sub: Presheaf, ambient: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(sub, ambient, {U: {s: s for s in sub.sections[U]} for U in sub.space.opens})


@dataclass
class StalkwiseIso:
    stalkwise: bool
    openwise: bool
    witness: dict = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.stalkwise == self.openwise

    def __bool__(self) -> bool:
        return self.stalkwise


def _is_bijection(mapping: Mapping[Section, Section], source: Sequence[Section], target: Sequence[Section]) -> bool:
    images = [mapping[s] for s in source]
    return len(set(images)) == len(images) and set(images) == set(target)


def check_morphism_stalkwise_iso(phi: PresheafMorphism, require_sheaves: bool = True) -> StalkwiseIso:
    """
    Stalk maps are the components at minimal opens. Both the stalkwise and
    the openwise verdicts are returned; on sheaves they must agree.
    """
    F, G = phi.source, phi.target
    if require_sheaves:
        for side, P in (('source', F), ('target', G)):
            verdict = is_sheaf(P)
            if not verdict:
                raise NotASheaf(f"Morphism {side} is not a sheaf", side=side, **verdict.witness)

    witness = {}
    stalkwise = True
    for x in F.space.points:
        Ux = F.space.minimal[x]
        if not _is_bijection(phi.components[Ux], F.sections[Ux], G.sections[Ux]):
            stalkwise = False
            witness.setdefault('point', x)
    openwise = True
    for U in F.space.opens:
        if not _is_bijection(phi.components[U], F.sections[U], G.sections[U]):
            openwise = False
            witness.setdefault('open', U)
    if stalkwise != openwise:
        witness['disagreement'] = True
        if require_sheaves:
            logger.error(f"Stalkwise and openwise isomorphism disagree: {witness}")
    return StalkwiseIso(stalkwise, openwise, witness)


def enumerate_presheaf_morphisms(F: Presheaf, G: Presheaf,
                                 constraint: Optional[Callable[[Open, Section, Section], bool]] = None,
                                 node_budget: int = DEFAULT_NODE_BUDGET) -> Iterator[PresheafMorphism]:
    """
    All natural transformations F → G accepted by `constraint`.

    Opens are filled by increasing size so naturality against every
    smaller open is checked as soon as a value is chosen.
    """
    opens = F.space.opens
    slots = [(U, s) for U in opens for s in F.sections[U]]
    chosen: Dict[Tuple[Open, Section], Section] = {}
    nodes = [0]

    def allowed(U: Open, s: Section, v: Section) -> bool:
        if constraint is not None and not constraint(U, s, v):
            return False
        for W in opens:
            if W < U and G.restrict(U, W, v) != chosen[(W, F.restrict(U, W, s))]:
                return False
        return True

    def extend(i: int) -> Iterator[PresheafMorphism]:
        if i == len(slots):
            components: Dict[Open, Dict[Section, Section]] = {U: {} for U in opens}
            for (U, s), v in chosen.items():
                components[U][s] = v
            yield PresheafMorphism(F, G, components)
            return
        U, s = slots[i]
        for v in G.sections[U]:
            nodes[0] += 1
            if nodes[0] > node_budget:
                raise EnumerationBudgetExceeded("Presheaf morphism search exceeded its budget",
                                                budget=node_budget)
            if allowed(U, s, v):
                chosen[(U, s)] = v
                yield from extend(i + 1)
                del chosen[(U, s)]

    yield from extend(0)


def check_sheafify_universality(P: Presheaf, G: Presheaf, phi: PresheafMorphism,
                                node_budget: int = DEFAULT_NODE_BUDGET) -> Tuple[PresheafMorphism, dict]:
    """
    Factor φ: P → G through the sheafification unit.

    ψ is built germwise and glued in G; uniqueness is certified by
    enumerating every morphism F̂ → G that agrees with φ on the image.
    """
    result = sheafify(P)
    Fhat, unit = result.sheaf, result.unit
    space = P.space

    preimage_at_minimal: Dict[Tuple[Open, Section], Section] = {}
    for x in space.points:
        Ux = space.minimal[x]
        for s in P.sections[Ux]:
            preimage_at_minimal[(Ux, unit.apply(Ux, s))] = s

    components: Dict[Open, Dict[Section, Section]] = {}
    for U in space.opens:
        components[U] = {}
        for t in Fhat.sections[U]:
            local = {}
            for x in U:
                Ux = space.minimal[x]
                germ = result.sharp.restrict(U, Ux, t)
                local[Ux] = phi.apply(Ux, preimage_at_minimal[(Ux, germ)])
            glued = [g for g in G.sections[U]
                     if all(G.restrict(U, W, g) == v for W, v in local.items())]
            if len(glued) != 1:
                raise NoFactorization("Germwise values do not glue uniquely in the target",
                                      open=U, section=t, candidates=len(glued))
            components[U][t] = glued[0]
    psi = PresheafMorphism(Fhat, G, components)

    naturality = check_naturality(psi)
    if not naturality.ok:
        raise NoFactorization("Constructed factorization is not natural", **naturality.to_dict())
    for U in space.opens:
        for s in P.sections[U]:
            if psi.apply(U, unit.apply(U, s)) != phi.apply(U, s):
                raise NoFactorization("Constructed factorization does not extend φ", open=U, section=s)

    image_values: Dict[Tuple[Open, Section], Section] = {}
    for U in space.opens:
        for s in P.sections[U]:
            image_values[(U, unit.apply(U, s))] = phi.apply(U, s)

    def agrees(U: Open, t: Section, v: Section) -> bool:
        expected = image_values.get((U, t))
        return expected is None or expected == v

    count = 0
    for _ in enumerate_presheaf_morphisms(Fhat, G, agrees, node_budget=node_budget):
        count += 1
        if count > 1:
            break
    return psi, {'candidates': count, 'unique': count == 1}


def constant_presheaf(space: FiniteSpace, values: Iterable[Section], name: str = '') -> Presheaf:
    """U ↦ values on every open (including ∅), identity restrictions."""
    values = tuple(values)
    return Presheaf.from_restrictor(space, {U: values for U in space.opens},
                                    lambda U, W, s: s, name=name or 'constant')


def locally_constant_sheaf(space: FiniteSpace, values: Iterable[Section], name: str = '') -> Presheaf:
    """Sections over U are the functions U → values constant on each U_x (the constant sheaf)."""
    values = tuple(values)
    sections = {}
    for U in space.opens:
        points = sorted(U)
        candidates = []
        for combo in itertools.product(values, repeat=len(points)):
            f = dict(zip(points, combo))
            if all(f[q] == f[p] for p in points for q in space.minimal[p]):
                candidates.append(tuple(sorted(f.items())))
        sections[U] = tuple(candidates)

    def restrictor(U: Open, W: Open, s: Section) -> Section:
        return tuple((p, v) for p, v in s if p in W)

    return Presheaf.from_restrictor(space, sections, restrictor, name=name or 'locally_constant')
