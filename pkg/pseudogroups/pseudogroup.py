"""
Pre-pseudogroups over a finite space.

A pre-pseudogroup is a small category whose objects are the opens of the
space, with distinguished inclusion morphisms. Hom elements are opaque
hashables; composition is a callable so large examples (Homeo^l, section
categories) need not be tabulated up front.

Germs are attained at minimal opens: C_x(V) = C(U_x, V) and, in the T1
dialect, C_x^y is the image of C(U_x, U_y) under postcomposition with
incl(U_y, V). The non-T1 dialect instead filters C_x(X) by an explicitly
stored underlying map.
"""

import logging
import itertools
from functools import cached_property
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Set, Tuple

from topology.finspace import (
    FiniteSpace, Open, PointMap, check_continuous, is_local_homeo, local_homeos,
)
from topology.sheaves import Presheaf, is_sheaf
from utils.errors import (
    NotT1Space,
    MissingUnderlyingFunctor,
    DecompositionViolated,
    NotAGroupoid,
    CompositionUndefined,
    NotConcrete,
    NotAPseudogroup,
    SuiteUnavailable,
    WitnessFailed,
)
from utils.helpers import ordered, format_open, open_key, map_key
from utils.reporting import CheckReport, Verdict
from .groups import FiniteGroup

logger = logging.getLogger(__name__)

T1 = 'T1'
NON_T1 = 'nonT1'
DIALECTS = (T1, NON_T1)

Hom = Hashable
Composer = Callable[[Open, Open, Open, Hom, Hom], Hom]
UnderlyingFn = Callable[[Open, Open, Hom], Mapping[int, int]]


@dataclass(frozen=True, eq=False)
class PrePseudogroup:
    """
    Category data over the opens of `space`.

    `composer(U, V, W, g, f)` returns g ∘ f for f ∈ homs(U, V), g ∈ homs(V, W).
    `underlying`, when present, is the stored functor f ↦ f̄ of the non-T1
    dialect.
    """

    space: FiniteSpace
    homs: Mapping[Tuple[Open, Open], Tuple[Hom, ...]]
    incl: Mapping[Tuple[Open, Open], Hom]
    composer: Composer
    underlying: Optional[UnderlyingFn] = None
    name: str = ''

    def __repr__(self) -> str:
        return f"PrePseudogroup({self.name or 'unnamed'} on {self.space!r})"

    @classmethod
    def from_tables(cls, space: FiniteSpace,
                    homs: Mapping[Tuple[Open, Open], Iterable[Hom]],
                    compose_table: Mapping[Tuple[Open, Open, Open], Mapping[Tuple[Hom, Hom], Hom]],
                    incl: Mapping[Tuple[Open, Open], Hom],
                    underlying_table: Optional[Mapping[Tuple[Open, Open], Mapping[Hom, Mapping[int, int]]]] = None,
                    name: str = '') -> 'PrePseudogroup':
        table = {key: dict(entries) for key, entries in compose_table.items()}

        def composer(U, V, W, g, f):
            try:
                return table[(U, V, W)][(g, f)]
            except KeyError:
                raise CompositionUndefined(
                    f"No composition entry for {g!r} ∘ {f!r} over "
                    f"{format_open(U)}/{format_open(V)}/{format_open(W)}",
                    triple=(U, V, W), pair=(g, f))

        underlying = None
        if underlying_table is not None:
            under = {key: dict(entries) for key, entries in underlying_table.items()}

            def underlying(U, V, f):
                try:
                    return under[(U, V)][f]
                except KeyError:
                    raise MissingUnderlyingFunctor(
                        f"No underlying map for {f!r} over {format_open(U)}/{format_open(V)}",
                        pair=(U, V), morphism=f)

        return cls(space=space, homs={k: tuple(v) for k, v in homs.items()}, incl=dict(incl),
                   composer=composer, underlying=underlying, name=name)

    # Basic access ------------------------------------------------------

    def hom(self, U: Open, V: Open) -> Tuple[Hom, ...]:
        return self.homs.get((U, V), ())

    def compose(self, U: Open, V: Open, W: Open, g: Hom, f: Hom) -> Hom:
        """g ∘ f for f: U → V and g: V → W."""
        return self.composer(U, V, W, g, f)

    def inclusion(self, U: Open, V: Open) -> Hom:
        return self.incl[(U, V)]

    def identity(self, U: Open) -> Hom:
        return self.incl[(U, U)]

    def restrict(self, U: Open, W: Open, V: Open, f: Hom) -> Hom:
        """f|W = f ∘ incl(W, U) for f ∈ homs(U, V)."""
        if W == U:
            return f
        return self.compose(W, U, V, f, self.incl[(W, U)])

    @property
    def has_underlying(self) -> bool:
        return self.underlying is not None

    @cached_property
    def germs(self) -> 'GermIndex':
        return GermIndex(self)

    def hom_sizes(self) -> Dict[str, int]:
        return {f"{format_open(U)}/{format_open(V)}": len(self.hom(U, V))
                for U in self.space.opens for V in self.space.opens}

    def tabulate(self) -> Tuple[dict, dict, dict, Optional[dict]]:
        """Explicit (homs, compose, incl, underlying) tables for export."""
        opens = self.space.opens
        homs = {(U, V): self.hom(U, V) for U in opens for V in opens}
        compose = {}
        for U, V, W in itertools.product(opens, repeat=3):
            entries = {}
            for f in homs[(U, V)]:
                for g in homs[(V, W)]:
                    entries[(g, f)] = self.compose(U, V, W, g, f)
            if entries:
                compose[(U, V, W)] = entries
        underlying = None
        if self.underlying is not None:
            underlying = {(U, V): {f: dict(self.underlying(U, V, f)) for f in homs[(U, V)]}
                          for (U, V) in homs}
        return homs, compose, dict(self.incl), underlying


def resolve_dialect(C: PrePseudogroup, dialect: Optional[str] = None) -> str:
    if dialect is None:
        return T1 if C.space.is_t1 else NON_T1
    if dialect not in DIALECTS:
        raise ValueError(f"Unknown dialect: {dialect}")
    return dialect


def hom_presheaf(C: PrePseudogroup, V: Open, name: str = '') -> Presheaf:
    """C(-, V) with restriction f ↦ f ∘ incl(W, U)."""
    space = C.space
    sections = {U: C.hom(U, V) for U in space.opens}

    def restrictor(U: Open, W: Open, f: Hom) -> Hom:
        return C.restrict(U, W, V, f)

    return Presheaf.from_restrictor(space, sections, restrictor,
                                    name=name or f"{C.name or 'C'}(-,{format_open(V)})")


# ----------------------------------------------------------------------
# Germs
# ----------------------------------------------------------------------

class GermIndex:
    """
    Lazily computed postcomposition tables.

    factorizations(x, y, V) maps each element of C_x(V) in the image of
    C(U_x, U_y) to the list of its preimages a with incl(U_y, V) ∘ a = f.
    """

    def __init__(self, C: PrePseudogroup):
        self.C = C
        self._factor: Dict[Tuple[int, int, Open], Dict[Hom, List[Hom]]] = {}

    def factorizations(self, x: int, y: int, V: Open) -> Dict[Hom, List[Hom]]:
        key = (x, y, V)
        if key not in self._factor:
            C = self.C
            Ux, Uy = C.space.minimal[x], C.space.minimal[y]
            table: Dict[Hom, List[Hom]] = {}
            if Uy <= V:
                into = C.inclusion(Uy, V)
                for a in C.hom(Ux, Uy):
                    table.setdefault(C.compose(Ux, Uy, V, into, a), []).append(a)
            self._factor[key] = table
        return self._factor[key]

    def classify(self, x: int, V: Open) -> Dict[Hom, List[Tuple[int, Hom]]]:
        """Every (y, a) with y ∈ V and incl(U_y, V) ∘ a = f, keyed by f ∈ C_x(V)."""
        result: Dict[Hom, List[Tuple[int, Hom]]] = {}
        for y in sorted(V):
            for f, preimages in self.factorizations(x, y, V).items():
                for a in preimages:
                    result.setdefault(f, []).append((y, a))
        return result


def germ_hom(C: PrePseudogroup, x: int, V: Open) -> Tuple[Hom, ...]:
    """C_x(V) = C(U_x, V)."""
    return C.hom(C.space.minimal_open(x), V)


def germ_at(C: PrePseudogroup, x: int, U: Open, V: Open, f: Hom) -> Hom:
    """The germ of f ∈ C(U, V) at x ∈ U, as an element of C(U_x, V)."""
    return C.restrict(U, C.space.minimal[x], V, f)


def germ_target_hom(C: PrePseudogroup, x: int, y: int, dialect: str = T1,
                    V: Optional[Open] = None) -> Tuple[Hom, ...]:
    """
    C_x^y as a subset of C_x(V) (V defaults to the whole space).

    T1: the postcomposition image of C(U_x, U_y).
    nonT1: germs f ∈ C_x(X) with f̄(x) = y.
    """
    space = C.space
    space.check_point(x)
    space.check_point(y)
    if dialect == T1:
        target = space.full if V is None else V
        return ordered(C.germs.factorizations(x, y, target))
    if C.underlying is None:
        raise MissingUnderlyingFunctor("The non-T1 dialect needs an underlying functor", pseudogroup=C.name)
    Ux = space.minimal[x]
    return ordered(f for f in C.hom(Ux, space.full) if C.underlying(Ux, space.full, f)[x] == y)


def germ_target_limit(C: PrePseudogroup, x: int, y: int) -> List[Dict[Open, Hom]]:
    """
    Inverse-limit oracle for C_x^y: compatible families (a_V) over all
    opens V ∋ y, with a_V' = incl(V, V') ∘ a_V for V ⊆ V'.
    """
    space = C.space
    Ux = space.minimal[x]
    nbhds = sorted(space.opens_containing(y), key=open_key)
    families: List[Dict[Open, Hom]] = []
    chosen: Dict[Open, Hom] = {}

    def extend(i: int) -> None:
        if i == len(nbhds):
            families.append(dict(chosen))
            return
        V = nbhds[i]
        for a in C.hom(Ux, V):
            if all(C.compose(Ux, W, V, C.inclusion(W, V), chosen[W]) == a
                   for W in nbhds[:i] if W <= V):
                chosen[V] = a
                extend(i + 1)
                del chosen[V]

    extend(0)
    return families


def check_decomposition(C: PrePseudogroup) -> Verdict:
    """
    Coproduct condition: for each x and V, the images of C_x^y (y ∈ V) in
    C_x(V) are disjoint, jointly exhaustive, and each map is injective.
    """
    space = C.space
    index = C.germs
    for x in space.points:
        Ux = space.minimal[x]
        for V in space.opens:
            owner: Dict[Hom, int] = {}
            for y in sorted(V):
                for f, preimages in index.factorizations(x, y, V).items():
                    if len(preimages) > 1:
                        return Verdict(False, {'point': x, 'open': V, 'germ': f, 'target': y,
                                               'reason': 'not_injective', 'preimages': preimages})
                    if f in owner:
                        return Verdict(False, {'point': x, 'open': V, 'germ': f,
                                               'reason': 'not_disjoint', 'targets': (owner[f], y)})
                    owner[f] = y
            for f in C.hom(Ux, V):
                if f not in owner:
                    return Verdict(False, {'point': x, 'open': V, 'germ': f, 'reason': 'orphaned'})
    return Verdict(True)


def _classify_unique(C: PrePseudogroup, x: int, V: Open, f: Hom) -> Tuple[int, Hom]:
    hits = C.germs.classify(x, V).get(f, [])
    if len(hits) != 1:
        raise DecompositionViolated(f"Germ at {x} has {len(hits)} target classifications",
                                    point=x, open=V, germ=f, targets=[y for y, _ in hits])
    return hits[0]


def underlying_map(C: PrePseudogroup, U: Open, V: Open, f: Hom) -> PointMap:
    """Derived underlying map: f̄(x) is the unique y with f_x ∈ C_x^y."""
    space = C.space
    assignment = {}
    for x in U:
        germ = germ_at(C, x, U, V, f)
        assignment[x] = _classify_unique(C, x, V, germ)[0]
    return PointMap(space, U, space, V, assignment)


def underlying_of(C: PrePseudogroup, U: Open, V: Open, f: Hom, dialect: str = T1) -> PointMap:
    """f̄ per dialect: derived in T1, stored in nonT1."""
    if dialect == T1:
        return underlying_map(C, U, V, f)
    if C.underlying is None:
        raise MissingUnderlyingFunctor("No underlying functor stored", pseudogroup=C.name)
    return PointMap(C.space, U, C.space, V, dict(C.underlying(U, V, f)))


def with_derived_underlying(C: PrePseudogroup) -> PrePseudogroup:
    """Copy of C storing the derived T1 underlying maps (memoised)."""
    cache: Dict[Tuple[Open, Open, Hom], Dict[int, int]] = {}

    def underlying(U: Open, V: Open, f: Hom) -> Mapping[int, int]:
        key = (U, V, f)
        if key not in cache:
            cache[key] = dict(underlying_map(C, U, V, f).assignment)
        return cache[key]

    return replace(C, underlying=underlying)


# ----------------------------------------------------------------------
# The germ groupoid C*
# ----------------------------------------------------------------------

class GermArrow(NamedTuple):
    source: int
    target: int
    value: Hom


@dataclass(eq=False)
class GermGroupoid:
    """Objects are points; arrows x → y are germs in C_x^y, valued in C(U_x, X)."""

    pseudogroup: PrePseudogroup
    dialect: str
    arrows: Dict[Tuple[int, int], Tuple[GermArrow, ...]]
    report: CheckReport = field(default_factory=lambda: CheckReport('germ_groupoid'))

    def hom(self, x: int, y: int) -> Tuple[GermArrow, ...]:
        return self.arrows.get((x, y), ())

    def all_arrows(self) -> List[GermArrow]:
        return [a for key in sorted(self.arrows) for a in self.arrows[key]]

    def identity(self, x: int) -> GermArrow:
        C = self.pseudogroup
        Ux = C.space.minimal[x]
        return GermArrow(x, x, C.inclusion(Ux, C.space.full))

    def compose(self, g: GermArrow, f: GermArrow) -> GermArrow:
        """g ∘ f, factoring f through U_y and composing in C."""
        if f.target != g.source:
            raise CompositionUndefined("Arrows are not composable", first=f, second=g)
        C = self.pseudogroup
        space = C.space
        x, y = f.source, f.target
        Ux, Uy = space.minimal[x], space.minimal[y]
        preimages = C.germs.factorizations(x, y, space.full).get(f.value, [])
        results = {C.compose(Ux, Uy, space.full, g.value, a) for a in preimages}
        if len(results) != 1:
            raise CompositionUndefined("Germ composition is not well defined",
                                       first=f, second=g, results=len(results))
        return GermArrow(x, g.target, results.pop())

    def inverse(self, f: GermArrow) -> Optional[GermArrow]:
        for g in self.hom(f.target, f.source):
            try:
                if (self.compose(g, f) == self.identity(f.source)
                        and self.compose(f, g) == self.identity(f.target)):
                    return g
            except CompositionUndefined:
                continue
        return None

    @property
    def is_groupoid(self) -> bool:
        return self.report.passed('condition_3')


def build_germ_groupoid(C: PrePseudogroup, dialect: Optional[str] = None,
                        require_groupoid: bool = True) -> GermGroupoid:
    """
    Build C* and check it: composition closure, category laws (reported
    independently) and invertibility of every arrow.

    Raises:
        NotAGroupoid: when `require_groupoid` and some arrow has no inverse.
    """
    dialect = resolve_dialect(C, dialect)
    space = C.space
    arrows = {(x, y): tuple(GermArrow(x, y, v) for v in germ_target_hom(C, x, y, dialect))
              for x in space.points for y in space.points}
    G = GermGroupoid(pseudogroup=C, dialect=dialect, arrows=arrows,
                     report=CheckReport(f'germ_groupoid[{dialect}]'))
    report = G.report
    for kind in ('composition', 'category', 'condition_3'):
        report.mark(kind)

    members = {key: set(values) for key, values in arrows.items()}

    def safe_compose(g: GermArrow, f: GermArrow) -> Optional[GermArrow]:
        try:
            h = G.compose(g, f)
        except CompositionUndefined as e:
            report.add('composition', str(e), **e.witness)
            return None
        if h not in members[(h.source, h.target)]:
            report.add('composition', "Composite germ lies outside C*", first=f, second=g, result=h)
            return None
        return h

    for x in space.points:
        ident = G.identity(x)
        if ident not in members[(x, x)]:
            report.add('category', f"Identity germ at {x} is not an arrow {x} → {x}", point=x)

    all_arrows = G.all_arrows()
    for f in all_arrows:
        for side, h in (('left', safe_compose(G.identity(f.target), f)),
                        ('right', safe_compose(f, G.identity(f.source)))):
            if h is not None and h != f:
                report.add('category', f"Identity law ({side}) fails", arrow=f)

    for f in all_arrows:
        for g in all_arrows:
            if g.source != f.target:
                continue
            gf = safe_compose(g, f)
            if gf is None:
                continue
            for h in all_arrows:
                if h.source != g.target:
                    continue
                hg = safe_compose(h, g)
                left = safe_compose(h, gf)
                right = safe_compose(hg, f) if hg is not None else None
                if left is not None and right is not None and left != right:
                    report.add('category', "Germ composition is not associative", arrows=(h, g, f))

    for f in all_arrows:
        if G.inverse(f) is None:
            report.add('condition_3', f"Germ {f.source} → {f.target} has no inverse", arrow=f)

    if require_groupoid and report.failed('condition_3'):
        v = report.first('condition_3')
        raise NotAGroupoid(v.message, **v.witness)
    logger.debug(f"Germ groupoid of {C!r}: {len(all_arrows)} arrows, ok={report.ok}")
    return G


# ----------------------------------------------------------------------
# Axiom checks
# ----------------------------------------------------------------------

def check_category(C: PrePseudogroup) -> CheckReport:
    """
    Objects, inclusions and category laws.

    'condition_1' covers Ob(C) = opens and the embedding of the open-set
    poset; 'category' covers closure, identities and associativity.
    """
    report = CheckReport('category')
    report.mark('condition_1')
    report.mark('category')
    space = C.space
    opens = space.opens
    open_set = set(opens)

    for key in C.homs:
        if key[0] not in open_set or key[1] not in open_set:
            report.add('condition_1', "Hom-set indexed by a non-open", pair=key)
    for U in opens:
        for V in opens:
            if (U, V) not in C.homs:
                report.add('condition_1', f"Missing hom-set {format_open(U)} → {format_open(V)}", pair=(U, V))
    for U in opens:
        for V in opens:
            if not U <= V:
                continue
            if (U, V) not in C.incl:
                report.add('condition_1', f"Missing inclusion {format_open(U)} ⊆ {format_open(V)}", pair=(U, V))
            elif C.incl[(U, V)] not in C.hom(U, V):
                report.add('condition_1', "Inclusion is not an element of its hom-set", pair=(U, V))
    if not report.ok:
        return report

    def comp(U, V, W, g, f):
        try:
            h = C.compose(U, V, W, g, f)
        except CompositionUndefined as e:
            report.add('category', str(e), **e.witness)
            return None
        if h not in C.hom(U, W):
            report.add('category', "Composite lies outside its hom-set", triple=(U, V, W), pair=(g, f), result=h)
            return None
        return h

    for U in opens:
        for V in opens:
            if not U <= V:
                continue
            for W in opens:
                if V <= W and comp(U, V, W, C.incl[(V, W)], C.incl[(U, V)]) != C.incl[(U, W)]:
                    report.add('condition_1', "Inclusions do not compose to the inclusion", chain=(U, V, W))

    for U in opens:
        for V in opens:
            for f in C.hom(U, V):
                if comp(U, V, V, C.identity(V), f) != f or comp(U, U, V, f, C.identity(U)) != f:
                    report.add('category', "Identity law fails", pair=(U, V), element=f)

    for U, V, W in itertools.product(opens, repeat=3):
        left_pairs = [(f, g) for f in C.hom(U, V) for g in C.hom(V, W)]
        if not left_pairs:
            continue
        gf_table = {(g, f): comp(U, V, W, g, f) for f, g in left_pairs}
        for Y in opens:
            hs = C.hom(W, Y)
            if not hs:
                continue
            for (g, f), gf in gf_table.items():
                if gf is None:
                    continue
                for h in hs:
                    hg = comp(V, W, Y, h, g)
                    left = comp(U, W, Y, h, gf)
                    right = comp(U, V, Y, hg, f) if hg is not None else None
                    if left is not None and right is not None and left != right:
                        report.add('category', "Composition is not associative",
                                   chain=(U, V, W, Y), elements=(h, g, f))
                        return report
    return report


def check_underlying_functor(C: PrePseudogroup, dialect: str = T1, kind: str = 'underlying') -> CheckReport:
    """
    Every f̄ is a continuous local homeomorphism, composition and identities
    are preserved, and incl(U, V) maps to the set inclusion.
    """
    report = CheckReport(kind)
    report.mark(kind)
    space = C.space
    opens = space.opens
    maps: Dict[Tuple[Open, Open, Hom], PointMap] = {}

    for U in opens:
        for V in opens:
            for f in C.hom(U, V):
                try:
                    fbar = underlying_of(C, U, V, f, dialect)
                except (DecompositionViolated, MissingUnderlyingFunctor) as e:
                    report.add(kind, str(e), **e.witness)
                    continue
                except Exception as e:
                    report.add(kind, f"Underlying map is malformed: {e}", pair=(U, V), element=f)
                    continue
                maps[(U, V, f)] = fbar
                if not check_continuous(fbar):
                    report.add(kind, "Underlying map is not continuous", pair=(U, V), element=f)
                verdict = is_local_homeo(fbar)
                if not verdict:
                    report.add(kind, "Underlying map is not a local homeomorphism",
                               pair=(U, V), element=f, **verdict.witness)
    if not report.ok:
        return report

    for U in opens:
        for V in opens:
            if U <= V and maps[(U, V, C.incl[(U, V)])].assignment != {x: x for x in U}:
                report.add(kind, "Inclusion does not map to the set inclusion", pair=(U, V))

    for U, V, W in itertools.product(opens, repeat=3):
        for f in C.hom(U, V):
            fbar = maps[(U, V, f)]
            for g in C.hom(V, W):
                gbar = maps[(V, W, g)]
                h = C.compose(U, V, W, g, f)
                hbar = maps.get((U, W, h))
                if hbar is None or hbar.assignment != {x: gbar(fbar(x)) for x in U}:
                    report.add(kind, "Underlying maps are not functorial", chain=(U, V, W), elements=(g, f))
                    return report
    return report


def check_pre_pseudogroup(C: PrePseudogroup, dialect: str = T1) -> CheckReport:
    """
    Conditions (1)-(3) of a pre-pseudogroup in the chosen dialect.

    Raises:
        NotT1Space: T1 dialect on a non-T1 space.
        MissingUnderlyingFunctor: nonT1 dialect without stored underlying maps.
    """
    if dialect == T1 and not C.space.is_t1:
        raise NotT1Space("The T1 dialect needs a T1 space", space=C.space.name)
    if dialect == NON_T1 and C.underlying is None:
        raise MissingUnderlyingFunctor("The non-T1 dialect needs an underlying functor", pseudogroup=C.name)

    report = CheckReport(f'pre_pseudogroup[{dialect}]')
    report.merge(check_category(C))
    if not report.ok:
        report.notes.append("conditions (2) and (3) skipped: category data is broken")
        return report

    report.mark('condition_2')
    if dialect == T1:
        verdict = check_decomposition(C)
        if not verdict:
            report.add('condition_2', "Germ decomposition fails", **verdict.witness)
    else:
        functor = check_underlying_functor(C, NON_T1, kind='condition_2')
        report.merge(functor)
    if report.failed('condition_2'):
        report.notes.append("condition (3) skipped: germ targets are not well defined")
        return report

    _merge_germ_groupoid(report, C, dialect)
    return report


def _merge_germ_groupoid(report: CheckReport, C: PrePseudogroup, dialect: str) -> None:
    report.mark('condition_3')
    try:
        G = build_germ_groupoid(C, dialect, require_groupoid=False)
    except (DecompositionViolated, MissingUnderlyingFunctor) as e:
        report.add('condition_3', str(e), **e.witness)
        return
    for v in G.report.violations:
        report.add('condition_3', v.message, **v.witness)


def check_sheaf_condition(C: PrePseudogroup, kind: str = 'condition_4') -> CheckReport:
    report = CheckReport('sheaf_condition')
    report.mark(kind)
    for V in C.space.opens:
        verdict = is_sheaf(hom_presheaf(C, V))
        if not verdict:
            report.add(kind, f"C(-,{format_open(V)}) is not a sheaf", target=V, **verdict.witness)
    return report


def is_pseudogroup_sheaf(C: PrePseudogroup, dialect: Optional[str] = None) -> CheckReport:
    """Pre-pseudogroup conditions plus sheafness of every C(-, V)."""
    dialect = resolve_dialect(C, dialect)
    report = check_pre_pseudogroup(C, dialect)
    report.name = f'pseudogroup_sheaf[{dialect}]'
    report.merge(check_sheaf_condition(C))
    return report


def evaluate_conditions(C: PrePseudogroup) -> CheckReport:
    """
    All four pre-pseudogroup/sheaf conditions, evaluated independently.

    Condition (2) is always the coproduct form. On non-T1 spaces condition
    (3) uses the germ groupoid filtered by the stored underlying functor.

    Raises:
        SuiteUnavailable: non-T1 space without an underlying functor.
    """
    space = C.space
    if not space.is_t1 and C.underlying is None:
        raise SuiteUnavailable("Condition (3) on a non-T1 space needs an underlying functor",
                               space=space.name, pseudogroup=C.name)
    report = CheckReport('def21')
    report.merge(check_category(C))
    if not report.ok:
        report.notes.append("conditions (2)-(4) skipped: category data is broken")
        return report

    report.mark('condition_2')
    verdict = check_decomposition(C)
    if not verdict:
        report.add('condition_2', "Germ decomposition fails", **verdict.witness)

    dialect = T1 if space.is_t1 else NON_T1
    if dialect == T1 and not verdict:
        report.mark('condition_3')
        report.add('condition_3', "Germ groupoid undefined without the decomposition", **verdict.witness)
    else:
        _merge_germ_groupoid(report, C, dialect)

    report.merge(check_sheaf_condition(C))
    return report


# ----------------------------------------------------------------------
# Examples
# ----------------------------------------------------------------------

def _compose_maps(f: Tuple[Tuple[int, int], ...], g: Tuple[Tuple[int, int], ...]) -> Tuple[Tuple[int, int], ...]:
    """g ∘ f on map keys."""
    gd = dict(g)
    return tuple((x, gd[y]) for x, y in f)


def _inclusion_key(U: Open) -> Tuple[Tuple[int, int], ...]:
    return tuple((x, x) for x in sorted(U))


def concrete_pseudogroup(space: FiniteSpace, homs: Mapping[Tuple[Open, Open], Iterable[Tuple[Tuple[int, int], ...]]],
                         name: str = '') -> PrePseudogroup:
    """Pre-pseudogroup whose elements are map keys, composed as maps."""
    opens = space.opens
    table = {(U, V): ordered(homs.get((U, V), ())) for U in opens for V in opens}
    incl = {(U, V): _inclusion_key(U) for U in opens for V in opens if U <= V}

    def composer(U, V, W, g, f):
        return _compose_maps(f, g)

    def underlying(U, V, f):
        return dict(f)

    return PrePseudogroup(space=space, homs=table, incl=incl, composer=composer,
                          underlying=underlying, name=name)


def build_homeo_l(space: FiniteSpace) -> PrePseudogroup:
    """Homeo^l: all local homeomorphisms between opens, with the maps themselves as underlying."""
    homs = {}
    for U in space.opens:
        for V in space.opens:
            homs[(U, V)] = [map_key(f.assignment) for f in local_homeos(space, U, V)]
    C = concrete_pseudogroup(space, homs, name=f"Homeo^l({space.name or 'X'})")
    logger.debug(f"Built {C!r}: |homs(X,X)| = {len(C.hom(space.full, space.full))}")
    return C


def injective_truncation(C: PrePseudogroup) -> PrePseudogroup:
    """Keep only elements whose underlying map is injective (closed under composition)."""
    if C.underlying is None:
        raise MissingUnderlyingFunctor("Truncation needs underlying maps", pseudogroup=C.name)
    homs = {}
    for (U, V), elements in C.homs.items():
        homs[(U, V)] = tuple(f for f in elements
                             if len(set(C.underlying(U, V, f).values())) == len(U))
    return replace(C, homs=homs, name=f"inj({C.name})")


@dataclass(frozen=True, eq=False)
class GroupSheafInput:
    """A presheaf with a group structure on every section set, restrictions being homomorphisms."""

    presheaf: Presheaf
    multiply: Callable[[Open, Hashable, Hashable], Hashable]
    identity: Mapping[Open, Hashable]
    name: str = ''

    def inverse(self, U: Open, a: Hashable) -> Hashable:
        for b in self.presheaf.sections[U]:
            if self.multiply(U, a, b) == self.identity[U]:
                return b
        raise ValueError(f"No inverse of {a!r} over {format_open(U)}")


def check_group_sheaf_input(G: GroupSheafInput) -> CheckReport:
    report = CheckReport('group_sheaf')
    report.mark('group')
    report.mark('homomorphism')
    P = G.presheaf
    space = P.space
    for U in space.opens:
        elements = P.sections[U]
        e = G.identity.get(U)
        if e not in elements:
            report.add('group', f"Identity missing over {format_open(U)}", open=U)
            continue
        for a in elements:
            if G.multiply(U, e, a) != a or G.multiply(U, a, e) != a:
                report.add('group', "Identity law fails", open=U, element=a)
            if not any(G.multiply(U, a, b) == e for b in elements):
                report.add('group', "Element has no inverse", open=U, element=a)
        for a, b, c in itertools.product(elements, repeat=3):
            if G.multiply(U, G.multiply(U, a, b), c) != G.multiply(U, a, G.multiply(U, b, c)):
                report.add('group', "Multiplication is not associative", open=U, elements=(a, b, c))
                break
    for (U, W), table in P.restrictions.items():
        for a in P.sections[U]:
            for b in P.sections[U]:
                if table[G.multiply(U, a, b)] != G.multiply(W, table[a], table[b]):
                    report.add('homomorphism', "Restriction is not a homomorphism", chain=(W, U), elements=(a, b))
    return report


def from_group_sheaf(G: GroupSheafInput) -> PrePseudogroup:
    """
    C(U, V) = F(U) when U ⊆ V, empty otherwise.

    g ∘ f = res(g) · f in F(U), restricting the left factor; incl(U, V) is
    the identity of F(U).
    """
    P = G.presheaf
    space = P.space
    opens = space.opens
    homs = {(U, V): (P.sections[U] if U <= V else ()) for U in opens for V in opens}
    incl = {(U, V): G.identity[U] for U in opens for V in opens if U <= V}

    def composer(U, V, W, g, f):
        return G.multiply(U, P.restrict(V, U, g), f)

    return PrePseudogroup(space=space, homs=homs, incl=incl, composer=composer,
                          name=f"C[{G.name or P.name}]")


def constant_group_sheaf(space: FiniteSpace, group: FiniteGroup) -> GroupSheafInput:
    """Locally constant group-valued functions with pointwise multiplication."""
    from topology.sheaves import locally_constant_sheaf

    P = locally_constant_sheaf(space, group.elements, name=f"const({group.name})")

    def multiply(U, a, b):
        bd = dict(b)
        return tuple((p, group.mul(v, bd[p])) for p, v in a)

    identity = {U: tuple((p, group.identity) for p in sorted(U)) for U in space.opens}
    return GroupSheafInput(presheaf=P, multiply=multiply, identity=identity, name=P.name)


def constant_group_presheaf(space: FiniteSpace, group: FiniteGroup) -> GroupSheafInput:
    """U ↦ the group itself with identity restrictions; not a sheaf once |group| > 1."""
    from topology.sheaves import constant_presheaf

    P = constant_presheaf(space, group.elements, name=f"pre({group.name})")
    return GroupSheafInput(presheaf=P, multiply=lambda U, a, b: group.mul(a, b),
                           identity={U: group.identity for U in space.opens}, name=P.name)


# ----------------------------------------------------------------------
# Concreteness and classical pseudogroups
# ----------------------------------------------------------------------

def is_concrete(C: PrePseudogroup, dialect: Optional[str] = None) -> Verdict:
    """f ↦ f̄ is injective on every hom-set."""
    dialect = resolve_dialect(C, dialect)
    for (U, V), elements in sorted(C.homs.items(), key=lambda kv: (open_key(kv[0][0]), open_key(kv[0][1]))):
        seen: Dict[Tuple, Hom] = {}
        for f in elements:
            key = underlying_of(C, U, V, f, dialect).key()
            if key in seen:
                return Verdict(False, {'pair': (U, V), 'elements': (seen[key], f), 'map': key})
            seen[key] = f
    return Verdict(True)


@dataclass(frozen=True, eq=False)
class ClassicalPseudogroup:
    """Partial homeomorphisms between opens, each stored as a bijection onto its codomain."""

    space: FiniteSpace
    maps: FrozenSet[PointMap]

    def members(self, U: Open, V: Open) -> List[PointMap]:
        return sorted((f for f in self.maps if f.domain == U and f.codomain == V), key=lambda f: f.key())

    def __contains__(self, f: PointMap) -> bool:
        return f in self.maps

    def __len__(self) -> int:
        return len(self.maps)


def _is_homeomorphism(space: FiniteSpace, U: Open, f: Mapping[int, int]) -> bool:
    return all((a in space.minimal[b]) == (f[a] in space.minimal[f[b]]) for a in U for b in U)


def homeomorphisms(space: FiniteSpace, U: Open, V: Open) -> Iterator[PointMap]:
    """Every homeomorphism U → V between opens."""
    if len(U) != len(V):
        return
    dom = sorted(U)
    for perm in itertools.permutations(sorted(V)):
        mapping = dict(zip(dom, perm))
        if _is_homeomorphism(space, U, mapping):
            yield PointMap(space, U, space, V, mapping)


def all_partial_homeomorphisms(space: FiniteSpace) -> ClassicalPseudogroup:
    maps = frozenset(h for U in space.opens for V in space.opens for h in homeomorphisms(space, U, V))
    return ClassicalPseudogroup(space, maps)


def identity_pseudogroup(space: FiniteSpace) -> ClassicalPseudogroup:
    maps = frozenset(PointMap(space, U, space, U, {x: x for x in U}) for U in space.opens)
    return ClassicalPseudogroup(space, maps)


def generate_classical(space: FiniteSpace, generators: Iterable[PointMap]) -> ClassicalPseudogroup:
    """
    Smallest classical pseudogroup containing the generators: closed under
    identities, restriction, inverse, composition and the gluing property.
    """
    current: Set[PointMap] = set(identity_pseudogroup(space).maps) | set(generators)
    changed = True
    while changed:
        changed = False
        new: Set[PointMap] = set()
        for f in current:
            inverse = {y: x for x, y in f.assignment.items()}
            new.add(PointMap(space, f.codomain, space, f.domain, inverse))
            for W in space.opens:
                if W <= f.domain:
                    new.add(PointMap(space, W, space, f.image(W), {x: f(x) for x in W}))
        for f in current:
            for g in current:
                if f.codomain == g.domain:
                    new.add(PointMap(space, f.domain, space, g.codomain, {x: g(f(x)) for x in f.domain}))
        for U in space.opens:
            for V in space.opens:
                for h in homeomorphisms(space, U, V):
                    if h not in current and all(_restriction_of(h, x) in current for x in U):
                        new.add(h)
        if not new <= current:
            current |= new
            changed = True
    return ClassicalPseudogroup(space, frozenset(current))


def _restriction_of(h: PointMap, x: int) -> PointMap:
    space = h.source
    Ux = space.minimal[x]
    return PointMap(space, Ux, space, h.image(Ux), {p: h(p) for p in Ux})


def check_classical(H: ClassicalPseudogroup) -> CheckReport:
    """Classical pseudogroup axioms plus the gluing property over canonical covers."""
    report = CheckReport('classical_pseudogroup')
    for kind in ('homeomorphism', 'identity', 'composition', 'inverse', 'restriction', 'gluing'):
        report.mark(kind)
    space = H.space
    maps = H.maps

    for f in maps:
        if not f.is_injective() or f.image() != f.codomain or not _is_homeomorphism(space, f.domain, f.assignment):
            report.add('homeomorphism', "Member is not a homeomorphism onto its codomain", map=f.key())
    if not report.ok:
        return report

    for U in space.opens:
        if PointMap(space, U, space, U, {x: x for x in U}) not in maps:
            report.add('identity', f"Identity of {format_open(U)} missing", open=U)
    for f in maps:
        inverse = PointMap(space, f.codomain, space, f.domain, {y: x for x, y in f.assignment.items()})
        if inverse not in maps:
            report.add('inverse', "Inverse missing", map=f.key())
        for W in space.opens:
            if W <= f.domain:
                r = PointMap(space, W, space, f.image(W), {x: f(x) for x in W})
                if r not in maps:
                    report.add('restriction', "Restriction missing", map=f.key(), open=W)
        for g in maps:
            if f.codomain == g.domain:
                gf = PointMap(space, f.domain, space, g.codomain, {x: g(f(x)) for x in f.domain})
                if gf not in maps:
                    report.add('composition', "Composite missing", maps=(g.key(), f.key()))

    for U in space.opens:
        for V in space.opens:
            for h in homeomorphisms(space, U, V):
                local = all(_restriction_of(h, x) in maps for x in U)
                if local != (h in maps):
                    report.add('gluing', "Membership disagrees with local membership",
                               map=h.key(), member=h in maps, locally=local)
    return report


def classical_pseudogroup(C: PrePseudogroup, dialect: Optional[str] = None) -> ClassicalPseudogroup:
    """
    Underlying maps of the invertible morphisms of a concrete C.

    Raises:
        NotConcrete: f ↦ f̄ is not faithful.
        WitnessFailed: the result violates the classical axioms.
    """
    dialect = resolve_dialect(C, dialect)
    verdict = is_concrete(C, dialect)
    if not verdict:
        raise NotConcrete("Underlying functor is not faithful", **verdict.witness)

    maps = set()
    for (U, V), elements in C.homs.items():
        for f in elements:
            for g in C.hom(V, U):
                if (C.compose(U, V, U, g, f) == C.identity(U)
                        and C.compose(V, U, V, f, g) == C.identity(V)):
                    maps.add(underlying_of(C, U, V, f, dialect))
                    break
    H = ClassicalPseudogroup(C.space, frozenset(maps))
    report = check_classical(H)
    if not report.ok:
        v = report.first()
        raise WitnessFailed(f"Invertible morphisms do not form a classical pseudogroup: {v.message}",
                            kind=v.kind, **v.witness)
    return H


def classical_to_concrete(H: ClassicalPseudogroup) -> PrePseudogroup:
    """
    Concrete pseudogroup sheaf generated by a classical pseudogroup: maps of
    H viewed into every larger codomain, then sheafified.

    Raises:
        NotAPseudogroup: H violates the classical axioms.
        NotT1Space: sheafification runs in the T1 dialect.
    """
    from .ppg_sheafify import ppg_sheafify

    report = check_classical(H)
    if not report.ok:
        v = report.first()
        raise NotAPseudogroup(v.message, kind=v.kind, **v.witness)
    space = H.space
    if not space.is_t1:
        raise NotT1Space("Sheafification of a classical pseudogroup needs a T1 space", space=space.name)

    homs: Dict[Tuple[Open, Open], List] = {}
    for f in H.maps:
        for V in space.opens:
            if f.codomain <= V:
                homs.setdefault((f.domain, V), []).append(f.key())
    base = concrete_pseudogroup(space, homs, name='classical')
    result, _unit = ppg_sheafify(base)
    return replace(result, name=f"sheafified({len(H)} maps)")
