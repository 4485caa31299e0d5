"""
Finite topological spaces.

A finite space is Alexandrov: every point x has a minimal open
neighbourhood U_x, and the topology is the family of unions of those.
Spaces therefore store the minimal opens and derive everything else.
"""

import logging
import itertools
from functools import cached_property
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from utils.errors import (
    UnknownPoint,
    MissingEmptyOrFull,
    NotClosedUnderUnion,
    NotClosedUnderIntersection,
    NonOpenSubset,
    InvalidPointMap,
    CoverBudgetExceeded,
)
from utils.helpers import open_key, sorted_opens, format_open
from utils.reporting import Verdict

logger = logging.getLogger(__name__)

Open = FrozenSet[int]
EMPTY: Open = frozenset()

CANONICAL = 'canonical'
IRREDUNDANT = 'irredundant'
EXHAUSTIVE = 'exhaustive'

DEFAULT_COVER_BUDGET = 12


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """
    A finite space given by its minimal opens.

    `opens` is computed lazily; derived spaces with many points (germ
    bundles, arrow spaces) only ever use `minimal`.
    """

    points: Tuple[int, ...]
    minimal: Mapping[int, Open]
    name: str = ''

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        return self.points == other.points and all(
            self.minimal[p] == other.minimal[p] for p in self.points)

    def __hash__(self) -> int:
        return hash((self.points, tuple(self.minimal[p] for p in self.points)))

    def __repr__(self) -> str:
        label = self.name or 'FiniteSpace'
        return f"{label}({len(self.points)} points)"

    # Construction -----------------------------------------------------

    @classmethod
    def from_minimal_opens(cls, minimal: Mapping[int, Iterable[int]], name: str = '') -> 'FiniteSpace':
        """Trusted constructor; checks that the sets form a preorder's down-sets."""
        table = {int(p): frozenset(int(q) for q in qs) for p, qs in minimal.items()}
        for p, m in table.items():
            if p not in m:
                raise NonOpenSubset(f"Minimal open of {p} does not contain it", point=p, subset=m)
            for q in m:
                if q not in table:
                    raise UnknownPoint(f"Point {q} is not in the space", point=q)
                if not table[q] <= m:
                    raise NonOpenSubset(f"Minimal opens of {q} and {p} are not nested",
                                        point=p, subset=m)
        return cls(points=tuple(sorted(table)), minimal=table, name=name)

    @classmethod
    def from_subbasis(cls, points: Iterable[int], subbasis: Iterable[Iterable[int]], name: str = '') -> 'FiniteSpace':
        """Topology generated by a family of subsets (empty family gives the indiscrete space)."""
        pts = sorted(set(points))
        full = frozenset(pts)
        sets = [frozenset(s) for s in subbasis]
        minimal = {}
        for p in pts:
            m = full
            for s in sets:
                if p in s:
                    m = m & s
            minimal[p] = m
        return cls(points=tuple(pts), minimal=minimal, name=name)

    @classmethod
    def from_preorder(cls, points: Iterable[int], relation: Iterable[Tuple[int, int]], name: str = '') -> 'FiniteSpace':
        """
        Build a space from a specialization preorder.

        Args:
            points: Point identifiers.
            relation: Pairs (x, y) meaning x → y, i.e. x lies in every open around y.
                The reflexive-transitive closure is taken.
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(points)
        for x, y in relation:
            if x not in graph or y not in graph:
                raise UnknownPoint(f"Relation mentions unknown point in ({x}, {y})", pair=(x, y))
            graph.add_edge(x, y)
        closure = nx.transitive_closure(graph, reflexive=True)
        minimal = {y: frozenset(closure.predecessors(y)) | {y} for y in graph.nodes}
        return cls(points=tuple(sorted(graph.nodes)), minimal=minimal, name=name)

    # Derived structure ------------------------------------------------

    @cached_property
    def full(self) -> Open:
        return frozenset(self.points)

    @cached_property
    def opens(self) -> Tuple[Open, ...]:
        """All opens in canonical order (size, then points)."""
        found: Set[Open] = {EMPTY}
        frontier = [EMPTY]
        generators = set(self.minimal.values())
        while frontier:
            current = frontier.pop()
            for m in generators:
                bigger = current | m
                if bigger not in found:
                    found.add(bigger)
                    frontier.append(bigger)
        return tuple(sorted_opens(found))

    @cached_property
    def is_t1(self) -> bool:
        return all(self.minimal[p] == frozenset({p}) for p in self.points)

    def check_point(self, x: int) -> None:
        if x not in self.minimal:
            raise UnknownPoint(f"Point {x} is not in the space", point=x)

    def minimal_open(self, x: int) -> Open:
        self.check_point(x)
        return self.minimal[x]

    def specializes(self, x: int, y: int) -> bool:
        """x → y: every open containing y contains x."""
        self.check_point(x)
        self.check_point(y)
        return x in self.minimal[y]

    def is_open(self, subset: Iterable[int]) -> bool:
        subset = frozenset(subset)
        if not subset <= self.full:
            return False
        return all(self.minimal[p] <= subset for p in subset)

    def require_open(self, subset: Iterable[int]) -> Open:
        subset = frozenset(subset)
        if not self.is_open(subset):
            raise NonOpenSubset(f"{format_open(subset)} is not open", subset=subset)
        return subset

    def down_closure(self, subset: Iterable[int]) -> Open:
        """Smallest open containing the subset."""
        result: Set[int] = set()
        for p in subset:
            result |= self.minimal_open(p)
        return frozenset(result)

    def subspace_opens(self, U: Open) -> List[Open]:
        """Opens of the subspace U (U must be open)."""
        self.require_open(U)
        return [W for W in self.opens if W <= U]

    def opens_containing(self, x: int) -> List[Open]:
        return [W for W in self.opens if x in W]

    def subspace(self, subset: Iterable[int], name: str = '') -> 'FiniteSpace':
        """Subspace topology on an arbitrary subset, keeping point ids."""
        subset = frozenset(subset)
        for p in subset:
            self.check_point(p)
        return FiniteSpace(points=tuple(sorted(subset)),
                           minimal={p: self.minimal[p] & subset for p in subset},
                           name=name)

    def to_dict(self) -> Dict[str, list]:
        return {
            'points': list(self.points),
            'opens': [sorted(U) for U in self.opens],
        }


# ----------------------------------------------------------------------
# Named spaces
# ----------------------------------------------------------------------

def discrete_space(n: int) -> FiniteSpace:
    return FiniteSpace.from_minimal_opens({p: {p} for p in range(n)}, name=f"discrete{n}")


def indiscrete_space(n: int) -> FiniteSpace:
    return FiniteSpace.from_minimal_opens({p: set(range(n)) for p in range(n)}, name=f"indiscrete{n}")


def chain_space(n: int) -> FiniteSpace:
    """Opens are the final segments {k, ..., n-1}; point k specializes to every j ≤ k."""
    return FiniteSpace.from_minimal_opens({k: set(range(k, n)) for k in range(n)}, name=f"chain{n}")


def sierpinski_space() -> FiniteSpace:
    """Points {0, 1}, opens ∅, {1}, {0, 1}."""
    space = chain_space(2)
    return FiniteSpace(points=space.points, minimal=space.minimal, name='sierpinski')


# ----------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------

def build_space(points: Iterable[int], opens: Iterable[Iterable[int]], name: str = '') -> FiniteSpace:
    """
    Validate an explicit topology and return the space.

    Raises:
        UnknownPoint: an open mentions a point outside `points`.
        MissingEmptyOrFull: ∅ or the full set is absent.
        NotClosedUnderUnion / NotClosedUnderIntersection: with the offending pair.
    """
    pts = sorted(set(int(p) for p in points))
    full = frozenset(pts)
    family = sorted_opens(frozenset(int(p) for p in U) for U in opens)

    for U in family:
        stray = U - full
        if stray:
            raise UnknownPoint(f"Open {format_open(U)} mentions unknown point {min(stray)}",
                               point=min(stray), open=U)

    if EMPTY not in family or full not in family:
        raise MissingEmptyOrFull("Topology must contain the empty set and the full point set",
                                 has_empty=EMPTY in family, has_full=full in family)

    members = set(family)
    for A, B in itertools.combinations(family, 2):
        if A | B not in members:
            raise NotClosedUnderUnion(f"{format_open(A)} ∪ {format_open(B)} is not open", pair=(A, B))
        if A & B not in members:
            raise NotClosedUnderIntersection(f"{format_open(A)} ∩ {format_open(B)} is not open", pair=(A, B))

    minimal = {}
    for p in pts:
        m = full
        for U in family:
            if p in U:
                m = m & U
        minimal[p] = m

    space = FiniteSpace(points=tuple(pts), minimal=minimal, name=name)
    space.__dict__['opens'] = tuple(family)
    logger.debug(f"Built space with {len(pts)} points and {len(family)} opens")
    return space


def minimal_open(space: FiniteSpace, x: int) -> Open:
    return space.minimal_open(x)


def specializes(space: FiniteSpace, x: int, y: int) -> bool:
    return space.specializes(x, y)


def is_T1(space: FiniteSpace) -> bool:
    return space.is_t1


def to_preorder(space: FiniteSpace) -> Set[Tuple[int, int]]:
    """All pairs (x, y) with x → y."""
    return {(x, y) for y in space.points for x in space.minimal[y]}


def specialization_graph(space: FiniteSpace) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(space.points)
    graph.add_edges_from((x, y) for (x, y) in to_preorder(space) if x != y)
    return graph


def hasse_edges(space: FiniteSpace) -> List[Tuple[int, int]]:
    """
    Covering relations of the specialization order.

    Points with equal minimal opens collapse to their smallest id first,
    since transitive reduction needs an acyclic graph.
    """
    graph = specialization_graph(space)
    condensed = nx.condensation(graph)
    reduced = nx.transitive_reduction(condensed)
    representative = {node: min(condensed.nodes[node]['members']) for node in condensed.nodes}
    return sorted((representative[a], representative[b]) for a, b in reduced.edges)


@dataclass(frozen=True, eq=False)
class PointMap:
    """A total map between opens of two finite spaces."""

    source: FiniteSpace
    domain: Open
    target: FiniteSpace
    codomain: Open
    assignment: Mapping[int, int]

    def __post_init__(self):
        if not self.source.is_open(self.domain):
            raise NonOpenSubset(f"Domain {format_open(self.domain)} is not open", subset=self.domain)
        if not self.target.is_open(self.codomain):
            raise NonOpenSubset(f"Codomain {format_open(self.codomain)} is not open", subset=self.codomain)
        if set(self.assignment) != set(self.domain):
            raise InvalidPointMap("Assignment is not total on the domain",
                                  domain=self.domain, keys=set(self.assignment))
        stray = [x for x, y in self.assignment.items() if y not in self.codomain]
        if stray:
            raise InvalidPointMap(f"Value of {stray[0]} lies outside the codomain",
                                  point=stray[0], value=self.assignment[stray[0]])

    def __call__(self, x: int) -> int:
        return self.assignment[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointMap):
            return NotImplemented
        return (self.domain == other.domain and self.codomain == other.codomain
                and self.key() == other.key() and self.source == other.source
                and self.target == other.target)

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, self.key()))

    def __repr__(self) -> str:
        return f"PointMap({dict(self.key())})"

    def key(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(sorted(self.assignment.items()))

    def image(self, subset: Optional[Iterable[int]] = None) -> FrozenSet[int]:
        subset = self.domain if subset is None else subset
        return frozenset(self.assignment[x] for x in subset)

    def restrict(self, W: Open, codomain: Optional[Open] = None) -> 'PointMap':
        return PointMap(self.source, W, self.target,
                        self.codomain if codomain is None else codomain,
                        {x: self.assignment[x] for x in W})

    def then(self, other: 'PointMap') -> 'PointMap':
        """other ∘ self."""
        return PointMap(self.source, self.domain, other.target, other.codomain,
                        {x: other.assignment[y] for x, y in self.assignment.items()})

    def is_injective(self) -> bool:
        return len(set(self.assignment.values())) == len(self.assignment)


def identity_map(space: FiniteSpace, U: Open, V: Optional[Open] = None) -> PointMap:
    """Inclusion U ↪ V (identity when V is omitted)."""
    return PointMap(space, U, space, U if V is None else V, {x: x for x in U})


def check_continuous(fmap: PointMap) -> Verdict:
    """
    Alexandrov criterion: f(U_p) ⊆ U_{f(p)} for every p in the domain.

    On failure the witness is the relatively open set U_{f(p)} ∩ codomain
    whose preimage is not open.
    """
    src, tgt = fmap.source, fmap.target
    for p in sorted(fmap.domain):
        target_nbhd = tgt.minimal[fmap(p)]
        for q in src.minimal[p]:
            if fmap(q) not in target_nbhd:
                bad_open = target_nbhd & fmap.codomain
                preimage = frozenset(x for x in fmap.domain if fmap(x) in bad_open)
                return Verdict(False, {'open': bad_open, 'point': p, 'preimage': preimage})
    return Verdict(True)


def is_local_homeo(fmap: PointMap) -> Verdict:
    """
    A map is a local homeomorphism iff on each minimal open U_p it is
    injective, has open image and reflects specialization.

    Points are visited by increasing |U_p| so the witness is the most
    specific failing point.
    """
    continuity = check_continuous(fmap)
    if not continuity:
        return Verdict(False, {'point': continuity.witness['point'], 'reason': 'not_continuous',
                               'open': continuity.witness['open']})

    src, tgt = fmap.source, fmap.target
    for p in sorted(fmap.domain, key=lambda q: (len(src.minimal[q]), q)):
        nbhd = src.minimal[p]
        image = fmap.image(nbhd)
        if len(image) != len(nbhd):
            return Verdict(False, {'point': p, 'reason': 'not_injective', 'neighbourhood': nbhd})
        if not tgt.is_open(image):
            return Verdict(False, {'point': p, 'reason': 'image_not_open', 'image': image})
        for a in nbhd:
            for b in nbhd:
                if (fmap(a) in tgt.minimal[fmap(b)]) and a not in src.minimal[b]:
                    return Verdict(False, {'point': p, 'reason': 'inverse_not_continuous', 'pair': (a, b)})
    return Verdict(True)


def enumerate_covers(space: FiniteSpace, U: Iterable[int], mode: str = CANONICAL,
                     budget: Optional[int] = None) -> List[Tuple[Open, ...]]:
    """
    Covers of an open U.

    canonical: the single cover {U_x : x ∈ U}.
    irredundant: every cover by non-empty opens where no member lies in the
    union of the others. Refused with CoverBudgetExceeded when the space has
    more opens than the budget.
    """
    U = space.require_open(U)
    if mode == CANONICAL:
        return [tuple(sorted_opens(space.minimal[x] for x in U))]
    if mode not in (IRREDUNDANT, EXHAUSTIVE):
        raise ValueError(f"Unknown cover mode: {mode}")

    budget = DEFAULT_COVER_BUDGET if budget is None else budget
    if len(space.opens) > budget:
        raise CoverBudgetExceeded(f"Space has {len(space.opens)} opens, budget is {budget}",
                                  opens=len(space.opens), budget=budget)

    candidates = [W for W in space.opens if W and W <= U]
    covers = []
    if not U:
        return [()]
    for size in range(1, len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if frozenset().union(*combo) != U:
                continue
            redundant = False
            for i, member in enumerate(combo):
                rest = frozenset().union(*(combo[:i] + combo[i + 1:]))
                if member <= rest:
                    redundant = True
                    break
            if not redundant:
                covers.append(combo)
    return covers


def enumerate_maps(source: FiniteSpace, domain: Open, target: FiniteSpace,
                   candidates: Mapping[int, Sequence[int]],
                   continuous: bool = True) -> Iterator[Dict[int, int]]:
    """
    Backtracking enumeration of assignments p ↦ candidates[p].

    With `continuous`, partial assignments are pruned against the
    Alexandrov criterion, so only continuous maps are produced.
    """
    order = sorted(domain, key=lambda p: (len(source.minimal[p]), p))
    assignment: Dict[int, int] = {}

    def consistent(p: int, value: int) -> bool:
        for q, w in assignment.items():
            if q in source.minimal[p] and w not in target.minimal[value]:
                return False
            if p in source.minimal[q] and value not in target.minimal[w]:
                return False
        return True

    def extend(i: int) -> Iterator[Dict[int, int]]:
        if i == len(order):
            yield dict(assignment)
            return
        p = order[i]
        for value in candidates[p]:
            if continuous and not consistent(p, value):
                continue
            assignment[p] = value
            yield from extend(i + 1)
            del assignment[p]

    yield from extend(0)


def local_homeos(space: FiniteSpace, U: Open, V: Open) -> Iterator[PointMap]:
    """All local homeomorphisms U → V between opens of one space."""
    targets = sorted(V)
    for assignment in enumerate_maps(space, U, space, {p: targets for p in U}):
        fmap = PointMap(space, U, space, V, assignment)
        if is_local_homeo(fmap):
            yield fmap


def all_maps(space: FiniteSpace, U: Open, V: Open) -> Iterator[PointMap]:
    """Every total map U → V, continuous or not (brute-force oracle)."""
    dom = sorted(U)
    for values in itertools.product(sorted(V), repeat=len(dom)):
        yield PointMap(space, U, space, V, dict(zip(dom, values)))


def automorphisms(space: FiniteSpace) -> List[Dict[int, int]]:
    """Permutations of the points preserving the topology."""
    result = []
    for perm in itertools.permutations(space.points):
        mapping = dict(zip(space.points, perm))
        if all(frozenset(mapping[q] for q in space.minimal[p]) == space.minimal[mapping[p]]
               for p in space.points):
            result.append(mapping)
    return result


def canonical_form(space: FiniteSpace) -> Tuple[Tuple[int, ...], ...]:
    """Isomorphism-invariant signature: lexicographically least relabelled minimal-open table."""
    best = None
    for perm in itertools.permutations(space.points):
        mapping = {p: i for i, p in enumerate(perm)}
        table = tuple(tuple(sorted(mapping[q] for q in space.minimal[p]))
                      for p in sorted(space.points, key=lambda p: mapping[p]))
        if best is None or table < best:
            best = table
    return best or ()
