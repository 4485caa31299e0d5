"""
Seeded single-table mutations used as a smoke test for the checkers.

Each mutation changes one entry of an otherwise valid instance and names
the detectors expected to reject it. The unmutated original must pass
the same detectors.
"""

import random
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Tuple

from topology.finspace import discrete_space, chain_space
from topology.sheaves import Presheaf, check_presheaf, constant_presheaf
from pseudogroups.groups import cyclic_group
from pseudogroups.pseudogroup import (
    PrePseudogroup, build_homeo_l, from_group_sheaf, constant_group_sheaf,
    check_category, evaluate_conditions,
)
from groupoids.groupoid import TopGroupoid, check_groupoid, pair_groupoid
from utils.helpers import map_key
from .generators import PRESHEAF, PSEUDOGROUP, GROUPOID

logger = logging.getLogger(__name__)

MUTATION_NAMES = [
    'associativity', 'identity', 'restriction', 'functoriality', 'dropped_gluing',
    'non_invertible_germ', 'broken_inverse', 'broken_source', 'broken_composition', 'broken_unit',
]

DETECTORS: Dict[str, Callable[[Any], bool]] = {
    'category': lambda C: not check_category(C).ok,
    'def21': lambda C: not evaluate_conditions(C).ok,
    'presheaf': lambda P: not check_presheaf(P).ok,
    'groupoid': lambda G: not check_groupoid(G).ok,
}


@dataclass
class Mutation:
    name: str
    kind: str
    original: Any
    mutant: Any
    detectors: Tuple[str, ...]
    description: str = ''
    witness: Dict[str, Any] = field(default_factory=dict)


def tabulated(C: PrePseudogroup) -> PrePseudogroup:
    """Table-backed copy of C, so single entries can be edited."""
    homs, compose, incl, underlying = C.tabulate()
    return PrePseudogroup.from_tables(C.space, homs, compose, incl, underlying, name=C.name)


def _edit_tables(C: PrePseudogroup, edit: Callable[[dict, dict, dict, Optional[dict]], None],
                 name: str) -> PrePseudogroup:
    homs, compose, incl, underlying = C.tabulate()
    homs = {key: list(values) for key, values in homs.items()}
    compose = {key: dict(entries) for key, entries in compose.items()}
    edit(homs, compose, incl, underlying)
    return PrePseudogroup.from_tables(C.space, homs, compose, incl, underlying, name=name)


def _set_compose(C: PrePseudogroup, triple, pair, value, name: str) -> PrePseudogroup:
    def edit(homs, compose, incl, underlying):
        compose[triple][pair] = value
    return _edit_tables(C, edit, name)


def _with_restriction(P: Presheaf, chain, section, value, name: str) -> Presheaf:
    restrictions = {key: dict(table) for key, table in P.restrictions.items()}
    restrictions[chain][section] = value
    return replace(P, restrictions=restrictions, name=name)


def _with_groupoid_tables(G: TopGroupoid, name: str, **changes) -> TopGroupoid:
    tables = {
        's': dict(G.s.assignment), 't': dict(G.t.assignment), 'i': dict(G.i.assignment),
        'inv': dict(G.inv.assignment), 'comp': dict(G.comp),
    }
    for key, updates in changes.items():
        tables[key].update(updates)
    return TopGroupoid.from_tables(G.base, G.arrows, tables['s'], tables['t'], tables['i'],
                                   tables['inv'], tables['comp'], G.labels, name=name)


# ----------------------------------------------------------------------
# Pre-pseudogroup mutations
# ----------------------------------------------------------------------

def _homeo_discrete2() -> Tuple[PrePseudogroup, Any, Dict[str, Any]]:
    C = tabulated(build_homeo_l(discrete_space(2)))
    X = C.space.full
    maps = {
        'id': map_key({0: 0, 1: 1}),
        'swap': map_key({0: 1, 1: 0}),
        'c0': map_key({0: 0, 1: 0}),
        'c1': map_key({0: 1, 1: 1}),
    }
    return C, X, maps


def mutate_associativity(rng: random.Random) -> Mutation:
    C, X, m = _homeo_discrete2()
    mutant = _set_compose(C, (X, X, X), (m['swap'], m['swap']), m['swap'], name='assoc-mutant')
    return Mutation('associativity', PSEUDOGROUP, C, mutant, ('category', 'def21'),
                    "swap ∘ swap := swap, so (swap ∘ swap) ∘ c0 ≠ swap ∘ (swap ∘ c0)",
                    {'triple': (X, X, X), 'pair': ('swap', 'swap')})


def mutate_identity(rng: random.Random) -> Mutation:
    C, X, m = _homeo_discrete2()
    mutant = _set_compose(C, (X, X, X), (m['id'], m['swap']), m['c0'], name='identity-mutant')
    return Mutation('identity', PSEUDOGROUP, C, mutant, ('category', 'def21'),
                    "id ∘ swap := c0", {'triple': (X, X, X), 'pair': ('id', 'swap')})


def mutate_dropped_gluing(rng: random.Random) -> Mutation:
    C, X, m = _homeo_discrete2()
    swap = m['swap']

    def edit(homs, compose, incl, underlying):
        homs[(X, X)] = [f for f in homs[(X, X)] if f != swap]
        for entries in compose.values():
            for pair in [p for p in entries if swap in p]:
                del entries[pair]
        if underlying is not None:
            underlying[(X, X)].pop(swap, None)

    mutant = _edit_tables(C, edit, name='gluing-mutant')
    return Mutation('dropped_gluing', PSEUDOGROUP, C, mutant, ('def21',),
                    "swap removed from homs(X, X); its restrictions to the points still match",
                    {'pair': (X, X), 'element': 'swap'})


def mutate_non_invertible_germ(rng: random.Random) -> Mutation:
    C = tabulated(from_group_sheaf(constant_group_sheaf(discrete_space(1), cyclic_group(2))))
    X = C.space.full
    r1 = ((0, 'r1'),)
    mutant = _set_compose(C, (X, X, X), (r1, r1), r1, name='idempotent-mutant')
    return Mutation('non_invertible_germ', PSEUDOGROUP, C, mutant, ('def21',),
                    "r1 ∘ r1 := r1 turns the germ of r1 into an idempotent",
                    {'triple': (X, X, X), 'pair': ('r1', 'r1')})


# ----------------------------------------------------------------------
# Presheaf mutations
# ----------------------------------------------------------------------

def mutate_restriction(rng: random.Random) -> Mutation:
    space = discrete_space(2)
    P = constant_presheaf(space, ['a', 'b'], name='constant')
    X = space.full
    value = rng.choice(['a', 'b'])
    other = 'b' if value == 'a' else 'a'
    mutant = _with_restriction(P, (X, X), value, other, name='restriction-mutant')
    return Mutation('restriction', PRESHEAF, P, mutant, ('presheaf',),
                    f"res(X, X)({value}) := {other}", {'chain': (X, X), 'section': value})


def mutate_functoriality(rng: random.Random) -> Mutation:
    space = chain_space(3)
    P = constant_presheaf(space, ['a', 'b'], name='constant')
    X = space.full
    middle = next(V for V in space.opens if V and V != X and any(W and W < V for W in space.opens))
    mutant = _with_restriction(P, (X, middle), 'a', 'b', name='functoriality-mutant')
    return Mutation('functoriality', PRESHEAF, P, mutant, ('presheaf',),
                    "res(X, V)(a) := b while res(X, W)(a) = a", {'chain': (X, middle), 'section': 'a'})


# ----------------------------------------------------------------------
# Groupoid mutations
# ----------------------------------------------------------------------
# pair(2) has singleton hom-sets, so any edited entry breaks an axiom.

def mutate_broken_inverse(rng: random.Random) -> Mutation:
    G = pair_groupoid(2)
    a = rng.choice([1, 2])
    mutant = _with_groupoid_tables(G, 'inverse-mutant', inv={a: a})
    return Mutation('broken_inverse', GROUPOID, G, mutant, ('groupoid',),
                    f"inv({G.label(a)}) := {G.label(a)}", {'arrow': a})


def mutate_broken_source(rng: random.Random) -> Mutation:
    G = pair_groupoid(2)
    a = rng.choice([1, 2])
    mutant = _with_groupoid_tables(G, 'source-mutant', s={a: G.t(a)})
    return Mutation('broken_source', GROUPOID, G, mutant, ('groupoid',),
                    f"s({G.label(a)}) := {G.t(a)}", {'arrow': a})


def mutate_broken_composition(rng: random.Random) -> Mutation:
    G = pair_groupoid(2)
    pair = rng.choice(sorted(G.comp))
    value = rng.choice([a for a in G.arrows.points if a != G.comp[pair]])
    mutant = _with_groupoid_tables(G, 'composition-mutant', comp={pair: value})
    return Mutation('broken_composition', GROUPOID, G, mutant, ('groupoid',),
                    f"{G.label(pair[0])} ∘ {G.label(pair[1])} := {G.label(value)}",
                    {'pair': pair, 'value': value})


def mutate_broken_unit(rng: random.Random) -> Mutation:
    G = pair_groupoid(2)
    x = rng.choice(list(G.base.points))
    wrong = next(a for a in G.arrows.points if G.s(a) == x and G.t(a) != x)
    mutant = _with_groupoid_tables(G, 'unit-mutant', i={x: wrong})
    return Mutation('broken_unit', GROUPOID, G, mutant, ('groupoid',),
                    f"i({x}) := {G.label(wrong)}", {'point': x, 'arrow': wrong})


MUTATORS: Dict[str, Callable[[random.Random], Mutation]] = {
    'associativity': mutate_associativity,
    'identity': mutate_identity,
    'restriction': mutate_restriction,
    'functoriality': mutate_functoriality,
    'dropped_gluing': mutate_dropped_gluing,
    'non_invertible_germ': mutate_non_invertible_germ,
    'broken_inverse': mutate_broken_inverse,
    'broken_source': mutate_broken_source,
    'broken_composition': mutate_broken_composition,
    'broken_unit': mutate_broken_unit,
}


def build_mutations(seed: int) -> List[Mutation]:
    """All ten mutations; the seed picks which entry the groupoid and presheaf mutants edit."""
    rng = random.Random(seed)
    mutations = [MUTATORS[name](rng) for name in MUTATION_NAMES]
    logger.debug(f"Built {len(mutations)} mutations for seed {seed}")
    return mutations


def detect(mutation: Mutation) -> Dict[str, Dict[str, bool]]:
    """
    Run every detector of a mutation on both the original and the mutant.

    Returns:
        {'original': {detector: rejected}, 'mutant': {detector: rejected}}
    """
    return {
        'original': {name: DETECTORS[name](mutation.original) for name in mutation.detectors},
        'mutant': {name: DETECTORS[name](mutation.mutant) for name in mutation.detectors},
    }
