"""
Deterministic corpus of spaces, presheaves, pre-pseudogroups and groupoids.

Everything random draws from a `random.Random(seed)` owned by the
generator, so a seed fixes the whole corpus.
"""

import random
import logging
import itertools
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from topology.finspace import (
    FiniteSpace, Open, discrete_space, indiscrete_space, chain_space, sierpinski_space,
    automorphisms, canonical_form,
)
from topology.sheaves import Presheaf, constant_presheaf, locally_constant_sheaf, skyscraper
from pseudogroups.groups import FiniteGroup, standard_groups, cyclic_group, trivial_group
from pseudogroups.pseudogroup import (
    PrePseudogroup, build_homeo_l, injective_truncation, from_group_sheaf,
    constant_group_sheaf, constant_group_presheaf, generate_classical, homeomorphisms,
    classical_to_concrete, check_decomposition,
)
from groupoids.groupoid import (
    TopGroupoid, unit_groupoid, pair_group_groupoid, bundle_groupoid, action_groupoid,
    disjoint_union, sections_category,
)
from utils.config import Config
from utils.helpers import timed

logger = logging.getLogger(__name__)

SPACE = 'space'
PRESHEAF = 'presheaf'
PSEUDOGROUP = 'pseudogroup'
GROUPOID = 'groupoid'


@dataclass
class CorpusInstance:
    """One generated object with the expectations the batteries rely on."""

    name: str
    kind: str
    value: Any
    tags: Tuple[str, ...] = ()
    meta: Dict[str, Any] = field(default_factory=dict)

    def has(self, tag: str) -> bool:
        return tag in self.tags


# ----------------------------------------------------------------------
# Spaces
# ----------------------------------------------------------------------

def enumerate_spaces(max_points: int) -> List[FiniteSpace]:
    """Every topology on 1..max_points points, one per homeomorphism class."""
    return list(_enumerate_spaces(max_points))


@lru_cache(maxsize=None)
def _enumerate_spaces(max_points: int) -> Tuple[FiniteSpace, ...]:
    spaces = []
    for n in range(1, max_points + 1):
        seen = set()
        off_diagonal = [(x, y) for x in range(n) for y in range(n) if x != y]
        for mask in range(1 << len(off_diagonal)):
            relation = [pair for k, pair in enumerate(off_diagonal) if mask >> k & 1]
            space = FiniteSpace.from_preorder(range(n), relation)
            form = canonical_form(space)
            if form in seen:
                continue
            seen.add(form)
            spaces.append(FiniteSpace(points=space.points, minimal=space.minimal,
                                      name=f"top{n}_{len(seen) - 1}"))
    logger.debug(f"Enumerated {len(spaces)} spaces up to {max_points} points")
    return tuple(spaces)


def named_spaces() -> List[FiniteSpace]:
    return [discrete_space(1), discrete_space(2), discrete_space(3), indiscrete_space(2),
            sierpinski_space(), chain_space(3)]


# ----------------------------------------------------------------------
# Presheaves
# ----------------------------------------------------------------------

def random_presheaf(space: FiniteSpace, rng: random.Random, values: Sequence[int] = (0, 1),
                    tag_probability: float = 0.3, name: str = '') -> Presheaf:
    """
    Sections are (function, tag) pairs. Section sets are filled from the
    top down so every restriction lands in the smaller set; a tagged twin
    restricts exactly like its untagged original, so tags break separation.
    """
    opens = list(space.opens)
    chosen: Dict[Open, set] = {}
    for U in reversed(opens):
        points = sorted(U)
        functions = [tuple(zip(points, combo)) for combo in itertools.product(values, repeat=len(points))]
        picked = set(rng.sample(functions, rng.randint(1, min(3, len(functions)))))
        for V in opens:
            if U < V:
                for f, _tag in chosen[V]:
                    picked.add(tuple((x, v) for x, v in f if x in U))
        sections = {(f, 0) for f in picked}
        if len(U) >= 2 and rng.random() < tag_probability:
            twin = rng.choice(sorted(picked))
            sections.add((twin, 1))
        chosen[U] = sections

    def restrictor(U: Open, W: Open, s):
        if W == U:
            return s
        f, _tag = s
        return (tuple((x, v) for x, v in f if x in W), 0)

    sections = {U: tuple(sorted(chosen[U])) for U in opens}
    return Presheaf.from_restrictor(space, sections, restrictor, name=name or 'random')


def presheaf_corpus(config: Config, rng: random.Random) -> List[CorpusInstance]:
    instances = []
    small = [s for s in enumerate_spaces(min(3, config.max_points))]
    for space in named_spaces():
        instances.append(CorpusInstance(f"constant{{a,b}}@{space.name}", PRESHEAF,
                                        constant_presheaf(space, ['a', 'b'], name='constant'),
                                        tags=('non_sheaf',)))
        instances.append(CorpusInstance(f"locally_constant@{space.name}", PRESHEAF,
                                        locally_constant_sheaf(space, ['a', 'b'], name='lc'), tags=('sheaf',)))
        instances.append(CorpusInstance(f"skyscraper@{space.name}", PRESHEAF,
                                        skyscraper(space, space.points[-1], ['u', 'v']), tags=('sheaf',)))
    for k in range(config.random_presheaves):
        space = small[rng.randrange(len(small))]
        instances.append(CorpusInstance(f"random{k}@{space.name}", PRESHEAF,
                                        random_presheaf(space, rng, name=f"random{k}")))
    return instances


# ----------------------------------------------------------------------
# Groupoids
# ----------------------------------------------------------------------

def _integer_partitions(n: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - first, first):
            yield (first,) + rest


def exhaustive_groupoids(max_points: int, max_arrows: int,
                         groups: Optional[List[FiniteGroup]] = None) -> List[TopGroupoid]:
    """
    Every groupoid over a discrete base of at most `max_points` points with
    at most `max_arrows` arrows, up to isomorphism: disjoint unions of
    pair(k) × H with one block per connected component.
    """
    groups = groups or standard_groups()
    result = []
    for n in range(1, max_points + 1):
        for sizes in _integer_partitions(n):
            options = [[(k, i) for i, H in enumerate(groups) if k * k * H.order <= max_arrows] for k in sizes]
            seen = set()
            for choice in itertools.product(*options):
                key = tuple(sorted(choice))
                if key in seen or sum(k * k * groups[i].order for k, i in choice) > max_arrows:
                    continue
                seen.add(key)
                parts = [pair_group_groupoid(k, groups[i]) for k, i in key]
                label = '+'.join(f"pair{k}×{groups[i].name}" for k, i in key)
                result.append(disjoint_union(parts, name=label) if len(parts) > 1 else parts[0])
    logger.debug(f"Enumerated {len(result)} discrete-base groupoids")
    return result


def random_etale_groupoid(space: FiniteSpace, rng: random.Random, max_arrows: int,
                          max_sections: int = 32) -> Optional[TopGroupoid]:
    """A trivial group bundle or a cyclic action groupoid over `space`, within budget."""
    n = len(space.points)
    if rng.random() < 0.5:
        candidates = [H for H in standard_groups() if n * H.order <= max_arrows and H.order ** n <= max_sections]
        if not candidates:
            return None
        return bundle_groupoid(space, rng.choice(candidates))
    autos = [a for a in automorphisms(space) if any(a[x] != x for x in a)]
    rng.shuffle(autos)
    for auto in autos:
        G = action_groupoid(space, auto)
        order = len(G.arrows.points) // n
        if len(G.arrows.points) <= max_arrows and order ** n <= max_sections:
            return G
    return unit_groupoid(space)


def groupoid_corpus(config: Config, rng: random.Random) -> List[CorpusInstance]:
    instances = []
    for G in exhaustive_groupoids(config.exhaustive_max_points, config.exhaustive_max_arrows):
        instances.append(CorpusInstance(G.name, GROUPOID, G, tags=('etale', 'exhaustive')))
    bases = enumerate_spaces(config.max_points)
    for k in range(config.random_groupoids):
        space = bases[rng.randrange(len(bases))]
        G = random_etale_groupoid(space, rng, config.random_max_arrows)
        if G is None:
            continue
        tags = ('etale', 'random') + (() if space.is_t1 else ('non_t1',))
        instances.append(CorpusInstance(f"{G.name}#{k}", GROUPOID, G, tags=tags))
    for space in (sierpinski_space(), chain_space(3)):
        for G in (unit_groupoid(space), bundle_groupoid(space, cyclic_group(2))):
            instances.append(CorpusInstance(G.name, GROUPOID, G, tags=('etale', 'non_t1')))
    return instances


# ----------------------------------------------------------------------
# Pseudogroups
# ----------------------------------------------------------------------

def classical_generators(space: FiniteSpace, rng: random.Random) -> List:
    full = space.full
    maps = list(homeomorphisms(space, full, full))
    return [rng.choice(maps)] if maps else []


def pseudogroup_corpus(config: Config, rng: random.Random) -> List[CorpusInstance]:
    """
    Tags: 'sheaf' marks pseudogroup sheaves, 'pre' marks instances that
    satisfy conditions (1) and (2) only.
    """
    instances = []
    for space in enumerate_spaces(min(3, config.max_points)):
        C = build_homeo_l(space)
        tags = ('homeo',) + (('sheaf',) if space.is_t1 else ('non_t1',))
        instances.append(CorpusInstance(C.name, PSEUDOGROUP, C, tags=tags))

    for space in (discrete_space(1), discrete_space(2)):
        for H in (trivial_group(), cyclic_group(2), cyclic_group(3)):
            C = from_group_sheaf(constant_group_sheaf(space, H))
            instances.append(CorpusInstance(f"{C.name}@{space.name}", PSEUDOGROUP, C, tags=('group_sheaf', 'sheaf')))
    for space in (discrete_space(2),):
        for H in (cyclic_group(2), cyclic_group(3)):
            C = from_group_sheaf(constant_group_presheaf(space, H))
            instances.append(CorpusInstance(C.name, PSEUDOGROUP, C, tags=('group_presheaf', 'pre')))

    for n in (2, 3):
        C = injective_truncation(build_homeo_l(discrete_space(n)))
        instances.append(CorpusInstance(C.name, PSEUDOGROUP, C, tags=('truncation', 'pre')))

    for G in (unit_groupoid(discrete_space(2)), pair_group_groupoid(2, trivial_group()),
              bundle_groupoid(discrete_space(2), cyclic_group(2)),
              action_groupoid(discrete_space(3), {0: 1, 1: 2, 2: 0})):
        C = sections_category(G)
        instances.append(CorpusInstance(C.name, PSEUDOGROUP, C, tags=('sections', 'sheaf')))

    for n in (2, 3):
        space = discrete_space(n)
        H = generate_classical(space, classical_generators(space, rng))
        C = classical_to_concrete(H)
        instances.append(CorpusInstance(C.name + f"@{space.name}", PSEUDOGROUP, C, tags=('classical', 'sheaf')))

    for inst in instances:
        inst.meta['t1'] = inst.value.space.is_t1
        if inst.value.space.is_t1:
            inst.meta['decomposes'] = bool(check_decomposition(inst.value))
    return instances


@timed('build_corpus')
def build_corpus(config: Config, seed: Optional[int] = None) -> List[CorpusInstance]:
    """Spaces, presheaves, groupoids and pseudogroups for one seed."""
    seed = config.seed if seed is None else seed
    rng = random.Random(seed)
    instances = [CorpusInstance(space.name, SPACE, space) for space in enumerate_spaces(config.max_points)]
    instances.extend(presheaf_corpus(config, rng))
    instances.extend(groupoid_corpus(config, rng))
    instances.extend(pseudogroup_corpus(config, rng))
    counts: Dict[str, int] = {}
    for inst in instances:
        counts[inst.kind] = counts.get(inst.kind, 0) + 1
    logger.info(f"Corpus for seed {seed}: {counts}")
    return instances

