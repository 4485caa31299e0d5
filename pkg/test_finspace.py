import itertools

import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

from topology.finspace import (
    FiniteSpace, PointMap, CANONICAL, IRREDUNDANT, EXHAUSTIVE,
    build_space, minimal_open, specializes, is_T1, to_preorder, hasse_edges,
    check_continuous, is_local_homeo, identity_map, enumerate_covers, local_homeos, all_maps,
    discrete_space, indiscrete_space, chain_space, automorphisms, canonical_form,
)
from corpus.generators import enumerate_spaces
from utils.errors import (
    MissingEmptyOrFull, NotClosedUnderUnion, UnknownPoint, NonOpenSubset, CoverBudgetExceeded,
)


@st.composite
def spaces(draw, max_points=4):
    """Random finite spaces from random specialization relations."""
    n = draw(st.integers(min_value=1, max_value=max_points))
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    relation = draw(st.lists(st.sampled_from(pairs), max_size=6)) if pairs else []
    return FiniteSpace.from_preorder(range(n), relation)


# build_space -------------------------------------------------------------

def test_build_space_accepts_sierpinski(sierpinski):
    space = build_space([0, 1], [[], [1], [0, 1]])
    assert space == sierpinski
    assert space.opens == (frozenset(), frozenset({1}), frozenset({0, 1}))


def test_build_space_accepts_discrete():
    space = build_space([0, 1], [[], [0], [1], [0, 1]])
    assert space == discrete_space(2)
    assert is_T1(space)


def test_build_space_rejects_missing_full_set():
    with pytest.raises(MissingEmptyOrFull) as excinfo:
        build_space([0, 1], [[], [0], [1]])
    assert excinfo.value.witness['has_full'] is False


def test_build_space_rejects_missing_empty_set():
    with pytest.raises(MissingEmptyOrFull):
        build_space([0, 1], [[1], [0, 1]])


def test_build_space_reports_union_witness():
    with pytest.raises(NotClosedUnderUnion) as excinfo:
        build_space([0, 1, 2], [[], [0], [1], [0, 1, 2]])
    assert excinfo.value.witness['pair'] == (frozenset({0}), frozenset({1}))


def test_build_space_rejects_stray_point():
    with pytest.raises(UnknownPoint) as excinfo:
        build_space([0, 1], [[], [2], [0, 1]])
    assert excinfo.value.witness['point'] == 2


# Points and specialization -----------------------------------------------

def test_minimal_opens_of_sierpinski(sierpinski):
    assert minimal_open(sierpinski, 1) == frozenset({1})
    assert minimal_open(sierpinski, 0) == frozenset({0, 1})
    assert minimal_open(discrete_space(2), 0) == frozenset({0})


def test_minimal_open_of_unknown_point(sierpinski):
    with pytest.raises(UnknownPoint):
        minimal_open(sierpinski, 5)


def test_specialization_in_sierpinski(sierpinski):
    assert specializes(sierpinski, 1, 0)
    assert not specializes(sierpinski, 0, 1)
    assert all(specializes(sierpinski, x, x) for x in sierpinski.points)


def test_t1_examples(sierpinski):
    assert is_T1(discrete_space(3))
    assert is_T1(discrete_space(1))
    assert not is_T1(sierpinski)
    assert not is_T1(indiscrete_space(2))


def test_hasse_diagram(sierpinski, chain3):
    assert hasse_edges(sierpinski) == [(1, 0)]
    assert hasse_edges(chain3) == [(1, 0), (2, 1)]
    assert hasse_edges(discrete_space(3)) == []


def test_enumerated_spaces_up_to_homeomorphism():
    assert len(enumerate_spaces(3)) == 13
    assert len(enumerate_spaces(4)) == 46
    forms = [canonical_form(space) for space in enumerate_spaces(3)]
    assert len(set(forms)) == len(forms)


def test_automorphisms(sierpinski):
    assert len(automorphisms(discrete_space(3))) == 6
    assert automorphisms(sierpinski) == [{0: 0, 1: 1}]


# Maps ----------------------------------------------------------------------

def test_identity_is_continuous_and_local_homeo(chain3):
    for U in chain3.opens:
        fmap = identity_map(chain3, U)
        assert check_continuous(fmap)
        assert is_local_homeo(fmap)


def test_constant_to_open_point_is_continuous_but_not_local_homeo(sierpinski):
    X = sierpinski.full
    fmap = PointMap(sierpinski, X, sierpinski, X, {0: 1, 1: 1})
    assert check_continuous(fmap)
    verdict = is_local_homeo(fmap)
    assert not verdict
    assert verdict.witness['reason'] == 'not_injective'
    assert verdict.witness['point'] == 0


def test_constant_to_closed_point(sierpinski):
    X = sierpinski.full
    fmap = PointMap(sierpinski, X, sierpinski, X, {0: 0, 1: 0})
    assert check_continuous(fmap)
    verdict = is_local_homeo(fmap)
    assert not verdict
    assert verdict.witness == {'point': 1, 'reason': 'image_not_open', 'image': frozenset({0})}


def test_swap_is_not_continuous(sierpinski):
    X = sierpinski.full
    verdict = check_continuous(PointMap(sierpinski, X, sierpinski, X, {0: 1, 1: 0}))
    assert not verdict
    assert verdict.witness['open'] == frozenset({1})
    assert verdict.witness['point'] == 0


def test_point_map_rejects_non_open_domain(sierpinski):
    with pytest.raises(NonOpenSubset):
        PointMap(sierpinski, frozenset({0}), sierpinski, sierpinski.full, {0: 0})


def test_local_homeos_of_small_spaces(sierpinski, discrete2):
    assert len(list(local_homeos(discrete2, discrete2.full, discrete2.full))) == 4
    assert len(list(local_homeos(sierpinski, sierpinski.full, sierpinski.full))) == 1
    empty = list(local_homeos(sierpinski, frozenset(), sierpinski.full))
    assert len(empty) == 1 and empty[0].assignment == {}


def test_local_homeos_agree_with_brute_force(chain3):
    for U, V in itertools.product(chain3.opens, repeat=2):
        fast = {f.key() for f in local_homeos(chain3, U, V)}
        slow = {f.key() for f in all_maps(chain3, U, V) if is_local_homeo(f)}
        assert fast == slow


# Covers --------------------------------------------------------------------

def test_canonical_covers(sierpinski, discrete2):
    assert enumerate_covers(sierpinski, sierpinski.full, CANONICAL) == [(frozenset({1}), frozenset({0, 1}))]
    assert enumerate_covers(discrete2, discrete2.full, CANONICAL) == [(frozenset({0}), frozenset({1}))]


def test_irredundant_covers(sierpinski, discrete2):
    assert enumerate_covers(sierpinski, sierpinski.full, IRREDUNDANT) == [(frozenset({0, 1}),)]
    covers = enumerate_covers(discrete2, discrete2.full, IRREDUNDANT)
    assert (frozenset({0}), frozenset({1})) in covers
    assert (frozenset({0, 1}),) in covers


def test_exhaustive_covers_respect_budget():
    space = discrete_space(4)
    with pytest.raises(CoverBudgetExceeded) as excinfo:
        enumerate_covers(space, space.full, EXHAUSTIVE, budget=12)
    assert excinfo.value.witness == {'opens': 16, 'budget': 12}


# Properties ----------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(spaces())
def test_opens_form_a_topology(space):
    members = set(space.opens)
    assert frozenset() in members and space.full in members
    for A, B in itertools.combinations(space.opens, 2):
        assert A | B in members
        assert A & B in members


@settings(max_examples=60, deadline=None)
@given(spaces())
def test_rebuilding_from_opens_or_preorder_gives_the_same_space(space):
    assert build_space(space.points, space.opens) == space
    assert FiniteSpace.from_preorder(space.points, to_preorder(space)) == space


@settings(max_examples=60, deadline=None)
@given(spaces())
def test_minimal_open_is_the_intersection_of_neighbourhoods(space):
    for x in space.points:
        expected = space.full
        for U in space.opens_containing(x):
            expected &= U
        assert minimal_open(space, x) == expected


@settings(max_examples=60, deadline=None)
@given(spaces())
def test_canonical_cover_unions_to_the_open(space):
    for U in space.opens:
        (cover,) = enumerate_covers(space, U, CANONICAL)
        assert frozenset().union(*cover) == U


@settings(max_examples=40, deadline=None)
@given(spaces(max_points=3))
def test_local_homeos_are_continuous(space):
    for f in local_homeos(space, space.full, space.full):
        assert check_continuous(f)
