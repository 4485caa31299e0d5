from dataclasses import replace

import pytest

from groupoids.groupoid import (
    check_groupoid, is_etale, sections_category, check_prop11, fiber_product_space,
    build_germ_bundle, groupoid_from_pseudogroup, check_target_factorization, roundtrip_groupoid, roundtrip_pseudogroup,
    transport_morphism, find_groupoid_isomorphism,
    unit_groupoid, coarse_unit_groupoid, pair_groupoid, bundle_groupoid, group_groupoid, action_groupoid,
    disjoint_union, pair_group_groupoid,
)
from pseudogroups.groups import cyclic_group
from pseudogroups.ppg_sheafify import identity_ppg_morphism
from pseudogroups.pseudogroup import NON_T1, build_homeo_l, from_group_sheaf, constant_group_sheaf, constant_group_presheaf
from topology.finspace import PointMap, discrete_space
from utils.errors import NotEtale, NotAPseudogroupSheaf

EMPTY = frozenset()


@pytest.fixture
def pair2():
    return pair_groupoid(2)


# Axioms --------------------------------------------------------------------

def test_unit_groupoid_is_clean(sierpinski, chain3):
    for space in (sierpinski, chain3):
        G = unit_groupoid(space)
        assert check_groupoid(G).ok
        assert is_etale(G)


def test_pair_groupoid_is_clean(pair2):
    assert len(pair2.arrows.points) == 4
    assert check_groupoid(pair2).ok
    assert pair2.hom(0, 1) == [1]
    assert pair2.compose(2, 1) == 0


def test_broken_inverse_is_reported(pair2):
    inv = dict(pair2.inv.assignment)
    inv[1] = 1
    broken = replace(pair2, inv=PointMap(pair2.arrows, pair2.arrows.full, pair2.arrows, pair2.arrows.full, inv))
    report = check_groupoid(broken)
    assert report.failed('inverse')
    assert report.first('inverse').witness['arrow'] == 1


def test_fibre_product_of_pair_groupoid(pair2):
    space, pairs = fiber_product_space(pair2)
    assert len(pairs) == 8
    assert space.is_t1


def test_builders_give_groupoids(sierpinski, discrete2):
    z2 = cyclic_group(2)
    for G in (bundle_groupoid(sierpinski, z2), group_groupoid(z2), action_groupoid(discrete2, {0: 1, 1: 0}),
              disjoint_union([pair_groupoid(2), unit_groupoid(discrete_space(1))]), pair_group_groupoid(2, z2)):
        assert check_groupoid(G).ok, G.name
        assert is_etale(G), G.name


# Étale groupoids -------------------------------------------------------------

def test_coarse_unit_groupoid_is_not_etale():
    G = coarse_unit_groupoid(2)
    verdict = is_etale(G)
    assert not verdict
    assert verdict.witness['map'] == 's'
    with pytest.raises(NotEtale):
        sections_category(G)


def test_sections_of_unit_groupoid_are_the_inclusions(sierpinski):
    C = sections_category(unit_groupoid(sierpinski))
    for U in sierpinski.opens:
        for V in sierpinski.opens:
            assert len(C.hom(U, V)) == (1 if U <= V else 0)


def test_sections_of_pair_groupoid(pair2):
    C = sections_category(pair2)
    X = pair2.base.full
    assert len(C.hom(X, X)) == 4
    assert C.hom(EMPTY, X) == ((),)


def test_germ_target_conditions_hold_for_sections(sierpinski, pair2):
    assert check_prop11(sections_category(unit_groupoid(sierpinski))).ok
    report = check_prop11(sections_category(pair2))
    assert report.ok
    assert report.passed('coproduct_equivalence')


def test_germ_target_conditions_for_homeo(discrete2):
    assert check_prop11(build_homeo_l(discrete2)).ok


# Pseudogroup sheaves to groupoids --------------------------------------------

def test_groupoid_of_homeo_is_the_pair_groupoid(discrete2, pair2):
    G = groupoid_from_pseudogroup(build_homeo_l(discrete2))
    assert len(G.arrows.points) == 4
    assert find_groupoid_isomorphism(G, pair2) is not None


def test_groupoid_of_group_sheaf_is_a_bundle(discrete2):
    G = groupoid_from_pseudogroup(from_group_sheaf(constant_group_sheaf(discrete2, cyclic_group(2))))
    assert all(G.s(a) == G.t(a) for a in G.arrows.points)
    assert len(G.arrows.points) == 4


def test_non_sheaf_is_refused(discrete2):
    C = from_group_sheaf(constant_group_presheaf(discrete2, cyclic_group(2)))
    with pytest.raises(NotAPseudogroupSheaf):
        build_germ_bundle(C)


def test_target_is_underlying_map_after_source(discrete2):
    assert check_target_factorization(build_homeo_l(discrete2)).ok


# Round trips -------------------------------------------------------------------

def test_groupoid_round_trips(sierpinski, discrete2, pair2):
    for G in (pair2, unit_groupoid(sierpinski), action_groupoid(discrete2, {0: 1, 1: 0})):
        witness = roundtrip_groupoid(G)
        assert witness.verified
        assert sorted(witness.arrow_map) == list(G.arrows.points)


def test_pseudogroup_round_trips(discrete2):
    for C in (build_homeo_l(discrete2), from_group_sheaf(constant_group_sheaf(discrete2, cyclic_group(2)))):
        witness = roundtrip_pseudogroup(C)
        assert witness.verified
        assert witness.to_dict()['hom_sizes']['[0,1]/[0,1]'] == 4


def test_pseudogroup_round_trip_over_non_t1_space(sierpinski):
    witness = roundtrip_pseudogroup(build_homeo_l(sierpinski), NON_T1)
    assert witness.verified


def test_round_trip_refuses_non_etale_groupoid():
    with pytest.raises(NotEtale):
        roundtrip_groupoid(coarse_unit_groupoid(2))


def test_identity_transports_to_an_isomorphism(discrete2):
    functor = transport_morphism(identity_ppg_morphism(build_homeo_l(discrete2)))
    assert functor.ok
    assert sorted(functor.arrow_map.values()) == sorted(functor.target.arrows.points)
