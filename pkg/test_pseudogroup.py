import pytest

from pseudogroups.groups import cyclic_group, trivial_group, klein_group, symmetric_group_3, standard_groups
from pseudogroups.pseudogroup import (
    PrePseudogroup, T1, NON_T1,
    build_homeo_l, from_group_sheaf, constant_group_sheaf, constant_group_presheaf, check_group_sheaf_input,
    germ_hom, germ_target_hom, germ_target_limit, check_decomposition, build_germ_groupoid,
    underlying_map, check_category, check_pre_pseudogroup, is_pseudogroup_sheaf, evaluate_conditions,
    is_concrete, classical_pseudogroup, classical_to_concrete, check_classical,
    identity_pseudogroup, all_partial_homeomorphisms, injective_truncation,
)
from topology.finspace import discrete_space, identity_map
from utils.errors import NotT1Space, NotAGroupoid, NotConcrete, SuiteUnavailable

EMPTY = frozenset()
P0, P1 = frozenset({0}), frozenset({1})


@pytest.fixture
def homeo2(discrete2):
    return build_homeo_l(discrete2)


@pytest.fixture
def z2_sheaf(discrete2):
    return from_group_sheaf(constant_group_sheaf(discrete2, cyclic_group(2)))


def idempotent_monoid():
    """One point, C(X, X) = {e, p} with p ∘ p = p: a category whose germ p has no inverse."""
    space = discrete_space(1)
    X = space.full
    homs = {(EMPTY, EMPTY): ['i'], (EMPTY, X): ['j'], (X, EMPTY): [], (X, X): ['e', 'p']}
    compose = {
        (EMPTY, EMPTY, EMPTY): {('i', 'i'): 'i'},
        (EMPTY, EMPTY, X): {('j', 'i'): 'j'},
        (EMPTY, X, X): {('e', 'j'): 'j', ('p', 'j'): 'j'},
        (X, X, X): {('e', 'e'): 'e', ('e', 'p'): 'p', ('p', 'e'): 'p', ('p', 'p'): 'p'},
    }
    incl = {(EMPTY, EMPTY): 'i', (EMPTY, X): 'j', (X, X): 'e'}
    return PrePseudogroup.from_tables(space, homs, compose, incl, name='idempotent')


# Groups ------------------------------------------------------------------

def test_standard_groups_satisfy_axioms():
    for group in standard_groups() + [klein_group(), symmetric_group_3()]:
        assert group.check_axioms() == []
    assert cyclic_group(3).inverse('r1') == 'r2'


def test_group_sheaf_inputs(discrete2):
    assert check_group_sheaf_input(constant_group_sheaf(discrete2, cyclic_group(2))).ok
    assert check_group_sheaf_input(constant_group_presheaf(discrete2, cyclic_group(2))).ok


# Homeo^l -------------------------------------------------------------------

def test_homeo_hom_set_sizes(homeo2, sierpinski):
    X = homeo2.space.full
    assert len(homeo2.hom(X, X)) == 4
    assert len(homeo2.hom(EMPTY, X)) == 1
    assert len(build_homeo_l(sierpinski).hom(sierpinski.full, sierpinski.full)) == 1


def test_homeo_of_discrete_space_is_a_pseudogroup_sheaf(homeo2):
    report = is_pseudogroup_sheaf(homeo2, T1)
    assert report.ok, report.to_dict()
    assert evaluate_conditions(homeo2).ok


def test_t1_dialect_refuses_sierpinski(sierpinski):
    with pytest.raises(NotT1Space):
        check_pre_pseudogroup(build_homeo_l(sierpinski), T1)


def test_homeo_of_sierpinski_fails_only_the_decomposition(sierpinski):
    report = evaluate_conditions(build_homeo_l(sierpinski))
    assert report.failed('condition_2')
    assert report.passed('condition_1')
    assert report.passed('condition_3')
    assert report.passed('condition_4')


def test_conditions_need_underlying_maps_off_t1(sierpinski):
    C = build_homeo_l(sierpinski)
    bare = PrePseudogroup(space=C.space, homs=C.homs, incl=C.incl, composer=C.composer)
    with pytest.raises(SuiteUnavailable):
        evaluate_conditions(bare)


# Germs ---------------------------------------------------------------------

def test_germ_hom(homeo2, z2_sheaf):
    assert germ_hom(homeo2, 0, P1) == (((0, 1),),)
    assert homeo2.inclusion(P0, P0) in germ_hom(homeo2, 0, P0)
    assert germ_hom(z2_sheaf, 0, P1) == ()
    assert germ_hom(homeo2, 0, EMPTY) == ()


def test_germ_targets_on_discrete_space(homeo2, z2_sheaf):
    assert germ_target_hom(homeo2, 0, 1) == (((0, 1),),)
    assert len(germ_target_hom(z2_sheaf, 0, 0)) == 2
    assert germ_target_hom(z2_sheaf, 0, 1) == ()
    assert len(germ_target_limit(homeo2, 0, 1)) == 1


def test_non_t1_germ_targets_use_underlying_maps(sierpinski):
    C = build_homeo_l(sierpinski)
    identity = identity_map(sierpinski, sierpinski.full).key()
    assert identity in germ_target_hom(C, 0, 0, NON_T1)
    assert germ_target_hom(C, 0, 1, NON_T1) == ()


def test_decomposition(homeo2, z2_sheaf):
    assert check_decomposition(homeo2)
    assert check_decomposition(z2_sheaf)


# Germ groupoid ---------------------------------------------------------------

def test_germ_groupoid_of_group_sheaf_is_two_vertex_groups(z2_sheaf):
    G = build_germ_groupoid(z2_sheaf)
    assert G.is_groupoid
    assert len(G.hom(0, 0)) == 2 and len(G.hom(1, 1)) == 2
    assert G.hom(0, 1) == () and G.hom(1, 0) == ()


def test_germ_groupoid_of_homeo_is_the_pair_groupoid(homeo2):
    G = build_germ_groupoid(homeo2)
    assert all(len(G.hom(x, y)) == 1 for x in (0, 1) for y in (0, 1))
    f = G.hom(0, 1)[0]
    assert G.compose(G.inverse(f), f) == G.identity(0)


def test_idempotent_germ_is_rejected():
    C = idempotent_monoid()
    assert check_category(C).ok
    with pytest.raises(NotAGroupoid):
        build_germ_groupoid(C)
    report = build_germ_groupoid(C, require_groupoid=False).report
    assert report.failed('condition_3')


# Underlying maps and concreteness -------------------------------------------

def test_underlying_maps(homeo2, z2_sheaf):
    X = homeo2.space.full
    assert underlying_map(homeo2, P0, X, homeo2.inclusion(P0, X)).assignment == {0: 0}
    for f in homeo2.hom(X, X):
        assert underlying_map(homeo2, X, X, f).key() == f
    for f in z2_sheaf.hom(X, X):
        assert underlying_map(z2_sheaf, X, X, f).assignment == {0: 0, 1: 1}


def test_concreteness(homeo2, discrete2):
    assert is_concrete(homeo2)
    assert is_concrete(from_group_sheaf(constant_group_sheaf(discrete2, trivial_group())))
    verdict = is_concrete(from_group_sheaf(constant_group_sheaf(discrete_space(1), cyclic_group(2))))
    assert not verdict
    assert len(verdict.witness['elements']) == 2


def test_group_sheaf_hom_sizes(z2_sheaf, discrete2):
    X = discrete2.full
    assert len(z2_sheaf.hom(X, X)) == 4
    assert len(z2_sheaf.hom(P0, X)) == 2
    assert len(z2_sheaf.hom(X, P0)) == 0
    assert is_pseudogroup_sheaf(z2_sheaf).ok


def test_group_presheaf_fails_the_sheaf_condition(discrete2):
    C = from_group_sheaf(constant_group_presheaf(discrete2, cyclic_group(2)))
    report = evaluate_conditions(C)
    assert report.failed('condition_4')


# Classical pseudogroups ------------------------------------------------------

def test_classical_pseudogroup_of_homeo(homeo2):
    H = classical_pseudogroup(homeo2)
    X = homeo2.space.full
    assert [f.assignment for f in H.members(X, X)] == [{0: 0, 1: 1}, {0: 1, 1: 0}]
    for U in homeo2.space.opens:
        assert identity_map(homeo2.space, U) in H


def test_classical_pseudogroup_of_trivial_sheaf_is_the_identities(discrete2):
    H = classical_pseudogroup(from_group_sheaf(constant_group_sheaf(discrete2, trivial_group())))
    assert len(H) == len(discrete2.opens)
    assert all(f.domain == f.codomain and f.key() == identity_map(discrete2, f.domain).key() for f in H.maps)


def test_classical_pseudogroup_needs_concreteness():
    with pytest.raises(NotConcrete):
        classical_pseudogroup(from_group_sheaf(constant_group_sheaf(discrete_space(1), cyclic_group(2))))


def test_classical_to_concrete_from_identities(discrete2):
    C = classical_to_concrete(identity_pseudogroup(discrete2))
    trivial = from_group_sheaf(constant_group_sheaf(discrete2, trivial_group()))
    assert C.hom_sizes() == trivial.hom_sizes()


def test_classical_to_concrete_from_all_homeomorphisms(discrete2, homeo2):
    H = all_partial_homeomorphisms(discrete2)
    assert check_classical(H).ok
    C = classical_to_concrete(H)
    assert C.hom_sizes() == homeo2.hom_sizes()
    recovered = classical_pseudogroup(C)
    assert all(f in recovered for f in H.maps)


def test_injective_truncation_keeps_bijections(homeo2):
    X = homeo2.space.full
    truncated = injective_truncation(homeo2)
    assert sorted(truncated.hom(X, X)) == [((0, 0), (1, 1)), ((0, 1), (1, 0))]
