import pytest

from pseudogroups.groups import cyclic_group
from pseudogroups.ppg_sheafify import (
    PpgMorphism, COMPOSE_FIRST, GLUE_FIRST,
    ppg_sharp, ppg_sheafify, sheafification_deltas, check_unit_germ_bijection, check_order_independence,
    check_prop45, check_universality, check_ppg_morphism, identity_ppg_morphism, find_ppg_isomorphism,
    check_construction_properties, check_coproduct_distribution,
)
from pseudogroups.pseudogroup import (
    PrePseudogroup, build_homeo_l, injective_truncation, from_group_sheaf, constant_group_presheaf,
    is_pseudogroup_sheaf, T1,
)
from utils.errors import NotT1Space


@pytest.fixture
def homeo2(discrete2):
    return build_homeo_l(discrete2)


@pytest.fixture
def truncated(homeo2):
    return injective_truncation(homeo2)


def test_sharp_needs_a_t1_space(sierpinski):
    with pytest.raises(NotT1Space):
        ppg_sharp(build_homeo_l(sierpinski))


def test_sharp_is_a_pseudogroup_sheaf(truncated):
    sharp = ppg_sharp(truncated, verify=True)
    assert check_ppg_morphism(sharp.unit).ok


def test_sheafifying_the_injective_truncation_restores_all_maps(truncated, homeo2):
    X = truncated.space.full
    chat, unit = ppg_sheafify(truncated)
    assert len(truncated.hom(X, X)) == 2
    assert len(chat.hom(X, X)) == 4
    deltas = sheafification_deltas(truncated, chat)
    assert deltas['[0,1]/[0,1]'] == (2, 4)
    assert all(before < after for before, after in deltas.values())
    assert chat.hom_sizes() == homeo2.hom_sizes()
    assert is_pseudogroup_sheaf(chat, T1).ok
    assert check_ppg_morphism(unit).ok


def test_sheafification_of_a_sheaf_changes_nothing(homeo2):
    chat, _unit = ppg_sheafify(homeo2)
    assert sheafification_deltas(homeo2, chat) == {}
    assert find_ppg_isomorphism(homeo2, chat) is not None


def test_group_presheaf_gains_sections(discrete2):
    C = from_group_sheaf(constant_group_presheaf(discrete2, cyclic_group(2)))
    X = discrete2.full
    chat, _unit = ppg_sheafify(C)
    assert len(C.hom(X, X)) == 2
    assert len(chat.hom(X, X)) == 4


def test_unit_is_a_bijection_on_germs(truncated):
    chat, unit = ppg_sheafify(truncated)
    assert check_unit_germ_bijection(truncated, chat, unit)


def test_closure_order_does_not_matter(truncated):
    assert check_order_independence(truncated)
    first, _ = ppg_sheafify(truncated, COMPOSE_FIRST)
    second, _ = ppg_sheafify(truncated, GLUE_FIRST)
    assert first.hom_sizes() == second.hom_sizes()


def test_hom_presheaves_of_the_sheafification(truncated, discrete2):
    assert check_prop45(truncated)
    C = from_group_sheaf(constant_group_presheaf(discrete2, cyclic_group(2)))
    assert check_prop45(C)


def test_unit_factors_uniquely_through_itself(truncated):
    chat, unit = ppg_sheafify(truncated)
    psi, certificate = check_universality(truncated, chat, unit)
    assert certificate == {'candidates': 1, 'unique': True}
    assert check_ppg_morphism(psi).ok


def test_inclusion_into_homeo_factors_through_the_sheafification(truncated, homeo2):
    X = homeo2.space.full
    phi = PpgMorphism(truncated, homeo2, {key: {f: f for f in elements} for key, elements in truncated.homs.items()})
    assert check_ppg_morphism(phi).ok
    psi, certificate = check_universality(truncated, homeo2, phi)
    assert certificate['unique']
    assert set(psi.components[(X, X)].values()) == set(homeo2.hom(X, X))


def test_identity_morphism_is_a_morphism(homeo2):
    assert check_ppg_morphism(identity_ppg_morphism(homeo2)).ok


def test_construction_properties(truncated):
    report = check_construction_properties(truncated)
    assert report.ok, report.to_dict()


def test_coproduct_distribution_catches_a_wrong_composite(homeo2, discrete2):
    homs, compose, incl, underlying = homeo2.tabulate()
    point, X = frozenset({0}), discrete2.full
    a = next(f for f in homeo2.hom(point, X) if f != homeo2.inclusion(point, X))
    b = next(g for g in homeo2.hom(X, X) if g != homeo2.identity(X))
    table = compose[(point, X, X)]
    table[(b, a)] = next(f for f in homeo2.hom(point, X) if f != table[(b, a)])
    broken = PrePseudogroup.from_tables(discrete2, homs, compose, incl, underlying)

    report = check_coproduct_distribution(broken)
    assert report.failed('coproduct_distribution')
    assert len(report.violations) == 1
    assert report.first().witness['point'] == 0
