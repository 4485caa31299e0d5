import random

import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

from corpus.generators import enumerate_spaces, random_presheaf
from topology.finspace import discrete_space
from topology.sheaves import (
    Presheaf, SENTINEL,
    check_presheaf, is_sheaf, stalk, colimit_stalk_oracle, etale_space, skyscraper, product_presheaf,
    sheafify, check_morphism_stalkwise_iso, identity_morphism, inclusion_morphism,
    check_sheafify_universality, constant_presheaf, locally_constant_sheaf,
)
from utils.errors import EmptyStalkRejected

EMPTY = frozenset()


def glued_pair(space):
    """Singletons over {0} and {1}, two sections over X that restrict alike."""
    sections = {EMPTY: ('*',), frozenset({0}): ('a',), frozenset({1}): ('b',), space.full: ('c', 'd')}

    def restrictor(U, W, s):
        if W == U:
            return s
        if W == frozenset({0}):
            return 'a'
        if W == frozenset({1}):
            return 'b'
        return '*'

    return Presheaf.from_restrictor(space, sections, restrictor, name='glued_pair')


@pytest.fixture
def constant_ab(sierpinski):
    return constant_presheaf(sierpinski, ['a', 'b'])


# Presheaf axioms -----------------------------------------------------------

def test_constant_singleton_presheaf_is_clean(chain3):
    report = check_presheaf(constant_presheaf(chain3, ['*']))
    assert report.ok
    assert set(report.sections) == {'coverage', 'totality', 'identity', 'functoriality'}


def test_non_identity_self_restriction_is_reported(sierpinski):
    def restrictor(U, W, s):
        if U == W == sierpinski.full:
            return 'b' if s == 'a' else 'a'
        return s

    P = Presheaf.from_restrictor(sierpinski, {U: ('a', 'b') for U in sierpinski.opens}, restrictor)
    report = check_presheaf(P)
    assert report.failed('identity')
    assert report.first('identity').witness['open'] == sierpinski.full


def test_swapped_composite_breaks_functoriality(chain3):
    swap = {'a': 'b', 'b': 'a'}
    top, middle = chain3.full, frozenset({1, 2})

    def restrictor(U, W, s):
        # swap only on the direct restriction from X to {2}
        if U == top and W == frozenset({2}):
            return swap[s]
        return s

    P = Presheaf.from_restrictor(chain3, {U: ('a', 'b') for U in chain3.opens}, restrictor)
    report = check_presheaf(P)
    assert report.failed('functoriality')
    assert not report.failed('identity')
    assert any(v.witness['chain'] == (frozenset({2}), middle, top) for v in report.violations)


# Sheaf condition -----------------------------------------------------------

def test_singleton_sections_form_a_sheaf(discrete2):
    assert is_sheaf(constant_presheaf(discrete2, ['*']))


def test_two_sections_over_one_family_are_not_separated(discrete2):
    verdict = is_sheaf(glued_pair(discrete2))
    assert not verdict
    assert verdict.witness['reason'] == 'not_separated'
    assert verdict.witness['open'] == discrete2.full


def test_constant_presheaf_fails_at_the_empty_set(constant_ab):
    assert check_presheaf(constant_ab).ok
    verdict = is_sheaf(constant_ab)
    assert not verdict
    assert verdict.witness['reason'] == 'not_separated'
    assert verdict.witness['open'] == EMPTY


def test_skyscrapers_are_sheaves(sierpinski, chain3):
    for space in (sierpinski, chain3):
        for x in space.points:
            assert is_sheaf(skyscraper(space, x, ['a', 'b']))


def test_locally_constant_sheaf(sierpinski):
    assert is_sheaf(locally_constant_sheaf(sierpinski, ['a', 'b']))


# Stalks and étale spaces ---------------------------------------------------

def test_stalks_of_constant_presheaf(constant_ab, discrete2):
    assert stalk(constant_ab, 0) == ('a', 'b')
    assert stalk(constant_ab, 1) == constant_ab.sections[frozenset({1})]
    P = constant_presheaf(discrete2, ['u'])
    assert stalk(P, 1) == P.sections[frozenset({1})]


def test_stalks_agree_with_the_colimit(constant_ab):
    for x in constant_ab.space.points:
        verdict = colimit_stalk_oracle(constant_ab, x)
        assert verdict
        assert verdict.witness['classes'] == 2


def test_etale_space_of_singleton_presheaf_is_the_base(sierpinski):
    bundle = etale_space(constant_presheaf(sierpinski, ['*']))
    assert bundle.total == sierpinski
    assert bundle.projection.assignment == {0: 0, 1: 1}


def test_etale_space_of_discrete_constant_presheaf(discrete2):
    bundle = etale_space(constant_presheaf(discrete2, ['a', 'b']))
    assert len(bundle.total.points) == 4
    assert bundle.total.is_t1


def test_projection_of_basic_open(constant_ab):
    bundle = etale_space(constant_ab)
    for U, s, members in bundle.basic_opens:
        assert bundle.projection.image(members) == U
        assert bundle.basic_open(U, s) == members


# Skyscrapers and products --------------------------------------------------

def test_skyscraper_at_open_point(sierpinski):
    S = skyscraper(sierpinski, 1, ['a', 'b'])
    assert S.sections[frozenset({1})] == ('a', 'b')
    assert S.sections[sierpinski.full] == ('a', 'b')
    assert S.sections[EMPTY] == (SENTINEL,)


def test_skyscraper_at_closed_point(sierpinski):
    S = skyscraper(sierpinski, 0, ['a', 'b'])
    assert S.sections[frozenset({1})] == (SENTINEL,)
    assert S.sections[sierpinski.full] == ('a', 'b')
    assert stalk(S, 0) == ('a', 'b')


def test_skyscraper_rejects_empty_stalk(sierpinski):
    with pytest.raises(EmptyStalkRejected):
        skyscraper(sierpinski, 0, [])


def test_products(discrete2):
    P = product_presheaf([skyscraper(discrete2, 0, 'ab'), skyscraper(discrete2, 1, 'xyz')])
    assert P.size(discrete2.full) == 6
    single = constant_presheaf(discrete2, ['a', 'b'])
    assert all(product_presheaf([single]).size(U) == single.size(U) for U in discrete2.opens)
    empty = product_presheaf([], space=discrete2)
    assert all(empty.size(U) == 1 for U in discrete2.opens)


# Sheafification ------------------------------------------------------------

def test_sheafify_constant_presheaf_on_sierpinski(constant_ab, sierpinski):
    result = sheafify(constant_ab)
    sizes = {U: result.sheaf.size(U) for U in sierpinski.opens}
    assert sizes == {EMPTY: 1, frozenset({1}): 2, sierpinski.full: 2}
    assert result.sharp.size(sierpinski.full) == 4
    assert is_sheaf(result.sheaf)


def test_sheafify_on_discrete_space_fills_the_product(discrete2):
    Fhat, _unit = sheafify(constant_presheaf(discrete2, ['a', 'b']))
    assert Fhat.size(discrete2.full) == 4


def test_sheafify_identifies_sections_with_equal_germs(discrete2):
    Fhat, _unit = sheafify(glued_pair(discrete2))
    assert Fhat.size(discrete2.full) == 1


def test_unit_of_a_sheaf_is_an_isomorphism(sierpinski):
    P = locally_constant_sheaf(sierpinski, ['a', 'b'])
    iso = check_morphism_stalkwise_iso(sheafify(P).unit)
    assert iso.stalkwise and iso.openwise


def test_identity_is_stalkwise_iso(sierpinski):
    assert check_morphism_stalkwise_iso(identity_morphism(skyscraper(sierpinski, 0, 'ab')))


def test_unit_is_stalkwise_but_not_openwise_iso(constant_ab):
    iso = check_morphism_stalkwise_iso(sheafify(constant_ab).unit, require_sheaves=False)
    assert iso.stalkwise
    assert not iso.openwise
    assert iso.witness['disagreement'] is True


def test_inclusion_into_product_of_skyscrapers(constant_ab):
    result = sheafify(constant_ab)
    iso = check_morphism_stalkwise_iso(inclusion_morphism(result.sheaf, result.sharp))
    assert not iso.stalkwise
    assert not iso.openwise
    assert iso.equivalent
    assert iso.witness['point'] == 0
    assert 'disagreement' not in iso.witness


def test_unit_factors_uniquely_through_itself(constant_ab):
    result = sheafify(constant_ab)
    psi, certificate = check_sheafify_universality(constant_ab, result.sheaf, result.unit)
    assert certificate == {'candidates': 1, 'unique': True}
    for U in constant_ab.space.opens:
        for t in result.sheaf.sections[U]:
            assert psi.apply(U, t) == t


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(enumerate_spaces(3)), st.integers(min_value=0, max_value=10 ** 6))
def test_sheafification_of_random_presheaves(space, seed):
    P = random_presheaf(space, random.Random(seed))
    assert check_presheaf(P).ok
    result = sheafify(P)
    assert is_sheaf(result.sheaf)
    assert check_morphism_stalkwise_iso(result.unit, require_sheaves=False).stalkwise
    for x in space.points:
        assert colimit_stalk_oracle(P, x)
