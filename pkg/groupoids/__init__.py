
from .groupoid import (
    TopGroupoid,
    IsoWitness,
    GermBundle,
    GroupoidFunctor,
    check_groupoid,
    is_etale,
    sections_category,
    check_prop11,
    groupoid_from_pseudogroup,
    build_germ_bundle,
    check_target_factorization,
    roundtrip_groupoid,
    roundtrip_pseudogroup,
    transport_morphism,
    find_groupoid_isomorphism,
    unit_groupoid,
    coarse_unit_groupoid,
    pair_groupoid,
    bundle_groupoid,
    group_groupoid,
    action_groupoid,
    disjoint_union,
    pair_group_groupoid,
)

__all__ = [
    'TopGroupoid',
    'IsoWitness',
    'GermBundle',
    'GroupoidFunctor',
    'check_groupoid',
    'is_etale',
    'sections_category',
    'check_prop11',
    'groupoid_from_pseudogroup',
    'build_germ_bundle',
    'check_target_factorization',
    'roundtrip_groupoid',
    'roundtrip_pseudogroup',
    'transport_morphism',
    'find_groupoid_isomorphism',
    'unit_groupoid',
    'coarse_unit_groupoid',
    'pair_groupoid',
    'bundle_groupoid',
    'group_groupoid',
    'action_groupoid',
    'disjoint_union',
    'pair_group_groupoid',
]
