
from .groups import FiniteGroup, cyclic_group, trivial_group, klein_group, symmetric_group_3, standard_groups
from .pseudogroup import (
    PrePseudogroup,
    GermGroupoid,
    GermArrow,
    GroupSheafInput,
    ClassicalPseudogroup,
    T1,
    NON_T1,
    hom_presheaf,
    germ_target_hom,
    germ_target_limit,
    check_decomposition,
    check_pre_pseudogroup,
    is_pseudogroup_sheaf,
    evaluate_conditions,
    build_germ_groupoid,
    underlying_map,
    with_derived_underlying,
    build_homeo_l,
    injective_truncation,
    from_group_sheaf,
    constant_group_sheaf,
    constant_group_presheaf,
    is_concrete,
    classical_pseudogroup,
    classical_to_concrete,
    check_classical,
    generate_classical,
)
from .ppg_sheafify import (
    PpgMorphism,
    identity_ppg_morphism,
    check_ppg_morphism,
    ppg_sharp,
    ppg_sheafify,
    check_universality,
    check_prop45,
    find_ppg_isomorphism,
    check_construction_properties,
    check_coproduct_distribution,
)

__all__ = [
    'FiniteGroup',
    'cyclic_group',
    'trivial_group',
    'klein_group',
    'symmetric_group_3',
    'standard_groups',
    'PrePseudogroup',
    'GermGroupoid',
    'GermArrow',
    'GroupSheafInput',
    'ClassicalPseudogroup',
    'T1',
    'NON_T1',
    'hom_presheaf',
    'germ_target_hom',
    'germ_target_limit',
    'check_decomposition',
    'check_pre_pseudogroup',
    'is_pseudogroup_sheaf',
    'evaluate_conditions',
    'build_germ_groupoid',
    'underlying_map',
    'with_derived_underlying',
    'build_homeo_l',
    'injective_truncation',
    'from_group_sheaf',
    'constant_group_sheaf',
    'constant_group_presheaf',
    'is_concrete',
    'classical_pseudogroup',
    'classical_to_concrete',
    'check_classical',
    'generate_classical',
    'PpgMorphism',
    'identity_ppg_morphism',
    'check_ppg_morphism',
    'ppg_sharp',
    'ppg_sheafify',
    'check_universality',
    'check_prop45',
    'find_ppg_isomorphism',
    'check_construction_properties',
    'check_coproduct_distribution',
]
