
from .finspace import (
    FiniteSpace,
    PointMap,
    Open,
    EMPTY,
    CANONICAL,
    IRREDUNDANT,
    EXHAUSTIVE,
    build_space,
    minimal_open,
    specializes,
    is_T1,
    check_continuous,
    is_local_homeo,
    enumerate_covers,
    discrete_space,
    indiscrete_space,
    chain_space,
    sierpinski_space,
)
from .sheaves import (
    Presheaf,
    PresheafMorphism,
    Germ,
    EtaleSpaceBundle,
    SENTINEL,
    check_presheaf,
    is_sheaf,
    stalk,
    etale_space,
    skyscraper,
    product_presheaf,
    sheafify,
    check_morphism_stalkwise_iso,
)

__all__ = [
    'FiniteSpace',
    'PointMap',
    'Open',
    'EMPTY',
    'CANONICAL',
    'IRREDUNDANT',
    'EXHAUSTIVE',
    'build_space',
    'minimal_open',
    'specializes',
    'is_T1',
    'check_continuous',
    'is_local_homeo',
    'enumerate_covers',
    'discrete_space',
    'indiscrete_space',
    'chain_space',
    'sierpinski_space',
    'Presheaf',
    'PresheafMorphism',
    'Germ',
    'EtaleSpaceBundle',
    'SENTINEL',
    'check_presheaf',
    'is_sheaf',
    'stalk',
    'etale_space',
    'skyscraper',
    'product_presheaf',
    'sheafify',
    'check_morphism_stalkwise_iso',
]
