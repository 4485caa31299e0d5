
from .generators import (
    SPACE,
    PRESHEAF,
    PSEUDOGROUP,
    GROUPOID,
    CorpusInstance,
    enumerate_spaces,
    named_spaces,
    random_presheaf,
    exhaustive_groupoids,
    random_etale_groupoid,
    build_corpus,
)
from .mutations import Mutation, MUTATION_NAMES, build_mutations, detect, tabulated

__all__ = [
    'SPACE',
    'PRESHEAF',
    'PSEUDOGROUP',
    'GROUPOID',
    'CorpusInstance',
    'enumerate_spaces',
    'named_spaces',
    'random_presheaf',
    'exhaustive_groupoids',
    'random_etale_groupoid',
    'build_corpus',
    'Mutation',
    'MUTATION_NAMES',
    'build_mutations',
    'detect',
    'tabulated',
]
