"""Transducers realizing affine maps u -> v + M*u on base-n digit words, and
exact computation in the tree-automorphism groups they generate."""

from .linalg import (
    all_letters,
    block_diag,
    coprime_to,
    det,
    identity,
    inverse_unimodular,
    is_unimodular,
    mat_mul,
    mat_vec,
    matrix,
    mod_div,
    offset_box,
    row_sum_norm,
    unit_vector,
    vec_add,
    vector,
)
from .nadic import (
    AffineMap,
    DigitWord,
    affine_apply_digitwise,
    affine_apply_prefix,
    compose,
    decode,
    encode,
)
from .automaton import (
    AlphabetCapError,
    Automaton,
    AutomatonState,
    BuildError,
    DEFAULT_ALPHABET_CAP,
    FormatError,
    WellDefinednessReport,
    build_single,
    build_union,
    dedup,
    export,
    from_json,
    state_count_bound,
    to_dot,
    to_json,
    well_definedness_check,
)
from .treeaction import (
    BudgetExceededError,
    DEFAULT_NODE_BUDGET,
    GroupWord,
    RelationReport,
    WordError,
    conjugacy_search_bounded,
    equal,
    parse_word,
    translation_word,
    verify_relation,
)
from .constructions import (
    Presentation,
    RelatorCheckReport,
    block_extend,
    presentation_for,
    reduced_words,
    relator_check,
    sanov_pair,
    word_matrix,
)

__version__ = "0.1.0"
