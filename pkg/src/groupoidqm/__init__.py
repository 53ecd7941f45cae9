"""Quantum mechanics on finite measured groupoids.

Finite groupoids with validated composition tables, Haar measures and their
modular functions, the groupoid convolution *-algebra, the canonical
symmetroid with its induced measure and convolution algebra, and quantum
dynamical maps (channels) with Choi/Kraus representations and flat
positive-semidefiniteness diagnostics.
"""

from .groupoid import (
    FiniteGroupoid,
    GroupoidError,
    NotComposableError,
    ValidationError,
    direct_product,
    fibers,
    groupoid_from_json,
    is_connected,
    load_groupoid,
    pair_groupoid,
    pair_index,
    pair_of,
    save_groupoid,
    validate,
)
from .measure import (
    GroupoidMeasure,
    ModularFunction,
    NotHaarError,
    load_measure,
    measure_from_json,
    modular,
    verify_disintegration,
    verify_inverse_relation,
    verify_left_invariance,
    verify_right_invariance,
    weighted_pair_measure,
)
from .algebra import (
    AlgebraElement,
    NormalizationError,
    PositiveTypeResult,
    StateFunction,
    convolve,
    element_from_json,
    evaluate_state,
    inner,
    involute,
    is_positive_type,
    left_regular_matrix,
    load_element,
    norm_sq,
    state_function,
    state_normalization,
)
from .eigen import hermitian_defect, hermitian_eigh, min_eigenvalue
from .symmetroid import (
    Bisection,
    FlatBisection,
    QClass,
    QuotientTransformation,
    Symmetroid,
    Transformation,
    all_bisections,
    bisection_inverse,
    bisection_product,
    enumerate_quotient,
    flat_bisection_functor,
    flat_bisection_product,
    flat_bisections,
    identity_bisection,
    q_from_index,
    q_horizontal_compose,
    q_horizontal_inverse,
    q_horizontal_unit,
    q_horizontally_composable,
    q_index,
    q_s1,
    q_t1,
    q_vertical_compose,
    q_vertical_inverse,
    q_vertical_unit,
    shift_bisection,
)
from .symalgebra import (
    NotPullbackError,
    QuotientFunction,
    QuotientMeasure,
    SymFunction,
    SymmetroidMeasure,
    convolve_S,
    convolve_general,
    fiber_restrict,
    horizontal_convolve,
    induce_measure,
    involute_S,
    involute_general,
    modular_involution,
    pullback_embed,
    quotient_function_from_json,
    rep_operator,
    tensor_matrix,
    verify_induced_equivariance,
    verify_modular_formula,
    verify_modular_homomorphism,
)
from .channels import (
    AMatrix,
    BMatrix,
    Channel,
    ChoiMatrix,
    CPResult,
    DimensionMismatchError,
    FlatPSDResult,
    KrausFamily,
    PositivityWitness,
    TooManyKrausError,
    apply,
    bisection_indicator,
    channel_from_a_matrix,
    channel_from_b_matrix,
    channel_from_choi,
    channel_from_json,
    choi_kraus_decomposition,
    compose_channels,
    dsf_check,
    extend_with_identity,
    fourier_channel,
    fourier_family,
    from_flat_bisection,
    from_kraus,
    identity_channel,
    is_cp,
    is_flat_psd,
    is_unital,
    kernel_positive_type,
    kraus_from_json,
    load_channel,
    load_kraus,
    pad_element,
    positivity_falsifier,
    random_choi_hermitian_channel,
    random_kraus_channel,
    random_positive_type,
    to_a_matrix,
    to_b_matrix,
    to_choi,
    tomogram,
    transpose_channel,
    zero_pad,
)

__version__ = "0.1.0"
