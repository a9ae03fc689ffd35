"""Positive semidefinite functions and positivity-preserving Fourier multipliers."""

from ._version import __version__
from .engine import (
    GridField,
    GridSpec,
    MultiplierNormReport,
    apply_multiplier,
    convolve_atomic,
    dft_forward,
    dft_inverse,
    fejer_kernel,
    kernel_and_tv,
    l2_norm_bound,
    lp_vector_norm,
    positivity_trial,
)
from .errors import (
    AtomAtOrigin,
    AtomOutOfBox,
    ConfigInvalid,
    DimensionMismatch,
    NegativeWeight,
    NonFinite,
    NonHermitian,
    NonPsdWeight,
    PosmultError,
    QuadratureFailure,
    UnboundedSymbol,
    UnderResolved,
)
from .psd import (
    PsdVerdict,
    SamplingPlan,
    block_gram,
    gram,
    hadamard,
    hermitian_min_eig,
    is_cpsd,
    is_hermitian,
    is_psd,
    test_cpsd_function,
    test_psd_function,
)
from .symbols import MatrixSymbol, ScalarSymbol
from .synth import (
    AtomicMeasure,
    LKParams,
    MollifierSpec,
    basis_test_field,
    bochner_matrix,
    bochner_scalar,
    example_f0,
    exp_f0_closed_form,
    hadamard_exp,
    levy_khintchine,
    lk_matrix,
    matrix_exp,
    mollifier,
)
