"""Walsh-Paley summability toolkit.

Dyadic-grid Walsh analysis: the fast Paley-ordered transform, matrix
transformation means and their kernels, maximal operators with weak-type
functionals, tensor-product means on the square, Walsh-Lebesgue point
diagnostics, and an exact rational divergence example.
"""

from .dyadic import (
    BinaryIndex,
    DyadicInterval,
    DyadicRational,
    GridSpec,
    binary_bits,
    dyadic_add,
    interval_of,
    prefix,
)
from .exact import (
    SparseStepFunction,
    build_example1,
    divergence_report,
    exact_avg_at_zero,
    exact_fejer_at_zero,
    validate_nseq,
)
from .lebesgue import (
    WlpDiagnostic,
    classical_lebesgue_avg,
    classify_wlp,
    h0,
    h1,
    mt2_convergence_experiment,
    w1,
    w2d,
)
from .maximal import (
    IndexSubsequence,
    dyadic_maximal,
    h1_norm,
    llogl_norm,
    maximal_abs_mean,
    maximal_mean,
    random_test_function,
    subsequence_from_spec,
    weak_quasinorm,
    weak_type_experiment,
)
from .summability import (
    MatrixValidationError,
    MeanReport,
    TransformationMatrix,
    apply_mean,
    builtin_matrix,
    c2_quantity,
    cesaro_A,
    kernel_V,
    kernel_decomposition,
    matrix_from_spec,
    mean_report,
    tau,
    upsilon,
)
from .tensor import (
    GridFunction2D,
    apply_axis,
    hybrid_maximal,
    iterated_majorant,
    llogl_2d,
    llogl_weak_type_experiment,
    load_grid2d,
    random_test_function_2d,
    save_grid2d,
    tensor_maximal,
    tensor_mean,
    weak_quasinorm_2d,
)
from .transform import (
    GridFunction1D,
    WalshSpectrum,
    dirichlet_kernel,
    dyadic_convolve,
    fejer_kernel,
    fwht,
    inverse_fwht,
    load_grid1d,
    partial_sum,
    save_grid1d,
    translate,
    walsh_sample,
)

__version__ = "0.1.0"
