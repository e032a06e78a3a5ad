"""Exponentially accurate reconstruction of bandlimited functions from average samples."""
from .errors import *  # noqa: F401,F403
from .kernel import (
    ReconstructionKernel,
    build_kernel_table,
    make_kernel,
    phi_hat,
    phi_value,
    verify_complete_reconstruction,
)
from .measure import (
    MeasureConstants,
    SamplingMeasure,
    exp_transform,
    make_measure,
    measure_constants,
    tensor_measure,
)
from .oracle import (
    BandlimitedTestFunction,
    SamplePatch,
    default_test_function,
    eval_f,
    exact_average_samples,
    l2_norm,
    truncated_shannon,
)
from .quadrature import QuadratureRule, gauss_legendre, integrate_1d, integrate_nd, oscillatory_panels
from .reconstruct import (
    ErrorReport,
    ReconstructionPlan,
    error_bound,
    make_plan,
    make_plan_kernel,
    reconstruct_at,
    reconstruct_grid,
    sup_error,
)
from .window import (
    WindowSpec,
    eval_window,
    eval_window_1d,
    make_window,
    wallis_norm_even,
    wallis_norm_odd_or_even,
)

__version__ = "0.1.0"
