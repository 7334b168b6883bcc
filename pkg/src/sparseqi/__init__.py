"""B-spline quasi-interpolation on sparse dyadic grids.

Hierarchical decomposition of periodic functions, recovery from samples on
Smolyak-style sparse grids, and measurement of the associated norm
equivalences and convergence rates.
"""

from .analysis import (
    DegenerateFit,
    FieldDifference,
    NormSpec,
    RateFit,
    ResolutionTooLow,
    besov_block_norm,
    difference,
    fit_rate,
    lp_block_norm,
    lq_norm,
    recovery_error,
    sobolev_norm_fourier,
)
from .bspline import (
    CardinalSpline,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidOrder,
    PeriodicSpline,
    cardinal_spline,
    eval_cardinal,
    eval_periodic,
    eval_tensor,
)
from .kernels import HAVE_NUMBA, USE_NUMBA, active_backend
from .laurent import LaurentPoly, NotDivisible, apply_shift_operator
from .quasi_interp import (
    BUILTIN_MASKS,
    HierCoeffs,
    MissingSamples,
    NotAQuasiInterpolant,
    QIScheme,
    SampleCache,
    a_coeff,
    build_scheme,
    builtin_scheme,
    decompose,
    detail_coeff,
    detail_coeff_oracle,
    eval_partial_sum,
)
from .smolyak import SampleGrid, SmolyakIndexSet, count_points, enumerate_grid, recover
from .testfuncs import (
    TrigFunction,
    bernoulli_partial,
    builtin_function,
    random_mixed_smooth,
    witness_g1,
    witness_g2,
)

__version__ = "0.1.0"
