"""The j-invariant of the quantum torus at the golden mean, with certified error bounds."""

from .errors import (
    EmptySetError,
    IndeterminateComparison,
    NearPoleWarning,
    PrecisionError,
    QTorusError,
    ToleranceError,
)
from .fibonacci import IndexTuple, binet, epsilon, fib_sum, fibonacci, zeckendorf
from .invariant import (
    THEOREM3_INTERVAL,
    G,
    H,
    G_tail,
    H_tail,
    InvariantReport,
    J_Bm,
    J_qt,
    TailBound,
    Theorem3Bounds,
    fibonacci_side_sum,
    j_qt,
    leading_terms,
    sandwich_constant,
    tail_C_tilde,
    tail_D_tilde,
    theorem3_bounds,
)
from .membership import Case, MembershipVerdict, classify, enumerate_M, enumerate_N
from .numerics import (
    DEFAULT_PRECISION,
    MIN_PRECISION,
    ApproxReal,
    ErrorPolicy,
    NumericContext,
    dist_nearest_int,
    golden_ratio,
    make_context,
    phi_power,
    sqrt5,
)
from .oracle import BSetReport, ConvergentList, convergents, enumerate_B, golden_threshold, j_eps
from .partitions import (
    partitions_P,
    partitions_Q,
    rr_series_coeffs,
    weighted_series_P,
    weighted_series_Q,
    weighted_sum_P,
    weighted_sum_Q,
)

__version__ = "0.1.0"
