"""L2 pairing of holomorphic 1-forms, canonical-map curvature and divisor
metrics on hyperelliptic curves and smooth plane quartics."""

from .curvature import (
    CurvatureSample,
    CurvatureScan,
    FrameVector,
    GridParams,
    canonical_map_point,
    curvature_at,
    degenerate_points,
    frame_vector,
    gauss_bonnet_total,
    metric_density,
    scan_curvature,
)
from .curve import (
    Chart,
    CurveKind,
    CurvePoint,
    CurveSpec,
    RawCoeffVector,
    Tolerances,
    construct_curve,
    genus,
    gonality_gate,
    hyperelliptic,
    make_point,
    plane_quartic,
    point_at_infinity,
    standard_basis_eval,
    to_chart,
    transition_scale,
)
from .errors import *  # noqa: F401,F403
from .io import load_curve_spec
from .kernels import BACKEND
from .l2 import GramData, gram_matrix, orthonormalizer
from .quadrature import QuadParams
from .symprod import (
    DivisorConfig,
    EvaluationMatrix,
    evaluation_matrix,
    grassmann_quotient_metric,
    make_divisor,
    phi_cotangent_metric,
    theorem1_check,
)

__version__ = "0.1.0"
