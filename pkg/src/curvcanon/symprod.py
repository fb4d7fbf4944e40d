"""Reduced divisors of degree ``d``: evaluation of the 1-form frame and the
two Hermitian metrics it induces.

For ``d`` distinct points the evaluation matrix ``A`` (``g x d``) holds the
orthonormal-frame coefficients at each point in that point's chart.  Two
``d x d`` metrics are compared:

* ``phi_cotangent_metric``: the inverse of the tangent Gram matrix
  ``A^H A``;
* ``grassmann_quotient_metric``: the quotient of ``C^g`` by the kernel of
  evaluation, normed through least-norm lifts onto the orthogonal
  complement of that kernel.  It never forms ``A^H A``.

Convention: ``M[i, j] = H(e_i, e_j)``, linear in the first slot, where
``e_i`` is the dual of the chart tangent vector at the ``i``-th point.
"""

from dataclasses import dataclass, field

import numpy as np

from .curve import Chart, CurvePoint, chart_valid, gonality_gate, make_point
from .curvature import frame_vector, scan_rectangle
from .errors import AgreementFailed, ChartInvalid, GateFailed, PointsNotDistinct, RankDeficient

RANK_TOL = 1e-10  # relative to the largest singular value
SEPARATION_TOL = 1e-8  # relative point separation
SAMPLE_SEPARATION = 1e-3  # minimum separation of random divisor points


@dataclass(frozen=True)
class DivisorConfig:
    """``d`` pairwise-distinct points."""

    points: tuple
    d: int

    def to_list(self):
        return [[[p.x.real, p.x.imag], [p.y.real, p.y.imag], p.chart.value] for p in self.points]


def make_divisor(spec, points):
    """Validated DivisorConfig.

    Raises
    ------
    GateFailed
        If ``d`` is not below the gonality bound.
    PointsNotDistinct
        If two points coincide within tolerance.
    """
    points = tuple(points)
    d = len(points)
    gate = gonality_gate(spec, d)
    if not gate:
        raise GateFailed(gate.certificate)
    for i in range(d):
        for j in range(i):
            p, q = points[i], points[j]
            scale = 1.0 + abs(p.x) + abs(p.y)
            if abs(p.x - q.x) + abs(p.y - q.y) <= SEPARATION_TOL * scale:
                raise PointsNotDistinct(f"points {j} and {i} coincide: ({p.x}, {p.y})")
    return DivisorConfig(points, d)


@dataclass(frozen=True)
class EvaluationMatrix:
    A: np.ndarray
    singular_values: np.ndarray

    @property
    def sigma_d(self):
        return float(self.singular_values[-1])


def _check_rank(A):
    sv = np.linalg.svd(A, compute_uv=False)
    d = A.shape[1]
    if d > A.shape[0] or sv[d - 1] <= RANK_TOL * sv[0]:
        raise RankDeficient(
            f"evaluation matrix has sigma_d = {sv[min(d, sv.size) - 1]:.3g} "
            f"(sigma_1 = {sv[0]:.3g}); below the gonality bound this means a numerical "
            "failure, since no nonconstant function has poles only on the divisor"
        )
    return sv


def evaluation_matrix(spec, gram, divisor):
    """``A[k, i]`` = k-th orthonormal-frame coefficient at point ``i``."""
    cols = [frame_vector(spec, gram, p).u for p in divisor.points]
    A = np.stack(cols, axis=1)
    return EvaluationMatrix(A, _check_rank(A))


def _as_matrix(A):
    return A.A if isinstance(A, EvaluationMatrix) else np.asarray(A, dtype=complex)


def phi_cotangent_metric(A):
    """``(A^H A)^{-1}``: the cotangent metric dual to ``A^H A``."""
    A = _as_matrix(A)
    _check_rank(A)
    M = np.linalg.inv(A.conj().T @ A)
    return 0.5 * (M + M.conj().T)


def grassmann_quotient_metric(A):
    """Quotient metric on ``C^g / ker(ev)`` through least-norm lifts.

    The evaluation map is ``B = A^T``.  With ``P`` an orthonormal basis of
    the complement of ``ker B`` (from the SVD), the least-norm lift of the
    unit covector ``e_i`` is ``c_i = P (B P)^{-1} e_i`` and
    ``M[i, j] = <c_i, c_j> = c_j^H c_i``.
    """
    A = _as_matrix(A)
    _check_rank(A)
    B = A.T
    d = B.shape[0]
    _, _, Vh = np.linalg.svd(B)
    P = Vh[:d].conj().T  # orthonormal basis of (ker B)^perp
    C = P @ np.linalg.solve(B @ P, np.eye(d))
    M = (C.conj().T @ C).T
    return 0.5 * (M + M.conj().T)


def random_divisor(spec, d, rng, max_tries=1000):
    """Uniform x in the scan rectangle, uniform sheet, best chart."""
    x0, x1, y0, y1 = scan_rectangle(spec)
    pts = []
    tries = 0
    while len(pts) < d:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not sample a valid divisor")
        x = complex(rng.uniform(x0, x1), rng.uniform(y0, y1))
        sheet = int(rng.integers(spec.n_sheets))
        try:
            p = make_point(spec, x, sheet=sheet)
        except ChartInvalid:
            continue
        if not chart_valid(spec, p):
            continue
        if any(abs(p.x - q.x) + abs(p.y - q.y) < SAMPLE_SEPARATION for q in pts):
            continue
        pts.append(p)
    return make_divisor(spec, pts)


@dataclass
class MetricAgreementReport:
    d: int
    trials: int
    max_rel_dev: float
    min_sigma_d: float
    failures: list = field(default_factory=list)
    spectra: list = field(default_factory=list)
    tol: float = 1e-8

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        return {
            "d": self.d,
            "trials": self.trials,
            "max_rel_dev": self.max_rel_dev,
            "min_sigma_d": self.min_sigma_d,
            "tol": self.tol,
            "failures": self.failures,
            "spectra": self.spectra,
        }


def compare_metrics(A):
    """Relative deviation ``|M_phi - M_rho| / |M_phi|`` and ``M_phi``."""
    m_phi = phi_cotangent_metric(A)
    m_rho = grassmann_quotient_metric(A)
    return float(np.linalg.norm(m_phi - m_rho) / np.linalg.norm(m_phi)), m_phi


def theorem1_check(spec, gram, divisor, trials=100, seed=0, tol=1e-8, strict=False):
    """Compare the two metrics on ``trials`` divisors.

    Parameters
    ----------
    divisor : int or DivisorConfig
        The degree ``d``, or a first divisor followed by random ones of the
        same degree.
    strict : bool
        Raise AgreementFailed on the first deviation above ``tol``.

    Raises
    ------
    GateFailed
        If ``d`` is not below the gonality bound.
    """
    d = divisor if isinstance(divisor, int) else divisor.d
    gate = gonality_gate(spec, d)
    if not gate:
        raise GateFailed(gate.certificate)
    rng = np.random.default_rng(seed)
    report = MetricAgreementReport(d, trials, 0.0, np.inf, tol=tol)
    for t in range(trials):
        div = divisor if (t == 0 and not isinstance(divisor, int)) else random_divisor(spec, d, rng)
        ev = evaluation_matrix(spec, gram, div)
        dev, m_phi = compare_metrics(ev.A)
        report.max_rel_dev = max(report.max_rel_dev, dev)
        report.min_sigma_d = min(report.min_sigma_d, ev.sigma_d)
        report.spectra.append([float(v) for v in np.linalg.eigvalsh(m_phi)])
        if dev >= tol:
            report.failures.append({"trial": t, "rel_dev": dev, "divisor": div.to_list()})
            if strict:
                raise AgreementFailed(
                    f"metrics disagree by {dev:.3g} on trial {t}", divisor=div, rel_dev=dev
                )
    return report


def rank_survey(spec, gram, d, count=1000, seed=0):
    """Smallest ``sigma_d`` and smallest ``sigma_d / sigma_1`` over random
    divisors; raises RankDeficient if any falls below the rank tolerance."""
    rng = np.random.default_rng(seed)
    lo, lo_rel = np.inf, np.inf
    for _ in range(count):
        ev = evaluation_matrix(spec, gram, random_divisor(spec, d, rng))
        sv = ev.singular_values
        lo = min(lo, float(sv[-1]))
        lo_rel = min(lo_rel, float(sv[-1] / sv[0]))
    return lo, lo_rel


def point_from_list(spec, item):
    """Inverse of ``DivisorConfig.to_list`` for one point."""
    (xr, xi), (yr, yi), chart = item
    return CurvePoint(complex(xr, xi), complex(yr, yi), Chart(chart))
