"""The canonical map, its metric density and Gaussian curvature.

For an orthonormal frame ``u`` of the 1-forms in a local coordinate ``z``
the pulled-back metric is ``lambda |dz|^2`` with ``lambda = |u|^2``.  Its
Gaussian curvature has the closed form

    Theta = -2 |du_perp|^2 / |u|^4,

where ``du_perp`` is the component of ``du`` orthogonal to ``u``.  This is
``-2 (|u|^2 |du|^2 - |<du, u>|^2) / |u|^6``; the projected form is summed
without cancellation, so ``Theta <= 0`` holds exactly in floating point.
The degeneracy ``|du_perp| / |u|^2`` vanishes exactly where ``u`` and
``du`` are parallel, that is where the canonical map has zero differential,
and ``Theta = -2 * degeneracy**2``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .curve import (
    Chart,
    CurveKind,
    CurvePoint,
    _inf_to_xy,
    chart_valid,
    coordinate,
    follow,
    standard_basis_eval,
)
from .errors import ChartInvalid, NotOnCurve
from .quadrature import PATCH_FRACTION, QuadParams, integrate, layout


@dataclass(frozen=True)
class FrameVector:
    u: np.ndarray
    du: np.ndarray
    chart: Chart


@dataclass(frozen=True)
class CurvatureSample:
    """Curvature data at one point.

    ``lam`` is the metric density in the point's chart coordinate.
    """

    point: CurvePoint
    lam: float
    theta: float
    degeneracy: float


@dataclass(frozen=True)
class GridParams:
    """Scan layout and thresholds.

    Attributes
    ----------
    n : int
        Grid points per side of the x-rectangle.
    hull_scale : float
        Rectangle size relative to the bounding box of the branch values.
    disk_angles, disk_radii : int
        Polar samples per branch disk in the y-chart.
    disk_fraction : float
        Disk size, as the x-displacement it reaches relative to the distance
        to the nearest other branch value.
    tol_theta : float
        Largest allowed curvature (nonpositivity check).
    degeneracy_tol : float
        Threshold for degenerate points.
    merge_radius : float
        Degenerate points closer than this are one cluster.
    """

    n: int = 200
    hull_scale: float = 1.5
    disk_angles: int = 32
    disk_radii: int = 8
    disk_fraction: float = 1.0 / 3.0
    tol_theta: float = 1e-9
    degeneracy_tol: float = 1e-6
    merge_radius: float = 1e-3


def frame_vector(spec, gram, point):
    """Orthonormal-frame coefficients ``T u_raw`` and ``T du_raw``."""
    raw = standard_basis_eval(spec, point)
    return FrameVector(gram.T @ raw.u, gram.T @ raw.du, point.chart)


def canonical_map_point(spec, gram, point):
    """Homogeneous coordinates of the canonical image of ``point``.

    The representative is the frame vector itself; it depends on the chart
    only through an overall nonzero factor.
    """
    return frame_vector(spec, gram, point).u


def metric_density(spec, gram, point):
    u = frame_vector(spec, gram, point).u
    return float(np.vdot(u, u).real)


def curvature_at(spec, gram, point):
    fv = frame_vector(spec, gram, point)
    lam, theta, deg = kernels.frame_curvature(fv.u, fv.du)
    return CurvatureSample(point, float(lam), float(theta), float(deg))


def frame_arrays(gram, model, a, b, chart, pb=None):
    """Vectorized frame ``(u, du)`` for samples ``(a, b)`` in one model."""
    u, du = model.raw(a, b, chart, pb)
    return u @ gram.T.T, du @ gram.T.T


# -- scans ------------------------------------------------------------------


@dataclass
class CurvatureScan:
    """Scan results as parallel arrays in deterministic grid order.

    ``chart`` holds ``"x"`` or ``"y"`` per sample, ``region`` is ``"grid"``
    or ``"disk"``.  Iterating yields CurvatureSample objects.
    """

    x: np.ndarray
    y: np.ndarray
    chart: np.ndarray
    lam: np.ndarray
    theta: np.ndarray
    degeneracy: np.ndarray
    region: np.ndarray
    params: GridParams

    def __len__(self):
        return self.x.size

    def __iter__(self):
        for k in range(self.x.size):
            pt = CurvePoint(complex(self.x[k]), complex(self.y[k]), Chart(self.chart[k]))
            yield CurvatureSample(
                pt, float(self.lam[k]), float(self.theta[k]), float(self.degeneracy[k])
            )

    @property
    def max_theta(self):
        return float(self.theta.max())

    def violations(self, tol=None):
        tol = self.params.tol_theta if tol is None else tol
        return int(np.count_nonzero(self.theta > tol))


def scan_rectangle(spec, params=None):
    """Bounds ``(x0, x1, y0, y1)`` of the x-grid."""
    params = params or GridParams()
    bp = np.array(spec.branch_points)
    lo = np.array([bp.real.min(), bp.imag.min()])
    hi = np.array([bp.real.max(), bp.imag.max()])
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    half = np.maximum(half, 0.25 * max(half.max(), 1e-3))
    half = params.hull_scale * half
    return mid[0] - half[0], mid[0] + half[0], mid[1] - half[1], mid[1] + half[1]


def _grid_samples(spec, gram, params):
    x0, x1, y0, y1 = scan_rectangle(spec, params)
    xs = np.linspace(x0, x1, params.n)
    ys = np.linspace(y0, y1, params.n)
    a = (xs[None, :] + 1j * ys[:, None]).ravel()
    model = spec.finite
    b, pb = model.sheets(a)
    S = b.shape[1]
    a2 = np.repeat(a, S)
    b2 = b.ravel()
    pb2 = pb.ravel()
    pa2, _ = model.partials(a2, b2)
    use_a = np.abs(pb2) >= np.abs(pa2)
    u = np.empty((a2.size, spec.genus), dtype=complex)
    du = np.empty_like(u)
    for mask, letter in ((use_a, "a"), (~use_a, "b")):
        if mask.any():
            u[mask], du[mask] = frame_arrays(
                gram, model, a2[mask], b2[mask], letter, pb2[mask] if letter == "a" else None
            )
    chart = np.where(use_a, Chart.X.value, Chart.Y.value)
    return a2, b2, chart, u, du


def _disk_seeds(spec, params):
    """Per finite site and cluster: (centre a, centre b, y-radius, local model)."""
    lay = layout(spec)
    out = []
    for site, rho in zip(lay.sites, lay.radii):
        # x-reach of the disk, relative to the nearest other branch value
        rho_x = params.disk_fraction * rho / PATCH_FRACTION
        for cl in site.clusters:
            if spec.kind is CurveKind.HYPERELLIPTIC:
                fp = complex(np.polyval(spec.finite.df[::-1], site.center))
                # y^2 ~ f'(c) (x - c)
                out.append((site.center, 0j, np.sqrt(abs(fp) * rho_x), 2, fp))
            else:
                m = cl.mult
                c10 = cl.local[1, 0]
                c0m = cl.local[0, m]
                # c10 (x - c) + c0m eta^m ~ 0
                r_y = (abs(c10) * rho_x / abs(c0m)) ** (1.0 / m)
                out.append((site.center, cl.center, r_y, m, -c0m / c10))
    return out


def _disk_samples(spec, gram, params):
    ring = np.exp(2j * np.pi * np.arange(params.disk_angles) / params.disk_angles)
    radii = np.arange(1, params.disk_radii + 1) / params.disk_radii
    offsets = np.concatenate([[0j], (radii[:, None] * ring[None, :]).ravel()])
    model = spec.finite
    A, B = [], []
    for c, b0, r_y, m, k in _disk_seeds(spec, params):
        eta = r_y * offsets
        if spec.kind is CurveKind.HYPERELLIPTIC:
            a0 = c + eta**2 / k
        else:
            a0 = c + k * eta**m
        bb = b0 + eta
        for a_init, b_val in zip(a0, bb):
            A.append(model.solve_a(b_val, a_init) if b_val != b0 else c)
            B.append(b_val)
    a = np.array(A, dtype=complex)
    b = np.array(B, dtype=complex)
    u, du = frame_arrays(gram, model, a, b, "b")
    chart = np.full(a.size, Chart.Y.value)
    return a, b, chart, u, du


def scan_curvature(spec, gram, grid_params=None):
    """Curvature on the x-rectangle (all sheets) and the y-chart branch disks.

    Every sample uses the chart with the larger defining partial, so the
    coordinate is always a good local parameter.
    """
    params = grid_params or GridParams()
    parts = [_grid_samples(spec, gram, params), _disk_samples(spec, gram, params)]
    region = np.concatenate(
        [np.full(parts[0][0].size, "grid"), np.full(parts[1][0].size, "disk")]
    )
    a, b, chart, u, du = (np.concatenate(z) for z in zip(*parts))
    lam, theta, deg = kernels.frame_curvature(u, du)
    return CurvatureScan(a, b, chart, lam, theta, deg, region, params)


# -- degenerate points ------------------------------------------------------


def _local_minima(vals):
    """Indices of strict-or-equal 8-neighbour minima of a 2-D array."""
    n0, n1 = vals.shape
    pad = np.pad(vals, 1, constant_values=np.inf)
    core = pad[1:-1, 1:-1]
    ok = np.ones_like(core, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy or dx:
                ok &= core <= pad[1 + dy : 1 + dy + n0, 1 + dx : 1 + dx + n1]
    return np.argwhere(ok)


def _degeneracy_at(spec, gram, point):
    try:
        return curvature_at(spec, gram, point).degeneracy
    except (ChartInvalid, NotOnCurve, ZeroDivisionError, FloatingPointError):
        return np.inf


def _refine(spec, gram, point, step):
    z0 = coordinate(point)
    state = {"pt": point}

    def obj(v):
        try:
            pt = follow(spec, state["pt"], complex(v[0], v[1]))
        except (ChartInvalid, NotOnCurve, ZeroDivisionError):
            return np.inf
        if not chart_valid(spec, pt):
            return np.inf
        d = _degeneracy_at(spec, gram, pt)
        return d * d

    simplex = np.array(
        [[z0.real, z0.imag], [z0.real + step, z0.imag], [z0.real, z0.imag + step]]
    )
    res = minimize(
        obj,
        [z0.real, z0.imag],
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-13, "fatol": 1e-30, "maxiter": 600},
    )
    best = follow(spec, point, complex(res.x[0], res.x[1]))
    return best, _degeneracy_at(spec, gram, best)


def degenerate_points(spec, gram, grid_params=None, scan=None):
    """Points where the canonical map has vanishing differential.

    Candidates are the local minima of the degeneracy over the scan (per
    grid cell, over all sheets) and the minimum of every branch disk.  Each
    is polished by Nelder-Mead on ``degeneracy**2`` in its chart coordinate;
    those below ``degeneracy_tol`` are merged within ``merge_radius`` and one
    representative per cluster is returned, sorted by ``(re x, im x)``.
    """
    params = grid_params or GridParams()
    scan = scan if scan is not None else scan_curvature(spec, gram, params)
    n = params.n
    grid = scan.region == "grid"
    S = int(np.count_nonzero(grid) // (n * n))
    dg = scan.degeneracy[grid].reshape(n, n, S)
    per_cell = dg.min(axis=2)
    which = dg.argmin(axis=2)
    cands = []
    x0, x1, _, _ = scan_rectangle(spec, params)
    step = (x1 - x0) / (n - 1)
    for i, j in _local_minima(per_cell):
        k = (i * n + j) * S + which[i, j]
        cands.append((per_cell[i, j], k, step))
    disk = np.flatnonzero(~grid)
    per_disk = 1 + params.disk_angles * params.disk_radii
    for d0 in range(0, disk.size, per_disk):
        idx = disk[d0 : d0 + per_disk]
        k = idx[np.argmin(scan.degeneracy[idx])]
        cands.append((scan.degeneracy[k], k, abs(scan.y[idx[-1]] - scan.y[idx[0]]) / 4))
    cands.sort(key=lambda t: (t[0], t[1]))
    found = []
    for _, k, st in cands:
        pt = CurvePoint(complex(scan.x[k]), complex(scan.y[k]), Chart(scan.chart[k]))
        if any(abs(pt.x - q.x) + abs(pt.y - q.y) < params.merge_radius for q, _ in found):
            continue
        best, dval = _refine(spec, gram, pt, max(st, 1e-6))
        if dval < params.degeneracy_tol:
            found.append((best, dval))
    clusters = []
    for pt, dval in found:
        for cl in clusters:
            if any(abs(pt.x - q.x) + abs(pt.y - q.y) < params.merge_radius for q, _ in cl):
                cl.append((pt, dval))
                break
        else:
            clusters.append([(pt, dval)])
    reps = [min(cl, key=lambda t: t[1])[0] for cl in clusters]
    reps.sort(key=lambda p: (round(p.x.real, 12), round(p.x.imag, 12)))
    return reps


# -- Gauss-Bonnet -----------------------------------------------------------


@dataclass(frozen=True)
class GaussBonnetResult:
    total: float
    expected: float
    rel_error: float
    quad_report: object


def _gb_integrand(gram):
    def integrand(block, b, pb):
        model = block.model
        a = np.broadcast_to(block.a[:, None], b.shape)
        pa, _ = model.partials(a, b)
        use_a = np.abs(pb) >= np.abs(pa)
        out = np.zeros(b.shape)
        if use_a.any():
            u, du = frame_arrays(gram, model, a[use_a], b[use_a], "a", pb[use_a])
            lam, theta, _ = kernels.frame_curvature(u, du)
            out[use_a] = theta * lam
        nb = ~use_a
        if nb.any():
            u, du = frame_arrays(gram, model, a[nb], b[nb], "b")
            lam, theta, _ = kernels.frame_curvature(u, du)
            # lambda in the a-chart is lambda_b |db/da|^2
            out[nb] = theta * lam * np.abs(pa[nb] / pb[nb]) ** 2
        return out[..., None]

    return integrand


def gauss_bonnet_total(spec, gram, quad_params=None):
    """Integral of ``Theta * lambda dA`` over the curve.

    Returns
    -------
    GaussBonnetResult
        ``expected`` is ``2 pi (2 - 2g)``.
    """
    params = quad_params or QuadParams()
    val, report = integrate(spec, _gb_integrand(gram), params)
    total = float(val[0].real)
    expected = 2 * np.pi * (2 - 2 * spec.genus)
    return GaussBonnetResult(total, expected, abs(total / expected - 1), report)


def infinity_sample(spec, gram, w, v):
    """Curvature at a point of the ``w = 1/x`` chart."""
    x, y = _inf_to_xy(spec, complex(w), complex(v))
    return curvature_at(spec, gram, CurvePoint(x, y, Chart.INF, complex(w), complex(v)))
