"""Curves, points, charts and the standard basis of holomorphic 1-forms.

Two families are supported:

* hyperelliptic ``y**2 = f(x)`` with ``deg f`` in ``{2g+1, 2g+2}``, basis
  ``x**(k-1) dx / y`` for ``k = 1..g``;
* smooth plane quartics ``F(x, y) = 0`` (genus 3), basis
  ``{1, x, y} dx / F_y``.

Coefficients are given in ascending powers.  For quartics the 15
coefficients are graded-lex in ``(x, y)``: ``1, x, y, x^2, xy, y^2, x^3,
x^2 y, x y^2, y^3, x^4, x^3 y, x^2 y^2, x y^3, y^4``.

Coefficient vectors are always expressed in the local coordinate of the
point's chart: ``x`` (``Chart.X``), ``y`` (``Chart.Y``) or ``w = 1/x``
(``Chart.INF``).
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as npoly

from ._models import HyperellipticModel, QuarticModel, Site, _lcm, _single_link
from .errors import (
    ChartInvalid,
    NotOnCurve,
    NotSquarefree,
    SingularCurve,
    UnsupportedDegree,
    ValidationError,
)


class CurveKind(str, Enum):
    HYPERELLIPTIC = "hyperelliptic"
    PLANE_QUARTIC = "plane_quartic"


class Chart(str, Enum):
    X = "x"
    Y = "y"
    INF = "inf"


QUARTIC_MONOMIALS = [(i - j, j) for i in range(5) for j in range(i + 1)]


@dataclass(frozen=True)
class Tolerances:
    root_sep: float = 1e-8  # relative squarefree / smoothness threshold
    residual: float = 1e-8  # relative |equation| on the curve
    chart: float = 1e-8  # |partial| ratio below which a chart is invalid


@dataclass(frozen=True)
class CurveSpec:
    kind: CurveKind
    coeffs: tuple
    genus: int
    branch_points: tuple
    gonality_lower: int
    infinite_branch_point: bool = False
    tolerances: Tolerances = field(default_factory=Tolerances)
    finite: object = field(default=None, repr=False, compare=False)
    infinity: object = field(default=None, repr=False, compare=False)
    sites: tuple = field(default=(), repr=False, compare=False)
    inf_site: Site = field(default=None, repr=False, compare=False)

    @property
    def n_sheets(self):
        return self.finite.nsheets

    def describe(self):
        return {
            "kind": self.kind.value,
            "genus": self.genus,
            "gonality_lower": self.gonality_lower,
            "branch_points": [[z.real, z.imag] for z in self.branch_points],
            "infinite_branch_point": self.infinite_branch_point,
        }


@dataclass(frozen=True)
class CurvePoint:
    """A point with its chart.  ``w, v`` are the coordinates at infinity
    (``w = 1/x``) and are set for ``Chart.INF`` points."""

    x: complex
    y: complex
    chart: Chart = Chart.X
    w: complex = None
    v: complex = None


@dataclass(frozen=True)
class RawCoeffVector:
    u: np.ndarray
    du: np.ndarray


@dataclass(frozen=True)
class GateResult:
    passed: bool
    certificate: str

    def __bool__(self):
        return self.passed


# -- construction ---------------------------------------------------------


def _as_complex_list(coeffs):
    out = []
    for c in coeffs:
        if isinstance(c, (list, tuple)):
            if len(c) != 2:
                raise ValidationError(f"coefficient {c!r} is not a [re, im] pair")
            out.append(complex(float(c[0]), float(c[1])))
        else:
            out.append(complex(c))
    return out


def _polish_roots(f, roots, iters=8):
    df = npoly.polyder(f)
    roots = np.array(roots, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(iters):
            step = npoly.polyval(roots, f) / npoly.polyval(roots, df)
            # at an exact multiple root f' vanishes; keep the current value
            roots = np.where(np.isfinite(step), roots - step, roots)
    return roots


def _hyperelliptic(coeffs, tol):
    f = np.array(coeffs, dtype=complex)
    n = len(f) - 1
    if n < 5:
        raise UnsupportedDegree(f"deg f = {n}: genus >= 2 needs degree 5 or more")
    g = (n - 1) // 2
    roots = _polish_roots(f, npoly.polyroots(f))
    scale = 1.0 + float(np.max(np.abs(roots)))
    sep = min(abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1 :])
    if sep <= tol.root_sep * scale:
        close = [
            complex(a)
            for i, a in enumerate(roots)
            for b in roots[i + 1 :]
            if abs(a - b) <= tol.root_sep * scale
        ]
        raise NotSquarefree(
            f"f has a repeated root near {close[0]:.10g} (separation {sep:.3g})", close
        )
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    finite = HyperellipticModel(f, roots, np.arange(g), 1)
    # w = 1/x, v = y w^(g+1): v^2 = w^(2g+2) f(1/w)
    f_inf = np.zeros(2 * g + 3, dtype=complex)
    f_inf[2 * g + 2 - np.arange(n + 1)] = f
    inf_roots = [1.0 / r for r in roots if r != 0]
    if n % 2 == 1:
        inf_roots.append(0j)
    infinity = HyperellipticModel(f_inf, inf_roots, g - 1 - np.arange(g), -1)
    inf_site = Site(0j, 2, ()) if n % 2 == 1 else None
    return CurveSpec(
        kind=CurveKind.HYPERELLIPTIC,
        coeffs=tuple(complex(c) for c in coeffs),
        genus=g,
        branch_points=tuple(complex(r) for r in roots),
        gonality_lower=2,
        infinite_branch_point=n % 2 == 1,
        tolerances=tol,
        finite=finite,
        infinity=infinity,
        sites=tuple(finite.branch_sites()),
        inf_site=inf_site,
    )


def _quartic(coeffs, tol):
    if len(coeffs) != 15:
        raise UnsupportedDegree(f"plane quartic needs 15 coefficients, got {len(coeffs)}")
    A = np.zeros((5, 5), dtype=complex)
    for (i, j), c in zip(QUARTIC_MONOMIALS, coeffs):
        A[i, j] = c
    if A[0, 4] == 0:
        raise UnsupportedDegree("the y^4 coefficient must be nonzero (4 sheets over every x)")
    finite = QuarticModel(A, np.eye(3))
    H = np.zeros((5, 5), dtype=complex)
    for i, j in QUARTIC_MONOMIALS:
        H[4 - i - j, j] += A[i, j]
    infinity = QuarticModel(H, -np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=float))

    roots = finite.discriminant_roots()
    roots = roots[np.abs(roots) < 1e8]
    scale = 1.0 + (float(np.max(np.abs(roots))) if roots.size else 0.0)
    sites = []
    total = 0
    for grp in _single_link(roots, 1e-4 * scale):
        a0 = complex(np.mean(grp))
        clusters = finite.fiber_clusters(a0)
        if not clusters:
            raise SingularCurve(f"no multiple fibre root over discriminant root {a0:.6g}")
        site = finite.make_site(a0, clusters, smooth_tol=tol.root_sep)
        sites.append(site)
        total += sum(c.mult - 1 for c in site.clusters)
    inf_clusters = infinity.fiber_clusters(0j)
    inf_site = None
    if inf_clusters:
        inf_site = infinity.make_site(0j, inf_clusters, fixed_a=True, smooth_tol=tol.root_sep)
        total += sum(c.mult - 1 for c in inf_site.clusters)
    if total != 12:
        raise SingularCurve(
            f"ramification count {total} != 12 for a degree-4 cover of genus 3: "
            "curve is singular or too close to singular"
        )
    centers = np.array([s.center for s in sites])
    if len(centers) > 1:
        sep = min(abs(a - b) for i, a in enumerate(centers) for b in centers[i + 1 :])
        if sep <= tol.root_sep * scale:
            raise SingularCurve("branch values coincide within tolerance")
    order = np.lexsort((centers.imag, centers.real))
    sites = [sites[k] for k in order]
    return CurveSpec(
        kind=CurveKind.PLANE_QUARTIC,
        coeffs=tuple(complex(c) for c in coeffs),
        genus=3,
        branch_points=tuple(s.center for s in sites),
        gonality_lower=3,
        infinite_branch_point=inf_site is not None,
        tolerances=tol,
        finite=finite,
        infinity=infinity,
        sites=tuple(sites),
        inf_site=inf_site,
    )


def construct_curve(kind, coeffs, tolerances=None):
    """Build and validate a curve.

    Parameters
    ----------
    kind : str or CurveKind
        ``"hyperelliptic"`` or ``"plane_quartic"``.
    coeffs : sequence
        Complex numbers or ``[re, im]`` pairs in ascending / graded-lex order.
    tolerances : Tolerances, optional

    Raises
    ------
    NotSquarefree, SingularCurve, UnsupportedDegree, ValidationError
    """
    kind = CurveKind(kind)
    tol = tolerances or Tolerances()
    coeffs = _as_complex_list(coeffs)
    if not coeffs:
        raise ValidationError("coefficient list is empty")
    if kind is CurveKind.HYPERELLIPTIC:
        if coeffs[-1] == 0:
            raise UnsupportedDegree("leading coefficient of f is zero")
        return _hyperelliptic(coeffs, tol)
    if all(coeffs[k] == 0 for k in range(10, min(15, len(coeffs)))):
        raise UnsupportedDegree("quartic has no degree-4 part")
    return _quartic(coeffs, tol)


def hyperelliptic(coeffs, **kw):
    return construct_curve(CurveKind.HYPERELLIPTIC, coeffs, **kw)


def plane_quartic(coeffs, **kw):
    return construct_curve(CurveKind.PLANE_QUARTIC, coeffs, **kw)


def genus(spec):
    return spec.genus


def gonality_gate(spec, d):
    """Check ``d`` against the gonality lower bound."""
    if d < 1:
        raise ValueError("d must be >= 1")
    gamma = spec.gonality_lower
    if spec.kind is CurveKind.HYPERELLIPTIC:
        why = "gonality = 2 (hyperelliptic)"
    else:
        why = "gonality >= 3 (smooth plane quartic is canonically embedded, not hyperelliptic)"
    if d < gamma:
        return GateResult(True, f"pass: d = {d} < {gamma}; {why}")
    return GateResult(False, f"fail: d = {d} >= {gamma}; {why}")


# -- points and charts ----------------------------------------------------


def _model_coords(spec, point):
    """(model, a, b, chart letter) for a point."""
    if point.chart is Chart.INF:
        return spec.infinity, point.w, point.v, "a"
    return spec.finite, point.x, point.y, "a" if point.chart is Chart.X else "b"


def chart_valid(spec, point, chart=None):
    chart = Chart(chart or point.chart)
    if chart is Chart.INF:
        if point.w is None:
            return False
        model, a, b = spec.infinity, point.w, point.v
        pa, pb = model.partials(a, b)
        return abs(pb) > spec.tolerances.chart * (abs(pa) + abs(pb))
    if not np.isfinite(point.x) or not np.isfinite(point.y):
        return False
    pa, pb = spec.finite.partials(point.x, point.y)
    if chart is Chart.X:
        return abs(pb) > spec.tolerances.chart * (abs(pa) + abs(pb))
    return abs(pa) > spec.tolerances.chart * (abs(pa) + abs(pb))


def _fiber(model, a, site=None):
    b, _ = model.sheets(np.array([a]), site)
    b = b[0]
    return b[np.lexsort((b.imag, b.real))]


def _inf_to_xy(spec, w, v):
    if w == 0:
        return complex("inf"), complex("inf")
    x = 1.0 / w
    if spec.kind is CurveKind.HYPERELLIPTIC:
        return x, v / w ** (spec.genus + 1)
    return x, v / w


def make_point(spec, x, y=None, sheet=0, chart=None):
    """A point over ``x``; ``y`` picks the sheet (else ``sheet`` index).

    The chart defaults to ``Chart.X`` and falls back to ``Chart.Y`` where the
    x-coordinate is not a local coordinate (ramification points).
    """
    x = complex(x)
    if y is None:
        y = complex(_fiber(spec.finite, x)[sheet])
    y = complex(y)
    res = float(spec.finite.residual(x, y))
    if res > spec.tolerances.residual:
        raise NotOnCurve(f"({x}, {y}) is not on the curve: relative residual {res:.3g}")
    if chart is None:
        probe = CurvePoint(x, y, Chart.X)
        chart = Chart.X if chart_valid(spec, probe) else Chart.Y
    pt = CurvePoint(x, y, Chart(chart))
    if pt.chart is Chart.INF:
        return to_chart(spec, pt, Chart.INF)
    if not chart_valid(spec, pt):
        raise ChartInvalid(f"chart {pt.chart.value} is not a local coordinate at ({x}, {y})")
    return pt


def point_at_infinity(spec, w=0j, v=None, sheet=0):
    """A point in the chart ``w = 1/x`` (even-degree hyperelliptic or quartic)."""
    w = complex(w)
    if v is None:
        v = complex(_fiber(spec.infinity, w)[sheet])
    v = complex(v)
    res = float(spec.infinity.residual(w, v))
    if res > spec.tolerances.residual:
        raise NotOnCurve(f"(w={w}, v={v}) is not on the curve: relative residual {res:.3g}")
    x, y = _inf_to_xy(spec, w, v)
    pt = CurvePoint(x, y, Chart.INF, w, v)
    if not chart_valid(spec, pt):
        raise ChartInvalid(f"w = 1/x is not a local coordinate at w={w} (branch point at infinity)")
    return pt


def to_chart(spec, point, chart):
    """The same point re-expressed in another chart."""
    chart = Chart(chart)
    if chart is Chart.INF:
        if point.w is not None:
            return CurvePoint(point.x, point.y, chart, point.w, point.v)
        if point.x == 0:
            raise ChartInvalid("w = 1/x is undefined at x = 0")
        w = 1.0 / point.x
        if spec.kind is CurveKind.HYPERELLIPTIC:
            v = point.y * w ** (spec.genus + 1)
        else:
            v = point.y * w
        pt = CurvePoint(point.x, point.y, chart, w, v)
    else:
        if not (np.isfinite(point.x) and np.isfinite(point.y)):
            raise ChartInvalid("finite charts do not cover points at infinity")
        pt = CurvePoint(point.x, point.y, chart, point.w, point.v)
    if not chart_valid(spec, pt):
        raise ChartInvalid(f"chart {chart.value} is not a local coordinate at this point")
    return pt


def coordinate(point):
    if point.chart is Chart.X:
        return point.x
    if point.chart is Chart.Y:
        return point.y
    return point.w


def follow(spec, point, z):
    """The point near ``point`` whose chart coordinate equals ``z``.

    No analytic continuation: the sheet is chosen as the nearest fibre root
    (or by Newton's method from the old point in ``Chart.Y``), so ``z`` must
    be close to the current coordinate.
    """
    z = complex(z)
    if point.chart is Chart.X:
        fib = _fiber(spec.finite, z)
        y = fib[np.argmin(np.abs(fib - point.y))]
        return CurvePoint(z, complex(y), Chart.X)
    if point.chart is Chart.Y:
        x = spec.finite.solve_a(z, point.x)
        return CurvePoint(complex(x), z, Chart.Y)
    fib = _fiber(spec.infinity, z)
    v = complex(fib[np.argmin(np.abs(fib - point.v))])
    x, y = _inf_to_xy(spec, z, v)
    return CurvePoint(x, y, Chart.INF, z, v)


def standard_basis_eval(spec, point):
    """Coefficients of the standard basis forms (and their derivative) in the
    point's chart coordinate."""
    model, a, b, letter = _model_coords(spec, point)
    res = float(model.residual(a, b))
    if res > spec.tolerances.residual:
        raise NotOnCurve(f"point is off the curve: relative residual {res:.3g}")
    if not chart_valid(spec, point):
        raise ChartInvalid(f"chart {point.chart.value} is not a local coordinate at this point")
    u, du = model.raw(np.array(a), np.array(b), letter)
    return RawCoeffVector(np.asarray(u).reshape(-1), np.asarray(du).reshape(-1))


def _x_derivs(spec, point, chart):
    # dx/dz and d2x/dz2 for the chart coordinate z
    if chart is Chart.X:
        return 1.0 + 0j, 0j
    if chart is Chart.Y:
        p, q = spec.finite.b_chart_derivs(point.x, point.y)
        return complex(p), complex(q)
    w = point.w if point.w is not None else 1.0 / point.x
    return -1.0 / w**2, 2.0 / w**3


def transition_scale(spec, point, chart_a, chart_b):
    """``J = dz_a/dz_b`` and ``dJ/dz_b`` at ``point``.

    Coefficient vectors then transform as ``u_b = u_a J`` and
    ``du_b = du_a J**2 + u_a dJ``.
    """
    chart_a = Chart(chart_a)
    chart_b = Chart(chart_b)
    pa = to_chart(spec, point, chart_a)
    pb = to_chart(spec, point, chart_b)
    if chart_a is chart_b:
        return 1.0 + 0j, 0j
    p_a, q_a = _x_derivs(spec, pa, chart_a)
    p_b, q_b = _x_derivs(spec, pb, chart_b)
    if p_a == 0 or p_b == 0:
        raise ChartInvalid("transition is singular at this point")
    J = p_b / p_a
    dJ = q_b / p_a - q_a * p_b**2 / p_a**3
    return J, dJ


def best_chart_arrays(spec, pa, pb):
    """Per-sample chart letter: ``"a"`` where ``|P_b| >= |P_a|`` else ``"b"``."""
    return np.where(np.abs(pb) >= np.abs(pa), "a", "b")


def ramification_lcm(spec):
    return _lcm([s.order for s in spec.sites] + ([spec.inf_site.order] if spec.inf_site else [1]))
