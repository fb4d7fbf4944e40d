import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvcanon import (
    Chart,
    CurvePoint,
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
from curvcanon.errors import (
    ChartInvalid,
    NotOnCurve,
    NotSquarefree,
    SingularCurve,
    UnsupportedDegree,
    ValidationError,
)

from .conftest import FERMAT, roots_minus_one


def test_x6_genus_and_branch_points(x6):
    assert x6.genus == 2
    assert len(x6.branch_points) == 6
    roots = np.exp(2j * np.pi * np.arange(6) / 6)
    for r in roots:
        assert min(abs(b - r) for b in x6.branch_points) < 1e-14
    assert not x6.infinite_branch_point


def test_x5_records_branch_point_at_infinity(x5):
    assert x5.genus == 2
    assert len(x5.branch_points) == 5
    assert x5.infinite_branch_point


def test_genus_formula():
    assert genus(hyperelliptic(roots_minus_one(6))) == 2
    assert genus(hyperelliptic([1, 1, 0, 0, 0, 0, 0, 1])) == 3
    assert genus(plane_quartic(FERMAT)) == 3


def test_fermat_genus_and_gonality(fermat):
    assert fermat.genus == 3
    assert fermat.gonality_lower == 3


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_branch_count_including_infinity(n):
    spec = hyperelliptic(roots_minus_one(n))
    total = len(spec.branch_points) + int(spec.infinite_branch_point)
    assert total == 2 * (spec.genus + 1)


def test_quartic_ramification_total(fermat, generic_quartic):
    for spec in (fermat, generic_quartic):
        sites = list(spec.sites) + ([spec.inf_site] if spec.inf_site else [])
        assert sum(c.mult - 1 for s in sites for c in s.clusters) == 12
    assert len(generic_quartic.sites) == 12


def test_gonality_gate():
    h = hyperelliptic(roots_minus_one(6))
    q = plane_quartic(FERMAT)
    assert gonality_gate(h, 1).passed
    assert not gonality_gate(h, 2).passed
    assert "2" in gonality_gate(h, 2).certificate
    assert gonality_gate(q, 2).passed
    assert not gonality_gate(q, 3).passed


def test_not_squarefree_reports_root():
    with pytest.raises(NotSquarefree) as exc:
        hyperelliptic([0, 0, 1, 0, 0, 1])  # x^2 (x^3 + 1)
    assert min(abs(r) for r in exc.value.roots) < 1e-6


def test_degree_errors():
    with pytest.raises(UnsupportedDegree):
        hyperelliptic([1, 0, 0, 1])
    with pytest.raises(UnsupportedDegree):
        hyperelliptic([1, 0, 0, 0, 0, 1, 0])
    with pytest.raises(UnsupportedDegree):
        plane_quartic([1, 0, 0])
    with pytest.raises(ValidationError):
        construct_curve("hyperelliptic", [])


def test_singular_quartic_rejected():
    # (x^2 + y^2 - 1)(x^2 + 2 y^2 - 1) has singular points
    c = [0] * 15
    c[0] = 1
    c[3], c[5] = -2, -3
    c[10], c[12], c[14] = 1, 3, 2
    with pytest.raises(SingularCurve):
        plane_quartic(c)


def test_quartic_needs_y4():
    c = [0] * 15
    c[0], c[10], c[13] = -1, 1, 1  # x^4 + x y^3 - 1
    with pytest.raises(UnsupportedDegree):
        plane_quartic(c)


def test_basis_eval_examples(x6, fermat):
    r = standard_basis_eval(x6, CurvePoint(0j, 1j, Chart.X))
    assert np.allclose(r.u, [-1j, 0], atol=1e-15)
    assert np.allclose(r.du, [0, -1j], atol=1e-15)
    r = standard_basis_eval(x6, CurvePoint(1 + 0j, 0j, Chart.Y))
    assert np.allclose(r.u, [1 / 3, 1 / 3], atol=1e-15)
    r = standard_basis_eval(fermat, CurvePoint(0j, 1 + 0j, Chart.X))
    assert np.allclose(r.u, [0.25, 0, 0.25], atol=1e-15)


def test_chart_and_curve_errors(x6):
    with pytest.raises(ChartInvalid):
        standard_basis_eval(x6, CurvePoint(1 + 0j, 0j, Chart.X))
    with pytest.raises(NotOnCurve):
        standard_basis_eval(x6, CurvePoint(0.5 + 0j, 3 + 0j, Chart.X))
    with pytest.raises(NotOnCurve):
        make_point(x6, 0.5, 3)


def test_make_point_falls_back_to_y_chart(x6):
    p = make_point(x6, 1.0)
    assert p.chart is Chart.Y


def test_transition_examples(x6, fermat):
    p = make_point(x6, 0.4 + 0.3j)
    assert transition_scale(x6, p, Chart.X, Chart.X) == (1, 0)
    J, _ = transition_scale(x6, p, Chart.X, Chart.Y)
    fp = 6 * p.x**5
    assert abs(J - 2 * p.y / fp) < 1e-13 * abs(J)
    q = make_point(fermat, 0.4 + 0.3j, sheet=1)
    J, _ = transition_scale(fermat, q, Chart.X, Chart.Y)
    assert abs(J - (-(4 * q.y**3) / (4 * q.x**3))) < 1e-13 * abs(J)


def test_odd_degree_infinity_unsupported(x5):
    with pytest.raises(ChartInvalid):
        point_at_infinity(x5)


def test_even_degree_infinity_points(x6):
    p = point_at_infinity(x6, 0j, sheet=0)
    q = point_at_infinity(x6, 0j, sheet=1)
    assert abs(p.v + q.v) < 1e-15
    r = standard_basis_eval(x6, p)
    # x^(k-1) dx / y at infinity: w^(g-k) * (-dw) / v
    assert np.allclose(r.u, [0, -1 / p.v], atol=1e-15)


def test_involution_flips_sign(x6, x8):
    for spec in (x6, x8):
        for x in (0.3 + 0.1j, -0.7 + 0.4j, 1.2 - 0.9j):
            p = make_point(spec, x, sheet=0)
            q = make_point(spec, x, sheet=1)
            assert abs(p.y + q.y) < 1e-14
            a = standard_basis_eval(spec, p)
            b = standard_basis_eval(spec, q)
            assert np.allclose(a.u, -b.u, rtol=1e-14, atol=0)
            assert np.allclose(a.du, -b.du, rtol=1e-13, atol=1e-300)


def test_branch_point_regularity(x6):
    """y-chart coefficients stay bounded approaching a branch point, and
    the x-chart values times dx/dy converge to them."""
    c = 1 + 0j
    at = standard_basis_eval(x6, CurvePoint(c, 0j, Chart.Y)).u
    for k in range(8):
        d = np.exp(2j * np.pi * k / 8)
        prev = np.inf
        for eps in (1e-2, 1e-4, 1e-6):
            p = make_point(x6, c + eps * d, chart=Chart.X)
            uy = standard_basis_eval(x6, to_chart(x6, p, Chart.Y)).u
            ux = standard_basis_eval(x6, p).u
            J, _ = transition_scale(x6, p, Chart.X, Chart.Y)
            assert np.linalg.norm(uy) < 1.0
            err = np.linalg.norm(ux * J - at)
            assert err < prev
            prev = err
        assert prev < 1e-5


def _covariance_error(spec, p, ca, cb):
    pa = to_chart(spec, p, ca)
    pb = to_chart(spec, p, cb)
    ra = standard_basis_eval(spec, pa)
    rb = standard_basis_eval(spec, pb)
    J, dJ = transition_scale(spec, p, ca, cb)
    e1 = np.linalg.norm(ra.u * J - rb.u) / np.linalg.norm(rb.u)
    e2 = np.linalg.norm(ra.du * J**2 + ra.u * dJ - rb.du) / (
        np.linalg.norm(rb.du) + np.linalg.norm(ra.u * dJ) + 1e-300
    )
    return e1, e2


coord = st.floats(-1.6, 1.6, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(re=coord, im=coord, sheet=st.integers(0, 1), n=st.sampled_from([5, 6, 8]))
def test_chart_covariance_hyperelliptic(re, im, sheet, n):
    spec = hyperelliptic(roots_minus_one(n))
    x = complex(re, im)
    if min(abs(x - b) for b in spec.branch_points) < 0.05 or abs(x) < 0.05:
        return
    p = make_point(spec, x, sheet=sheet, chart=Chart.X)
    for cb in (Chart.Y, Chart.INF):
        e1, e2 = _covariance_error(spec, p, Chart.X, cb)
        assert e1 < 1e-9 and e2 < 1e-9


@settings(max_examples=60, deadline=None)
@given(re=coord, im=coord, sheet=st.integers(0, 3))
def test_chart_covariance_quartic(re, im, sheet):
    spec = plane_quartic(FERMAT)
    x = complex(re, im)
    if min(abs(x - b) for b in spec.branch_points) < 0.05 or abs(x) < 0.05:
        return
    p = make_point(spec, x, sheet=sheet, chart=Chart.X)
    if abs(p.y) < 0.05:
        return
    for cb in (Chart.Y, Chart.INF):
        e1, e2 = _covariance_error(spec, p, Chart.X, cb)
        assert e1 < 1e-9 and e2 < 1e-9


def test_points_satisfy_equation(generic_quartic):
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = complex(*rng.uniform(-2, 2, 2))
        for s in range(4):
            p = make_point(generic_quartic, x, sheet=s)
            assert generic_quartic.finite.residual(p.x, p.y) < 1e-12
