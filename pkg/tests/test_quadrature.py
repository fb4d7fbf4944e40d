import numpy as np
import pytest

from curvcanon import QuadParams, Tolerances, construct_curve, gram_matrix, hyperelliptic
from curvcanon.errors import NoConvergence, SingularitySaturation
from curvcanon.l2 import gram_integrand
from curvcanon.quadrature import _bump, integrate, integrate_level, layout, ordered_map

from .conftest import FERMAT, roots_minus_one


def test_bump_is_partition_edge():
    t = np.linspace(-1, 2, 301)
    b = _bump(t)
    assert np.all(b[t <= 0] == 1) and np.all(b[t >= 1] == 0)
    assert np.all(np.diff(b) <= 0)


def test_ordered_map_keeps_order(monkeypatch):
    monkeypatch.setenv("CURVCANON_THREADS", "4")
    assert ordered_map(lambda v: v * v, range(50)) == [v * v for v in range(50)]


def test_patches_are_disjoint(x8, fermat):
    for spec in (x8, fermat):
        lay = layout(spec)
        c, r = lay.centers, lay.radii
        for i in range(len(c)):
            for j in range(i):
                assert abs(c[i] - c[j]) > r[i] + r[j]
        assert lay.R_far > lay.R > np.max(np.abs(c) + r)


def test_single_entry_integrand(x6):
    # sum over sheets of |u_1|^2 integrates to G_11
    val, rep = integrate(x6, lambda blk, b, pb: gram_integrand(blk, b, pb)[..., :1])
    assert rep.converged
    assert val[0].real == pytest.approx(10.21623143566511307, rel=1e-7)


def test_thread_count_does_not_change_bits(x6, monkeypatch):
    monkeypatch.setenv("CURVCANON_THREADS", "1")
    a, _ = integrate_level(x6, gram_integrand, 2)
    monkeypatch.setenv("CURVCANON_THREADS", "3")
    b, _ = integrate_level(x6, gram_integrand, 2)
    assert np.array_equal(a, b)


@pytest.mark.parametrize(
    "params",
    [
        QuadParams(radius_scale=0.5),  # half the default radius
        QuadParams(angle_offset=0.37),
        QuadParams(site_order=(5, 3, 1, 0, 2, 4)),
        QuadParams(far_radius=3.0),
        QuadParams(kappa=0.35),
    ],
    ids=["radius", "angle", "order", "far", "kappa"],
)
def test_layout_invariance(gram_x6, x6, params):
    G = gram_matrix(x6, params).G
    assert np.linalg.norm(G - gram_x6.G) < 1e-6 * np.linalg.norm(gram_x6.G)


def test_quartic_layout_invariance(fermat, gram_fermat):
    G = gram_matrix(fermat, QuadParams(radius_scale=0.7, angle_offset=0.5)).G
    assert np.linalg.norm(G - gram_fermat.G) < 1e-6 * np.linalg.norm(gram_fermat.G)


def test_no_convergence_carries_estimate(x6):
    with pytest.raises(NoConvergence) as exc:
        gram_matrix(x6, QuadParams(target_rel=1e-15, min_level=0, max_level=1))
    e = exc.value
    assert e.estimate is not None and e.rel_error > 1e-15
    assert e.report.converged is False


def test_saturation_on_near_collision():
    f = np.polynomial.polynomial.polyfromroots([0, 1e-11, 1, 2, -1, 1j])
    spec = construct_curve("hyperelliptic", list(f), Tolerances(root_sep=1e-14))
    with pytest.raises(SingularitySaturation):
        layout(spec)


def test_bad_radius_scale(x6):
    with pytest.raises(ValueError):
        layout(x6, QuadParams(radius_scale=2.0))


def test_far_radius_must_enclose_patches(x6):
    with pytest.raises(ValueError):
        layout(x6, QuadParams(far_radius=0.5))


def test_translated_curve():
    # translation maps the basis to a triangular combination of the old one
    spec = hyperelliptic(roots_minus_one(6))
    shift = 0.3 - 0.2j
    f = np.polynomial.polynomial.polyfromroots(np.array(spec.branch_points) + shift)
    moved = hyperelliptic(list(f))
    G0 = gram_matrix(spec).G
    G1 = gram_matrix(moved).G
    # basis (1, x) on the moved curve is (1, x' + shift) in the old coordinate
    Bm = np.array([[1, 0], [shift, 1]])
    assert np.allclose(G1, Bm @ G0 @ Bm.conj().T, rtol=1e-7, atol=1e-7)


def test_quartic_coefficient_scaling(gram_fermat):
    # F -> c F divides F_y, hence every basis form, by c
    from curvcanon import plane_quartic

    c = 2.0 + 1.0j
    G = gram_matrix(plane_quartic([c * z for z in FERMAT])).G
    assert np.allclose(G, gram_fermat.G / abs(c) ** 2, rtol=1e-7, atol=1e-9)
