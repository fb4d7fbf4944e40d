import numpy as np
import pytest

from curvcanon import _fallback, kernels

compiled = pytest.importorskip("curvcanon._kernels")


def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "compiled"


def test_frame_curvature_backends_agree():
    rng = np.random.default_rng(0)
    u = rng.normal(size=(500, 3)) + 1j * rng.normal(size=(500, 3))
    du = rng.normal(size=(500, 3)) + 1j * rng.normal(size=(500, 3))
    du[:50] = (0.3 + 1j) * u[:50]  # parallel rows: theta exactly 0
    a = _fallback.frame_curvature(u, du)
    b = compiled.frame_curvature(u, du)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-14)
    assert np.all(b[1] <= 0)


def test_weighted_sums_backends_agree():
    rng = np.random.default_rng(1)
    V = rng.normal(size=(1000, 4)) * 10.0 ** rng.integers(-8, 8, size=(1000, 1))
    w = rng.uniform(size=1000)
    a = _fallback.weighted_column_sums(V, w)
    b = compiled.weighted_column_sums(V, w)
    assert np.allclose(a, b, rtol=1e-14, atol=0)


def test_poly_roots_backends_agree():
    rng = np.random.default_rng(2)
    c = rng.normal(size=(40, 6)) + 1j * rng.normal(size=(40, 6))
    a = np.sort_complex(_fallback.poly_roots(c))
    b = np.sort_complex(compiled.poly_roots(c))
    assert np.allclose(a, b, atol=1e-12)
    for row, roots in zip(c, b):
        assert np.allclose(np.polynomial.polynomial.polyval(roots, row), 0, atol=1e-10)


def test_pure_backend_switch(monkeypatch):
    import importlib

    monkeypatch.setenv("CURVCANON_PURE", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
        assert mod.frame_curvature is _fallback.frame_curvature
    finally:
        monkeypatch.delenv("CURVCANON_PURE")
        importlib.reload(kernels)
