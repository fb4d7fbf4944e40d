"""Pure numpy implementations of the hot kernels.

These mirror the compiled ``_kernels`` module call for call and are used
when the extension is not built (or when ``CURVCANON_PURE=1``).
"""

import math

import numpy as np


def _companion_eigvals(coeffs):
    n = coeffs.shape[1] - 1
    monic = coeffs[:, :n] / coeffs[:, n:]
    comp = np.zeros((coeffs.shape[0], n, n), dtype=complex)
    comp[:, np.arange(1, n), np.arange(n - 1)] = 1.0
    comp[:, :, n - 1] = -monic
    return np.linalg.eigvals(comp)


def _horner(c, z):
    # c: (M, n+1) ascending, z: (M, k)
    out = np.broadcast_to(c[:, -1:], z.shape).astype(complex)
    for j in range(c.shape[1] - 2, -1, -1):
        out = out * z + c[:, j : j + 1]
    return out


def poly_roots(coeffs, init=None, maxiter=80, tol=1e-14):
    """All roots of each row polynomial (ascending coefficients).

    Starts from companion-matrix eigenvalues unless ``init`` is given and
    polishes with Aberth-Ehrlich iterations on the given coefficients, so
    accuracy is governed by how well the coefficients themselves are known.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=complex)
    if coeffs.ndim != 2 or coeffs.shape[1] < 2:
        raise ValueError("coeffs must have shape (N, n+1) with n >= 1")
    z = _companion_eigvals(coeffs) if init is None else np.array(init, dtype=complex)
    n = coeffs.shape[1] - 1
    dcoeffs = coeffs[:, 1:] * np.arange(1, n + 1)
    active = np.arange(coeffs.shape[0])
    off = ~np.eye(n, dtype=bool)
    for _ in range(maxiter):
        if active.size == 0:
            break
        za = z[active]
        p = _horner(coeffs[active], za)
        dp = _horner(dcoeffs[active], za)
        diff = za[:, :, None] - za[:, None, :]
        inv = np.zeros_like(diff)
        mask = off[None] & (diff != 0)
        inv[mask] = 1.0 / diff[mask]
        denom = dp - p * inv.sum(axis=2)
        step = np.zeros_like(za)
        ok = denom != 0
        step[ok] = p[ok] / denom[ok]
        z[active] = za - step
        done = np.all(np.abs(step) <= tol * np.abs(za - step), axis=1)
        active = active[~done]
    return z


def frame_curvature(u, du):
    """Metric density, Gaussian curvature and degeneracy per row."""
    u = np.asarray(u, dtype=complex)
    du = np.asarray(du, dtype=complex)
    nu = np.einsum("...k,...k->...", u, u.conj()).real
    cross = np.einsum("...k,...k->...", du, u.conj())
    # |u|^2 |du|^2 - |<du,u>|^2 = |u|^2 |du_perp|^2, summed without cancellation
    perp = du - (cross / nu)[..., None] * u
    theta = -2.0 * np.einsum("...k,...k->...", perp, perp.conj()).real / nu**2
    sv = np.linalg.svd(np.stack([u, du], axis=-2), compute_uv=False)
    degeneracy = sv[..., 0] * sv[..., 1] / nu**1.5
    return nu, theta, degeneracy


def weighted_column_sums(values, weights):
    """Compensated sum_n w[n] * V[n, k] for each column k, in row order."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    prod = values * weights[:, None]
    return np.array([math.fsum(prod[:, k]) for k in range(prod.shape[1])])
