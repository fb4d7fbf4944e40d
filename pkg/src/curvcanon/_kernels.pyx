# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_fallback`` for the reference semantics."""

import numpy as np
cimport cython
from libc.math cimport sqrt, fabs, cos, sin, hypot, M_PI


cdef inline double cabs(double complex z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef inline double complex _horner(const double complex* c, Py_ssize_t n,
                                   double complex z) noexcept nogil:
    cdef double complex acc = c[n]
    cdef Py_ssize_t j
    for j in range(n - 1, -1, -1):
        acc = acc * z + c[j]
    return acc


cdef inline double complex _dhorner(const double complex* c, Py_ssize_t n,
                                    double complex z) noexcept nogil:
    cdef double complex acc = n * c[n]
    cdef Py_ssize_t j
    for j in range(n - 1, 0, -1):
        acc = acc * z + j * c[j]
    return acc


def poly_roots(coeffs, init=None, int maxiter=80, double tol=1e-14):
    """All roots of each row polynomial (ascending coefficients), Aberth-Ehrlich."""
    cdef double complex[:, ::1] c = np.ascontiguousarray(coeffs, dtype=complex)
    cdef Py_ssize_t N = c.shape[0]
    cdef Py_ssize_t n = c.shape[1] - 1
    if n < 1:
        raise ValueError("coeffs must have shape (N, n+1) with n >= 1")
    out = np.empty((N, n), dtype=complex)
    cdef double complex[:, ::1] z = out
    cdef bint have_init = init is not None
    cdef double complex[:, ::1] z0
    if have_init:
        z0 = np.ascontiguousarray(init, dtype=complex)
    cdef Py_ssize_t i, k, j
    cdef int it
    cdef double bound, a
    cdef double complex p, dp, s, step, d
    cdef bint done
    with nogil:
        for i in range(N):
            if have_init:
                for k in range(n):
                    z[i, k] = z0[i, k]
            else:
                # Fujiwara-type radius, points spread on a circle
                bound = 0.0
                for k in range(n):
                    a = (cabs(c[i, k]) / cabs(c[i, n])) ** (1.0 / (n - k))
                    if a > bound:
                        bound = a
                bound = 2.0 * bound if bound > 0 else 1.0
                for k in range(n):
                    a = 2.0 * M_PI * k / n + 0.4
                    z[i, k].real = bound * cos(a)
                    z[i, k].imag = bound * sin(a)
            for it in range(maxiter):
                done = True
                for k in range(n):
                    p = _horner(&c[i, 0], n, z[i, k])
                    dp = _dhorner(&c[i, 0], n, z[i, k])
                    s = 0
                    for j in range(n):
                        if j != k:
                            d = z[i, k] - z[i, j]
                            if d != 0:
                                s = s + 1.0 / d
                    d = dp - p * s
                    if d != 0:
                        step = p / d
                    else:
                        step = 0
                    z[i, k] = z[i, k] - step
                    if cabs(step) > tol * cabs(z[i, k]):
                        done = False
                if done:
                    break
    return out


def frame_curvature(u, du):
    """Metric density, Gaussian curvature and degeneracy per row."""
    u = np.asarray(u, dtype=complex)
    shape = u.shape[:u.ndim - 1]
    width = u.shape[u.ndim - 1]
    cdef double complex[:, ::1] U = np.ascontiguousarray(u).reshape(-1, width)
    cdef double complex[:, ::1] D = np.ascontiguousarray(du, dtype=complex).reshape(-1, width)
    cdef Py_ssize_t M = U.shape[0], g = U.shape[1], m, k
    lam_a = np.empty(M)
    theta_a = np.empty(M)
    deg_a = np.empty(M)
    cdef double[::1] lam = lam_a, theta = theta_a, deg = deg_a
    cdef double nu, perp
    cdef double complex cross, coef, r
    with nogil:
        for m in range(M):
            nu = 0.0
            cross = 0
            for k in range(g):
                nu += U[m, k].real ** 2 + U[m, k].imag ** 2
                cross = cross + D[m, k] * U[m, k].conjugate()
            lam[m] = nu
            # distance of du from the line through u
            coef = cross / nu
            perp = 0.0
            for k in range(g):
                r = D[m, k] - coef * U[m, k]
                perp += r.real ** 2 + r.imag ** 2
            theta[m] = -2.0 * perp / (nu * nu)
            deg[m] = sqrt(perp) / nu
    return lam_a.reshape(shape), theta_a.reshape(shape), deg_a.reshape(shape)


def weighted_column_sums(values, weights):
    """Neumaier-compensated sum_n w[n] * V[n, k] per column, in row order."""
    cdef double[:, ::1] V = np.ascontiguousarray(values, dtype=float)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=float)
    cdef Py_ssize_t N = V.shape[0], K = V.shape[1], n, k
    out = np.zeros(K)
    cdef double[::1] acc = out
    comp_a = np.zeros(K)
    cdef double[::1] comp = comp_a
    cdef double x, t
    with nogil:
        for n in range(N):
            for k in range(K):
                x = V[n, k] * w[n]
                t = acc[k] + x
                if fabs(acc[k]) >= fabs(x):
                    comp[k] += (acc[k] - t) + x
                else:
                    comp[k] += (x - t) + acc[k]
                acc[k] = t
        for k in range(K):
            acc[k] += comp[k]
    return out
