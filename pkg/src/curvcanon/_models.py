"""Affine models of the supported curve families.

A model is a plane affine curve ``P(a, b) = 0`` seen as a branched cover of
the ``a``-line, together with the numerators of the standard basis of
holomorphic 1-forms written in the ``a`` coordinate.  Every curve carries two
models: the finite one (``a = x``) and the one at infinity (``a = 1/x``), so
the whole surface is covered by two disks in the ``a``-planes.

Coefficient evaluation is vectorized over arrays of points.  Two charts are
offered on each model: the ``"a"`` chart (coordinate ``a``, valid where
``P_b != 0``) and the ``"b"`` chart (coordinate ``b``, valid where
``P_a != 0``).
"""

from dataclasses import dataclass
from math import comb, gcd

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels
from .errors import SingularCurve, SingularitySaturation


@dataclass(frozen=True)
class Cluster:
    """A ramification point over a site: fibre coordinate and multiplicity."""

    center: complex
    mult: int
    # Taylor coefficients of P around (site, center); P[0, j] = 0 for j < mult
    local: np.ndarray = None


@dataclass(frozen=True)
class Site:
    """A branch value of the projection to the ``a``-line."""

    center: complex
    order: int  # lcm of the ramification indices above ``center``
    clusters: tuple = ()


def _lcm(values):
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def _single_link(values, tol):
    """Group complex numbers whose chain distance is below ``tol``."""
    values = list(values)
    groups = []
    for v in values:
        hit = [gr for gr in groups if min(abs(v - w) for w in gr) < tol]
        merged = [v]
        for gr in hit:
            merged.extend(gr)
            groups.remove(gr)
        groups.append(merged)
    return groups


def _safe_power_deriv(a, e):
    # e * a**(e-1) without 0 * inf at a = 0
    e = np.asarray(e)
    out = np.zeros(np.broadcast(a, e).shape, dtype=complex)
    nz = np.broadcast_to(e != 0, out.shape)
    full = np.broadcast_to(e * a ** np.maximum(e - 1, 0), out.shape)
    out[nz] = full[nz]
    return out


class HyperellipticModel:
    """``b**2 = f(a)`` with basis ``sign * a**e_k da / b``."""

    kind = "hyperelliptic"
    nsheets = 2

    def __init__(self, f, roots, exponents, sign):
        self.f = np.trim_zeros(np.asarray(f, dtype=complex), "b")
        self.df = npoly.polyder(self.f)
        self.d2f = npoly.polyder(self.df)
        self.roots = np.asarray(roots, dtype=complex)
        self.lead = self.f[-1]
        self.exponents = np.asarray(exponents)
        self.sign = sign
        self.g = len(exponents)

    def residual(self, a, b):
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        scale = np.abs(b) ** 2 + npoly.polyval(np.abs(a), np.abs(self.f))
        num = np.abs(b * b - npoly.polyval(a, self.f))
        # scale == 0 only at a = b = 0 on a model through the origin
        return num / np.where(scale > 0, scale, 1.0)

    def partials(self, a, b):
        return -npoly.polyval(a, self.df), 2.0 * np.asarray(b, dtype=complex)

    def sheets(self, a, site=None, delta=None):
        """Both square roots of ``f(a)``, via the factored form of ``f``.

        ``delta = a - site.center`` may be passed exactly when ``a`` is too
        close to the branch value for the subtraction to be accurate.
        """
        a = np.asarray(a, dtype=complex)
        diff = a[..., None] - self.roots
        if site is not None and delta is not None:
            k = int(np.argmin(np.abs(self.roots - site.center)))
            diff[..., k] = delta
        val = self.lead * np.prod(diff, axis=-1)
        s = np.sqrt(val)
        b = np.stack([s, -s], axis=-1)
        return b, 2.0 * b

    def solve_a(self, b, a0, iters=40):
        a = complex(a0)
        target = complex(b) ** 2
        for _ in range(iters):
            step = (npoly.polyval(a, self.f) - target) / npoly.polyval(a, self.df)
            a -= step
            if abs(step) <= 1e-15 * max(1.0, abs(a)):
                break
        return a

    def raw(self, a, b, chart, pb=None):
        """Standard-basis coefficients ``u`` and their chart derivative ``du``."""
        a = np.asarray(a, dtype=complex)[..., None]
        b = np.asarray(b, dtype=complex)[..., None]
        e = self.exponents
        s = self.sign
        pw = a**e
        dpw = _safe_power_deriv(a, e)
        fp = npoly.polyval(a, self.df)
        if chart == "a":
            u = s * pw / b
            du = s * (dpw / b - pw * fp / (2.0 * b**3))
        else:
            fpp = npoly.polyval(a, self.d2f)
            u = 2.0 * s * pw / fp
            du = (2.0 * b / fp) * 2.0 * s * (dpw * fp - pw * fpp) / fp**2
        return u, du

    def b_chart_derivs(self, a, b):
        """``da/db`` and ``d2a/db2`` along the curve."""
        fp = npoly.polyval(a, self.df)
        fpp = npoly.polyval(a, self.d2f)
        return 2.0 * b / fp, 2.0 / fp - 4.0 * b * b * fpp / fp**3

    def branch_sites(self):
        return [Site(complex(r), 2, (Cluster(0j, 2),)) for r in self.roots]


def _quartic_derivs(A):
    Aa = npoly.polyder(A, axis=0)
    Ab = npoly.polyder(A, axis=1)
    return {
        "a": Aa,
        "b": Ab,
        "aa": npoly.polyder(Aa, axis=0),
        "ab": npoly.polyder(Aa, axis=1),
        "bb": npoly.polyder(Ab, axis=1),
    }


def _taylor_shift(A, a0, b0):
    """Coefficients of ``P(a0 + s, b0 + t)`` as a matrix in ``(s, t)``."""
    n, m = A.shape
    out = np.zeros_like(A, dtype=complex)
    for k in range(n):
        for l in range(m):
            c = A[k, l]
            if c == 0:
                continue
            for i in range(k + 1):
                for j in range(l + 1):
                    out[i, j] += c * comb(k, i) * comb(l, j) * a0 ** (k - i) * b0 ** (l - j)
    return out


class QuarticModel:
    """Plane quartic ``P(a, b) = 0``, basis ``M @ (1, a, b) da / P_b``."""

    kind = "plane_quartic"
    nsheets = 4
    g = 3

    def __init__(self, A, numer):
        self.A = np.asarray(A, dtype=complex)
        self.numer = np.asarray(numer, dtype=float)
        self.d = _quartic_derivs(self.A)
        self.lead = self.A[0, 4]

    def _val(self, key, a, b):
        C = self.A if key is None else self.d[key]
        a, b = np.broadcast_arrays(a, b)
        return npoly.polyval2d(a, b, C)

    def residual(self, a, b):
        a = np.asarray(a, dtype=complex)
        a, b = np.broadcast_arrays(a, np.asarray(b, dtype=complex))
        scale = npoly.polyval2d(np.abs(a), np.abs(b), np.abs(self.A))
        return np.abs(self._val(None, a, b)) / scale

    def partials(self, a, b):
        return self._val("a", a, b), self._val("b", a, b)

    def fiber_coeffs(self, a):
        a = np.asarray(a, dtype=complex)
        return np.stack([npoly.polyval(a, self.A[:, j]) for j in range(5)], axis=-1)

    def _pb_from_roots(self, roots, rel=None):
        # P_b at each root as lead * prod(b_s - b_t); ``rel`` carries accurate
        # within-cluster offsets so close roots keep their relative accuracy
        diff = roots[..., :, None] - roots[..., None, :]
        if rel is not None:
            same, eta = rel
            d2 = eta[..., :, None] - eta[..., None, :]
            diff = np.where(same, d2, diff)
        n = roots.shape[-1]
        diff[..., np.arange(n), np.arange(n)] = 1.0
        return self.lead * np.prod(diff, axis=-1)

    def sheets(self, a, site=None, delta=None):
        """All four fibre roots over each ``a`` plus ``P_b`` at them.

        Near a site the roots come from the Taylor expansion about each
        ramification point, in the exact offset ``delta = a - site.center``
        when given.
        """
        a = np.asarray(a, dtype=complex)
        shape = a.shape
        flat = a.ravel()
        if site is None or not site.clusters:
            b = kernels.poly_roots(self.fiber_coeffs(flat))
            pb = self._pb_from_roots(b)
            return b.reshape(shape + (4,)), pb.reshape(shape + (4,))
        if delta is None:
            delta = flat - site.center
        else:
            delta = np.asarray(delta, dtype=complex).ravel()
        label = np.full((flat.size, 4), -1)
        eta = np.zeros((flat.size, 4), dtype=complex)
        b = None
        for ci, cl in enumerate(site.clusters):
            q = np.stack([npoly.polyval(delta, cl.local[:, j]) for j in range(5)], axis=-1)
            loc = kernels.poly_roots(q)
            order = np.argsort(np.abs(loc), axis=1, kind="stable")[:, : cl.mult]
            if b is None:
                b = cl.center + loc
                rows = np.arange(flat.size)[:, None]
                label[rows, order] = ci
                eta[rows, order] = loc[rows, order]
                continue
            # replace the roots nearest to this cluster by its accurate ones
            rows = np.arange(flat.size)[:, None]
            near = np.argsort(np.abs(b - cl.center), axis=1, kind="stable")[:, : cl.mult]
            if np.any(label[rows, near] >= 0):
                raise SingularitySaturation(
                    "ramification clusters over one branch value overlap inside the patch"
                )
            b[rows, near] = cl.center + loc[rows, order]
            label[rows, near] = ci
            eta[rows, near] = loc[rows, order]
        same = (label[:, :, None] == label[:, None, :]) & (label[:, :, None] >= 0)
        pb = self._pb_from_roots(b, rel=(same, eta))
        return b.reshape(shape + (4,)), pb.reshape(shape + (4,))

    def solve_a(self, b, a0, iters=40):
        a = complex(a0)
        for _ in range(iters):
            step = self._val(None, a, b) / self._val("a", a, b)
            a -= step
            if abs(step) <= 1e-15 * max(1.0, abs(a)):
                break
        return a

    def raw(self, a, b, chart, pb=None):
        a, b = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
        Pa = self._val("a", a, b)
        Pb = self._val("b", a, b) if pb is None else np.asarray(pb, dtype=complex)
        one = np.ones_like(a)
        nvec = np.stack([one, a, b], axis=-1)
        num = nvec @ self.numer.T
        if chart == "a":
            bp = -Pa / Pb
            dnum = np.stack([0 * one, one, bp], axis=-1) @ self.numer.T
            dPb = self._val("ab", a, b) + self._val("bb", a, b) * bp
            u = num / Pb[..., None]
            du = dnum / Pb[..., None] - num * (dPb / Pb**2)[..., None]
        else:
            ap = -Pb / Pa
            dnum = np.stack([0 * one, ap, one], axis=-1) @ self.numer.T
            dPa = self._val("aa", a, b) * ap + self._val("ab", a, b)
            u = -num / Pa[..., None]
            du = -(dnum / Pa[..., None] - num * (dPa / Pa**2)[..., None])
        return u, du

    def b_chart_derivs(self, a, b):
        Pa = self._val("a", a, b)
        Pb = self._val("b", a, b)
        p = -Pb / Pa
        q = -(
            (self._val("ab", a, b) * p + self._val("bb", a, b)) * Pa
            - Pb * (self._val("aa", a, b) * p + self._val("ab", a, b))
        ) / Pa**2
        return p, q

    # -- ramification --------------------------------------------------------

    def fiber_clusters(self, a0, tol=1e-3):
        """Multiple roots of the fibre over ``a0``, polished, as Clusters."""
        roots = kernels.poly_roots(self.fiber_coeffs(np.array([a0])))[0]
        scale = max(1.0, float(np.max(np.abs(roots))))
        out = []
        for grp in _single_link(roots, tol * scale):
            if len(grp) < 2:
                continue
            out.append((complex(np.mean(grp)), len(grp)))
        return out

    def _polish_point(self, a, b, m, fixed_a=False, iters=60):
        # Newton on (P, d^{m-1}P/db^{m-1}), which is regular at an m-fold
        # vertical-tangency point of a smooth curve
        Dm = self.A
        for _ in range(m - 1):
            Dm = npoly.polyder(Dm, axis=1)
        Dm_a = npoly.polyder(Dm, axis=0)
        Dm_b = npoly.polyder(Dm, axis=1)
        for _ in range(iters):
            if fixed_a:
                step_b = npoly.polyval2d(a, b, Dm) / npoly.polyval2d(a, b, Dm_b)
                b -= step_b
                if abs(step_b) <= 1e-15 * max(1.0, abs(b)):
                    break
                continue
            F = self._val(None, a, b)
            H = npoly.polyval2d(a, b, Dm)
            J = np.array(
                [
                    [self._val("a", a, b), self._val("b", a, b)],
                    [npoly.polyval2d(a, b, Dm_a), npoly.polyval2d(a, b, Dm_b)],
                ]
            )
            try:
                da, db = np.linalg.solve(J, -np.array([F, H]))
            except np.linalg.LinAlgError:
                break
            a += da
            b += db
            if abs(da) + abs(db) <= 1e-15 * max(1.0, abs(a) + abs(b)):
                break
        return complex(a), complex(b)

    def make_site(self, a0, clusters, fixed_a=False, smooth_tol=1e-8):
        polished = []
        for yc, m in clusters:
            a, b = self._polish_point(a0, yc, m, fixed_a=fixed_a)
            if not fixed_a and abs(a - a0) > 1e-6 * max(1.0, abs(a0)):
                raise SingularCurve(f"ramification point near a={a0} failed to polish")
            polished.append((a, b, m))
        a_site = complex(np.mean([p[0] for p in polished])) if polished else a0
        if fixed_a:
            a_site = a0
        out = []
        for _, b, m in polished:
            local = _taylor_shift(self.A, a_site, b)
            local[0, :m] = 0.0
            grad = abs(local[1, 0])
            scale = np.abs(self.A).max() * max(1.0, abs(a_site), abs(b)) ** 3
            if grad <= smooth_tol * scale:
                raise SingularCurve(
                    f"curve is singular at ({a_site:.6g}, {b:.6g}): both partials vanish"
                )
            out.append(Cluster(b, m, local))
        return Site(a_site, _lcm(c.mult for c in out), tuple(out))

    def discriminant_roots(self, radius=1.0, nsamp=64):
        """Roots of Res_b(P, P_b) as a polynomial in ``a`` (degree <= 12)."""
        ak = radius * np.exp(2j * np.pi * np.arange(nsamp) / nsamp)
        c = self.fiber_coeffs(ak)  # (N, 5) ascending in b
        dc = c[:, 1:] * np.arange(1, 5)
        S = np.zeros((nsamp, 7, 7), dtype=complex)
        for r in range(3):
            S[:, r, r : r + 5] = c[:, ::-1]
        for r in range(4):
            S[:, 3 + r, r : r + 4] = dc[:, ::-1]
        vals = np.linalg.det(S)
        coef = np.fft.fft(vals) / nsamp / radius ** np.arange(nsamp)
        coef = coef[:13]
        big = np.abs(coef).max()
        coef[np.abs(coef) < 1e-11 * big] = 0.0
        coef = np.trim_zeros(coef, "b")
        if coef.size <= 1:
            return np.array([], dtype=complex)
        return npoly.polyroots(coef)
