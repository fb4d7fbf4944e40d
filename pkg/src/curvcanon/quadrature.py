"""Quadrature over the whole curve.

The x-sphere is split by a smooth partition of unity:

* a disk patch around every finite branch value, in polar coordinates
  centred at the branch value.  The inner part uses ``r = r0 * s**E`` with
  ``E`` the ramification order so the integrand is smooth in ``s``; the
  outer annulus carries a C-infinity cut-off ``chi``;
* the mid field, weighted by ``1 - sum(chi) - chi_far``, on an adaptive
  quadtree of squares with tensor Gauss-Legendre nodes; squares shrink
  towards the branch values in proportion to the distance;
* a far-field disk ``|w| < 1/R`` in the coordinate ``w = 1/x``, handled
  in the second affine model (so no Jacobian blow-up at ``x = infinity``),
  with a smooth radial cut-off ``chi_far`` between ``R`` and ``1.5 R``.

Patches and the far disk use Gauss-Legendre panels in the radius and the
trapezoid rule in the angle.  Every integrand is smooth in its own
coordinates, so the error decays spectrally.  Resolution doubles per level
until two levels agree to ``target_rel``.  Sums are compensated and always
taken in the same order, which makes results bit-reproducible for a fixed
backend and independent of the thread count.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import kernels
from .errors import NoConvergence, SingularitySaturation

INNER_FRACTION = 0.2  # fraction of the patch radius using the s**E map
PATCH_FRACTION = 0.45  # patch radius over the distance to the nearest site
FAR_RATIO = 1.5  # far-field cut-off runs from R to FAR_RATIO * R
BLOCK = 1 << 15  # samples per work unit


@dataclass(frozen=True)
class QuadParams:
    """Quadrature controls.

    Attributes
    ----------
    target_rel : float
        Stop when successive levels differ by less than this (relative,
        Frobenius norm).
    max_level : int
        Highest refinement level tried.
    far_radius : float or None
        Radius ``R`` where the far-field cut-off starts (it ends at
        ``1.5 R``); ``None`` picks it from the branch values.
    radial_nodes, angular_nodes : int
        Level-0 nodes per radial panel and per full turn.
    radius_scale : float
        Multiplies every patch radius; must lie in ``(0, 1.1]`` so that
        patches stay disjoint.
    angle_offset : float
        Rotation, in units of one angular step, of all angular grids.
    site_order : sequence of int or None
        Order in which the patches are visited (for reproducibility tests).
    min_level : int
        First level evaluated.
    square_nodes : int
        Level-0 Gauss-Legendre nodes per side of a mid-field square.
    kappa : float
        Mid-field square side over the local feature size.
    """

    target_rel: float = 1e-7
    max_level: int = 6
    far_radius: float = None
    radial_nodes: int = 8
    angular_nodes: int = 16
    radius_scale: float = 1.0
    angle_offset: float = 0.0
    site_order: tuple = None
    min_level: int = 1
    square_nodes: int = 4
    kappa: float = 0.5


@dataclass
class QuadReport:
    level: int
    rel_change: float
    n_samples: int
    converged: bool
    history: list = field(default_factory=list)


def thread_count():
    env = os.environ.get("CURVCANON_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ordered_map(fn, items):
    """``[fn(x) for x in items]`` on up to ``CURVCANON_THREADS`` threads."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _bump(t):
    # smooth step, 1 at t <= 0 and 0 at t >= 1
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
        b = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
    return a / (a + b)


def _gl(lo, hi, n):
    x, w = leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


@dataclass
class Block:
    """Sample points in one model with their area weights."""

    model: object
    a: np.ndarray
    weight: np.ndarray
    site: object = None
    part: str = "mid"
    delta: np.ndarray = None  # exact offset from the site centre (patches)


@dataclass(frozen=True)
class Layout:
    centers: np.ndarray
    radii: np.ndarray
    orders: tuple
    sites: tuple
    R: float  # inner edge of the far-field cut-off
    R_far: float  # outer edge; the mid field lives in |x| < R_far
    inf_order: int
    leaves: tuple


def layout(spec, params=None):
    """Patch centres and radii, mid-field radius and the order at infinity."""
    params = params or QuadParams()
    sites = spec.sites
    centers = np.array([s.center for s in sites], dtype=complex)
    n = len(centers)
    if n > 1:
        d = np.abs(centers[:, None] - centers[None, :])
        d[np.arange(n), np.arange(n)] = np.inf
        radii = PATCH_FRACTION * d.min(axis=1)
    else:
        radii = np.full(n, PATCH_FRACTION * max(1.0, float(np.abs(centers).max(initial=0.0))))
    if not 0 < params.radius_scale <= 0.5 / PATCH_FRACTION:
        raise ValueError("radius_scale must lie in (0, 1.1]")
    radii = radii * params.radius_scale
    scale = 1.0 + float(np.abs(centers).max(initial=0.0))
    if n and radii.min() < 1e-9 * scale:
        raise SingularitySaturation(
            f"branch values {radii.min() / PATCH_FRACTION:.3g} apart: too close to resolve"
        )
    R = 1.1 * float(np.max(np.abs(centers) + radii, initial=1.0))
    if params.far_radius is not None:
        if params.far_radius < float(np.max(np.abs(centers) + radii, initial=0.0)):
            raise ValueError("far_radius must enclose every branch patch")
        R = float(params.far_radius)
    inf_order = spec.inf_site.order if spec.inf_site is not None else 1
    lay = Layout(
        centers, radii, tuple(s.order for s in sites), tuple(sites), R, FAR_RATIO * R, inf_order, ()
    )
    return replace(lay, leaves=tuple(_quadtree(lay, params.kappa)))


def _angles(nt, offset):
    th = 2.0 * np.pi * (np.arange(nt) + offset) / nt
    return np.exp(1j * th), 2.0 * np.pi / nt


def _chunks(model, a, w, site, part, delta=None):
    keep = w != 0
    a = a[keep]
    w = w[keep]
    if delta is not None:
        delta = delta[keep]
    return [
        Block(
            model,
            a[i : i + BLOCK],
            w[i : i + BLOCK],
            site,
            part,
            None if delta is None else delta[i : i + BLOCK],
        )
        for i in range(0, a.size, BLOCK)
    ]


def _quadtree(lay, kappa):
    """Leaf squares ``(cx, cy, half)`` covering the mid field, depth-first.

    A square is split while its side exceeds ``kappa`` times the local
    feature size ``min_k max(dist(square, c_k), rho_k)``.  Squares inside an
    inner patch disk or outside the far-field radius are dropped.
    """
    fr = INNER_FRACTION
    c = lay.centers
    rho = lay.radii
    leaves = []
    stack = [(0.0, 0.0, lay.R_far)]
    while stack:
        cx, cy, h = stack.pop()
        dx = np.maximum(np.abs(c.real - cx) - h, 0.0)
        dy = np.maximum(np.abs(c.imag - cy) - h, 0.0)
        near = np.hypot(dx, dy)
        far = np.hypot(np.abs(c.real - cx) + h, np.abs(c.imag - cy) + h)
        if np.any(far < fr * rho):
            continue
        if np.hypot(max(abs(cx) - h, 0.0), max(abs(cy) - h, 0.0)) >= lay.R_far:
            continue
        size = np.min(np.maximum(near, rho)) if c.size else lay.R_far
        if 2 * h > kappa * size and h > 1e-12 * lay.R_far:
            q = h / 2
            # reversed so that pops come out in a fixed quadrant order
            for sx, sy in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
                stack.append((cx + sx * q, cy + sy * q, q))
            continue
        leaves.append((cx, cy, h))
    return leaves


def _far_cut(absx, lay):
    # weight of the far-field piece as a function of |x|
    return 1.0 - _bump((absx - lay.R) / (lay.R_far - lay.R))


def build_blocks(spec, level, params=None, lay=None):
    """Quadrature blocks at a refinement level."""
    params = params or QuadParams()
    lay = lay or layout(spec, params)
    nr = params.radial_nodes * 2**level
    nt = params.angular_nodes * 2**level
    ring, wt = _angles(nt, params.angle_offset)
    fr = INNER_FRACTION
    blocks = []

    order = params.site_order if params.site_order is not None else range(len(lay.sites))
    for k in order:
        c, rho, E, site = lay.centers[k], lay.radii[k], lay.orders[k], lay.sites[k]
        s, ws = _gl(0.0, 1.0, nr)
        r1 = fr * rho * s**E
        w1 = ws * fr * rho * E * s ** (E - 1)
        r2, w2 = _gl(fr * rho, rho, nr)
        w2 = w2 * _bump((r2 - fr * rho) / ((1 - fr) * rho))
        r = np.concatenate([r1, r2])
        wr = np.concatenate([w1, w2]) * r * wt
        delta = r[:, None] * ring[None, :]
        w = np.broadcast_to(wr[:, None], delta.shape)
        blocks += _chunks(
            spec.finite, (c + delta).ravel(), w.ravel(), site, "patch", delta.ravel()
        )

    # mid field: tensor Gauss-Legendre on quadtree squares
    nq = params.square_nodes * 2**level
    xg, wg = leggauss(nq)
    gx = (xg[:, None] + 1j * xg[None, :]).ravel()
    gw = (wg[:, None] * wg[None, :]).ravel()
    leaves = lay.leaves
    a = np.concatenate([complex(cx, cy) + h * gx for cx, cy, h in leaves])
    w = np.concatenate([h * h * gw for _, _, h in leaves])
    cover = _far_cut(np.abs(a), lay)
    for c, rho in zip(lay.centers, lay.radii):
        d = np.abs(a - c)
        near = d < rho
        cover[near] += _bump((d[near] - fr * rho) / ((1 - fr) * rho))
    w = w * (1.0 - cover)
    w[cover >= 1.0 - 1e-15] = 0.0
    blocks += _chunks(spec.finite, a, w, None, "mid")

    # far field in w = 1/x: full weight for |w| < 1/R_far, cut-off beyond
    E = lay.inf_order
    s, ws = _gl(0.0, 1.0, nr)
    r1 = s**E / lay.R_far
    w1 = ws * E * s ** (E - 1) / lay.R_far
    r2, w2 = _gl(1.0 / lay.R_far, 1.0 / lay.R, nr)
    w2 = w2 * _far_cut(1.0 / r2, lay)
    r = np.concatenate([r1, r2])
    wr = np.concatenate([w1, w2]) * r * wt
    a = r[:, None] * ring[None, :]
    w = np.broadcast_to(wr[:, None], a.shape)
    blocks += _chunks(spec.infinity, a.ravel(), w.ravel(), spec.inf_site, "far", a.ravel())
    return blocks


def _reduce(block_sums):
    block_sums = np.array(block_sums)
    return np.array([math.fsum(block_sums[:, k]) for k in range(block_sums.shape[1])])


def integrate_level(spec, integrand, level, params=None, lay=None):
    """One-level estimate of ``sum over sheets of integral(integrand dA)``.

    ``integrand(block, b, pb)`` returns an array ``(n, sheets, m)`` (real or
    complex) given the fibre coordinates ``b`` and ``P_b`` of the block.
    Returns a flat complex array of length ``m`` and the sample count.
    """
    blocks = build_blocks(spec, level, params, lay)

    def work(blk):
        b, pb = blk.model.sheets(blk.a, blk.site, blk.delta)
        vals = np.asarray(integrand(blk, b, pb)).sum(axis=1)
        vals = np.ascontiguousarray(vals, dtype=complex)
        flat = vals.view(float).reshape(vals.shape[0], -1)
        return kernels.weighted_column_sums(flat, blk.weight)

    sums = ordered_map(work, blocks)
    tot = _reduce(sums).view(complex)
    return tot, sum(b.a.size for b in blocks)


def integrate(spec, integrand, params=None, raise_on_fail=True):
    """Refine levels until two successive estimates agree.

    Returns
    -------
    value : ndarray
    report : QuadReport

    Raises
    ------
    NoConvergence
        If ``max_level`` is reached first (the best estimate is attached).
    """
    params = params or QuadParams()
    lay = layout(spec, params)
    prev = None
    history = []
    rel = np.inf
    total = 0
    for level in range(params.min_level, params.max_level + 1):
        val, n = integrate_level(spec, integrand, level, params, lay)
        total = n
        if prev is not None:
            rel = float(np.linalg.norm(val - prev) / max(np.linalg.norm(val), 1e-300))
            history.append((level, rel))
            if rel < params.target_rel:
                return val, QuadReport(level, rel, n, True, history)
        prev = val
    report = QuadReport(params.max_level, rel, total, False, history)
    if raise_on_fail:
        raise NoConvergence(
            f"quadrature did not reach rel {params.target_rel:g} by level {params.max_level} "
            f"(last change {rel:.3g})",
            estimate=prev,
            rel_error=rel,
            report=report,
        )
    return prev, report
