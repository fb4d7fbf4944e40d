"""L2 Gram matrix of the standard 1-form basis and its orthonormalizer.

The inner product is ``(i/2) * integral(theta_1 ^ conj(theta_2))``, which is
positive definite because ``(i/2) dx ^ conj(dx)`` is the area element.  In a
chart where ``theta = u(x) dx`` the integrand is ``u_j * conj(u_k) dA``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite
from .quadrature import QuadParams, QuadReport, integrate


@dataclass(frozen=True)
class GramData:
    """Gram matrix ``G`` with ``T`` upper triangular and ``T G T^H = I``.

    Attributes
    ----------
    G : ndarray, shape (g, g)
    T : ndarray, shape (g, g)
    quad_report : QuadReport or None
    min_eigenvalue : float
    condition : float
    """

    G: np.ndarray
    T: np.ndarray
    quad_report: QuadReport = None
    min_eigenvalue: float = None
    condition: float = None

    @property
    def genus(self):
        return self.G.shape[0]

    def scaled(self, c):
        """Gram data for the inner product multiplied by ``c > 0``."""
        return from_matrix(self.G * c, self.quad_report)

    def to_dict(self):
        out = {
            "G": [[[z.real, z.imag] for z in row] for row in self.G],
            "T": [[[z.real, z.imag] for z in row] for row in self.T],
            "min_eigenvalue": self.min_eigenvalue,
            "condition": self.condition,
        }
        if self.quad_report is not None:
            r = self.quad_report
            out["quad_report"] = {
                "level": r.level,
                "rel_change": r.rel_change,
                "samples": r.n_samples,
                "converged": r.converged,
                "history": [[lv, rel] for lv, rel in r.history],
            }
        return out


def orthonormalizer(G):
    """Upper-triangular ``T`` with ``T G T^H = I``.

    With the reversal permutation ``P``, ``P G P = L L^H`` (Cholesky) gives
    ``T = P L^{-1} P``.

    Raises
    ------
    NotPositiveDefinite
        If a Cholesky pivot is not positive.
    """
    G = np.asarray(G, dtype=complex)
    G = 0.5 * (G + G.conj().T)
    Gr = G[::-1, ::-1]
    try:
        L = np.linalg.cholesky(Gr)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Gram matrix is not positive definite: {exc}") from None
    piv = np.abs(np.diag(L))
    if not np.all(piv > np.finfo(float).eps * max(piv.max(), 1e-300)):
        raise NotPositiveDefinite(f"Cholesky pivot {piv.min():.3g} is numerically zero")
    g = G.shape[0]
    Linv = np.linalg.solve(L, np.eye(g))
    return np.triu(Linv[::-1, ::-1])


def from_matrix(G, report=None):
    """GramData from an explicit Hermitian positive-definite matrix."""
    G = np.asarray(G, dtype=complex)
    G = 0.5 * (G + G.conj().T)
    T = orthonormalizer(G)
    ev = np.linalg.eigvalsh(G)
    return GramData(G, T, report, float(ev[0]), float(ev[-1] / ev[0]))


def gram_integrand(block, b, pb):
    """``u_j conj(u_k)`` per sample and sheet, flattened to ``g*g``."""
    u, _ = block.model.raw(block.a[:, None], b, "a", pb)
    prod = u[..., :, None] * np.conj(u[..., None, :])
    return prod.reshape(prod.shape[:-2] + (-1,))


def gram_matrix(spec, quad_params=None):
    """L2 Gram matrix by singular quadrature.

    Parameters
    ----------
    spec : CurveSpec
    quad_params : QuadParams, optional

    Returns
    -------
    GramData

    Raises
    ------
    NoConvergence, SingularitySaturation
    """
    params = quad_params or QuadParams()
    val, report = integrate(spec, gram_integrand, params)
    g = spec.genus
    return from_matrix(val.reshape(g, g), report)
