"""Symmetric positive definite matrix numerics.

Matrix functions go through a full symmetric eigendecomposition, which gives
square roots, inverse square roots and arbitrary real powers in one pass for
the small dense matrices handled here.
"""

from typing import NamedTuple

import numpy as np

from .errors import DimMismatch, InvalidInput, NotPositiveDefinite

__all__ = [
    "SymEigPair",
    "sym_eig",
    "symmetrize",
    "spd_power",
    "geodesic",
    "trace_normalize",
    "is_spd",
    "check_spd",
    "SYMMETRY_RTOL",
    "EIGEN_FLOOR",
]

# relative asymmetry accepted on input
SYMMETRY_RTOL = 1e-12
# eigenvalues below EIGEN_FLOOR * lambda_max are treated as non-positive
EIGEN_FLOOR = 1e-13


class SymEigPair(NamedTuple):
    """Eigenvalues in ascending order and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def symmetrize(M):
    """Return ``(M + M.T) / 2``."""
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def _as_square(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {M.shape}")
    return M


def _check_symmetric(M, rtol=SYMMETRY_RTOL, name="matrix"):
    scale = np.max(np.abs(M)) if M.size else 0.0
    if np.max(np.abs(M - M.T), initial=0.0) > rtol * max(scale, np.finfo(float).tiny):
        raise InvalidInput(f"{name} is not symmetric")


def sym_eig(M):
    """Spectral decomposition of a real symmetric matrix.

    Parameters
    ----------
    M : ndarray, shape (p, p)
        Symmetric within a relative tolerance of 1e-12.

    Returns
    -------
    SymEigPair
        ``eigenvalues`` ascending, ``eigenvectors`` as orthonormal columns,
        so that ``V @ diag(lam) @ V.T`` reconstructs ``M``.
    """
    M = _as_square(M)
    _check_symmetric(M)
    lam, V = np.linalg.eigh(symmetrize(M))
    return SymEigPair(lam, V)


def check_spd(Q, name="matrix"):
    """Eigendecompose ``Q`` and raise NotPositiveDefinite if any eigenvalue is
    at or below ``EIGEN_FLOOR * lambda_max``. Returns the decomposition."""
    lam, V = sym_eig(Q)
    if lam.size and (lam[-1] <= 0 or lam[0] <= EIGEN_FLOOR * lam[-1]):
        raise NotPositiveDefinite(
            f"{name} is not positive definite (eigenvalue range "
            f"[{lam[0]:.3e}, {lam[-1]:.3e}])"
        )
    return SymEigPair(lam, V)


def _from_eig(lam, V):
    return symmetrize((V * lam) @ V.T)


def spd_power(Q, t):
    """Real power ``Q**t`` of an SPD matrix via its eigendecomposition."""
    lam, V = check_spd(Q)
    return _from_eig(lam ** float(t), V)


def geodesic(Q0, Q1, t):
    r"""Point at parameter ``t`` on the affine-invariant geodesic from Q0 to Q1.

    .. math::
        Q_t = Q_0^{1/2} (Q_0^{-1/2} Q_1 Q_0^{-1/2})^t Q_0^{1/2}

    Parameters
    ----------
    Q0, Q1 : ndarray, shape (p, p)
        SPD endpoints.
    t : float
        Position in [0, 1]; ``t=0`` gives Q0 and ``t=1`` gives Q1.

    Returns
    -------
    ndarray, shape (p, p)
        SPD matrix, symmetrized before return.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidInput(f"geodesic parameter must lie in [0, 1], got {t}")
    Q0 = _as_square(Q0, "Q0")
    Q1 = _as_square(Q1, "Q1")
    if Q0.shape != Q1.shape:
        raise DimMismatch(f"geodesic endpoints have shapes {Q0.shape} and {Q1.shape}")
    lam, V = check_spd(Q0, "Q0")
    check_spd(Q1, "Q1")
    # Evaluated in Q0's eigenbasis (Q0^(1/2) = V D^(1/2) V^T); explicit
    # Q0^(-1/2) loses ~cond(Q0) digits.
    root = np.sqrt(lam)
    inner = symmetrize((V.T @ Q1 @ V) / np.outer(root, root))
    mu, U = np.linalg.eigh(inner)
    if mu[0] <= 0:
        raise NotPositiveDefinite("whitened Q1 lost positive definiteness")
    Z = (V * root) @ U
    return symmetrize((Z * mu**t) @ Z.T)


def trace_normalize(Q):
    """Rescale ``Q`` so that its trace equals its dimension p."""
    Q = _as_square(Q)
    tr = np.trace(Q)
    if not tr > 0:
        raise NotPositiveDefinite(f"trace must be positive, got {tr}")
    return Q * (Q.shape[0] / tr)


def is_spd(M, tol=1e-10):
    """True iff ``M`` is symmetric within ``tol`` and its smallest eigenvalue
    exceeds ``tol * max(1, max|M|)``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or not np.all(np.isfinite(M)):
        return False
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    if np.max(np.abs(M - M.T), initial=0.0) > tol * scale:
        return False
    lam = np.linalg.eigvalsh(symmetrize(M))
    return bool(lam[0] > tol * scale)
