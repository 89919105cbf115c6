"""Negative log-likelihoods of elliptical scatter models and g-convexity checks.

All objectives share the form ``(1/n) sum rho(s_i^T Q^{-1} s_i) + log det Q``:

* Tyler: ``rho(x) = p log x``
* MGGD:  ``rho(x) = x**beta`` with shape ``0 < beta <= 1``
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, InvalidInput, InvalidSample, InvalidShape
from .spd_manifold import check_spd, geodesic

__all__ = [
    "RhoObjective",
    "as_samples",
    "quadratic_forms",
    "tyler_nll",
    "mggd_nll",
    "generic_nll",
    "weight",
    "midpoint_convexity_check",
    "chord_gaps",
]


@dataclass(frozen=True)
class RhoObjective:
    """Per-sample loss ``rho`` and its derivative ``u = rho'``.

    Parameters
    ----------
    kind : {"tyler", "mggd"}
    dim : int
        Ambient dimension p; Tyler's loss scales with it.
    shape : float, optional
        MGGD shape beta in (0, 1]. Ignored for Tyler.
    """

    kind: str
    dim: int
    shape: float = 1.0

    def __post_init__(self):
        if self.kind not in ("tyler", "mggd"):
            raise InvalidInput(f"unknown objective kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidInput(f"dim must be a positive integer, got {self.dim!r}")
        if self.kind == "mggd" and not 0.0 < self.shape <= 1.0:
            raise InvalidShape(f"MGGD shape must lie in (0, 1], got {self.shape!r}")

    @classmethod
    def tyler(cls, p):
        return cls("tyler", p)

    @classmethod
    def mggd(cls, p, beta):
        return cls("mggd", p, beta)

    def rho(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "tyler":
            return self.dim * np.log(x)
        return x**self.shape

    def weight(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "tyler":
            return self.dim / x
        return self.shape * x ** (self.shape - 1.0)


def as_samples(samples, dim=None):
    """Validate a sample set: a finite ``(n, p)`` array with no zero rows."""
    X = np.asarray(samples, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InvalidSample(f"samples must be a non-empty (n, p) array, got shape {X.shape}")
    if dim is not None and X.shape[1] != dim:
        raise DimMismatch(f"samples have dimension {X.shape[1]}, expected {dim}")
    if not np.all(np.isfinite(X)):
        raise InvalidSample("samples contain non-finite entries")
    zero = np.flatnonzero(~np.any(X, axis=1))
    if zero.size:
        raise InvalidSample(f"sample {zero[0]} is the zero vector")
    return X


def quadratic_forms(X, Q):
    """Return ``(q, logdet)`` with ``q_i = x_i^T Q^{-1} x_i`` and ``log det Q``.

    One eigendecomposition of ``Q`` is shared by every sample; it also
    enforces positive definiteness.
    """
    lam, V = check_spd(Q, "Q")
    if X.shape[1] != lam.size:
        raise DimMismatch(f"samples have dimension {X.shape[1]}, Q is {lam.size}x{lam.size}")
    W = (X @ V) / np.sqrt(lam)
    return np.einsum("ij,ij->i", W, W), float(np.sum(np.log(lam)))


def tyler_nll(samples, Q):
    """``(p/n) sum log(x_i^T Q^{-1} x_i) + log det Q``; invariant to ``Q -> cQ``."""
    X = as_samples(samples)
    q, logdet = quadratic_forms(X, Q)
    return X.shape[1] * float(np.mean(np.log(q))) + logdet


def mggd_nll(samples, Q, beta):
    """``(1/n) sum (x_i^T Q^{-1} x_i)**beta + log det Q``."""
    if not 0.0 < beta <= 1.0:
        raise InvalidShape(f"MGGD shape must lie in (0, 1], got {beta!r}")
    X = as_samples(samples)
    q, logdet = quadratic_forms(X, Q)
    return float(np.mean(q**beta)) + logdet


def generic_nll(samples, Q, obj):
    """``(1/n) sum rho(s_i^T Q^{-1} s_i) + log det Q`` for any RhoObjective."""
    X = as_samples(samples, obj.dim)
    q, logdet = quadratic_forms(X, Q)
    return float(np.mean(obj.rho(q))) + logdet


def weight(obj, x):
    """Per-sample weight ``u(x) = rho'(x)``: ``p/x`` for Tyler, ``beta x**(beta-1)`` for MGGD."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidInput("weight argument must be positive")
    w = obj.weight(x)
    return float(w) if w.ndim == 0 else w


def chord_gaps(objective, Q0, Q1, grid):
    """``f(Q_t) - ((1-t) f(Q0) + t f(Q1))`` along the geodesic for each t in ``grid``."""
    f0, f1 = objective(Q0), objective(Q1)
    return np.array([objective(geodesic(Q0, Q1, t)) - ((1 - t) * f0 + t * f1) for t in grid])


def midpoint_convexity_check(objective, Q0, Q1, grid=(0.25, 0.5, 0.75), slack=1e-9):
    """Chord inequality along the geodesic from Q0 to Q1.

    Returns True iff ``f(Q_t) <= (1-t) f(Q0) + t f(Q1) + slack`` at every
    ``t`` in ``grid``. The weight ``1-t`` sits on ``Q0`` since ``Q_0`` is the
    ``t=0`` endpoint.
    """
    grid = [float(t) for t in grid]
    if any(not 0.0 <= t <= 1.0 for t in grid):
        raise InvalidInput("grid values must lie in [0, 1]")
    return bool(np.all(chord_gaps(objective, Q0, Q1, grid) <= slack))
