"""Scatter estimators: sample covariances and reweighted fixed-point iterations.

The fixed-point map for a loss ``rho`` with weight ``u = rho'`` is

    Q_{k+1} = (1/n) sum_i u(s_i^T Q_k^{-1} s_i) s_i s_i^T

and each step is a majorization-minimization step, so the objective never
increases along the iterates. Group-constrained estimation runs the same map
on the replicated sample set ``{L s_i : L in K}``.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import InvalidInput, NotPositiveDefinite, RankDeficient, SymcovError
from .objectives import RhoObjective, as_samples, quadratic_forms
from .spd_manifold import check_spd, symmetrize, trace_normalize
from .symmetry import symmetrize_samples

__all__ = [
    "FixedPointConfig",
    "EstimateResult",
    "EstimatorFailure",
    "ESTIMATOR_NAMES",
    "sample_covariance",
    "proper_sample_covariance",
    "fixed_point_step",
    "fixed_point_estimate",
    "constrained_estimate",
    "estimate_all_four",
    "EstimateSet",
]

ESTIMATOR_NAMES = ("SC", "PSC", "Tyler", "ProperTyler")


@dataclass(frozen=True)
class FixedPointConfig:
    """Iteration control.

    ``normalize_each_iter=None`` resolves to True for Tyler (its fixed point
    is only defined up to scale) and False for MGGD.
    """

    tol: float = 1e-8
    max_iter: int = 500
    normalize_each_iter: Optional[bool] = None
    init: Union[str, np.ndarray] = "identity"

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidInput(f"tol must be positive, got {self.tol!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidInput(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if isinstance(self.init, str) and self.init != "identity":
            raise InvalidInput(f"init must be 'identity' or a matrix, got {self.init!r}")

    def normalizes(self, obj):
        if self.normalize_each_iter is None:
            return obj.kind == "tyler"
        return bool(self.normalize_each_iter)


@dataclass
class EstimateResult:
    estimate: np.ndarray
    iterations: int
    final_relative_change: float
    nll_trace: list = field(default_factory=list)
    converged: bool = False


@dataclass(frozen=True)
class EstimatorFailure:
    """Placeholder for an estimator that could not produce an estimate."""

    reason: str


def _rank_checked(Q, what):
    try:
        check_spd(Q, what)
    except NotPositiveDefinite as exc:
        raise RankDeficient(f"{what} is rank deficient: {exc}") from None
    return Q


def sample_covariance(samples):
    """``(1/n) sum s_i s_i^T``. Raises RankDeficient unless the result is SPD."""
    X = as_samples(samples)
    return _rank_checked(symmetrize(X.T @ X / X.shape[0]), "sample covariance")


def proper_sample_covariance(samples, K):
    """Sample covariance of the group-replicated samples ``{L s_i}``.

    Equals the group average of the plain sample covariance.
    """
    X = as_samples(samples, K.dim)
    return sample_covariance(symmetrize_samples(X, K))


def fixed_point_step(X, Q, obj, normalize=False):
    """One reweighted update from ``Q``. Returns ``(Q_next, nll_at_Q)``."""
    q, logdet = quadratic_forms(X, Q)
    nll = float(np.mean(obj.rho(q))) + logdet
    w = obj.weight(q)
    Q_next = symmetrize((X.T * w) @ X / X.shape[0])
    if normalize:
        Q_next = trace_normalize(Q_next)
    return Q_next, nll


def _initial(cfg, p, normalize):
    if isinstance(cfg.init, str):
        return np.eye(p)
    Q = np.array(cfg.init, dtype=float)
    if Q.shape != (p, p):
        raise InvalidInput(f"init has shape {Q.shape}, expected {(p, p)}")
    check_spd(Q, "init")
    return trace_normalize(Q) if normalize else symmetrize(Q)


def fixed_point_estimate(samples, obj, cfg=None):
    """Run the reweighted fixed-point iteration to convergence.

    Parameters
    ----------
    samples : ndarray, shape (n, p)
    obj : RhoObjective
    cfg : FixedPointConfig, optional

    Returns
    -------
    EstimateResult
        ``nll_trace[k]`` is the objective at iterate ``k`` (``k=0`` is the
        initial point). Non-convergence is reported via ``converged=False``.

    Raises
    ------
    RankDeficient
        An iterate lost positive definiteness, e.g. Tyler with ``n < p``.
    """
    cfg = cfg or FixedPointConfig()
    X = as_samples(samples, obj.dim)
    normalize = cfg.normalizes(obj)
    Q = _initial(cfg, X.shape[1], normalize)

    trace = []
    change = np.inf
    converged = False
    iterations = 0
    for k in range(1, cfg.max_iter + 1):
        Q_next, nll = fixed_point_step(X, Q, obj, normalize)
        trace.append(nll)
        _rank_checked(Q_next, f"iterate {k}")
        change = float(np.linalg.norm(Q_next - Q) / np.linalg.norm(Q))
        Q = Q_next
        iterations = k
        if change < cfg.tol:
            converged = True
            break
    q, logdet = quadratic_forms(X, Q)
    trace.append(float(np.mean(obj.rho(q))) + logdet)
    return EstimateResult(Q, iterations, change, trace, converged)


def constrained_estimate(samples, K, obj, cfg=None):
    """Fixed-point estimate restricted to matrices invariant under ``K``.

    Implemented as the unconstrained iteration on the replicated sample set,
    materialized once. Starting from an invariant point (the identity by
    default) every iterate stays invariant.
    """
    X = as_samples(samples, K.dim)
    return fixed_point_estimate(symmetrize_samples(X, K), obj, cfg)


@dataclass
class EstimateSet:
    """Trace-normalized estimates keyed by name; failed ones live in ``failures``."""

    estimates: dict
    failures: dict

    def __getitem__(self, name):
        return self.estimates[name]

    def __contains__(self, name):
        return name in self.estimates


def estimate_all_four(samples, K, cfg=None, obj=None):
    """Sample covariance, proper sample covariance, Tyler and proper Tyler.

    Every estimate is divided by its trace (scaled to trace p). An estimator
    that fails is listed in ``failures`` with its reason instead of aborting
    the others. ``obj`` defaults to Tyler's loss.
    """
    X = as_samples(samples, K.dim)
    obj = obj or RhoObjective.tyler(K.dim)
    runs = {
        "SC": lambda: sample_covariance(X),
        "PSC": lambda: proper_sample_covariance(X, K),
        "Tyler": lambda: fixed_point_estimate(X, obj, cfg).estimate,
        "ProperTyler": lambda: constrained_estimate(X, K, obj, cfg).estimate,
    }
    estimates, failures = {}, {}
    for name, run in runs.items():
        try:
            estimates[name] = trace_normalize(run())
        except SymcovError as exc:
            failures[name] = EstimatorFailure(f"{type(exc).__name__}: {exc}")
    return EstimateSet(estimates, failures)

