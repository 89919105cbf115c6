"""Seeded synthetic data: random SPD scatter matrices and elliptical samples.

Elliptical draws are ``s_i = sqrt(tau_i) v_i`` with ``v_i ~ N(0, scatter)``
and texture ``tau_i ~ chi2(tau_dof)``. Sample ``i`` comes from its own
counter-based Philox stream keyed by the model seed, so the first ``m`` draws
of a size-``n`` set are the same for every ``n >= m`` and do not depend on
execution order.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput, IoError
from .objectives import as_samples
from .spd_manifold import check_spd, spd_power, symmetrize
from .symmetry import project_to_invariant

__all__ = [
    "EllipticalModel",
    "derive_seed",
    "random_spd",
    "random_invariant_spd",
    "sample_elliptical",
    "write_samples",
    "read_samples",
]

_MASK64 = (1 << 64) - 1


def derive_seed(seed, *keys):
    """Mix ``seed`` with integer ``keys`` into an independent 64-bit seed."""
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def random_spd(p, seed):
    """``A A^T + p * 1e-6 * I`` with ``A`` a standard normal ``p x p`` draw."""
    if int(p) != p or p < 1:
        raise InvalidInput(f"p must be a positive integer, got {p!r}")
    rng = np.random.default_rng(int(seed) & _MASK64)
    A = rng.standard_normal((p, p))
    return symmetrize(A @ A.T) + p * 1e-6 * np.eye(p)


def random_invariant_spd(p, K, seed):
    """Group average of :func:`random_spd`; lies in the invariant set of ``K``."""
    return project_to_invariant(random_spd(p, seed), K)


@dataclass(frozen=True, eq=False)
class EllipticalModel:
    """Scaled-Gaussian model ``s = sqrt(tau) v``.

    Parameters
    ----------
    scatter : ndarray, shape (p, p)
        SPD covariance of the Gaussian factor ``v``.
    tau_dof : int
        Degrees of freedom of the chi-square texture.
    seed : int
    texture : {"chi2", "none"}
        ``"none"`` fixes ``tau = 1`` (plain Gaussian draws) while keeping the
        same ``v`` stream.
    normalize_texture : bool
        Divide ``tau`` by its mean ``tau_dof``.
    """

    scatter: np.ndarray
    tau_dof: int = 1
    seed: int = 0
    texture: str = "chi2"
    normalize_texture: bool = False

    def __post_init__(self):
        S = np.array(self.scatter, dtype=float)
        check_spd(S, "scatter")
        S.setflags(write=False)
        object.__setattr__(self, "scatter", S)
        if int(self.tau_dof) != self.tau_dof or self.tau_dof < 1:
            raise InvalidInput(f"tau_dof must be a positive integer, got {self.tau_dof!r}")
        if self.texture not in ("chi2", "none"):
            raise InvalidInput(f"texture must be 'chi2' or 'none', got {self.texture!r}")

    @property
    def dim(self):
        return self.scatter.shape[0]


def _sample_stream(key, i):
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, i]))


def sample_elliptical(model, n):
    """Draw ``n`` elliptical samples as an ``(n, p)`` array.

    Within each sample's stream the ``p`` normals of ``v`` are drawn before
    the texture, so switching ``texture`` leaves every ``v_i`` unchanged.
    """
    if int(n) != n or n < 1:
        raise InvalidInput(f"n must be a positive integer, got {n!r}")
    p = model.dim
    key = np.random.SeedSequence(int(model.seed) & _MASK64).generate_state(2, np.uint64)
    Z = np.empty((n, p))
    tau = np.ones(n)
    for i in range(n):
        g = _sample_stream(key, i)
        Z[i] = g.standard_normal(p)
        if model.texture == "chi2":
            tau[i] = g.chisquare(model.tau_dof)
    if model.normalize_texture:
        tau /= model.tau_dof
    root = spd_power(model.scatter, 0.5)
    return np.sqrt(tau)[:, None] * (Z @ root)


def write_samples(path, samples, seed=None):
    """CSV with one sample per row, header ``# dim=<p> n=<n> seed=<seed>``."""
    X = np.asarray(samples, dtype=float)
    header = f"# dim={X.shape[1]} n={X.shape[0]} seed={'' if seed is None else seed}\n"
    body = "".join(",".join(format(v, ".17g") for v in row) + "\n" for row in X)
    try:
        Path(path).write_text(header + body)
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc


def read_samples(path):
    """Read a sample CSV. Returns ``(samples, meta)`` where ``meta`` holds the
    header fields (empty if the file has no header)."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    meta = {}
    rows = []
    for ln in lines:
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("#"):
            for tok in ln[1:].split():
                k, _, v = tok.partition("=")
                meta[k] = v
            continue
        try:
            rows.append([float(v) for v in ln.split(",")])
        except ValueError:
            raise InvalidInput(f"{path}: cannot parse row {ln!r}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidInput(f"{path}: expected a non-empty rectangular table")
    X = as_samples(np.array(rows))
    if meta.get("dim") and int(meta["dim"]) != X.shape[1]:
        raise InvalidInput(f"{path}: header dim={meta['dim']} but rows have {X.shape[1]} columns")
    return X, meta
