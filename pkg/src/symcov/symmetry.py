"""Finite orthogonal symmetry groups and the invariant set they define.

A covariance ``Q`` is invariant under a group ``K`` when ``L Q L^T = Q`` for
every ``L`` in ``K``, equivalently when ``Q`` commutes with every element.
Four families are provided (circulant, persymmetric, proper complex, proper
quaternion) plus file-loaded custom groups.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimMismatch, InvalidInput, IoError
from .spd_manifold import symmetrize

__all__ = [
    "SymmetryGroup",
    "GroupReport",
    "QuaternionRotationParams",
    "GROUP_LABELS",
    "make_circulant_group",
    "make_persymmetric_group",
    "make_proper_complex_group",
    "make_proper_quaternion_group",
    "make_trivial_group",
    "make_group",
    "group_report",
    "verify_group",
    "commutation_residual",
    "is_invariant",
    "project_to_invariant",
    "quaternion_rotation",
    "random_rotation_params",
    "generator_equivalence_check",
    "symmetrize_samples",
    "is_circulant",
    "load_group_file",
    "write_group_file",
    "QUATERNION_UNITS",
]

GROUP_LABELS = ("circulant", "persymmetric", "proper_complex", "proper_quaternion", "custom")

INVARIANCE_TOL = 1e-9

# 4x4 real representations of the quaternion units i, j, k
_R1 = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
_R2 = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
_R3 = np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=float)
QUATERNION_UNITS = (_R1, _R2, _R3)
for _R in QUATERNION_UNITS:
    _R.setflags(write=False)


@dataclass(frozen=True, eq=False)
class SymmetryGroup:
    """Finite set of orthogonal ``dim x dim`` matrices.

    ``elements`` has shape ``(order, dim, dim)`` and is read-only. Builders
    in this module always return closed groups; use :func:`verify_group`
    on anything assembled by hand.
    """

    elements: np.ndarray
    label: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        E = np.array(self.elements, dtype=float)
        if E.ndim == 2:
            E = E[None]
        if E.ndim != 3 or E.shape[1] != E.shape[2] or E.shape[0] == 0:
            raise InvalidInput(f"group elements must have shape (k, p, p), got {E.shape}")
        if self.label not in GROUP_LABELS + ("trivial",):
            raise InvalidInput(f"unknown group label {self.label!r}")
        E.setflags(write=False)
        object.__setattr__(self, "elements", E)

    @property
    def dim(self):
        return self.elements.shape[1]

    @property
    def order(self):
        return self.elements.shape[0]

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"SymmetryGroup(label={self.label!r}, dim={self.dim}, order={self.order})"


def make_trivial_group(p):
    """The one-element group ``{I_p}``; constrained estimators reduce to the plain ones."""
    return SymmetryGroup(np.eye(p)[None], label="trivial", params={"p": p})


def make_circulant_group(n):
    """Cyclic group ``{P^k : k = 0..n-1}`` with ``P`` the cyclic shift matrix.

    Its invariant set is exactly the circulant matrices.
    """
    n = _positive_int(n, "n")
    P = np.roll(np.eye(n), 1, axis=1)
    elements = [np.eye(n)]
    for _ in range(n - 1):
        elements.append(elements[-1] @ P)
    return SymmetryGroup(np.stack(elements), label="circulant", params={"n": n})


def _exchange(n):
    return np.fliplr(np.eye(n))


def make_persymmetric_group(n):
    """``{I_n, J_n}`` with ``J_n`` the exchange (anti-identity) matrix."""
    n = _positive_int(n, "n")
    return SymmetryGroup(
        np.stack([np.eye(n), _exchange(n)]), label="persymmetric", params={"n": n}
    )


def make_proper_complex_group(p):
    """Group generated by the quarter turn ``[[0, 1], [-1, 0]] (x) I_p``.

    The generator squares to ``-I``, so the closed group has four elements
    ``{I, L1, -I, -L1}``. Adding ``-I`` leaves the invariant set unchanged.
    """
    p = _positive_int(p, "p")
    L1 = np.kron(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(p))
    I = np.eye(2 * p)
    return SymmetryGroup(
        np.stack([I, L1, -I, -L1]), label="proper_complex", params={"p": p}
    )


def make_proper_quaternion_group(p):
    """Order-8 quaternion group ``{+-I, +-R1 (x) I_p, +-R2 (x) I_p, +-R3 (x) I_p}``
    acting on ``4p``-dimensional real vectors."""
    p = _positive_int(p, "p")
    Ip = np.eye(p)
    base = [np.eye(4 * p)] + [np.kron(R, Ip) for R in QUATERNION_UNITS]
    return SymmetryGroup(
        np.stack(base + [-L for L in base]), label="proper_quaternion", params={"p": p}
    )


_BUILDERS = {
    "circulant": make_circulant_group,
    "persymmetric": make_persymmetric_group,
    "proper_complex": make_proper_complex_group,
    "proper_quaternion": make_proper_quaternion_group,
    "trivial": make_trivial_group,
    "none": make_trivial_group,
}


def make_group(label, size):
    """Build a group family by name. ``size`` is n for circulant/persymmetric
    and the complex/quaternion vector length otherwise. Hyphens are accepted
    in place of underscores."""
    key = label.replace("-", "_")
    try:
        builder = _BUILDERS[key]
    except KeyError:
        raise InvalidInput(f"unknown group family {label!r}") from None
    return builder(size)


def _positive_int(value, name):
    if int(value) != value or value < 1:
        raise InvalidInput(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class GroupReport:
    """Outcome of :func:`group_report`; ``message`` names the first violation."""

    ok: bool
    message: str


def _match(M, elements, threshold):
    dist = np.linalg.norm(elements - M, axis=(1, 2))
    k = int(np.argmin(dist))
    return k if dist[k] <= threshold else None


def group_report(K, tol=1e-10):
    """Check orthogonality, presence of the identity and closure of ``K``.

    Products are matched against the nearest element in Frobenius norm with
    threshold ``tol * sqrt(p)``.
    """
    E = K.elements
    p = K.dim
    I = np.eye(p)
    threshold = tol * np.sqrt(p)
    for a, L in enumerate(E):
        if np.linalg.norm(L.T @ L - I) > threshold:
            return GroupReport(False, f"element {a} is not orthogonal")
    if _match(I, E, threshold) is None:
        return GroupReport(False, "identity is missing")
    for a, L in enumerate(E):
        for b, M in enumerate(E):
            if _match(L @ M, E, threshold) is None:
                return GroupReport(False, f"product of elements ({a}, {b}) is not in the set")
    return GroupReport(True, f"closed group of order {K.order}")


def verify_group(K, tol=1e-10):
    """True iff ``K`` is a set of orthogonal matrices containing I and closed
    under multiplication. See :func:`group_report` for the diagnostic."""
    return group_report(K, tol).ok


def _check_dim(Q, K):
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape != (K.dim, K.dim):
        raise DimMismatch(f"matrix of shape {Q.shape} does not match group dimension {K.dim}")
    return Q


def commutation_residual(Q, K):
    """``max_L ||Q L - L Q||_F / ||Q||_F`` over the elements of ``K``."""
    Q = _check_dim(Q, K)
    E = K.elements
    diff = Q @ E - E @ Q
    return float(np.max(np.linalg.norm(diff, axis=(1, 2))) / np.linalg.norm(Q))


def is_invariant(Q, K, tol=INVARIANCE_TOL):
    """True iff ``Q`` commutes with every element of ``K`` to relative ``tol``."""
    return commutation_residual(Q, K) <= tol


def project_to_invariant(Q, K):
    """Group average ``(1/|K|) sum_L L Q L^T``.

    For a closed group this is the orthogonal projection onto the invariant
    matrices; it maps SPD matrices to SPD matrices and is idempotent.
    """
    Q = _check_dim(Q, K)
    E = K.elements
    return symmetrize(np.einsum("kij,jl,kml->im", E, Q, E) / K.order)


def symmetrize_samples(samples, K):
    """Replicate samples through the group: rows ``L s_i`` with the group
    element as the outer loop and the sample index as the inner loop.

    Parameters
    ----------
    samples : ndarray, shape (n, p)
    K : SymmetryGroup of dimension p

    Returns
    -------
    ndarray, shape (|K| n, p)
    """
    X = np.asarray(samples, dtype=float)
    if X.ndim != 2 or X.shape[1] != K.dim:
        raise DimMismatch(f"samples of shape {X.shape} do not match group dimension {K.dim}")
    return np.einsum("kij,nj->kni", K.elements, X).reshape(-1, K.dim)


def is_circulant(Q, tol=1e-10):
    """Entry-pattern test: every row is the previous row shifted right by one."""
    Q = np.asarray(Q, dtype=float)
    scale = max(np.max(np.abs(Q), initial=0.0), np.finfo(float).tiny)
    for i in range(1, Q.shape[0]):
        if np.max(np.abs(Q[i] - np.roll(Q[i - 1], 1))) > tol * scale:
            return False
    return True


@dataclass(frozen=True)
class QuaternionRotationParams:
    """Angle and unit axis ``(alpha, beta_r, gamma)`` of a quaternion rotation."""

    theta: float
    alpha: float
    beta_r: float
    gamma: float

    def __post_init__(self):
        norm2 = self.alpha**2 + self.beta_r**2 + self.gamma**2
        if abs(norm2 - 1.0) > 1e-12:
            raise InvalidInput(f"rotation axis must have unit norm, got |axis|^2 = {norm2!r}")


def quaternion_rotation(params, p):
    """``4p x 4p`` rotation: ``cos(theta) I + sin(theta)(alpha R1 + beta_r R2 + gamma R3)``
    Kronecker ``I_p``. Orthogonal for any unit axis."""
    if not isinstance(params, QuaternionRotationParams):
        raise InvalidInput("params must be a QuaternionRotationParams")
    p = _positive_int(p, "p")
    c, s = np.cos(params.theta), np.sin(params.theta)
    a, b, g = params.alpha, params.beta_r, params.gamma
    block = np.array(
        [
            [c, a * s, b * s, g * s],
            [-a * s, c, -g * s, b * s],
            [-b * s, g * s, c, -a * s],
            [-g * s, -b * s, a * s, c],
        ]
    )
    return np.kron(block, np.eye(p))


def random_rotation_params(rng):
    """Uniform angle on [0, 2 pi) and axis uniform on the unit sphere."""
    theta = rng.uniform(0.0, 2.0 * np.pi)
    while True:
        axis = rng.standard_normal(3)
        norm = np.linalg.norm(axis)
        if norm > 1e-8:
            break
    axis = axis / norm
    return QuaternionRotationParams(theta, *axis)


def generator_equivalence_check(Q, trials=50, seed=0, tol=1e-10):
    """Check that ``Q`` commutes with ``trials`` random quaternion rotations.

    A matrix commuting with the eight finite generators commutes with every
    rotation of the continuous family, since each rotation is a linear
    combination of I, R1, R2, R3. Returns False as soon as one relative
    commutation residual exceeds ``tol``.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] % 4:
        raise InvalidInput(f"expected a 4p x 4p matrix, got shape {Q.shape}")
    p = Q.shape[0] // 4
    rng = np.random.default_rng(seed)
    norm = np.linalg.norm(Q)
    for _ in range(int(trials)):
        R = quaternion_rotation(random_rotation_params(rng), p)
        if np.linalg.norm(Q @ R - R @ Q) > tol * norm:
            return False
    return True


def load_group_file(path, tol=1e-10):
    """Read a custom group.

    Format: first line ``dim=<p>``, then one matrix per block of ``p`` lines
    of comma-separated reals, blocks separated by blank lines. ``#`` lines
    are ignored. The result must pass :func:`verify_group`.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    lines = [ln.strip() for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    while lines and not lines[0]:
        lines.pop(0)
    if not lines or not lines[0].replace(" ", "").startswith("dim="):
        raise InvalidInput(f"{path}: first line must be 'dim=<p>'")
    p = _positive_int(int(lines[0].replace(" ", "")[4:]), "dim")
    blocks, current = [], []
    for ln in lines[1:] + [""]:
        if ln:
            current.append([float(v) for v in ln.split(",")])
        elif current:
            blocks.append(current)
            current = []
    try:
        E = np.array(blocks, dtype=float)
    except ValueError:
        raise InvalidInput(f"{path}: ragged matrix block") from None
    if E.ndim != 3 or E.shape[1:] != (p, p):
        raise InvalidInput(f"{path}: every block must be {p}x{p}")
    K = SymmetryGroup(E, label="custom", params={"source": str(path)})
    report = group_report(K, tol)
    if not report.ok:
        raise InvalidInput(f"{path}: not a valid group: {report.message}")
    return K


def write_group_file(K, path):
    """Write ``K`` in the format read by :func:`load_group_file`."""
    parts = [f"dim={K.dim}"]
    for L in K.elements:
        parts.append("\n".join(",".join(repr(float(v)) for v in row) for row in L))
    try:
        Path(path).write_text("\n\n".join(parts) + "\n")
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
