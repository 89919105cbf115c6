"""Numerical verification suites run by ``symcov verify``.

Each suite returns a :class:`SuiteResult`; ``ok`` is False as soon as one
instance violates its tolerance.
"""

from dataclasses import dataclass

import numpy as np

from .objectives import chord_gaps, mggd_nll, tyler_nll
from .sampling import derive_seed, random_invariant_spd, random_spd
from .spd_manifold import geodesic
from .symmetry import (
    commutation_residual,
    generator_equivalence_check,
    group_report,
    make_circulant_group,
    make_persymmetric_group,
    make_proper_complex_group,
    make_proper_quaternion_group,
)

__all__ = ["SuiteResult", "SUITES", "run_suite", "four_families"]

GEODESIC_GRID = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    ok: bool
    detail: str


def four_families():
    """One instance of each family, all acting on dimension 8."""
    return [
        make_circulant_group(8),
        make_persymmetric_group(8),
        make_proper_complex_group(4),
        make_proper_quaternion_group(2),
    ]


def geodesic_suite(seed=0, pairs=100, tol=1e-9):
    worst = 0.0
    for K in four_families():
        for j in range(pairs):
            Q0 = random_invariant_spd(K.dim, K, derive_seed(seed, K.order, j, 0))
            Q1 = random_invariant_spd(K.dim, K, derive_seed(seed, K.order, j, 1))
            for t in GEODESIC_GRID:
                worst = max(worst, commutation_residual(geodesic(Q0, Q1, t), K))
    return SuiteResult("geodesic", worst <= tol, f"max commutation residual {worst:.2e} (tol {tol:.0e})")


def group_suite(seed=0, tol=1e-10):
    groups = four_families() + [
        make_circulant_group(5),
        make_persymmetric_group(3),
        make_proper_complex_group(1),
        make_proper_quaternion_group(3),
    ]
    bad = [f"{K.label}: {r.message}" for K in groups if not (r := group_report(K, tol)).ok]
    detail = "; ".join(bad) if bad else f"{len(groups)} groups closed and orthogonal"
    return SuiteResult("group", not bad, detail)


def convexity_suite(seed=0, pairs=100, n=200, slack=1e-9, dims=(2, 5, 10), betas=(0.2, 0.5, 1.0)):
    worst = -np.inf
    grid = (0.25, 0.5, 0.75)
    for p in dims:
        rng = np.random.default_rng(derive_seed(seed, p))
        X = rng.standard_normal((n, p))
        objectives = [lambda Q: tyler_nll(X, Q)] + [
            (lambda Q, b=b: mggd_nll(X, Q, b)) for b in betas
        ]
        for j in range(pairs):
            Q0 = random_spd(p, derive_seed(seed, p, j, 0))
            Q1 = random_spd(p, derive_seed(seed, p, j, 1))
            for f in objectives:
                worst = max(worst, float(np.max(chord_gaps(f, Q0, Q1, grid))))
    return SuiteResult("convexity", worst <= slack, f"max chord gap {worst:.2e} (slack {slack:.0e})")


def generator_suite(seed=0, matrices=20, rotations=50, tol=1e-10):
    failures = 0
    for p in (2, 10):
        K = make_proper_quaternion_group(p)
        for j in range(matrices):
            Q = random_invariant_spd(K.dim, K, derive_seed(seed, p, j))
            if not generator_equivalence_check(Q, rotations, derive_seed(seed, p, j, 1), tol):
                failures += 1
    return SuiteResult(
        "generators", failures == 0, f"{failures} of {2 * matrices} matrices failed (tol {tol:.0e})"
    )


SUITES = {
    "geodesic": geodesic_suite,
    "group": group_suite,
    "convexity": convexity_suite,
    "generators": generator_suite,
}


def run_suite(name, seed=0):
    """Run one suite by name, or every suite for ``"all"``."""
    names = list(SUITES) if name == "all" else [name]
    return [SUITES[n](seed=seed) for n in names]
