"""Robust scatter estimation under group-symmetry constraints."""

__version__ = "0.1.0"

from .errors import (
    DimMismatch,
    InvalidInput,
    InvalidSample,
    InvalidShape,
    IoError,
    NotPositiveDefinite,
    RankDeficient,
    SymcovError,
)
from .spd_manifold import geodesic, is_spd, spd_power, sym_eig, trace_normalize
from .symmetry import (
    SymmetryGroup,
    is_invariant,
    make_circulant_group,
    make_group,
    make_persymmetric_group,
    make_proper_complex_group,
    make_proper_quaternion_group,
    project_to_invariant,
    symmetrize_samples,
    verify_group,
)
from .objectives import RhoObjective, generic_nll, mggd_nll, tyler_nll
from .estimators import (
    FixedPointConfig,
    constrained_estimate,
    estimate_all_four,
    fixed_point_estimate,
    proper_sample_covariance,
    sample_covariance,
)
from .sampling import EllipticalModel, random_invariant_spd, random_spd, sample_elliptical
