import itertools

import numpy as np
import pytest

from symcov.errors import DimMismatch, InvalidInput
from symcov.estimators import sample_covariance
from symcov.sampling import random_invariant_spd, random_spd
from symcov.spd_manifold import geodesic, is_spd
from symcov.symmetry import (
    QUATERNION_UNITS,
    QuaternionRotationParams,
    SymmetryGroup,
    generator_equivalence_check,
    group_report,
    is_circulant,
    is_invariant,
    load_group_file,
    make_circulant_group,
    make_group,
    make_persymmetric_group,
    make_proper_complex_group,
    make_proper_quaternion_group,
    make_trivial_group,
    project_to_invariant,
    quaternion_rotation,
    symmetrize_samples,
    verify_group,
    write_group_file,
)

FAMILIES = [
    make_circulant_group(8),
    make_persymmetric_group(8),
    make_proper_complex_group(4),
    make_proper_quaternion_group(2),
]
FAMILY_IDS = [K.label for K in FAMILIES]


def circulant(first_row):
    return np.array([np.roll(first_row, k) for k in range(len(first_row))])


def reynolds_loop(Q, K):
    total = np.zeros_like(Q)
    for L in K.elements:
        total += L @ Q @ L.T
    return total / K.order


class TestBuilders:
    def test_circulant_trivial(self):
        K = make_circulant_group(1)
        assert K.order == 1
        np.testing.assert_array_equal(K.elements[0], np.eye(1))

    def test_circulant_order(self):
        K = make_circulant_group(3)
        P = K.elements[1]
        assert K.order == 3
        np.testing.assert_array_equal(np.linalg.matrix_power(P, 3), np.eye(3))
        assert all(sorted(L.sum(axis=0)) == [1, 1, 1] for L in K.elements)

    @pytest.mark.parametrize("n", [2, 5, 8])
    def test_orders(self, n):
        assert make_circulant_group(n).order == n
        assert make_persymmetric_group(n).order == 2
        assert make_proper_complex_group(n).order == 4
        assert make_proper_quaternion_group(n).order == 8

    def test_persymmetric_elements(self):
        K = make_persymmetric_group(2)
        np.testing.assert_array_equal(K.elements[0], np.eye(2))
        np.testing.assert_array_equal(K.elements[1], [[0, 1], [1, 0]])

    def test_proper_complex_contains_quarter_turn(self):
        K = make_proper_complex_group(1)
        assert K.order == 4
        assert any(np.array_equal(L, [[0, 1], [-1, 0]]) for L in K.elements)
        for L in K.elements:
            np.testing.assert_allclose(L.T @ L, np.eye(2))

    def test_quaternion_units_multiply(self):
        R1, R2, R3 = QUATERNION_UNITS
        p = 3
        prod = np.kron(R1, np.eye(p)) @ np.kron(R2, np.eye(p))
        L3 = np.kron(R3, np.eye(p))
        assert np.allclose(prod, L3) or np.allclose(prod, -L3)

    def test_quaternion_p1_orthogonal(self):
        K = make_proper_quaternion_group(1)
        assert K.order == 8
        for L in K.elements:
            np.testing.assert_allclose(L.T @ L, np.eye(4))

    def test_make_group_by_name(self):
        assert make_group("proper-quaternion", 2).dim == 8
        assert make_group("none", 3).order == 1
        with pytest.raises(InvalidInput):
            make_group("toeplitz", 3)

    def test_rejects_bad_size(self):
        with pytest.raises(InvalidInput):
            make_circulant_group(0)

    def test_elements_read_only(self):
        K = make_persymmetric_group(3)
        with pytest.raises(ValueError):
            K.elements[0, 0, 0] = 5.0


class TestVerifyGroup:
    @pytest.mark.parametrize("K", FAMILIES, ids=FAMILY_IDS)
    def test_families_close(self, K):
        assert verify_group(K, 1e-10)

    def test_quaternion_exhaustive_table(self):
        K = make_proper_quaternion_group(2)
        E = K.elements
        for a, b in itertools.product(range(8), repeat=2):
            dist = [np.linalg.norm(E[a] @ E[b] - M) for M in E]
            assert min(dist) < 1e-12
        assert verify_group(K)

    def test_persymmetric_pair(self):
        assert verify_group(SymmetryGroup(np.stack([np.eye(2), np.fliplr(np.eye(2))])))

    def test_quarter_turn_pair_not_closed(self):
        K = SymmetryGroup(np.stack([np.eye(2), [[0.0, 1.0], [-1.0, 0.0]]]))
        report = group_report(K)
        assert not report.ok
        assert "product" in report.message

    def test_non_orthogonal(self):
        K = SymmetryGroup(np.stack([np.eye(2), 2 * np.eye(2)]))
        assert "orthogonal" in group_report(K).message

    def test_missing_identity(self):
        K = SymmetryGroup(np.fliplr(np.eye(2))[None])
        assert group_report(K).message == "identity is missing"


class TestInvariance:
    def test_identity_always_invariant(self):
        for K in FAMILIES:
            assert is_invariant(np.eye(K.dim), K)

    def test_circulant_matrix_invariant(self):
        C = circulant([2.0, 0.5, 0.1, 0.5])
        K = make_circulant_group(4)
        # direct conjugation check against every power of the shift
        for L in K.elements:
            np.testing.assert_allclose(L @ C @ L.T, C, atol=1e-15)
        assert is_invariant(C, K, 1e-10)

    def test_persymmetric_examples(self):
        K = make_persymmetric_group(2)
        assert is_invariant(np.array([[3.0, 1.0], [1.0, 3.0]]), K)
        assert not is_invariant(np.diag([1.0, 2.0]), K)

    def test_proper_complex_examples(self):
        K = make_proper_complex_group(1)
        assert not is_invariant(np.array([[2.0, 0.5], [0.5, 2.0]]), K)
        assert is_invariant(np.array([[2.0, 0.0], [0.0, 2.0]]), K)
        # direct commutation with the quarter turn
        L1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
        M = np.array([[2.0, 0.5], [0.5, 2.0]])
        assert np.linalg.norm(M @ L1 - L1 @ M) > 0.5

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            is_invariant(np.eye(3), make_persymmetric_group(2))

    def test_circulant_pattern_agrees_with_invariance(self, rng):
        K = make_circulant_group(6)
        for _ in range(20):
            row = rng.standard_normal(6)
            row[1:] = (row[1:] + row[1:][::-1]) / 2
            C = circulant(row)
            assert is_circulant(C) and is_invariant(C, K)
            A = rng.standard_normal((6, 6))
            M = A + A.T
            assert not is_circulant(M)
            assert not is_invariant(M, K)


class TestProjection:
    def test_persymmetric_example(self):
        np.testing.assert_allclose(
            project_to_invariant(np.diag([1.0, 3.0]), make_persymmetric_group(2)), np.diag([2.0, 2.0])
        )

    @pytest.mark.parametrize("K", FAMILIES, ids=FAMILY_IDS)
    def test_matches_loop_and_is_invariant(self, K):
        Q = random_spd(K.dim, 3)
        P = project_to_invariant(Q, K)
        np.testing.assert_allclose(P, reynolds_loop(Q, K), rtol=1e-13, atol=1e-13)
        assert is_invariant(P, K, 1e-10)
        assert is_spd(P, 1e-9)
        np.testing.assert_allclose(project_to_invariant(P, K), P, atol=1e-12 * np.abs(P).max())

    def test_fixed_point_unchanged(self):
        C = circulant([2.0, 0.5, 0.1, 0.5])
        np.testing.assert_allclose(project_to_invariant(C, make_circulant_group(4)), C, atol=1e-12)

    def test_proper_complex_random(self):
        K = make_proper_complex_group(4)
        assert is_invariant(project_to_invariant(random_spd(8, 99), K), K, 1e-10)


class TestGeodesicInvariance:
    @pytest.mark.parametrize("K", FAMILIES, ids=FAMILY_IDS)
    def test_geodesic_stays_invariant(self, K):
        for j in range(10):
            Q0 = random_invariant_spd(K.dim, K, 2 * j)
            Q1 = random_invariant_spd(K.dim, K, 2 * j + 1)
            for t in (0.1, 0.25, 0.5, 0.75, 0.9):
                assert is_invariant(geodesic(Q0, Q1, t), K, 1e-9)

    def test_non_invariant_endpoint_breaks_it(self):
        K = make_persymmetric_group(4)
        Q0 = random_invariant_spd(4, K, 0)
        Q1 = random_spd(4, 1)
        assert not is_invariant(geodesic(Q0, Q1, 0.5), K)


class TestQuaternionRotation:
    def test_zero_angle(self):
        np.testing.assert_allclose(quaternion_rotation(QuaternionRotationParams(0.0, 1.0, 0.0, 0.0), 2), np.eye(8))

    def test_quarter_turn_is_first_unit(self):
        R = quaternion_rotation(QuaternionRotationParams(np.pi / 2, 1.0, 0.0, 0.0), 3)
        np.testing.assert_allclose(R, np.kron(QUATERNION_UNITS[0], np.eye(3)), atol=1e-15)

    @pytest.mark.parametrize("axis,unit", [((0.0, 1.0, 0.0), 1), ((0.0, 0.0, 1.0), 2)])
    def test_other_units(self, axis, unit):
        R = quaternion_rotation(QuaternionRotationParams(np.pi / 2, *axis), 1)
        np.testing.assert_allclose(R, QUATERNION_UNITS[unit], atol=1e-15)

    def test_random_orthogonal(self, rng):
        for _ in range(20):
            axis = rng.standard_normal(3)
            axis /= np.linalg.norm(axis)
            R = quaternion_rotation(QuaternionRotationParams(rng.uniform(0, 2 * np.pi), *axis), 2)
            assert np.abs(R.T @ R - np.eye(8)).max() < 1e-12

    def test_axis_constraint(self):
        with pytest.raises(InvalidInput):
            QuaternionRotationParams(0.3, 1.0, 1.0, 0.0)


class TestGeneratorEquivalence:
    def test_identity(self):
        assert generator_equivalence_check(np.eye(8), trials=10, seed=0)

    def test_projected_matrix(self):
        K = make_proper_quaternion_group(3)
        Q = project_to_invariant(random_spd(12, 4), K)
        assert generator_equivalence_check(Q, trials=50, seed=1)

    def test_non_invariant(self):
        assert not generator_equivalence_check(random_spd(8, 5), trials=50, seed=2)

    def test_bad_dimension(self):
        with pytest.raises(InvalidInput):
            generator_equivalence_check(np.eye(6))


class TestSymmetrizeSamples:
    def test_trivial_group(self, rng):
        X = rng.standard_normal((5, 3))
        np.testing.assert_array_equal(symmetrize_samples(X, make_trivial_group(3)), X)

    def test_exchange_example(self):
        out = symmetrize_samples(np.array([[1.0, 0.0]]), make_persymmetric_group(2))
        np.testing.assert_array_equal(out, [[1.0, 0.0], [0.0, 1.0]])

    @pytest.mark.parametrize("K", FAMILIES, ids=FAMILY_IDS)
    def test_order_and_count(self, K, rng):
        X = rng.standard_normal((7, K.dim))
        out = symmetrize_samples(X, K)
        assert out.shape == (K.order * 7, K.dim)
        for k, L in enumerate(K.elements):
            np.testing.assert_allclose(out[k * 7 : (k + 1) * 7], X @ L.T, atol=1e-15)

    @pytest.mark.parametrize("K", FAMILIES, ids=FAMILY_IDS)
    def test_replication_identity(self, K, rng):
        X = rng.standard_normal((30, K.dim))
        lhs = sample_covariance(symmetrize_samples(X, K))
        rhs = project_to_invariant(sample_covariance(X), K)
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            symmetrize_samples(np.ones((2, 3)), make_persymmetric_group(2))


class TestGroupFile:
    def test_round_trip(self, tmp_path):
        K = make_proper_quaternion_group(1)
        path = tmp_path / "quat.txt"
        write_group_file(K, path)
        loaded = load_group_file(path)
        assert loaded.label == "custom"
        np.testing.assert_array_equal(loaded.elements, K.elements)

    def test_handwritten(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("dim=2\n1,0\n0,1\n\n0,1\n1,0\n")
        assert load_group_file(path).order == 2

    def test_rejects_non_group(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("dim=2\n1,0\n0,1\n\n0,1\n-1,0\n")
        with pytest.raises(InvalidInput, match="not a valid group"):
            load_group_file(path)

    def test_rejects_missing_header(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("1,0\n0,1\n")
        with pytest.raises(InvalidInput):
            load_group_file(path)
