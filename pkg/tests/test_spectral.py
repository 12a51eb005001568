"""Biorthogonal mode analysis against closed forms and a root oracle."""

import cmath

import numpy as np
import pytest

from xraystack import NumericsError, ScatterContext
from xraystack.hamiltonian import build_hamiltonian, rabi_vector
from xraystack.spectral import (
    EigenSystem,
    edge_report,
    eigensystem,
    quasi_eigen_drive,
)

ANGLE = 2.4067


def charpoly_coefficients(matrix: np.ndarray) -> np.ndarray:
    """Characteristic polynomial via the Faddeev-LeVerrier recursion.

    Uses only matrix products and traces, so it shares no code path
    with the eigensolver it is checking.
    """
    n = matrix.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    aux = np.zeros_like(matrix)
    for m in range(1, n + 1):
        aux = matrix @ (aux + coeffs[m - 1] * np.eye(n))
        coeffs[m] = -np.trace(aux) / m
    return coeffs


def greedy_match_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest pairing distance between two unordered point sets."""
    b_left = list(b)
    worst = 0.0
    for za in a:
        gaps = [abs(za - zb) for zb in b_left]
        i = int(np.argmin(gaps))
        worst = max(worst, gaps[i])
        b_left.pop(i)
    return worst


@pytest.fixture(scope="module")
def topo_system(topological_stack):
    h = build_hamiltonian(topological_stack, ScatterContext(angle_mrad=ANGLE))
    return h, eigensystem(h)


@pytest.fixture(scope="module")
def triv_system(trivial_stack):
    h = build_hamiltonian(trivial_stack, ScatterContext(angle_mrad=ANGLE))
    return h, eigensystem(h)


class TestClosedForms:
    def test_two_by_two(self):
        a, b, d = 0.3 + 0.9j, 1.2 - 0.4j, -0.5 + 1.1j
        system = eigensystem(np.array([[a, b], [b, d]]))
        mean = (a + d) / 2.0
        split = cmath.sqrt(((a - d) / 2.0) ** 2 + b * b)
        expected = sorted([mean + split, mean - split], key=lambda z: -z.real)
        np.testing.assert_allclose(system.eigenvalues, expected, rtol=1e-12)

    def test_diagonal_matrix_is_its_own_answer(self):
        diag = np.array([3.0 + 1j, 1.0 + 0.5j, -2.0 + 2j])
        system = eigensystem(np.diag(diag))
        np.testing.assert_allclose(
            system.eigenvalues, sorted(diag, key=lambda z: -z.real), rtol=1e-14
        )
        np.testing.assert_allclose(np.abs(system.right_vectors), np.eye(3), atol=1e-14)


@pytest.fixture(scope="module")
def random_symmetric():
    rng = np.random.default_rng(20260822)
    raw = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    return (raw + raw.T) / 2.0


class TestRandomComplexSymmetric:
    def test_eigenvalues_match_charpoly_roots(self, random_symmetric):
        system = eigensystem(random_symmetric)
        roots = np.roots(charpoly_coefficients(random_symmetric))
        assert greedy_match_distance(system.eigenvalues, roots) < 1e-8

    def test_trace_identity(self, random_symmetric):
        system = eigensystem(random_symmetric)
        assert system.eigenvalues.sum() == pytest.approx(
            np.trace(random_symmetric), rel=1e-10
        )

    def test_biorthonormal_and_complete(self, random_symmetric):
        system = eigensystem(random_symmetric)
        assert not system.any_exceptional
        gram = system.mode_matrix.T @ system.mode_matrix
        np.testing.assert_allclose(gram, np.eye(8), atol=1e-8)
        rebuilt = (
            system.mode_matrix
            @ np.diag(system.eigenvalues)
            @ system.mode_matrix.T
        )
        np.testing.assert_allclose(rebuilt, random_symmetric, atol=1e-8)

    def test_shift_covariance(self, random_symmetric):
        shift = 2.7 - 0.9j
        base = eigensystem(random_symmetric)
        moved = eigensystem(random_symmetric + shift * np.eye(8))
        np.testing.assert_allclose(
            moved.eigenvalues, base.eigenvalues + shift, rtol=1e-10
        )

    def test_residual_guard_rejects_garbage_tolerance(self, random_symmetric):
        with pytest.raises(NumericsError):
            eigensystem(random_symmetric, residual_tol=1e-18)


class TestBenchmarkSystems:
    def test_no_exceptional_modes(self, topo_system, triv_system):
        assert not topo_system[1].any_exceptional
        assert not triv_system[1].any_exceptional

    def test_eigen_expansion_equals_linear_solve(self, topo_system, topological_stack):
        h, system = topo_system
        drive = rabi_vector(topological_stack, ScatterContext(angle_mrad=ANGLE))
        expanded = quasi_eigen_drive(system, drive)
        for delta in (-60.0, -10.0, 0.0, 5.5, 40.0):
            direct = -1j * drive.omega @ np.linalg.solve(
                h.matrix + delta * np.eye(h.size), drive.omega
            )
            modal = -1j * np.sum(expanded**2 / (system.eigenvalues + delta))
            assert modal == pytest.approx(direct, rel=1e-8)

    def test_mode_weight_profiles_are_mirror_symmetric(self, topo_system):
        weights = topo_system[1].spatial_weights()
        np.testing.assert_allclose(weights, weights[:, ::-1], atol=1e-6)

    def test_weights_sum_to_one(self, topo_system):
        np.testing.assert_allclose(
            topo_system[1].spatial_weights().sum(axis=1), 1.0, rtol=1e-12
        )

    def test_decay_modes_all_dissipative(self, topo_system, triv_system):
        # every mode must decay: positive imaginary part in this storage
        for _, system in (topo_system, triv_system):
            assert np.all(system.eigenvalues.imag > 0.0)


class TestEdgeDetection:
    def test_topological_chain_has_exactly_two_edge_modes(self, topo_system):
        report = edge_report(topo_system[1])
        assert list(report.modes_above(0.6)) == sorted(report.midgap_indices)

    def test_trivial_chain_has_none(self, triv_system):
        report = edge_report(triv_system[1])
        assert report.modes_above(0.5).size == 0

    def test_midgap_pair_sits_between_the_bands(self, topo_system):
        system = topo_system[1]
        report = edge_report(system)
        re = system.eigenvalues.real
        gap = sorted(re[list(report.midgap_indices)])
        others = np.delete(re, list(report.midgap_indices))
        lower = others[others < np.median(others)]
        upper = others[others >= np.median(others)]
        assert lower.max() < gap[0] <= gap[1] < upper.min()

    def test_small_system_rejected(self):
        with pytest.raises(ValueError):
            edge_report(eigensystem(np.eye(3, dtype=complex)))


class TestExceptionalHandling:
    def test_coalescing_pair_is_flagged(self):
        # classic 2x2 exceptional point: gain/loss balanced against
        # coupling, eigenvectors collapse onto one direction
        matrix = np.array([[1j, 1.0], [1.0, -1j]])
        system = eigensystem(matrix)
        assert system.any_exceptional

    def test_drive_length_mismatch_rejected(self, topo_system):
        with pytest.raises(ValueError):
            quasi_eigen_drive(topo_system[1], np.ones(3, dtype=complex))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            eigensystem(np.ones((3, 4)))
