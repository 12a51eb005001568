"""Quasi-normal-mode analysis of the induced nuclear Hamiltonian.

The coupling matrix is complex symmetric (reciprocal medium), not
Hermitian, so its decay modes form a biorthogonal system: the left
eigenvector belonging to an eigenvalue is the plain transpose of the
right one, without conjugation.  Right eigenvectors of distinct
eigenvalues then satisfy phi_j^T phi_l = 0, and the natural
normalization divides each vector by the complex square root of its
self-overlap phi^T phi.  That overlap can legitimately vanish: two
modes coalescing at an exceptional point lose their independent
directions, and no finite rescaling repairs the basis.  Modes whose
self-overlap falls below a threshold are therefore flagged rather than
silently normalized, and downstream consumers (for example the spectrum
builder) switch to a direct linear solve when any flag is set.

Eigenvalues are sorted by descending real part.  With the storage sign
convention of the Hamiltonian builder, a mode with eigenvalue lambda
produces a resonance at detuning Delta = -Re(lambda) with half width
Im(lambda).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericsError
from .hamiltonian import DriveVector, NuclearHamiltonian

DEFAULT_EXCEPTIONAL_TOL = 1e-6
DEFAULT_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    """Decay modes of one coupling matrix.

    ``right_vectors`` holds unit-2-norm right eigenvectors as columns,
    ordered like ``eigenvalues``.  ``mode_matrix`` holds the
    biorthogonally normalized columns c_j = phi_j / sqrt(phi_j^T phi_j),
    which satisfy mode_matrix^T mode_matrix = identity when no mode is
    flagged exceptional.  ``source_diagonal`` is the diagonal of the
    analyzed matrix, kept for locating midgap modes relative to the
    bulk on-site value.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    self_overlaps: np.ndarray
    mode_matrix: np.ndarray
    exceptional: np.ndarray
    source_diagonal: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def any_exceptional(self) -> bool:
        return bool(np.any(self.exceptional))

    def spatial_weights(self) -> np.ndarray:
        """|amplitude|^2 per layer for each mode, rows summing to one.

        Row j gives the weight profile of mode j across the resonant
        layers, from the unit-normalized right eigenvector.
        """
        return np.abs(self.right_vectors.T) ** 2


def eigensystem(
    matrix: NuclearHamiltonian | np.ndarray,
    exceptional_tol: float = DEFAULT_EXCEPTIONAL_TOL,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> EigenSystem:
    """Diagonalize a coupling matrix into its quasi-normal modes."""
    h = matrix.matrix if isinstance(matrix, NuclearHamiltonian) else np.asarray(matrix)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    h = h.astype(complex, copy=False)

    values, vectors = np.linalg.eig(h)
    order = np.argsort(-values.real, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)

    scale = np.linalg.norm(h)
    residual = np.linalg.norm(h @ vectors - vectors * values, axis=0)
    worst = float(residual.max() / max(scale, 1e-300))
    if worst > residual_tol:
        raise NumericsError(
            f"eigendecomposition residual {worst:.3e} exceeds {residual_tol:.1e}"
        )

    overlaps = np.einsum("ij,ij->j", vectors, vectors)
    exceptional = np.abs(overlaps) < exceptional_tol
    # sqrt branch is irrelevant downstream: mode amplitudes only ever
    # enter squared
    safe = np.where(exceptional, 1.0, overlaps)
    modes = vectors / np.sqrt(safe)

    return EigenSystem(
        eigenvalues=values,
        right_vectors=vectors,
        self_overlaps=overlaps,
        mode_matrix=modes,
        exceptional=exceptional,
        source_diagonal=np.diag(h).copy(),
    )


def quasi_eigen_drive(system: EigenSystem, drive: DriveVector | np.ndarray) -> np.ndarray:
    """Expand a drive vector over the biorthogonal decay modes.

    Component j is c_j^T Omega; the scattered amplitude of mode j is
    proportional to its square divided by (lambda_j + Delta).
    """
    omega = drive.omega if isinstance(drive, DriveVector) else np.asarray(drive)
    if omega.shape != (system.size,):
        raise ValueError(
            f"drive length {omega.shape} does not match system size {system.size}"
        )
    return system.mode_matrix.T @ omega


@dataclass(frozen=True)
class EdgeReport:
    """Which modes live on the outermost resonant layers."""

    edge_weights: np.ndarray
    midgap_indices: tuple[int, int]
    bulk_reference: float

    def modes_above(self, threshold: float) -> np.ndarray:
        return np.flatnonzero(self.edge_weights > threshold)


def edge_report(system: EigenSystem) -> EdgeReport:
    """Measure edge localization and pick the two most midgap modes.

    Edge weight of a mode is its summed probability weight on the first
    and last resonant layers.  The midgap pair is chosen as the two
    eigenvalues whose real parts sit closest to the mean on-site energy
    of the interior layers, which is where symmetry-protected edge
    modes are pinned.
    """
    if system.size < 4:
        raise ValueError("edge analysis needs at least four resonant layers")
    weights = system.spatial_weights()
    edge = weights[:, 0] + weights[:, -1]
    bulk = float(np.mean(system.source_diagonal[2:-2].real))
    distance = np.abs(system.eigenvalues.real - bulk)
    first, second = np.argsort(distance, kind="stable")[:2]
    return EdgeReport(
        edge_weights=edge,
        midgap_indices=(int(first), int(second)),
        bulk_reference=bulk,
    )
