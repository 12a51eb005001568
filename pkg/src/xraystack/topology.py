"""Bulk classification of the cavity chain: Bloch model and winding number.

The resonant layers pair into two-site cells (the spacer alternation
makes bonds inequivalent), so the interior of a long chain is a
two-band lattice.  ``extract_bulk`` reads the cell-local and
cell-to-cell coupling blocks off an assembled coupling matrix, ignoring
the outermost cell on each side where the mirrors distort the
environment.  ``winding_number`` then evaluates the biorthogonal Wilson
loop of each band over the Brillouin zone.  For a chain whose
inter-cell bond beats the intra-cell bond the loop closes with phase
pi per band, reported as winding 1; the opposite dimerization closes
with phase 0 and reports 0.  Those are the only two values the
mirror symmetry of the averaged cell allows, so the invariant is the
parity of the loop phase and a per-band gauge twist (an even multiple
of pi contributed by the eigensolver's arbitrary phases) cannot
corrupt it.

The winding is only defined while the two bands stay separated
everywhere on the loop; a closing gap raises a numeric error, which the
phase-diagram driver converts into a masked grid point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericsError
from .hamiltonian import NuclearHamiltonian

DEFAULT_N_K = 2048
DEFAULT_GAP_TOL = 1e-6
PHASE_DIAGRAM_GAP_TOL = 1e-3


@dataclass(frozen=True)
class BulkModel:
    """Two-band lattice blocks averaged from the chain interior.

    ``harmonics[m - 1]`` couples a cell to its m-th neighbor on one
    side; the opposite side enters as the transpose, as matrix symmetry
    of the parent coupling matrix dictates.  ``onsite`` is the mean
    diagonal removed from ``h0`` (it only shifts both bands rigidly).
    ``spread`` records the largest relative deviation seen while
    averaging equivalent entries, as a measure of how bulk-like the
    interior actually is.
    """

    h0: np.ndarray
    harmonics: tuple[np.ndarray, ...]
    onsite: complex
    spread: float

    @property
    def h1(self) -> np.ndarray:
        return self.harmonics[0]

    @property
    def reach(self) -> int:
        return len(self.harmonics)

    def bloch(self, k: float) -> np.ndarray:
        out = np.array(self.h0)
        for m, block in enumerate(self.harmonics, start=1):
            phase = np.exp(1j * m * k)
            out = out + block * phase + block.T / phase
        return out

    def band_scale(self) -> float:
        return float(
            np.linalg.norm(self.h0)
            + 2.0 * sum(np.linalg.norm(b) for b in self.harmonics)
        )


def extract_bulk(
    matrix: NuclearHamiltonian | np.ndarray,
    reach: int | None = None,
) -> BulkModel:
    """Average the interior of a coupling matrix into lattice blocks.

    Needs an even number of resonant layers, at least eight, so that
    after dropping one boundary cell per side at least two full cells
    remain to read an inter-cell block from.  ``reach`` is the farthest
    cell offset whose coupling block is kept; the mediating field falls
    off slowly enough that truncating at nearest cells visibly moves
    the phase boundary, so by default the extraction keeps up to two
    offsets when the chain affords them.
    """
    h = matrix.matrix if isinstance(matrix, NuclearHamiltonian) else np.asarray(matrix)
    m = h.shape[0]
    if h.ndim != 2 or h.shape[1] != m:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if m < 8 or m % 2:
        raise ValueError(
            f"bulk extraction needs an even chain of >= 8 layers, got {m}"
        )

    first = 2  # drop the boundary cell on each side
    cells = [(j, j + 1) for j in range(first, m - 2, 2)]
    if reach is None:
        reach = min(2, len(cells) - 1)
    elif not 1 <= reach <= len(cells) - 1:
        raise ValueError(
            f"reach {reach} needs at least {2 * reach + 6} layers, got {m}"
        )

    def averaged(entries: list[complex]) -> tuple[complex, float]:
        arr = np.asarray(entries)
        mean = arr.mean()
        scale = max(np.abs(arr).max(), 1e-300)
        return mean, float(np.abs(arr - mean).max() / scale)

    eps_a, s1 = averaged([h[a, a] for a, _ in cells])
    eps_b, s2 = averaged([h[b, b] for _, b in cells])
    v, s3 = averaged([h[a, b] for a, b in cells])
    spread = max(s1, s2, s3)

    harmonics = []
    for offset in range(1, reach + 1):
        pairs = list(zip(cells[:-offset], cells[offset:]))
        blocks = np.array(
            [
                [[h[a, c] for ((a, b), (c, d)) in pairs], [h[a, d] for ((a, b), (c, d)) in pairs]],
                [[h[b, c] for ((a, b), (c, d)) in pairs], [h[b, d] for ((a, b), (c, d)) in pairs]],
            ]
        )
        block = blocks.mean(axis=2)
        scale = max(np.abs(block).max(), 1e-300)
        spread = max(
            spread,
            float(max(np.abs(blocks[i, j] - block[i, j]).max() / scale for i in range(2) for j in range(2))),
        )
        harmonics.append(block)

    onsite = (eps_a + eps_b) / 2.0
    h0 = np.array([[eps_a - onsite, v], [v, eps_b - onsite]])
    return BulkModel(h0=h0, harmonics=tuple(harmonics), onsite=complex(onsite), spread=spread)


@dataclass(frozen=True)
class WindingResult:
    """Outcome of one Wilson-loop evaluation.

    ``per_band`` holds the real loop phases in units of pi; ``raw`` is
    the unrounded complex total of the first band, whose imaginary part
    measures how far the discretized loop is from closing exactly.
    """

    value: int
    per_band: tuple[float, float]
    min_gap: float
    n_k: int
    raw: complex = 0j

    @property
    def quantization_error(self) -> float:
        return max(abs(w - round(w)) for w in self.per_band)


def _band_follow_eig(bloch: np.ndarray, prev_vectors: np.ndarray | None):
    """Eigenpairs of a 2x2 Bloch matrix, ordered to continue prev_vectors.

    Without a predecessor (the k = 0 anchor) bands are ordered by
    descending real part so repeated runs anchor identically.
    """
    values, vectors = np.linalg.eig(bloch)
    if prev_vectors is None:
        order = sorted(range(values.size), key=lambda i: (-values[i].real, -values[i].imag))
        values = values[list(order)]
        vectors = vectors[:, list(order)]
    else:
        # pairing decided on conjugated overlaps: the plain dot product
        # can self-orthogonalize and misroute the continuation
        straight = abs(np.vdot(prev_vectors[:, 0], vectors[:, 0])) + abs(
            np.vdot(prev_vectors[:, 1], vectors[:, 1])
        )
        crossed = abs(np.vdot(prev_vectors[:, 0], vectors[:, 1])) + abs(
            np.vdot(prev_vectors[:, 1], vectors[:, 0])
        )
        if crossed > straight:
            values = values[::-1]
            vectors = vectors[:, ::-1]
    return values, vectors


def winding_number(
    model: BulkModel,
    n_k: int = DEFAULT_N_K,
    gap_tol: float = DEFAULT_GAP_TOL,
) -> WindingResult:
    """Biorthogonal Wilson loop of both bands around the Brillouin zone.

    Accumulates per-step logarithms of the diagonal of V_i^{-1} V_{i+1}
    along the closed loop; the telescoped product is gauge invariant
    modulo full turns, and the surviving parity (loop phase 0 or pi per
    band) is the reported invariant.  Raises a numeric error when the
    bands approach each other closer than ``gap_tol`` times the overall
    band scale anywhere on the loop, or when the two bands disagree.
    """
    if n_k < 16:
        raise ValueError("winding needs at least 16 k-points")
    ks = 2.0 * np.pi * np.arange(n_k) / n_k
    scale = model.band_scale()
    threshold = gap_tol * max(scale, 1e-300)

    values_0, vectors_0 = _band_follow_eig(model.bloch(0.0), None)
    vectors_prev = vectors_0
    min_gap = abs(values_0[0] - values_0[1])
    if min_gap < threshold:
        raise NumericsError(
            f"band gap {min_gap:.3e} below {threshold:.3e} at k=0; winding undefined"
        )

    # Left eigenvectors are rows of the inverse right-eigenvector matrix
    # (the Bloch matrix obeys H(-k) = H(k)^T, so at fixed k it is a
    # general complex matrix and left != right^T).  With them each step
    # contributes log of the diagonal of V_i^{-1} V_{i+1}, which
    # telescopes to a gauge-invariant loop phase.
    log_sum = np.zeros(2, dtype=complex)
    left_prev = np.linalg.inv(vectors_0)
    for k in ks[1:]:
        values, vectors = _band_follow_eig(model.bloch(k), vectors_prev)
        gap = abs(values[0] - values[1])
        min_gap = min(min_gap, gap)
        if gap < threshold:
            raise NumericsError(
                f"band gap {gap:.3e} below {threshold:.3e} at k={k:.4f}; "
                "winding undefined"
            )
        step = left_prev @ vectors
        log_sum += np.log(np.diag(step))
        vectors_prev = vectors
        left_prev = np.linalg.inv(vectors)

    # close the loop against the stored starting vectors
    swap = abs(np.vdot(vectors_prev[:, 0], vectors_0[:, 1])) > abs(
        np.vdot(vectors_prev[:, 0], vectors_0[:, 0])
    )
    if swap:
        raise NumericsError("bands braid around the loop; winding undefined")
    log_sum += np.log(np.diag(left_prev @ vectors_0))

    # Each band accumulates a loop phase quantized to multiples of pi by
    # the inversion symmetry of the averaged cell.  The raw totals carry
    # a gauge-dependent even number of pi per band, so the invariant
    # content is each phase modulo 2 pi: zero for the trivial
    # dimerization, pi for the inverted one.  Both bands must agree.
    per_band = tuple((1j * log_sum / np.pi).real)
    rounded = [round(w) for w in per_band]
    classes = [int(r) % 2 for r in rounded]
    if classes[0] != classes[1]:
        raise NumericsError(
            f"band loop phases inconsistent: {per_band[0]:.6f} vs {per_band[1]:.6f}"
        )
    return WindingResult(
        value=classes[0],
        per_band=(float(per_band[0]), float(per_band[1])),
        min_gap=float(min_gap),
        n_k=n_k,
        raw=complex(1j * log_sum[0] / np.pi),
    )


@dataclass(frozen=True)
class PhaseDiagram:
    d_v_nm: np.ndarray
    d_w_nm: np.ndarray
    winding: np.ndarray
    defined: np.ndarray
    min_gap: np.ndarray


def phase_diagram(
    build_matrix,
    d_v_values: np.ndarray,
    d_w_values: np.ndarray,
    n_k: int = DEFAULT_N_K,
    gap_tol: float = PHASE_DIAGRAM_GAP_TOL,
) -> PhaseDiagram:
    """Winding over a spacer-thickness grid.

    ``build_matrix(d_v, d_w)`` must return the coupling matrix for one
    geometry; this function owns only the classification sweep, so the
    caller decides stack size, angle and materials.  Grid points whose
    bands close (within ``gap_tol``) are reported with ``defined``
    False and winding 0.
    """
    d_v_values = np.asarray(d_v_values, dtype=float)
    d_w_values = np.asarray(d_w_values, dtype=float)
    shape = (d_v_values.size, d_w_values.size)
    winding = np.zeros(shape, dtype=int)
    defined = np.zeros(shape, dtype=bool)
    min_gap = np.full(shape, np.nan)
    for i, dv in enumerate(d_v_values):
        for j, dw in enumerate(d_w_values):
            model = extract_bulk(build_matrix(float(dv), float(dw)))
            try:
                result = winding_number(model, n_k=n_k, gap_tol=gap_tol)
            except NumericsError:
                continue
            winding[i, j] = result.value
            defined[i, j] = True
            min_gap[i, j] = result.min_gap
    return PhaseDiagram(
        d_v_nm=d_v_values,
        d_w_nm=d_w_values,
        winding=winding,
        defined=defined,
        min_gap=min_gap,
    )
