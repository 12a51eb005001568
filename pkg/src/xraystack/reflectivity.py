"""Energy-resolved reflectivity of the resonant stack.

The electronic scattering is detuning independent over the few-hundred
natural-linewidth window of interest, so it enters as a constant
baseline amplitude.  The nuclear chain adds a coherent correction: in
the quasi-eigenbasis of the coupling matrix each mode contributes one
complex Lorentzian,

    amplitude(Delta) = r_e - i sum_j (Omega_eig[j])^2 / (lambda_j + Delta)

centered at Delta = -Re lambda_j with full width 2 Im lambda_j.  The
same amplitude follows without any eigendecomposition from the linear
steady state S = -(H + Delta I)^{-1} Omega as r_e + i Omega . S, which
this module keeps as an independent route; the two agree to solver
precision and cross-check each other.

Both routes return ratios to the incident amplitude; absolute field
scales never appear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import find_peaks

from .errors import ConfigError
from .greens import LayeredGreens, ScatterContext
from .hamiltonian import DriveVector, NuclearHamiltonian, build_hamiltonian, rabi_vector
from .spectral import EigenSystem, eigensystem, quasi_eigen_drive
from .stack import LayerStack

DEFAULT_SPAN_GAMMA0 = 200.0
DEFAULT_POINTS = 4001


def detuning_grid(
    span_gamma0: float = DEFAULT_SPAN_GAMMA0, points: int = DEFAULT_POINTS
) -> np.ndarray:
    """Symmetric detuning grid in gamma0 units."""
    if points < 2 or span_gamma0 <= 0:
        raise ConfigError("detuning grid needs span > 0 and at least 2 points")
    return np.linspace(-span_gamma0, span_gamma0, points)


@dataclass(frozen=True)
class ReflectivitySpectrum:
    """Complex outgoing/incident amplitude ratio on a detuning grid.

    ``mode_centers``, ``mode_full_widths`` and ``mode_strengths`` carry
    the per-mode Lorentzian decomposition when the eigenmode route
    produced the spectrum, and are None for the linear-solve route.
    ``skipped`` marks grid points whose shifted linear system could not
    be solved (amplitude NaN there); it stays all False in practice
    because every mode keeps a positive decay rate.
    """

    detuning_gamma0: np.ndarray
    amplitude: np.ndarray
    baseline_amplitude: complex
    method: str
    mode_centers: np.ndarray | None = None
    mode_full_widths: np.ndarray | None = None
    mode_strengths: np.ndarray | None = None
    skipped: np.ndarray | None = None

    @property
    def reflectivity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    @property
    def baseline(self) -> float:
        return float(abs(self.baseline_amplitude) ** 2)


def _check_sizes(hamiltonian: NuclearHamiltonian, omega: np.ndarray) -> None:
    if omega.shape != (hamiltonian.size,):
        raise ConfigError(
            f"drive length {omega.shape} does not match matrix size {hamiltonian.size}"
        )


def spectrum(
    hamiltonian: NuclearHamiltonian,
    system: EigenSystem,
    drive: DriveVector,
    baseline_amplitude: complex,
    detuning_gamma0: np.ndarray | None = None,
) -> ReflectivitySpectrum:
    """Reflection amplitude via the quasi-eigenmode Lorentzian sum.

    Falls back to the linear-solve route when the eigensystem carries an
    exceptional-point flag, because mode strengths are then undefined.
    """
    if system.any_exceptional:
        return linear_solve_spectrum(hamiltonian, drive, baseline_amplitude, detuning_gamma0)
    grid = detuning_grid() if detuning_gamma0 is None else np.asarray(detuning_gamma0, float)
    _check_sizes(hamiltonian, drive.omega)
    if system.size != hamiltonian.size:
        raise ConfigError("eigensystem size does not match the coupling matrix")

    strengths = quasi_eigen_drive(system, drive.omega) ** 2
    # the matrix already carries its build-time detuning on the diagonal
    shift = grid - hamiltonian.detuning_gamma0
    denom = system.eigenvalues[None, :] + shift[:, None]
    amplitude = baseline_amplitude - 1j * (strengths[None, :] / denom).sum(axis=1)
    return ReflectivitySpectrum(
        detuning_gamma0=grid,
        amplitude=amplitude,
        baseline_amplitude=complex(baseline_amplitude),
        method="eigenmodes",
        mode_centers=-system.eigenvalues.real,
        mode_full_widths=2.0 * system.eigenvalues.imag,
        mode_strengths=strengths,
        skipped=np.zeros(grid.size, dtype=bool),
    )


def linear_solve_spectrum(
    hamiltonian: NuclearHamiltonian,
    drive: DriveVector,
    baseline_amplitude: complex,
    detuning_gamma0: np.ndarray | None = None,
) -> ReflectivitySpectrum:
    """Reflection amplitude by solving the shifted steady state per point."""
    grid = detuning_grid() if detuning_gamma0 is None else np.asarray(detuning_gamma0, float)
    _check_sizes(hamiltonian, drive.omega)

    m = hamiltonian.size
    shift = grid - hamiltonian.detuning_gamma0
    shifted = hamiltonian.matrix[None, :, :] + shift[:, None, None] * np.eye(m)[None, :, :]
    skipped = np.zeros(grid.size, dtype=bool)
    steady = np.empty((grid.size, m), dtype=complex)
    rhs = -np.broadcast_to(drive.omega, (grid.size, m))[:, :, None]
    try:
        steady[:] = np.linalg.solve(shifted, rhs)[:, :, 0]
    except np.linalg.LinAlgError:
        for i in range(grid.size):
            try:
                steady[i] = np.linalg.solve(shifted[i], -drive.omega)
            except np.linalg.LinAlgError:
                steady[i] = np.nan
                skipped[i] = True
    amplitude = baseline_amplitude + 1j * steady @ drive.omega
    return ReflectivitySpectrum(
        detuning_gamma0=grid,
        amplitude=amplitude,
        baseline_amplitude=complex(baseline_amplitude),
        method="linear_solve",
        skipped=skipped,
    )


def compute_reflectivity(
    stack: LayerStack,
    ctx: ScatterContext,
    detuning_gamma0: np.ndarray | None = None,
    method: str = "auto",
) -> ReflectivitySpectrum:
    """One-call driver: field solution, coupling matrix, drive, spectrum.

    ``method`` picks "eigenmodes" or "linear_solve" explicitly; "auto"
    uses the eigenmode route with its exceptional-point fallback.  All
    pieces share one field solution so the baseline is the exact
    electronic amplitude of the same solve.
    """
    if method not in ("auto", "eigenmodes", "linear_solve"):
        raise ConfigError(f"unknown reflectivity method {method!r}")
    solution = LayeredGreens(stack, ctx)
    hamiltonian = build_hamiltonian(stack, ctx, solution=solution)
    drive = rabi_vector(stack, ctx, solution=solution)
    baseline = solution.reflectance_amplitude
    if method == "linear_solve":
        return linear_solve_spectrum(hamiltonian, drive, baseline, detuning_gamma0)
    return spectrum(hamiltonian, eigensystem(hamiltonian.matrix), drive, baseline, detuning_gamma0)


@dataclass(frozen=True)
class FeatureReport:
    """Peaks, the dips between them, and a one-peak fit of a spectrum."""

    maxima_detuning: np.ndarray
    maxima_reflectivity: np.ndarray
    minima_detuning: np.ndarray
    minima_reflectivity: np.ndarray
    fit_baseline: float
    fit_height: float
    fit_center: float
    fit_width: float
    r_squared: float

    @property
    def n_maxima(self) -> int:
        return self.maxima_detuning.size


def _lorentzian(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    base, height, center, width = params
    return base + height / (1.0 + ((x - center) / width) ** 2)


def feature_extract(
    rs: ReflectivitySpectrum, prominence_fraction: float = 0.02
) -> FeatureReport:
    """Local maxima, interior minima, and a baseline-plus-one-Lorentzian fit.

    Peaks are counted when they rise above ``prominence_fraction`` of
    the spectrum's full range, which ignores floating-point ripple on
    flat spectra.  The fit quality is the coefficient of determination
    against the mean, so a flat spectrum reports 1 (the constant fit is
    exact) and a genuinely multi-peaked one scores visibly below 1.
    """
    x = rs.detuning_gamma0
    r = rs.reflectivity
    keep = np.isfinite(r)
    x, r = x[keep], r[keep]
    if x.size < 16:
        raise ConfigError("feature extraction needs at least 16 finite grid points")
    span = float(r.max() - r.min())
    flat_scale = max(r.max(), 1.0)

    if span <= 1e-12 * flat_scale:
        empty = np.array([])
        return FeatureReport(
            maxima_detuning=empty,
            maxima_reflectivity=empty,
            minima_detuning=empty,
            minima_reflectivity=empty,
            fit_baseline=float(r.mean()),
            fit_height=0.0,
            fit_center=0.0,
            fit_width=float(x.max() - x.min()),
            r_squared=1.0,
        )

    peaks, _ = find_peaks(r, prominence=prominence_fraction * span)
    minima = []
    for left, right in zip(peaks[:-1], peaks[1:]):
        minima.append(left + 1 + int(np.argmin(r[left + 1 : right])))
    minima = np.asarray(minima, dtype=int)

    center0 = float(x[int(np.argmax(r))])
    base0 = float(np.median(np.concatenate([r[: x.size // 10], r[-x.size // 10 :]])))
    height0 = float(r.max() - base0)
    half = r.max() - 0.5 * height0
    above = np.flatnonzero(r >= half)
    width0 = max(float(x[above[-1]] - x[above[0]]) / 2.0, float(x[1] - x[0]))
    fit = least_squares(
        lambda p: _lorentzian(p, x) - r,
        x0=np.array([base0, height0, center0, width0]),
        bounds=(
            [-np.inf, -np.inf, float(x.min()), float(x[1] - x[0]) / 10.0],
            [np.inf, np.inf, float(x.max()), 10.0 * float(x.max() - x.min())],
        ),
    )
    residual = _lorentzian(fit.x, x) - r
    ss_res = float(residual @ residual)
    ss_tot = float(((r - r.mean()) ** 2).sum())
    r_squared = 1.0 - ss_res / ss_tot

    return FeatureReport(
        maxima_detuning=x[peaks],
        maxima_reflectivity=r[peaks],
        minima_detuning=x[minima],
        minima_reflectivity=r[minima],
        fit_baseline=float(fit.x[0]),
        fit_height=float(fit.x[1]),
        fit_center=float(fit.x[2]),
        fit_width=float(fit.x[3]),
        r_squared=r_squared,
    )
