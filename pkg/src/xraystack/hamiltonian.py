"""Effective non-Hermitian coupling matrix of the resonant-layer chain.

Each thin resonant layer j, located at depth z_j, behaves as a single
collective two-level mode.  Eliminating the photon field leaves an M x M
complex symmetric matrix, stored here in units of the single-nucleus
linewidth gamma0:

    H[j, l] = (Delta + i/2) delta_jl + kappa * G(z_j, z_l)

where Delta is the drive detuning (in gamma0), the i/2 is the intrinsic
single-layer decay, and the photon-mediated part is the layered-medium
Green's function weighted by

    kappa = 3 pi rho_A f_rad gamma0 / k      [gamma0 per nm]

with rho_A the areal number density of resonant nuclei (nm^-2), f_rad
the radiative branching fraction, and k the vacuum wavenumber.  kappa
follows from calibrating the layer's magnetic transition moment against
its radiative width, so the real part of kappa G is the photon-exchange
level shift and the imaginary part the collective (super- or
subradiant) decay correction.  Hermiticity is absent by design: the
matrix is complex symmetric, inherited from optical reciprocity.

The drive vector uses the square-root normalization

    Omega[j] = sqrt(kappa / (2 p_src)) * psi(z_j)

with psi the unit-incidence driven field and p_src the superstrate
vertical wavenumber; with this choice the resonant part of the
reflection amplitude is exactly -i sum_j (Omega_eig[j])^2 / (lambda_j +
Delta) with no further prefactor.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .greens import (
    DEFAULT_SOURCE_OFFSET_NM,
    LayeredGreens,
    ScatterContext,
    require_superstrate_source,
)
from .materials import MaterialsDB, NuclearParams
from .stack import LayerStack, StackConfig, build_stack


@dataclass(frozen=True)
class NuclearHamiltonian:
    """Coupling matrix in gamma0 units plus the scales that produced it."""

    matrix: np.ndarray
    detuning_gamma0: float
    gamma0_ev: float
    kappa_per_nm: complex
    centers_nm: tuple[float, ...]
    angle_mrad: float

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def detuned(self, delta_gamma0: float) -> np.ndarray:
        """Matrix with the scalar detuning moved to ``delta_gamma0``."""
        shift = delta_gamma0 - self.detuning_gamma0
        return self.matrix + shift * np.eye(self.size)


@dataclass(frozen=True)
class DriveVector:
    """Per-layer drive amplitudes in the square-root normalization."""

    omega: np.ndarray
    coupling_scale: complex
    z_src_nm: float

    @property
    def size(self) -> int:
        return self.omega.shape[0]


def _resonant_sheet(stack: LayerStack) -> tuple[NuclearParams, float]:
    """Nuclear parameters and areal density (nm^-2) of the resonant layers."""
    layers = stack.resonant_layers()
    if not layers:
        raise ConfigError("stack contains no resonant layers")
    first = layers[0]
    for layer in layers[1:]:
        if layer.material.name != first.material.name:
            raise ConfigError("resonant layers must share one material")
        if abs(layer.thickness_nm - first.thickness_nm) > 1e-12:
            raise ConfigError("resonant layers must share one thickness")
    nuclear = first.material.nuclear
    assert nuclear is not None
    areal = nuclear.number_density_per_nm3 * first.thickness_nm
    return nuclear, areal


def coupling_constant(nuclear: NuclearParams, areal_density_per_nm2: float) -> float:
    """kappa in gamma0 per nm; see the module docstring."""
    return (
        3.0
        * math.pi
        * areal_density_per_nm2
        * nuclear.radiative_fraction
        / nuclear.wavenumber_per_nm
    )


def build_hamiltonian(
    stack: LayerStack,
    ctx: ScatterContext,
    detuning_gamma0: float = 0.0,
    solution: LayeredGreens | None = None,
) -> NuclearHamiltonian:
    """Assemble the coupling matrix at a fixed drive detuning.

    The Green's function is evaluated once per unordered layer pair, so
    complex symmetry holds exactly rather than to round-off.
    """
    nuclear, areal = _resonant_sheet(stack)
    gf = solution if solution is not None else LayeredGreens(stack, ctx)
    centers = stack.resonant_centers_nm
    m = len(centers)
    kappa = coupling_constant(nuclear, areal)

    matrix = np.empty((m, m), dtype=complex)
    for j in range(m):
        for l in range(j, m):
            value = kappa * gf.evaluate(centers[j], centers[l])
            matrix[j, l] = value
            matrix[l, j] = value
    matrix[np.diag_indices(m)] += detuning_gamma0 + 0.5j

    return NuclearHamiltonian(
        matrix=matrix,
        detuning_gamma0=detuning_gamma0,
        gamma0_ev=nuclear.gamma0_ev,
        kappa_per_nm=kappa,
        centers_nm=tuple(centers),
        angle_mrad=ctx.angle_mrad,
    )


def rabi_vector(
    stack: LayerStack,
    ctx: ScatterContext,
    z_src_nm: float = -DEFAULT_SOURCE_OFFSET_NM,
    route: str = "greens",
    solution: LayeredGreens | None = None,
) -> DriveVector:
    """Drive amplitudes Omega[j] for unit incident field.

    route="greens" builds psi(z_j) from the Green's function with an
    explicit source plane at z_src (phase divided out, so the result is
    independent of z_src); route="field" reads the driven field profile
    directly.  The two agree to solver precision and serve as mutual
    cross-checks.
    """
    if route not in ("greens", "field"):
        raise ConfigError(f"unknown drive route {route!r}")
    require_superstrate_source(stack, z_src_nm)
    nuclear, areal = _resonant_sheet(stack)
    gf = solution if solution is not None else LayeredGreens(stack, ctx)
    centers = np.asarray(stack.resonant_centers_nm)
    kappa = coupling_constant(nuclear, areal)
    p_src = gf.p_src
    scale = cmath.sqrt(kappa / (2.0 * p_src))

    if route == "field":
        psi = gf.field_profile(centers)
    else:
        phase = np.exp(1j * p_src * z_src_nm)
        psi = np.array(
            [-2j * p_src * gf.evaluate(z, z_src_nm) * phase for z in centers]
        )
    return DriveVector(
        omega=scale * np.asarray(psi), coupling_scale=scale**2, z_src_nm=z_src_nm
    )


def coupling_curve(
    config: StackConfig,
    db: MaterialsDB,
    ctx: ScatterContext,
    spacings_nm: np.ndarray,
) -> np.ndarray:
    """Photon-mediated pair coupling versus spacer thickness.

    For each spacing d a two-cavity stack is built and the off-diagonal
    coupling (no detuning or intrinsic-width term) between its two
    resonant layers is returned, in gamma0.
    """
    values = np.empty(len(spacings_nm), dtype=complex)
    for i, d in enumerate(spacings_nm):
        pair_cfg = replace(config, n_cavities=2, d_v_nm=float(d))
        stack = build_stack(pair_cfg, db)
        ham = build_hamiltonian(stack, ctx)
        values[i] = ham.matrix[0, 1]
    return values
