"""One-dimensional Green's function of a layered medium at grazing incidence.

Geometry and conventions
------------------------
* z runs downward, z = 0 at the top surface of the finite stack, nm units.
  The superstrate fills z < 0, the substrate z > total thickness.
* Plane-wave time dependence exp(-i w t); a downward travelling wave is
  exp(+i k_z z), upward is exp(-i k_z z).
* The grazing angle phi is measured from the surface, so the conserved
  in-plane wavenumber is p_rho = n_top k cos(phi) and the superstrate
  vertical wavenumber is p_src = n_top k sin(phi).
* Per-medium vertical wavenumbers k_z = sqrt(n^2 k^2 - p_rho^2) take the
  branch Im(k_z) >= 0 (decay into absorbers, outgoing at infinity).
* G solves (d^2/dz^2 + k_z(z)^2) G(z, z') = -delta(z - z') for the scalar
  s-polarized field, so in a uniform medium
      G(z, z') = i exp(i k_z |z - z'|) / (2 k_z).
  For p polarization the same construction applies to the operator
  d/dz (1/eps) d/dz + (k^2 - p_rho^2/eps) with the jump carried by
  (1/eps) dG/dz; at mrad angles and |n-1| ~ 1e-5 the two kernels are
  numerically indistinguishable, s is the default everywhere.

Construction
------------
Two fundamental solutions are assembled once per (stack, context):
``D`` satisfies the upward radiation condition in the superstrate and
``U`` the downward one in the substrate.  Their coefficients are stored
per medium, referenced at the boundary facing the solution's own origin
side, which keeps every stored amplitude on the growing branch and makes
the evaluation immune to the exponential blow-up a naive transfer-matrix
product suffers in thick absorbing spacers.  With the (constant)
Wronskian-type invariant W = w (D U' - D' U),

    G(z, z') = - D(z_min) U(z_max) / W,

manifestly reciprocal and continuous, with the correct derivative jump.

The driven scattering solution with unit incident amplitude at the top
surface is psi(z) = U(z) / a_sup, where a_sup is the down-going
coefficient of U in the superstrate; its up-going part gives the
electronic reflection amplitude referenced at z = 0.  Any source point
z_src < 0 in the superstrate reproduces psi through
-2 i p_src G(z, z_src) exp(i p_src z_src), which is how the driving
terms elsewhere in the package stay independent of the bookkeeping
height z_src.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericsError
from .materials import DEFAULT_ENERGY_KEV, wavenumber_per_nm
from .stack import LayerStack

#: Height of the bookkeeping source plane above the top surface (nm).
DEFAULT_SOURCE_OFFSET_NM = 0.1

#: Largest tolerated total e-folding through the finite layers before the
#: coefficient passes would degrade; reached only by pathological stacks.
_MAX_OPACITY = 600.0

#: How far outside the finite stack an evaluation point may lie (nm).
_DOMAIN_MARGIN_NM = 1.0e4


@dataclass(frozen=True)
class ScatterContext:
    """Incidence conditions for a single monochromatic calculation."""

    angle_mrad: float
    energy_kev: float = DEFAULT_ENERGY_KEV
    polarization: str = "s"

    def __post_init__(self) -> None:
        if self.polarization not in ("s", "p"):
            raise ConfigError(
                f"polarization must be 's' or 'p', got {self.polarization!r}"
            )
        if not 0.0 < self.angle_mrad < 1570.0:
            raise ConfigError(
                f"grazing angle must lie in (0, 1570) mrad, got {self.angle_mrad}"
            )
        if not self.energy_kev > 0.0:
            raise ConfigError(f"energy_kev must be > 0, got {self.energy_kev}")

    @property
    def vacuum_wavenumber_per_nm(self) -> float:
        return wavenumber_per_nm(self.energy_kev)

    @property
    def grazing_sin(self) -> float:
        return math.sin(self.angle_mrad * 1e-3)

    @property
    def grazing_cos(self) -> float:
        return math.cos(self.angle_mrad * 1e-3)


def _branch_sqrt(value: complex) -> complex:
    root = cmath.sqrt(value)
    if root.imag < 0.0:
        root = -root
    if root.imag == 0.0 and root.real < 0.0:
        root = -root
    return root


class LayeredGreens:
    """Cached two-solution representation of G for one (stack, context).

    Media are indexed 0 (superstrate), 1..L (finite layers), L+1
    (substrate).  All evaluation methods are pure functions of the cached
    coefficient tables.
    """

    def __init__(self, stack: LayerStack, ctx: ScatterContext):
        self.stack = stack
        self.ctx = ctx

        k = ctx.vacuum_wavenumber_per_nm
        n_list = (
            [stack.superstrate.refractive_index]
            + [layer.material.refractive_index for layer in stack.layers]
            + [stack.substrate.refractive_index]
        )
        self._n = np.asarray(n_list, dtype=complex)
        self.p_rho = self._n[0] * k * ctx.grazing_cos
        self.kz = np.array(
            [_branch_sqrt((n * k) ** 2 - self.p_rho**2) for n in self._n]
        )
        if ctx.polarization == "p":
            self._w = 1.0 / self._n**2
        else:
            self._w = np.ones_like(self._n)

        self._tops = np.array([layer.z_top_nm for layer in stack.layers])
        self._thick = np.array([layer.thickness_nm for layer in stack.layers])
        self._z_bottom = stack.total_thickness_nm
        if len(stack.layers):
            self._interfaces = np.append(self._tops, self._z_bottom)
        else:
            self._interfaces = np.array([0.0])

        opacity = float(np.sum(np.abs(self.kz[1:-1].imag) * self._thick))
        if opacity > _MAX_OPACITY:
            raise NumericsError(
                f"stack optical depth {opacity:.0f} e-foldings exceeds the "
                "stable evaluation range"
            )

        self._build_downward()
        self._build_upward()
        # Wronskian-type invariant, exact in the superstrate.
        self.wronskian = self._w[0] * 2j * self.kz[0] * self._a_up[0]

    # -- fundamental solution construction --------------------------------

    def _build_downward(self) -> None:
        """Solution D: purely up-going in the superstrate.

        Coefficients referenced at each medium's top boundary (at z = 0
        for the superstrate).
        """
        n_media = len(self.kz)
        a = np.zeros(n_media, dtype=complex)
        b = np.zeros(n_media, dtype=complex)
        a[0], b[0] = 0.0, 1.0  # exp(-i kz z) above the stack
        value, slope = 1.0 + 0.0j, -1j * self.kz[0] * self._w[0]
        for m in range(1, n_media):
            ik = 1j * self.kz[m]
            half_diff = slope / (self._w[m] * ik)
            a[m] = 0.5 * (value + half_diff)
            b[m] = 0.5 * (value - half_diff)
            if m < n_media - 1:
                phase = np.exp(ik * self._thick[m - 1])
                up, dn = a[m] * phase, b[m] / phase
                value = up + dn
                slope = self._w[m] * ik * (up - dn)
        self._a_dn, self._b_dn = a, b

    def _build_upward(self) -> None:
        """Solution U: purely down-going in the substrate.

        Coefficients referenced at each medium's bottom boundary (at the
        stack bottom for the substrate, z = 0 for the superstrate).
        """
        n_media = len(self.kz)
        a = np.zeros(n_media, dtype=complex)
        b = np.zeros(n_media, dtype=complex)
        a[-1], b[-1] = 1.0, 0.0  # exp(+i kz (z - z_bottom)) below the stack
        value, slope = 1.0 + 0.0j, 1j * self.kz[-1] * self._w[-1]
        for m in range(n_media - 2, -1, -1):
            ik = 1j * self.kz[m]
            half_diff = slope / (self._w[m] * ik)
            a[m] = 0.5 * (value + half_diff)
            b[m] = 0.5 * (value - half_diff)
            if m > 0:
                phase = np.exp(ik * self._thick[m - 1])
                up, dn = a[m] / phase, b[m] * phase
                value = up + dn
                slope = self._w[m] * ik * (up - dn)
        self._a_up, self._b_up = a, b

    # -- evaluation -------------------------------------------------------

    def _medium_of(self, z: float) -> int:
        return int(np.searchsorted(self._interfaces, z, side="right"))

    def _check_domain(self, z: float) -> None:
        if not math.isfinite(z):
            raise ValueError(f"evaluation depth must be finite, got {z}")
        if z < -_DOMAIN_MARGIN_NM or z > self._z_bottom + _DOMAIN_MARGIN_NM:
            raise ValueError(
                f"depth {z} nm outside computational domain "
                f"[{-_DOMAIN_MARGIN_NM}, {self._z_bottom + _DOMAIN_MARGIN_NM}]"
            )

    def _local(self, z: float, medium: int, upward: bool) -> complex:
        """Local coordinate relative to the solution's reference boundary."""
        if medium == 0:
            return z
        if medium == len(self.kz) - 1:
            return z - self._z_bottom
        if upward:
            return z - (self._tops[medium - 1] + self._thick[medium - 1])
        return z - self._tops[medium - 1]

    def solution_down(self, z: float) -> complex:
        self._check_domain(z)
        m = self._medium_of(z)
        zeta = self._local(z, m, upward=False)
        ik = 1j * self.kz[m]
        return self._a_dn[m] * np.exp(ik * zeta) + self._b_dn[m] * np.exp(-ik * zeta)

    def solution_up(self, z: float) -> complex:
        self._check_domain(z)
        m = self._medium_of(z)
        zeta = self._local(z, m, upward=True)
        ik = 1j * self.kz[m]
        return self._a_up[m] * np.exp(ik * zeta) + self._b_up[m] * np.exp(-ik * zeta)

    def evaluate(self, z_nm: float, zp_nm: float) -> complex:
        """G(z, z') in nm; reciprocal by construction."""
        lo, hi = (z_nm, zp_nm) if z_nm <= zp_nm else (zp_nm, z_nm)
        return complex(-self.solution_down(lo) * self.solution_up(hi) / self.wronskian)

    # -- derived driven-field quantities ----------------------------------

    @property
    def p_src(self) -> complex:
        """Vertical wavenumber of the incident wave in the superstrate."""
        return complex(self.kz[0])

    @property
    def reflectance_amplitude(self) -> complex:
        """Electronic reflection amplitude referenced at the top surface."""
        return complex(self._b_up[0] / self._a_up[0])

    @property
    def transmittance_amplitude(self) -> complex:
        """Transmitted amplitude at the substrate top, unit incidence."""
        return complex(1.0 / self._a_up[0])

    def field_profile(self, z_nm: np.ndarray | float) -> np.ndarray | complex:
        """Driven field psi(z) for unit incident amplitude at the surface."""
        if np.isscalar(z_nm):
            return complex(self.solution_up(float(z_nm)) / self._a_up[0])
        z_arr = np.asarray(z_nm, dtype=float)
        out = np.empty(z_arr.shape, dtype=complex)
        flat = z_arr.ravel()
        res = out.ravel()
        for i, z in enumerate(flat):
            res[i] = self.solution_up(float(z)) / self._a_up[0]
        return out


def greens(stack: LayerStack, ctx: ScatterContext, z_nm: float, zp_nm: float) -> complex:
    """One-shot G(z, z'); build a :class:`LayeredGreens` to amortize."""
    return LayeredGreens(stack, ctx).evaluate(z_nm, zp_nm)


def require_superstrate_source(stack: LayerStack, z_src_nm: float) -> None:
    if not z_src_nm < 0.0:
        raise ConfigError(
            f"source plane must sit above the stack (z < 0), got {z_src_nm} nm"
        )


def cavity_field(
    stack: LayerStack, ctx: ScatterContext, z_grid_nm: np.ndarray
) -> np.ndarray:
    """Driven field profile B(z)/B_in on ``z_grid_nm``, unit incidence."""
    return np.asarray(LayeredGreens(stack, ctx).field_profile(np.asarray(z_grid_nm)))


def electronic_reflectance(stack: LayerStack, ctx: ScatterContext) -> complex:
    """Off-resonant (electronic) reflection amplitude of the bare stack."""
    return LayeredGreens(stack, ctx).reflectance_amplitude
