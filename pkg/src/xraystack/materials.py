"""Material records: electronic optical constants and nuclear resonance data.

All energies are carried in keV, lengths in nm, and rates in eV unless a
field name says otherwise.  The refractive index convention is

    n = 1 - delta + 1j * beta

with beta >= 0 for absorbing media (time dependence exp(-i w t)).
"""

from __future__ import annotations

import importlib.resources
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

# CODATA-2018 constants, SI unless suffixed.
HBAR_EV_S = 6.582119569e-16
HBAR_J_S = 1.054571817e-34
HC_EV_NM = 1239.8419843320026
SPEED_OF_LIGHT = 2.99792458e8
MU_0 = 1.25663706212e-6
EV_J = 1.602176634e-19

#: Photon energy of the Fe-57 nuclear transition driving every built-in
#: record; optical constants are treated as dispersionless across the
#: few-hundred-neV detuning windows the solver scans.
DEFAULT_ENERGY_KEV = 14.413


def wavelength_nm(energy_kev: float) -> float:
    return HC_EV_NM / (energy_kev * 1e3)


def wavenumber_per_nm(energy_kev: float) -> float:
    """Vacuum wavenumber k = 2 pi / lambda in nm^-1."""
    return 2.0 * math.pi / wavelength_nm(energy_kev)


@dataclass(frozen=True)
class NuclearParams:
    """Parameters of a narrow nuclear transition hosted by a material.

    gamma0_ev is the total natural linewidth (hbar / lifetime); only the
    radiative fraction 1 / (1 + internal_conversion) of it couples to the
    photon field.
    """

    transition_energy_kev: float
    lifetime_ns: float
    internal_conversion: float
    number_density_per_m3: float

    @property
    def gamma0_ev(self) -> float:
        return HBAR_EV_S / (self.lifetime_ns * 1e-9)

    @property
    def radiative_fraction(self) -> float:
        return 1.0 / (1.0 + self.internal_conversion)

    @property
    def gamma_radiative_ev(self) -> float:
        return self.gamma0_ev * self.radiative_fraction

    @property
    def number_density_per_nm3(self) -> float:
        return self.number_density_per_m3 * 1e-27

    @property
    def wavenumber_per_nm(self) -> float:
        return wavenumber_per_nm(self.transition_energy_kev)

    @property
    def dipole_strength(self) -> float:
        """Magnetic transition moment |m| in J/T.

        Calibrated so that the magnetic-dipole spontaneous-emission rate
        mu0 w^3 |m|^2 / (3 pi hbar c^3) reproduces gamma_radiative_ev.
        """
        omega0 = self.transition_energy_kev * 1e3 * EV_J / HBAR_J_S
        gamma_rad = self.gamma_radiative_ev * EV_J / HBAR_J_S
        m_sq = 3.0 * math.pi * HBAR_J_S * SPEED_OF_LIGHT**3 * gamma_rad / (
            MU_0 * omega0**3
        )
        return math.sqrt(m_sq)

    def radiative_rate_from_dipole(self, dipole_j_per_t: float) -> float:
        """Free-space magnetic-dipole decay rate (eV) for a given moment."""
        omega0 = self.transition_energy_kev * 1e3 * EV_J / HBAR_J_S
        rate_s = MU_0 * omega0**3 * dipole_j_per_t**2 / (
            3.0 * math.pi * HBAR_J_S * SPEED_OF_LIGHT**3
        )
        return rate_s * HBAR_J_S / EV_J


@dataclass(frozen=True)
class Material:
    """Optical constants of one material at one photon energy."""

    name: str
    energy_kev: float
    delta: float
    beta: float
    density_g_cm3: float | None = None
    nuclear: NuclearParams | None = None

    def __post_init__(self) -> None:
        if self.beta < 0.0:
            raise ConfigError(f"{self.name}: beta must be >= 0, got {self.beta}")
        if abs(self.delta) >= 1e-3:
            raise ConfigError(
                f"{self.name}: |delta| = {self.delta} is outside the hard x-ray "
                "regime this solver is built for"
            )
        if abs(self.refractive_index - 1.0) >= 1e-4:
            warnings.warn(
                f"{self.name}: |n - 1| unusually large for hard x-rays",
                stacklevel=2,
            )

    @property
    def refractive_index(self) -> complex:
        return complex(1.0 - self.delta, self.beta)

    @property
    def is_resonant(self) -> bool:
        return self.nuclear is not None


def nuclear_constants(material: Material) -> NuclearParams:
    if material.nuclear is None:
        raise ConfigError(f"material '{material.name}' carries no nuclear data")
    return material.nuclear


_REQUIRED_KEYS = {"material", "energy_kev", "delta", "beta"}
_NUCLEAR_KEYS = {
    "transition_energy_kev",
    "lifetime_ns",
    "internal_conversion",
    "number_density_per_m3",
}


def _parse_record(lines: list[tuple[int, str]], path: str) -> Material:
    fields: dict[str, str] = {}
    for lineno, line in lines:
        if ":" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key: value', got {line!r}")
        key, _, value = line.partition(":")
        key = key.strip().lower()
        if key in fields:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        fields[key] = value.strip()

    missing = _REQUIRED_KEYS - fields.keys()
    if missing:
        raise ConfigError(f"{path}: record missing keys {sorted(missing)}")

    def as_float(key: str) -> float:
        try:
            return float(fields[key])
        except ValueError as exc:
            raise ConfigError(f"{path}: bad number for {key!r}: {fields[key]!r}") from exc

    nuclear = None
    if fields.get("resonant", "false").lower() in {"true", "yes", "1"}:
        missing_nuc = _NUCLEAR_KEYS - fields.keys()
        if missing_nuc:
            raise ConfigError(
                f"{path}: resonant record missing keys {sorted(missing_nuc)}"
            )
        nuclear = NuclearParams(
            transition_energy_kev=as_float("transition_energy_kev"),
            lifetime_ns=as_float("lifetime_ns"),
            internal_conversion=as_float("internal_conversion"),
            number_density_per_m3=as_float("number_density_per_m3"),
        )

    return Material(
        name=fields["material"],
        energy_kev=as_float("energy_kev"),
        delta=as_float("delta"),
        beta=as_float("beta"),
        density_g_cm3=as_float("density_g_cm3") if "density_g_cm3" in fields else None,
        nuclear=nuclear,
    )


class MaterialsDB:
    """Lookup table keyed by (material name, photon energy)."""

    def __init__(self, materials: list[Material], source: str = "<memory>"):
        self.source = source
        self._records: dict[tuple[str, float], Material] = {}
        for mat in materials:
            key = (mat.name, mat.energy_kev)
            if key in self._records:
                raise ConfigError(
                    f"{source}: duplicate record for {mat.name} at {mat.energy_kev} keV"
                )
            self._records[key] = mat

    @classmethod
    def from_text(cls, text: str, source: str = "<memory>") -> "MaterialsDB":
        blocks: list[list[tuple[int, str]]] = []
        current: list[tuple[int, str]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                if current:
                    blocks.append(current)
                    current = []
                continue
            if line.startswith("#"):
                continue
            current.append((lineno, line))
        if current:
            blocks.append(current)
        if not blocks:
            raise ConfigError(f"{source}: no material records found")
        return cls([_parse_record(block, source) for block in blocks], source)

    @classmethod
    def from_file(cls, path: str | Path) -> "MaterialsDB":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read materials database {path}: {exc}") from exc
        return cls.from_text(text, source=str(path))

    @classmethod
    def builtin(cls) -> "MaterialsDB":
        resource = importlib.resources.files("xraystack.data").joinpath(
            "optical_constants.txt"
        )
        return cls.from_text(resource.read_text(), source="builtin")

    def get(self, name: str, energy_kev: float = DEFAULT_ENERGY_KEV) -> Material:
        key = (name, energy_kev)
        if key in self._records:
            return self._records[key]
        matches = [m for (n, _), m in self._records.items() if n == name]
        if not matches:
            known = sorted({n for n, _ in self._records})
            raise ConfigError(
                f"unknown material {name!r}; database {self.source} has {known}"
            )
        # A record exists for the name but not this energy; tolerate tiny
        # mismatches (same resonance line quoted at different precision).
        for mat in matches:
            if abs(mat.energy_kev - energy_kev) < 1e-6:
                return mat
        raise ConfigError(
            f"material {name!r} tabulated at "
            f"{sorted(m.energy_kev for m in matches)} keV, not {energy_kev} keV"
        )

    def names(self) -> list[str]:
        return sorted({n for n, _ in self._records})


def load_materials(path: str | Path | None = None) -> MaterialsDB:
    """Built-in database, or a caller-supplied override file."""
    if path is None:
        return MaterialsDB.builtin()
    return MaterialsDB.from_file(path)
