"""Geometry builder for periodic cavity stacks.

The canonical structure is a train of identical thin-film cavities, each a
(guide / resonant / guide) triple, separated by metal spacers whose
thickness alternates between two values d_v and d_w, the whole train
capped top and bottom by thin metal mirrors.  The depth coordinate z runs
from 0 at the top surface, increasing into the stack, in nm.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import ConfigError
from .materials import DEFAULT_ENERGY_KEV, Material, MaterialsDB


@dataclass(frozen=True)
class Layer:
    material: Material
    thickness_nm: float
    z_top_nm: float

    @property
    def z_bottom_nm(self) -> float:
        return self.z_top_nm + self.thickness_nm

    @property
    def z_center_nm(self) -> float:
        return self.z_top_nm + 0.5 * self.thickness_nm


@dataclass(frozen=True)
class StackConfig:
    """Parameters of the periodic cavity train.

    Spacers alternate d_v, d_w, d_v, ... going down from the first
    cavity, so cavities (1,2), (3,4), ... form the two-site unit cells
    of the equivalent dimerized chain.
    """

    n_cavities: int = 10
    d_v_nm: float = 4.9
    d_w_nm: float = 3.5
    guide_thickness_nm: float = 19.5
    resonant_thickness_nm: float = 1.0
    cap_thickness_nm: float = 2.5
    guide_material: str = "carbon"
    resonant_material: str = "iron57"
    spacer_material: str = "platinum"
    superstrate_material: str = "vacuum"
    substrate_material: str = "vacuum"
    energy_kev: float = DEFAULT_ENERGY_KEV

    def __post_init__(self) -> None:
        if self.n_cavities < 1:
            raise ConfigError(f"n_cavities must be >= 1, got {self.n_cavities}")
        for name in (
            "d_v_nm",
            "d_w_nm",
            "guide_thickness_nm",
            "resonant_thickness_nm",
            "cap_thickness_nm",
        ):
            value = getattr(self, name)
            if not value > 0.0:
                raise ConfigError(f"{name} must be > 0, got {value}")

    def to_dict(self) -> dict:
        return {
            "n_cavities": self.n_cavities,
            "d_v_nm": self.d_v_nm,
            "d_w_nm": self.d_w_nm,
            "guide_thickness_nm": self.guide_thickness_nm,
            "resonant_thickness_nm": self.resonant_thickness_nm,
            "cap_thickness_nm": self.cap_thickness_nm,
            "guide_material": self.guide_material,
            "resonant_material": self.resonant_material,
            "spacer_material": self.spacer_material,
            "superstrate_material": self.superstrate_material,
            "substrate_material": self.substrate_material,
            "energy_kev": self.energy_kev,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "StackConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown stack config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(f"bad stack config: {exc}") from exc

    def with_spacers(self, d_v_nm: float, d_w_nm: float) -> "StackConfig":
        return replace(self, d_v_nm=d_v_nm, d_w_nm=d_w_nm)


@dataclass(frozen=True)
class LayerStack:
    """A resolved stack: finite layers plus semi-infinite bounding media."""

    layers: tuple[Layer, ...]
    superstrate: Material
    substrate: Material
    resonant_centers_nm: tuple[float, ...] = field(default=())

    @property
    def n_resonant(self) -> int:
        return len(self.resonant_centers_nm)

    @property
    def total_thickness_nm(self) -> float:
        return self.layers[-1].z_bottom_nm if self.layers else 0.0

    @property
    def interfaces_nm(self) -> tuple[float, ...]:
        if not self.layers:
            return (0.0,)
        return tuple(l.z_top_nm for l in self.layers) + (self.total_thickness_nm,)

    def resonant_layers(self) -> tuple[Layer, ...]:
        return tuple(l for l in self.layers if l.material.is_resonant)

    @classmethod
    def from_layers(
        cls,
        layers: Iterable[tuple[Material, float]],
        superstrate: Material,
        substrate: Material,
    ) -> "LayerStack":
        resolved: list[Layer] = []
        z = 0.0
        for material, thickness in layers:
            if not thickness > 0.0:
                raise ConfigError(
                    f"layer thickness must be > 0, got {thickness} for {material.name}"
                )
            resolved.append(Layer(material, thickness, z))
            z += thickness
        centers = tuple(
            l.z_center_nm for l in resolved if l.material.is_resonant
        )
        return cls(tuple(resolved), superstrate, substrate, centers)


def build_stack(config: StackConfig, db: MaterialsDB) -> LayerStack:
    """Assemble the cavity train described by ``config``.

    Layer order, top to bottom: cap, then for each cavity the
    guide/resonant/guide triple, with a spacer between consecutive
    cavities (alternating d_v, d_w starting from d_v), then the bottom
    cap.  A single-cavity stack has no spacers at all.
    """
    energy = config.energy_kev
    guide = db.get(config.guide_material, energy)
    resonant = db.get(config.resonant_material, energy)
    spacer = db.get(config.spacer_material, energy)
    superstrate = db.get(config.superstrate_material, energy)
    substrate = db.get(config.substrate_material, energy)

    if not resonant.is_resonant:
        raise ConfigError(
            f"resonant_material {resonant.name!r} has no nuclear transition record"
        )
    if superstrate.is_resonant or substrate.is_resonant:
        raise ConfigError("bounding media must be non-resonant")

    sequence: list[tuple[Material, float]] = [(spacer, config.cap_thickness_nm)]
    for cavity in range(config.n_cavities):
        if cavity > 0:
            d = config.d_v_nm if cavity % 2 == 1 else config.d_w_nm
            sequence.append((spacer, d))
        sequence.append((guide, config.guide_thickness_nm))
        sequence.append((resonant, config.resonant_thickness_nm))
        sequence.append((guide, config.guide_thickness_nm))
    sequence.append((spacer, config.cap_thickness_nm))

    return LayerStack.from_layers(sequence, superstrate, substrate)


def mirror_check(stack: LayerStack, tol_nm: float = 1e-9) -> bool:
    """True when the stack is invariant under top-bottom reversal."""
    if stack.superstrate.name != stack.substrate.name:
        return False
    layers = stack.layers
    for front, back in zip(layers, reversed(layers)):
        if front.material.name != back.material.name:
            return False
        if abs(front.thickness_nm - back.thickness_nm) > tol_nm:
            return False
    return True
