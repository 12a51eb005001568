"""Grazing-incidence simulator for stacked thin-film x-ray cavities.

The package models trains of coupled low-index guiding layers holding
ultra-narrow nuclear resonances: it evaluates the layered-medium field
Green's function, condenses it into an effective non-Hermitian coupling
matrix between the resonant layers, analyzes that matrix spectrally and
topologically, and predicts energy-resolved grazing-incidence
reflectivity spectra.
"""

from .errors import ConfigError, NumericsError
from .greens import (
    LayeredGreens,
    ScatterContext,
    cavity_field,
    electronic_reflectance,
    greens,
)
from .hamiltonian import (
    DriveVector,
    NuclearHamiltonian,
    build_hamiltonian,
    coupling_constant,
    coupling_curve,
    rabi_vector,
)
from .materials import Material, MaterialsDB, NuclearParams, load_materials
from .reflectivity import (
    FeatureReport,
    ReflectivitySpectrum,
    compute_reflectivity,
    detuning_grid,
    feature_extract,
    linear_solve_spectrum,
    spectrum,
)
from .spectral import (
    EdgeReport,
    EigenSystem,
    edge_report,
    eigensystem,
    quasi_eigen_drive,
)
from .stack import Layer, LayerStack, StackConfig, build_stack, mirror_check
from .topology import (
    BulkModel,
    PhaseDiagram,
    WindingResult,
    extract_bulk,
    phase_diagram,
    winding_number,
)

__version__ = "0.1.0"

__all__ = [
    "BulkModel",
    "ConfigError",
    "DriveVector",
    "EdgeReport",
    "EigenSystem",
    "FeatureReport",
    "Layer",
    "LayerStack",
    "LayeredGreens",
    "Material",
    "MaterialsDB",
    "NuclearHamiltonian",
    "NuclearParams",
    "NumericsError",
    "PhaseDiagram",
    "ReflectivitySpectrum",
    "ScatterContext",
    "StackConfig",
    "WindingResult",
    "build_hamiltonian",
    "build_stack",
    "cavity_field",
    "compute_reflectivity",
    "coupling_constant",
    "coupling_curve",
    "detuning_grid",
    "edge_report",
    "eigensystem",
    "electronic_reflectance",
    "extract_bulk",
    "feature_extract",
    "greens",
    "linear_solve_spectrum",
    "load_materials",
    "mirror_check",
    "phase_diagram",
    "quasi_eigen_drive",
    "rabi_vector",
    "spectrum",
    "winding_number",
    "__version__",
]
