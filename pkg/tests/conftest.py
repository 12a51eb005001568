"""Shared fixtures: the builtin materials table and the benchmark stacks."""

import numpy as np
import pytest

from xraystack import (
    LayerStack,
    MaterialsDB,
    ScatterContext,
    StackConfig,
    build_stack,
    load_materials,
)

WORKING_ANGLE_MRAD = 2.4067


@pytest.fixture(scope="session")
def db() -> MaterialsDB:
    return load_materials()


@pytest.fixture(scope="session")
def ctx() -> ScatterContext:
    return ScatterContext(angle_mrad=WORKING_ANGLE_MRAD)


@pytest.fixture(scope="session")
def single_cavity(db) -> LayerStack:
    return build_stack(StackConfig(n_cavities=1), db)


@pytest.fixture(scope="session")
def trivial_stack(db) -> LayerStack:
    return build_stack(StackConfig(n_cavities=10, d_v_nm=2.8, d_w_nm=3.5), db)


@pytest.fixture(scope="session")
def topological_stack(db) -> LayerStack:
    return build_stack(StackConfig(n_cavities=10, d_v_nm=4.9, d_w_nm=3.5), db)


@pytest.fixture(scope="session")
def ideal_sheet_db() -> MaterialsDB:
    """A resonant monolayer with no electronic index, plus vacuum.

    With the background index switched off the driven field at the sheet
    is the bare incident plane wave and every coupling formula collapses
    to its closed form, which the tests compare against.
    """
    text = """
material: vacuum
energy_kev: 14.413
delta: 0.0
beta: 0.0

material: baresheet
energy_kev: 14.413
delta: 0.0
beta: 0.0
resonant: true
transition_energy_kev: 14.413
lifetime_ns: 141.0
internal_conversion: 8.56
number_density_per_m3: 8.49e28
"""
    return MaterialsDB.from_text(text)


@pytest.fixture(scope="session")
def ideal_sheet(ideal_sheet_db) -> LayerStack:
    vac = ideal_sheet_db.get("vacuum")
    sheet = ideal_sheet_db.get("baresheet")
    return LayerStack.from_layers([(sheet, 1.0)], vac, vac)


def assert_allclose(actual, desired, rtol=1e-7, atol=0.0):
    np.testing.assert_allclose(actual, desired, rtol=rtol, atol=atol)
