"""Spectra against a resonant-index transfer matrix and closed forms."""

import numpy as np
import pytest

from xraystack import (
    ConfigError,
    LayerStack,
    MaterialsDB,
    ScatterContext,
    electronic_reflectance,
)
from xraystack.hamiltonian import (
    DriveVector,
    NuclearHamiltonian,
    build_hamiltonian,
    coupling_constant,
    rabi_vector,
)
from xraystack.reflectivity import (
    compute_reflectivity,
    detuning_grid,
    feature_extract,
    linear_solve_spectrum,
    spectrum,
)
from xraystack.spectral import eigensystem

TOPO_ANGLE = 2.4067
TRIV_ANGLE = 2.4157

BARE_SHEET_TEXT = """
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

INERT_SHEET_TEXT = BARE_SHEET_TEXT.replace(
    "number_density_per_m3: 8.49e28", "number_density_per_m3: 0.0"
)


def parratt_amplitude(indices, thicknesses, k, sin_grazing):
    """Reflection amplitude of a layer sequence, bottom-up recursion."""
    n = np.asarray(indices, dtype=complex)
    p_par = n[0] * k * np.cos(np.arcsin(sin_grazing))
    kz = np.sqrt(n**2 * k**2 - p_par**2 + 0j)
    kz = np.where(kz.imag < 0, -kz, kz)
    r = (kz[-2] - kz[-1]) / (kz[-2] + kz[-1])
    for i in range(len(n) - 3, -1, -1):
        rho = (kz[i] - kz[i + 1]) / (kz[i] + kz[i + 1])
        phase = np.exp(2j * kz[i + 1] * thicknesses[i + 1])
        r = (rho + r * phase) / (1.0 + rho * r * phase)
    return complex(r)


@pytest.fixture(scope="module")
def topo_spectrum(topological_stack):
    return compute_reflectivity(topological_stack, ScatterContext(angle_mrad=TOPO_ANGLE))


@pytest.fixture(scope="module")
def triv_spectrum(trivial_stack):
    return compute_reflectivity(trivial_stack, ScatterContext(angle_mrad=TRIV_ANGLE))


class TestRouteEquivalence:
    @pytest.mark.parametrize("angle", [TOPO_ANGLE, TRIV_ANGLE])
    def test_eigen_route_matches_linear_solve(self, topological_stack, trivial_stack, angle):
        for stack in (topological_stack, trivial_stack):
            ctx = ScatterContext(angle_mrad=angle)
            eig = compute_reflectivity(stack, ctx, method="eigenmodes")
            lin = compute_reflectivity(stack, ctx, method="linear_solve")
            scale = np.abs(eig.amplitude).max()
            assert np.abs(eig.amplitude - lin.amplitude).max() < 1e-8 * scale
            assert eig.method == "eigenmodes"
            assert lin.method == "linear_solve"
            assert not lin.skipped.any()

    def test_detuning_moved_into_matrix_is_equivalent(self, topological_stack):
        ctx = ScatterContext(angle_mrad=TOPO_ANGLE)
        grid = np.linspace(-30.0, 30.0, 401)
        plain = compute_reflectivity(topological_stack, ctx, detuning_gamma0=grid)

        shifted_h = build_hamiltonian(topological_stack, ctx, detuning_gamma0=7.0)
        drive = rabi_vector(topological_stack, ctx)
        baseline = electronic_reflectance(topological_stack, ctx)
        shifted = spectrum(shifted_h, eigensystem(shifted_h.matrix), drive, baseline, grid)
        assert np.abs(plain.amplitude - shifted.amplitude).max() < 1e-10

    def test_decomposition_rebuilds_amplitude(self, topo_spectrum):
        rs = topo_spectrum
        denom = (
            rs.detuning_gamma0[:, None]
            - rs.mode_centers[None, :]
            + 0.5j * rs.mode_full_widths[None, :]
        )
        rebuilt = rs.baseline_amplitude - 1j * (rs.mode_strengths[None, :] / denom).sum(axis=1)
        assert np.abs(rebuilt - rs.amplitude).max() < 1e-12


class TestAgainstTransferMatrix:
    def test_thin_sheet_matches_resonant_index_model(self):
        thickness = 0.01
        db = MaterialsDB.from_text(BARE_SHEET_TEXT)
        stack = LayerStack.from_layers(
            [(db.get("baresheet"), thickness)], db.get("vacuum"), db.get("vacuum")
        )
        ctx = ScatterContext(angle_mrad=TOPO_ANGLE)
        grid = np.array([-40.0, -5.0, -1.0, 0.0, 0.7, 3.0, 25.0, 300.0])
        rs = compute_reflectivity(stack, ctx, detuning_gamma0=grid)

        k = ctx.vacuum_wavenumber_per_nm
        nuclear = db.get("baresheet").nuclear
        kappa = coupling_constant(nuclear, nuclear.number_density_per_nm3 * thickness)
        for i, delta in enumerate(grid):
            # the sheet's resonant response folded into a refractive index
            chi = -kappa / (k**2 * thickness * (delta + 0.5j))
            reference = parratt_amplitude(
                [1.0, np.sqrt(1.0 + chi), 1.0], [0.0, thickness, 0.0], k, ctx.grazing_sin
            )
            assert abs(rs.amplitude[i] - reference) < 1e-5

    def test_single_resonant_layer_closed_form(self):
        db = MaterialsDB.from_text(BARE_SHEET_TEXT)
        stack = LayerStack.from_layers(
            [(db.get("baresheet"), 1.0)], db.get("vacuum"), db.get("vacuum")
        )
        ctx = ScatterContext(angle_mrad=TOPO_ANGLE)
        grid = detuning_grid(span_gamma0=80.0, points=801)
        rs = compute_reflectivity(stack, ctx, detuning_gamma0=grid)

        h = build_hamiltonian(stack, ctx)
        drive = rabi_vector(stack, ctx)
        lam = h.matrix[0, 0]
        closed = -1j * drive.omega[0] ** 2 / (lam + grid)
        assert np.abs(rs.amplitude - closed).max() < 1e-12
        assert abs(rs.baseline_amplitude) < 1e-12


class TestBaselineAndTails:
    def test_baseline_is_the_electronic_amplitude(self, topological_stack, topo_spectrum):
        ctx = ScatterContext(angle_mrad=TOPO_ANGLE)
        assert np.isclose(
            topo_spectrum.baseline_amplitude,
            electronic_reflectance(topological_stack, ctx),
            rtol=1e-12,
        )

    def test_no_nuclear_response_without_nuclei(self):
        db = MaterialsDB.from_text(INERT_SHEET_TEXT)
        stack = LayerStack.from_layers(
            [(db.get("baresheet"), 1.0)], db.get("vacuum"), db.get("vacuum")
        )
        rs = compute_reflectivity(stack, ScatterContext(angle_mrad=TOPO_ANGLE))
        assert np.abs(rs.amplitude - rs.baseline_amplitude).max() == 0.0
        report = feature_extract(rs)
        assert report.n_maxima == 0
        assert report.r_squared == 1.0

    def test_tail_falls_off_inversely_with_detuning(self, topo_spectrum, topological_stack):
        ctx = ScatterContext(angle_mrad=TOPO_ANGLE)
        far = compute_reflectivity(
            topological_stack, ctx, detuning_gamma0=np.array([1e4, 2e4, -1e4, -2e4])
        )
        gap = np.abs(far.reflectivity - far.baseline)
        assert gap.max() < 0.01 * far.baseline
        assert gap[0] / gap[1] == pytest.approx(2.0, rel=0.25)
        assert gap[2] / gap[3] == pytest.approx(2.0, rel=0.25)

    @pytest.mark.xfail(
        strict=True,
        reason="the baseline cross-term still holds a few percent at a "
        "thousand linewidths for these structures; see the tail test "
        "above for the actual approach rate",
    )
    def test_baseline_recovered_within_one_percent_at_thousand_linewidths(
        self, topological_stack
    ):
        ctx = ScatterContext(angle_mrad=TOPO_ANGLE)
        far = compute_reflectivity(
            topological_stack, ctx, detuning_gamma0=np.array([-1e3, 1e3])
        )
        gap = np.abs(far.reflectivity - far.baseline)
        assert gap.max() < 0.01 * far.baseline


class TestLineShapes:
    def test_single_collective_peak_when_edge_states_present(self, topo_spectrum):
        report = feature_extract(topo_spectrum)
        assert report.n_maxima == 1
        assert report.r_squared > 0.99
        assert report.fit_height > 0

    def test_split_response_without_edge_states(self, triv_spectrum):
        report = feature_extract(triv_spectrum)
        assert report.n_maxima >= 2
        assert report.minima_detuning.size >= 1
        # the interior dip sits strictly below both neighbouring maxima
        heights = np.sort(report.maxima_reflectivity)[::-1]
        assert report.minima_reflectivity.min() < heights[1]
        assert report.r_squared < 0.99

    def test_reflectivity_nonnegative_and_finite(self, topo_spectrum, triv_spectrum):
        for rs in (topo_spectrum, triv_spectrum):
            assert np.isfinite(rs.reflectivity).all()
            assert (rs.reflectivity >= 0.0).all()


class TestGuards:
    def test_exceptional_systems_fall_back_to_linear_route(self):
        matrix = np.array([[1j, 1.0], [1.0, -1j]])
        ham = NuclearHamiltonian(
            matrix=matrix,
            detuning_gamma0=0.0,
            gamma0_ev=4.7e-9,
            kappa_per_nm=1.0,
            centers_nm=(0.0, 1.0),
            angle_mrad=TOPO_ANGLE,
        )
        system = eigensystem(matrix)
        assert system.any_exceptional
        drive = DriveVector(omega=np.array([1.0, 0.5]), coupling_scale=1.0, z_src_nm=-0.1)
        rs = spectrum(ham, system, drive, 0.1 + 0.0j, np.linspace(-5, 5, 21))
        assert rs.method == "linear_solve"
        # this defective matrix is singular exactly at zero detuning, so
        # that one grid point is skipped and flagged rather than raising
        assert rs.skipped.sum() == 1 and rs.skipped[10]
        assert np.isfinite(rs.amplitude[~rs.skipped]).all()
        assert not np.isfinite(rs.amplitude[10])

    def test_drive_size_must_match_matrix(self, topological_stack):
        ctx = ScatterContext(angle_mrad=TOPO_ANGLE)
        ham = build_hamiltonian(topological_stack, ctx)
        bad = DriveVector(omega=np.ones(3, dtype=complex), coupling_scale=1.0, z_src_nm=-0.1)
        with pytest.raises(ConfigError, match="drive length"):
            linear_solve_spectrum(ham, bad, 0.0j)

    def test_grid_validation(self):
        with pytest.raises(ConfigError, match="grid"):
            detuning_grid(points=1)
        with pytest.raises(ConfigError, match="grid"):
            detuning_grid(span_gamma0=-5.0)

    def test_unknown_method_rejected(self, topological_stack):
        with pytest.raises(ConfigError, match="method"):
            compute_reflectivity(
                topological_stack, ScatterContext(angle_mrad=TOPO_ANGLE), method="psychic"
            )

    def test_feature_extraction_needs_points(self, topo_spectrum):
        rs = topo_spectrum
        trimmed = type(rs)(
            detuning_gamma0=rs.detuning_gamma0[:8],
            amplitude=rs.amplitude[:8],
            baseline_amplitude=rs.baseline_amplitude,
            method=rs.method,
        )
        with pytest.raises(ConfigError, match="16"):
            feature_extract(trimmed)
