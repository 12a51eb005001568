"""Geometry assembly: layer order, positions, mirror symmetry."""

import numpy as np
import pytest

from xraystack import ConfigError, StackConfig, build_stack, mirror_check


class TestSingleCavity:
    def test_layer_count_and_thickness(self, single_cavity):
        assert len(single_cavity.layers) == 5
        assert single_cavity.total_thickness_nm == pytest.approx(45.0)

    def test_layer_order(self, single_cavity):
        names = [l.material.name for l in single_cavity.layers]
        assert names == ["platinum", "carbon", "iron57", "carbon", "platinum"]

    def test_resonant_center(self, single_cavity):
        assert single_cavity.resonant_centers_nm == (22.5,)

    def test_interfaces(self, single_cavity):
        np.testing.assert_allclose(
            single_cavity.interfaces_nm, [0.0, 2.5, 22.0, 23.0, 42.5, 45.0]
        )

    def test_vacuum_on_both_sides(self, single_cavity):
        assert single_cavity.superstrate.name == "vacuum"
        assert single_cavity.substrate.name == "vacuum"


class TestTenCavityTrain:
    def test_layer_count(self, topological_stack):
        # 2 outer caps + 10 x (guide/resonant/guide) + 9 spacers
        assert len(topological_stack.layers) == 41

    def test_total_thickness(self, topological_stack, trivial_stack):
        assert topological_stack.total_thickness_nm == pytest.approx(443.5)
        assert trivial_stack.total_thickness_nm == pytest.approx(433.0)

    def test_spacer_alternation_starts_thick(self, topological_stack):
        spacers = [
            l.thickness_nm
            for l in topological_stack.layers[1:-1]
            if l.material.name == "platinum"
        ]
        assert spacers == [4.9, 3.5, 4.9, 3.5, 4.9, 3.5, 4.9, 3.5, 4.9]

    def test_resonant_center_spacing_alternates(self, topological_stack):
        d = np.diff(topological_stack.resonant_centers_nm)
        np.testing.assert_allclose(d[0::2], 44.9)  # 40 nm of cavity + d_v
        np.testing.assert_allclose(d[1::2], 43.5)  # 40 nm of cavity + d_w

    def test_first_resonant_center(self, topological_stack):
        assert topological_stack.resonant_centers_nm[0] == pytest.approx(22.5)

    def test_mirror_symmetry(self, topological_stack, trivial_stack):
        assert mirror_check(topological_stack)
        assert mirror_check(trivial_stack)

    def test_n_resonant(self, topological_stack):
        assert topological_stack.n_resonant == 10


class TestStackConfig:
    def test_round_trip(self):
        cfg = StackConfig(n_cavities=4, d_v_nm=3.3, d_w_nm=2.9)
        again = StackConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            StackConfig.from_dict({"n_cavities": 3, "bogus": 1.0})

    def test_nonpositive_thickness_rejected(self):
        with pytest.raises(ConfigError):
            StackConfig(d_v_nm=0.0)
        with pytest.raises(ConfigError):
            StackConfig(guide_thickness_nm=-1.0)

    def test_with_spacers(self):
        cfg = StackConfig().with_spacers(d_v_nm=6.0, d_w_nm=2.0)
        assert cfg.d_v_nm == 6.0 and cfg.d_w_nm == 2.0
        # original default untouched
        assert StackConfig().d_v_nm == 4.9

    def test_unknown_material_name_fails_at_build(self, db):
        with pytest.raises(ConfigError):
            build_stack(StackConfig(guide_material="adamantium"), db)

    def test_mirror_check_detects_asymmetry(self, db):
        cfg = StackConfig(n_cavities=3, d_v_nm=2.0, d_w_nm=5.0)
        assert not mirror_check(build_stack(cfg, db))
