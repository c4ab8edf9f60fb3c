"""Inertia integrals, stiffness back-calculation, and config validation."""

import numpy as np
import pytest

from aeroshm.errors import ConfigError
from aeroshm.wing import ActuatorParams, WingConfig, inertia_integrals, inject_damage, stiffness_from_frequencies

from oracles import plate_inertias_by_quadrature, random_wing


def test_uniform_plate_bending_inertia_closed_form():
    cfg = WingConfig(span=7.5, chord=2.0, thickness=0.01, density=200.0)
    iner = inertia_integrals(cfg)
    assert iner.bend == pytest.approx(562.5, rel=1e-12)


def test_symmetric_chordwise_mass_kills_bend_twist_coupling():
    cfg = WingConfig(flex_axis=1.0, chord=2.0, hinge_axis=1.5)
    iner = inertia_integrals(cfg)
    assert iner.bend_twist == 0.0


def test_degenerate_region_gives_zero_surface_inertias():
    cfg = WingConfig(surface_edges=(3.0, 3.0))
    iner = inertia_integrals(cfg)
    assert iner.surf[0] == 0.0
    assert iner.bend_surf[0] == 0.0
    assert iner.twist_surf[0] == 0.0


def test_inertias_match_quadrature_oracle_on_random_configs():
    rng = np.random.default_rng(2024)
    for _ in range(10):
        cfg = random_wing(rng)
        iner = inertia_integrals(cfg)
        bend, twist, bend_twist, surf, bend_surf, twist_surf = plate_inertias_by_quadrature(cfg)
        assert iner.bend == pytest.approx(bend, rel=1e-8)
        assert iner.twist == pytest.approx(twist, rel=1e-8)
        assert iner.bend_twist == pytest.approx(bend_twist, rel=1e-8, abs=1e-10)
        np.testing.assert_allclose(iner.surf, surf, rtol=1e-8)
        np.testing.assert_allclose(iner.bend_surf, bend_surf, rtol=1e-8)
        np.testing.assert_allclose(iner.twist_surf, twist_surf, rtol=1e-8)


def test_region_measure_identity():
    rng = np.random.default_rng(7)
    for _ in range(5):
        cfg = random_wing(rng)
        widths = cfg.surface_measures()
        for (a, b), w in zip(cfg.surfaces, widths):
            assert w == pytest.approx(b - a, abs=0.0)


def test_stiffness_frequency_relationship():
    cfg = WingConfig(span=7.5, chord=2.0, thickness=0.01, density=200.0, freq_bend=2 * np.pi * 5)
    iner = inertia_integrals(cfg)
    k_bend, _, _ = stiffness_from_frequencies(cfg, iner, actuated=True)
    assert k_bend == pytest.approx(562.5 * (2 * np.pi * 5) ** 2, rel=1e-12)


def test_zero_twist_frequency_gives_zero_stiffness():
    cfg = WingConfig(freq_twist=0.0)
    iner = inertia_integrals(cfg)
    _, k_twist, _ = stiffness_from_frequencies(cfg, iner)
    assert k_twist == 0.0


def test_actuated_hinges_have_no_structural_stiffness():
    cfg = WingConfig()
    iner = inertia_integrals(cfg)
    _, _, k_surf = stiffness_from_frequencies(cfg, iner, actuated=True)
    assert np.all(k_surf == 0.0)
    _, _, k_free = stiffness_from_frequencies(cfg, iner, actuated=False)
    assert np.all(k_free > 0.0)


@pytest.mark.parametrize(
    "edges",
    [
        (2.0, 5.0, 4.0, 7.0),   # overlapping surfaces
        (-1.0, 2.0),            # below the root
        (2.0, 9.0),             # beyond the tip
    ],
)
def test_bad_surface_edges_rejected(edges):
    with pytest.raises(ConfigError):
        WingConfig(surface_edges=edges)


def test_geometry_validation():
    with pytest.raises(ConfigError):
        WingConfig(span=-1.0)
    with pytest.raises(ConfigError):
        WingConfig(flex_axis=1.6, hinge_axis=1.5)


def test_actuator_validation():
    with pytest.raises(ConfigError):
        ActuatorParams(supply_pressure=-5.0)
    with pytest.raises(ConfigError):
        ActuatorParams(supply_pressure=1e5, return_pressure=2e5)


def test_damage_scales_the_three_leakage_parameters():
    act = ActuatorParams(supply_pressure=2e7)
    dmg = inject_damage(act, 0.3)
    assert dmg.supply_pressure == pytest.approx(1.4e7, rel=1e-12)
    assert dmg.feedback_stiffness == pytest.approx(0.7 * act.feedback_stiffness, rel=1e-12)
    assert dmg.internal_stiffness == pytest.approx(0.7 * act.internal_stiffness, rel=1e-12)
    assert dmg.piston_area == act.piston_area


def test_zero_damage_is_identity():
    act = ActuatorParams()
    assert inject_damage(act, 0.0) == act


def test_damage_composes_multiplicatively():
    act = ActuatorParams()
    twice = inject_damage(inject_damage(act, 0.3), 0.3)
    assert twice.supply_pressure == pytest.approx(0.49 * act.supply_pressure, rel=1e-12)
