"""Assembled system structure, actuator rows, and the state-space form."""

from dataclasses import replace

import numpy as np
import pytest

from aeroshm.assembly import (
    SecondOrderSystem,
    actuator_augment,
    assemble,
    matrices_to_csv,
    structural_system,
    to_state_space,
)
from aeroshm.errors import NumericalError
from aeroshm.wing import ActuatorParams, WingConfig, inertia_integrals

from oracles import random_wing


def test_mass_matrix_symmetric_to_machine_zero():
    rng = np.random.default_rng(11)
    for _ in range(10):
        sys = assemble(random_wing(rng), ActuatorParams())
        assert np.max(np.abs(sys.mass - sys.mass.T)) == 0.0


def test_mass_couplings_match_inertias_and_cross_hinge_terms_vanish():
    cfg = WingConfig()
    iner = inertia_integrals(cfg)
    sys = assemble(cfg, ActuatorParams())
    for j in range(cfg.n_surfaces):
        assert sys.mass[0, 2 + j] == iner.bend_surf[j]
        assert sys.mass[1, 2 + j] == iner.twist_surf[j]
    assert sys.mass[2, 3] == 0.0
    assert sys.mass[3, 2] == 0.0


def test_structural_block_positive_definite():
    sys = assemble(WingConfig(), ActuatorParams())
    nq = sys.n_coords
    eig = np.linalg.eigvalsh(sys.mass[:nq, :nq])
    assert np.all(eig > 0.0)


def test_zero_airspeed_strips_all_aero_terms():
    cfg = WingConfig(airspeed=0.0)
    sys = assemble(cfg, ActuatorParams())
    ref = structural_system(replace_airspeed(cfg, 0.0), actuated=True)
    nq = ref.n_coords
    np.testing.assert_array_equal(sys.stiffness[:nq, :nq], ref.stiffness)
    np.testing.assert_array_equal(sys.damping[:nq, :nq], ref.damping)
    assert np.all(ref.damping == 0.0)  # no structural damping by default


def replace_airspeed(cfg, v):
    return replace(cfg, airspeed=v)


def test_aero_terms_scale_linearly_and_quadratically_with_airspeed():
    cfg0 = WingConfig(airspeed=0.0)
    cfg1 = WingConfig(airspeed=10.0)
    cfg2 = WingConfig(airspeed=20.0)
    s0, s1, s2 = (structural_system(c, actuated=True) for c in (cfg0, cfg1, cfg2))
    d1 = s1.damping - s0.damping
    d2 = s2.damping - s0.damping
    np.testing.assert_allclose(d2, 2.0 * d1, rtol=1e-12, atol=1e-14)
    k1 = s1.stiffness - s0.stiffness
    k2 = s2.stiffness - s0.stiffness
    np.testing.assert_allclose(k2, 4.0 * k1, rtol=1e-12, atol=1e-14)


def test_system_dimensions():
    cfg = WingConfig()  # two control surfaces
    sys = assemble(cfg, ActuatorParams())
    assert sys.n_coords == 4
    assert sys.n_pressures == 2
    assert sys.size == 6
    assert sys.coord_names == ("bend", "twist", "surf_1", "surf_2", "press_1", "press_2")


def test_actuator_steady_state_pressure_relation():
    """With all rates zero the actuator row forces
    press = (arm * lever * K_f / A_f) * (surf - cmd)."""
    act = ActuatorParams()
    sys = assemble(WingConfig(surface_edges=(2.0, 6.0)), act)
    row = sys.n_coords  # first pressure row
    hinge = 2
    press = sys.n_coords
    k_surf = sys.stiffness[row, hinge]
    k_press = sys.stiffness[row, press]
    g_cmd = sys.input[row, 0]
    # steady state: k_surf * surf + k_press * press = g_cmd * cmd
    surf, cmd = 0.3, 0.1
    press_val = (g_cmd * cmd - k_surf * surf) / k_press
    expected = act.arm_offset * act.lever_ratio * act.feedback_stiffness / act.feedback_area * (surf - cmd)
    assert press_val == pytest.approx(expected, rel=1e-12)


def test_zero_state_is_equilibrium():
    sys = assemble(WingConfig(), ActuatorParams())
    ss = to_state_space(sys)
    x = np.zeros(ss.n_states)
    u = np.zeros(ss.n_inputs)
    np.testing.assert_array_equal(ss.A @ x + ss.B @ u, 0.0)


def test_supply_pressure_derating_scales_valve_terms_by_sqrt():
    act = ActuatorParams()
    weak = replace(act, supply_pressure=0.7 * act.supply_pressure)
    cfg = WingConfig(surface_edges=(2.0, 6.0))
    sys = assemble(cfg, act)
    sys_w = assemble(cfg, weak)
    row = sys.n_coords
    scale = np.sqrt(0.7)
    assert sys_w.stiffness[row, 2] == pytest.approx(scale * sys.stiffness[row, 2], rel=1e-12)
    assert sys_w.stiffness[row, row] == pytest.approx(scale * sys.stiffness[row, row], rel=1e-12)
    assert sys_w.input[row, 0] == pytest.approx(scale * sys.input[row, 0], rel=1e-12)
    # rate terms carry no valve gain
    assert sys_w.damping[row, 2] == sys.damping[row, 2]
    assert sys_w.damping[row, row] == sys.damping[row, row]


def test_single_dof_state_space_eigenvalues():
    sys = SecondOrderSystem(
        mass=np.array([[1.0]]),
        damping=np.array([[0.0]]),
        stiffness=np.array([[4.0]]),
        input=np.zeros((1, 0)),
        n_coords=1,
        n_pressures=0,
        coord_names=("q",),
    )
    ss = to_state_space(sys)
    eig = np.sort_complex(np.linalg.eigvals(ss.A))
    np.testing.assert_allclose(eig, [-2j, 2j], atol=1e-12)


def test_zero_airspeed_modes_match_generalized_eigenproblem():
    rng = np.random.default_rng(5)
    for _ in range(5):
        cfg = replace(random_wing(rng), airspeed=0.0)
        sys = structural_system(cfg, actuated=False)
        ss = to_state_space(sys)
        freqs = np.sort(np.abs(np.linalg.eigvals(ss.A)))
        ref = np.sort(np.sqrt(np.abs(np.linalg.eigvals(np.linalg.solve(sys.mass, sys.stiffness)))))
        np.testing.assert_allclose(freqs.reshape(-1, 2).mean(axis=1), ref, rtol=1e-9)
        assert np.max(np.abs(np.linalg.eigvals(ss.A).real)) < 1e-9 * freqs.max()


def test_state_space_dimension_rule():
    cfg = WingConfig()
    ss = to_state_space(assemble(cfg, ActuatorParams()))
    n_q = cfg.n_surfaces + 2
    assert ss.n_states == 2 * n_q + cfg.n_surfaces
    assert ss.B.shape == (ss.n_states, cfg.n_surfaces)


def test_singular_mass_matrix_signalled():
    sys = SecondOrderSystem(
        mass=np.zeros((2, 2)),
        damping=np.zeros((2, 2)),
        stiffness=np.eye(2),
        input=np.zeros((2, 0)),
        n_coords=2,
        n_pressures=0,
        coord_names=("a", "b"),
    )
    with pytest.raises(NumericalError):
        to_state_space(sys)


def test_matrix_csv_roundtrips_values():
    sys = assemble(WingConfig(), ActuatorParams())
    text = matrices_to_csv(sys)
    lines = text.splitlines()
    assert lines[0] == "# mass"
    assert lines[1].split(",") == list(sys.coord_names)
    first_row = np.array([float(v) for v in lines[2].split(",")])
    np.testing.assert_array_equal(first_row, sys.mass[0])
