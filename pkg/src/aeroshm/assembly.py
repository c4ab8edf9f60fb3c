"""Assembly of the full wing + actuator system and the state-space form.

The assembled linear model is

    M qddot + C qdot + K q = G u

over the extended coordinate vector q = [bend, twist, surf_1..surf_M,
press_1..press_M]. Pressure coordinates are first order (the actuator is
inertia-less): their mass rows are zero and their dynamics live in the
damping/stiffness rows. u holds the commanded surface angles.

Actuator equation per surface (linearised hydraulic piston with feedback
spring), with kv = valve_gain * sqrt(supply_pressure / 2):

    -arm*A_p*surf_dot + (V0 / (4 Nb)) press_dot
    - arm*lever*kv*surf + (A_f / K_f)*kv*press = -arm*lever*kv*cmd

The piston drives the hinge with a generalised moment lever*A_p*press
opposing the pressure build-up (the sign that closes a stable servo loop).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np

from aeroshm.aero import aero_matrices, aero_scale_factors
from aeroshm.errors import NumericalError
from aeroshm.wing import ActuatorParams, WingConfig, inertia_integrals, stiffness_from_frequencies


@dataclass(frozen=True)
class SecondOrderSystem:
    """Assembled mass/damping/stiffness/input matrices with state metadata.

    n_coords counts second-order generalised coordinates; n_pressures the
    trailing first-order pressure states. Matrices are square of size
    n_coords + n_pressures.
    """

    mass: np.ndarray
    damping: np.ndarray
    stiffness: np.ndarray
    input: np.ndarray
    n_coords: int
    n_pressures: int
    coord_names: tuple[str, ...]

    @property
    def size(self) -> int:
        return self.n_coords + self.n_pressures


@dataclass(frozen=True)
class StateSpaceModel:
    """First-order realisation xdot = A x + B u with named states."""

    A: np.ndarray
    B: np.ndarray
    state_names: tuple[str, ...]
    n_coords: int
    n_pressures: int

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    def accel_rows(self) -> slice:
        """Rows of (A x + B u) holding the coordinate accelerations."""
        return slice(self.n_coords, 2 * self.n_coords)


def coord_names(n_surfaces: int) -> tuple[str, ...]:
    names = ["bend", "twist"] + [f"surf_{j + 1}" for j in range(n_surfaces)]
    return tuple(names)


def structural_system(cfg: WingConfig, actuated: bool = False) -> SecondOrderSystem:
    """Wing-only system over [bend, twist, surf_1..surf_M].

    Structural damping is the optional Rayleigh form alpha*M + beta*K1;
    aerodynamic contributions scale with airspeed and vanish at V = 0.
    With actuated=True the hinge structural stiffness is dropped (the
    servo replaces it) ahead of actuator augmentation.
    """
    inertias = inertia_integrals(cfg)
    m_surf = cfg.n_surfaces
    n = m_surf + 2

    mass = np.zeros((n, n))
    mass[0, 0] = inertias.bend
    mass[1, 1] = inertias.twist
    mass[0, 1] = mass[1, 0] = inertias.bend_twist
    for j in range(m_surf):
        r = 2 + j
        mass[r, r] = inertias.surf[j]
        mass[0, r] = mass[r, 0] = inertias.bend_surf[j]
        mass[1, r] = mass[r, 1] = inertias.twist_surf[j]

    k_bend, k_twist, k_surf = stiffness_from_frequencies(cfg, inertias, actuated=actuated)
    k_struct = np.diag(np.concatenate(([k_bend, k_twist], k_surf)))
    c_struct = cfg.rayleigh_mass * mass + cfg.rayleigh_stiffness * k_struct

    aero_c, aero_k = aero_matrices(cfg)
    c_scale, k_scale = aero_scale_factors(cfg)

    damping = c_struct - c_scale * aero_c
    stiffness = k_struct - k_scale * aero_k
    return SecondOrderSystem(
        mass=mass,
        damping=damping,
        stiffness=stiffness,
        input=np.zeros((n, 0)),
        n_coords=n,
        n_pressures=0,
        coord_names=coord_names(m_surf),
    )


def actuator_augment(sys: SecondOrderSystem, act: ActuatorParams, n_surfaces: int) -> SecondOrderSystem:
    """Append one pressure state and one actuator row per control surface.

    Also couples the piston moment into each hinge equation and routes the
    commanded angles into the input matrix.
    """
    if sys.n_pressures:
        raise ValueError("system already actuator-augmented")
    if n_surfaces < 1:
        return sys
    nq = sys.n_coords
    n = nq + n_surfaces

    kv = act.valve_gain * act.flow_pressure_gain()
    cmd_gain = act.arm_offset * act.lever_ratio * kv
    press_decay = kv * act.feedback_area / act.feedback_stiffness
    oil_compliance = act.oil_volume / (4.0 * act.bulk_modulus)

    mass = np.zeros((n, n))
    damping = np.zeros((n, n))
    stiffness = np.zeros((n, n))
    mass[:nq, :nq] = sys.mass
    damping[:nq, :nq] = sys.damping
    stiffness[:nq, :nq] = sys.stiffness
    gains = np.zeros((n, n_surfaces))

    for j in range(n_surfaces):
        hinge = 2 + j
        press = nq + j
        # piston moment on the hinge equation (moved to the left side)
        stiffness[hinge, press] = act.lever_ratio * act.piston_area
        # actuator flow/pressure balance
        damping[press, hinge] = -act.arm_offset * act.piston_area
        damping[press, press] = oil_compliance
        stiffness[press, hinge] = -cmd_gain
        stiffness[press, press] = press_decay
        gains[press, j] = -cmd_gain

    names = sys.coord_names + tuple(f"press_{j + 1}" for j in range(n_surfaces))
    return SecondOrderSystem(
        mass=mass,
        damping=damping,
        stiffness=stiffness,
        input=gains,
        n_coords=nq,
        n_pressures=n_surfaces,
        coord_names=names,
    )


def assemble(cfg: WingConfig, act: ActuatorParams) -> SecondOrderSystem:
    """Full aeroservoelastic system: wing + aerodynamics + actuators."""
    return actuator_augment(structural_system(cfg, actuated=True), act, cfg.n_surfaces)


def to_state_space(sys: SecondOrderSystem) -> StateSpaceModel:
    """Block-companion realisation over x = [q, qdot, press].

    The coordinate block needs an invertible mass matrix; the pressure
    block needs its (diagonal) rate coefficients, both checked here.
    """
    nq, npr = sys.n_coords, sys.n_pressures
    mass_qq = sys.mass[:nq, :nq]
    try:
        mass_inv = np.linalg.inv(mass_qq)
    except np.linalg.LinAlgError:
        raise NumericalError("singular mass matrix; check inertia inputs") from None

    n_states = 2 * nq + npr
    A = np.zeros((n_states, n_states))
    B = np.zeros((n_states, sys.input.shape[1]))
    A[:nq, nq : 2 * nq] = np.eye(nq)
    A[nq : 2 * nq, :nq] = -mass_inv @ sys.stiffness[:nq, :nq]
    A[nq : 2 * nq, nq : 2 * nq] = -mass_inv @ sys.damping[:nq, :nq]

    if npr:
        rate = np.diag(sys.damping[nq:, nq:])
        if np.any(rate == 0.0):
            raise NumericalError("actuator pressure rate coefficient is zero")
        rate_inv = np.diag(1.0 / rate)
        A[nq : 2 * nq, 2 * nq :] = -mass_inv @ sys.stiffness[:nq, nq:]
        A[2 * nq :, :nq] = -rate_inv @ sys.stiffness[nq:, :nq]
        A[2 * nq :, nq : 2 * nq] = -rate_inv @ sys.damping[nq:, :nq]
        A[2 * nq :, 2 * nq :] = -rate_inv @ sys.stiffness[nq:, nq:]
        B[2 * nq :, :] = rate_inv @ sys.input[nq:, :]

    names = tuple(sys.coord_names[:nq])
    names += tuple(f"{n}_rate" for n in sys.coord_names[:nq])
    names += tuple(sys.coord_names[nq:])
    return StateSpaceModel(A=A, B=B, state_names=names, n_coords=nq, n_pressures=npr)


def matrices_to_csv(sys: SecondOrderSystem) -> str:
    """Row-major CSV dump of the assembled matrices for inspection."""
    out = io.StringIO()
    header = ",".join(sys.coord_names)
    for label, mat in (
        ("mass", sys.mass),
        ("damping", sys.damping),
        ("stiffness", sys.stiffness),
        ("input", sys.input),
    ):
        out.write(f"# {label}\n")
        if label == "input":
            ncols = mat.shape[1]
            out.write(",".join(f"cmd_{j + 1}" for j in range(ncols)) + "\n")
        else:
            out.write(header + "\n")
        for row in mat:
            out.write(",".join(repr(float(v)) for v in row) + "\n")
    return out.getvalue()
