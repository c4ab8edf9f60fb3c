"""Quasi-steady strip-theory aerodynamic damping and stiffness blocks.

Sectional lift, wing moment, and hinge moment are linear in twist, bending
rate, control deflections and their rates. Integrating the incremental
work over the span and differentiating with respect to the virtual
displacements yields generalised forces that are linear in (q, qdot); the
velocity-proportional part populates the aerodynamic damping block and the
displacement-proportional part the aerodynamic stiffness block.

Convention: the assembled damping is C1 - (rho_air * chord * V / 4) * C2
and the assembled stiffness K1 - (rho_air * V^2 / 2) * K2, so the blocks
returned here are independent of airspeed and air density.

Coordinate ordering everywhere: [bend, twist, surf_1, ..., surf_M].
"""

import numpy as np

from aeroshm.wing import WingConfig


def aero_matrices(cfg: WingConfig) -> tuple[np.ndarray, np.ndarray]:
    """Return (damping_block, stiffness_block), each (M+2, M+2).

    Lift acts against bending through the spanwise moment arm y, so
    surface terms pick up either the strip width (constant integrands) or
    the strip's first spanwise moment (y-weighted integrands).
    """
    m = cfg.n_surfaces
    n = m + 2
    s, c = cfg.span, cfg.chord
    widths = cfg.surface_measures()
    y_mom = cfg.surface_first_moments()

    damping = np.zeros((n, n))
    stiffness = np.zeros((n, n))

    # bending row: generalised force -integral(y dL)
    damping[0, 0] = -2.0 * cfg.lift_slope * s**3 / 3.0
    stiffness[0, 1] = -c * cfg.lift_slope * s**2 / 2.0
    stiffness[0, 2:] = -c * cfg.flap_lift * y_mom

    # twist row: generalised force +integral(dM)
    damping[1, 0] = c * cfg.lift_slope * cfg.ecc * s**2
    damping[1, 1] = 2.0 * c**2 * cfg.pitch_damping * s
    stiffness[1, 1] = c**2 * cfg.lift_slope * cfg.ecc * s
    stiffness[1, 2:] = c**2 * cfg.flap_moment * widths

    # hinge rows: generalised force +integral(dH) over each surface strip
    for j in range(m):
        r = 2 + j
        damping[r, 0] = 2.0 * c * cfg.hinge_incidence * y_mom[j]
        damping[r, r] = 2.0 * c**2 * cfg.flap_damping * widths[j]
        stiffness[r, 1] = c**2 * cfg.hinge_incidence * widths[j]
        stiffness[r, r] = c**2 * cfg.hinge_flap * widths[j]

    return damping, stiffness


def aero_scale_factors(cfg: WingConfig) -> tuple[float, float]:
    """Multipliers applied to the blocks in the assembled system."""
    damping_scale = cfg.air_density * cfg.chord * cfg.airspeed / 4.0
    stiffness_scale = cfg.air_density * cfg.airspeed**2 / 2.0
    return damping_scale, stiffness_scale
