"""Wing and actuator configuration plus the plate inertia integrals.

The wing is a uniform rectangular flat plate (span x chord, constant
thickness and density) with bending, twist about the flexural axis, and M
hinged control surfaces behind the hinge axis. Control surfaces occupy
disjoint spanwise strips given by an ordered list of 2M edge locations
[start_1, end_1, start_2, end_2, ...]; surface j covers
y in [edges[2j], edges[2j+1]] and x in [hinge_axis, chord].
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from aeroshm.errors import ConfigError


@dataclass(frozen=True)
class WingConfig:
    """Geometry, material, modal, and strip-theory parameters (SI units).

    Aerodynamic coefficients follow the quasi-steady strip-theory
    convention: lift_slope and ecc drive lift/pitching moment with twist,
    flap_lift/flap_moment give control-surface contributions,
    hinge_incidence/hinge_flap the hinge-moment derivatives, and
    pitch_damping/flap_damping the rate-proportional moment terms.
    """

    span: float = 7.5
    chord: float = 2.0
    thickness: float = 0.05
    density: float = 2000.0
    air_density: float = 1.225
    flex_axis: float = 0.96
    hinge_axis: float = 1.5
    airspeed: float = 20.0
    freq_bend: float = 2.0 * np.pi * 5.0
    freq_twist: float = 2.0 * np.pi * 10.0
    freq_surface: float = 2.0 * np.pi * 15.0
    lift_slope: float = 2.0 * np.pi
    flap_lift: float = 2.5
    flap_moment: float = -0.4
    ecc: float = 0.23
    pitch_damping: float = -1.2
    hinge_incidence: float = -0.2
    hinge_flap: float = -0.6
    flap_damping: float = -0.05
    surface_edges: tuple[float, ...] = (2.0, 4.0, 4.5, 7.0)
    rayleigh_mass: float = 0.0
    rayleigh_stiffness: float = 0.0

    def __post_init__(self):
        for name in ("span", "chord", "thickness", "density"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.air_density < 0.0:
            raise ConfigError("air_density must be non-negative")
        if not self.hinge_axis > self.flex_axis:
            raise ConfigError("hinge_axis must lie behind flex_axis")
        if not 0.0 <= self.flex_axis <= self.chord:
            raise ConfigError("flex_axis outside the chord")
        if not 0.0 < self.hinge_axis < self.chord:
            raise ConfigError("hinge_axis outside the chord")
        if self.freq_bend < 0.0 or self.freq_twist < 0.0 or self.freq_surface < 0.0:
            raise ConfigError("modal frequencies must be non-negative")
        edges = np.asarray(self.surface_edges, dtype=float)
        if edges.size % 2 != 0:
            raise ConfigError("surface_edges needs an even number of entries")
        if edges.size and (edges.min() < 0.0 or edges.max() > self.span):
            raise ConfigError("surface edge outside [0, span]")
        if np.any(np.diff(edges) < 0.0):
            raise ConfigError("surface_edges must be ordered (surfaces overlap or are reversed)")
        object.__setattr__(self, "surface_edges", tuple(float(v) for v in edges))

    @property
    def n_surfaces(self) -> int:
        return len(self.surface_edges) // 2

    @property
    def surfaces(self) -> list[tuple[float, float]]:
        """Per-surface spanwise intervals [(start, end), ...]."""
        e = self.surface_edges
        return [(e[2 * j], e[2 * j + 1]) for j in range(self.n_surfaces)]

    def surface_measures(self) -> np.ndarray:
        """Spanwise width of each control surface (interval length)."""
        return np.array([b - a for a, b in self.surfaces])

    def surface_first_moments(self) -> np.ndarray:
        """Spanwise first moment of each surface strip: integral of y over it."""
        return np.array([0.5 * (b * b - a * a) for a, b in self.surfaces])


@dataclass(frozen=True)
class ActuatorParams:
    """Linearised hydraulic actuator constants (one piston per surface)."""

    valve_gain: float = 4.5e-5
    supply_pressure: float = 2.0e7
    return_pressure: float = 1.0e5
    piston_area: float = 1.0e-3
    feedback_area: float = 1.0e-4
    feedback_stiffness: float = 1.0e5
    internal_stiffness: float = 5.0e5
    oil_volume: float = 1.0e-3
    bulk_modulus: float = 7.0e8
    lever_ratio: float = 1.5
    arm_offset: float = 0.1

    def __post_init__(self):
        if self.supply_pressure <= 0.0:
            raise ConfigError("supply_pressure must be positive")
        if not self.supply_pressure > self.return_pressure >= 0.0:
            raise ConfigError("need supply_pressure > return_pressure >= 0")
        for name in (
            "valve_gain",
            "piston_area",
            "feedback_area",
            "feedback_stiffness",
            "internal_stiffness",
            "oil_volume",
            "bulk_modulus",
        ):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")

    def flow_pressure_gain(self) -> float:
        """Valve flow term sqrt(P_s / 2) shared by the actuator equation."""
        return float(np.sqrt(self.supply_pressure / 2.0))


@dataclass(frozen=True)
class InertiaSet:
    """Closed-form plate inertia integrals (kg m^2).

    Per-surface arrays are indexed by control surface. Cross terms are
    symmetric by construction (bend_twist covers both orderings).
    """

    bend: float
    twist: float
    bend_twist: float
    surf: np.ndarray
    bend_surf: np.ndarray
    twist_surf: np.ndarray


def inertia_integrals(cfg: WingConfig) -> InertiaSet:
    """Evaluate the plate inertia integrals for a uniform wing.

    The wing is a 2-D plate of areal density rho*t. Bending and twist
    integrate over the whole planform; control-surface terms integrate
    over x in [hinge_axis, chord] and the surface's spanwise strip only.
    """
    rt = cfg.density * cfg.thickness
    s, c, xf, xh = cfg.span, cfg.chord, cfg.flex_axis, cfg.hinge_axis

    bend = rt * c * s**3 / 3.0
    twist = rt * s * ((c - xf) ** 3 + xf**3) / 3.0
    bend_twist = rt * (s**2 / 2.0) * c * (c / 2.0 - xf)

    widths = cfg.surface_measures()
    y_moments = cfg.surface_first_moments()
    cx = c - xh
    # chordwise integrals over the surface: (x-xh)^2, (x-xh), (x-xf)(x-xh)
    x_sq = cx**3 / 3.0
    x_lin = cx**2 / 2.0
    x_mix = cx**3 / 3.0 + (xh - xf) * cx**2 / 2.0

    surf = rt * widths * x_sq
    bend_surf = rt * y_moments * x_lin
    twist_surf = rt * widths * x_mix
    return InertiaSet(
        bend=float(bend),
        twist=float(twist),
        bend_twist=float(bend_twist),
        surf=surf,
        bend_surf=bend_surf,
        twist_surf=twist_surf,
    )


def stiffness_from_frequencies(cfg: WingConfig, inertias: InertiaSet, actuated: bool = True):
    """Back-calculate diagonal structural stiffness from modal frequencies.

    Uses omega = sqrt(K / I) per coordinate. Control-surface stiffness is
    zero when hydraulic actuators hold the hinges (the servo supplies the
    restoring moment); otherwise the hinge gets freq_surface.
    """
    k_bend = cfg.freq_bend**2 * inertias.bend
    k_twist = cfg.freq_twist**2 * inertias.twist
    if actuated:
        k_surf = np.zeros(cfg.n_surfaces)
    else:
        k_surf = cfg.freq_surface**2 * inertias.surf
    return float(k_bend), float(k_twist), k_surf


def inject_damage(act: ActuatorParams, severity: float = 0.3) -> ActuatorParams:
    """Emulate hydraulic pressure leakage by derating the actuator.

    Supply pressure and both internal spring stiffnesses scale by
    (1 - severity); the default 0.3 is the 30% derating used throughout
    the damage studies.
    """
    if not 0.0 <= severity < 1.0:
        raise ConfigError(f"severity must be in [0, 1), got {severity}")
    keep = 1.0 - severity
    return ActuatorParams(
        valve_gain=act.valve_gain,
        supply_pressure=act.supply_pressure * keep,
        return_pressure=act.return_pressure,
        piston_area=act.piston_area,
        feedback_area=act.feedback_area,
        feedback_stiffness=act.feedback_stiffness * keep,
        internal_stiffness=act.internal_stiffness * keep,
        oil_volume=act.oil_volume,
        bulk_modulus=act.bulk_modulus,
        lever_ratio=act.lever_ratio,
        arm_offset=act.arm_offset,
    )


def wing_from_dict(d: dict) -> WingConfig:
    try:
        return WingConfig(**d)
    except TypeError as exc:
        raise ConfigError(f"bad wing config: {exc}") from None


def actuator_from_dict(d: dict) -> ActuatorParams:
    try:
        return ActuatorParams(**d)
    except TypeError as exc:
        raise ConfigError(f"bad actuator config: {exc}") from None


def load_configs(path) -> tuple[WingConfig, ActuatorParams]:
    """Read {"wing": {...}, "actuator": {...}} from a JSON document."""
    with open(path) as fh:
        doc = json.load(fh)
    return wing_from_dict(doc.get("wing", {})), actuator_from_dict(doc.get("actuator", {}))


def dump_configs(wing: WingConfig, act: ActuatorParams) -> str:
    doc = {"wing": asdict(wing), "actuator": asdict(act)}
    doc["wing"]["surface_edges"] = list(wing.surface_edges)
    return json.dumps(doc, indent=2, sort_keys=True)
