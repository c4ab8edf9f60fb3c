"""Commanded control-surface schedules: regular grids and Latin hypercube draws.

A schedule is a sequence of events; each event holds a tuple of commanded
surface angles (degrees) for a fixed duration. Grid schedules enumerate
ordered permutations of equi-spaced angles (ordering matters: inboard and
outboard surfaces excite the wing differently). LHS schedules stratify
each surface's angle range with one sample per stratum; the large-angle
variant stratifies the magnitude band and flips the sign with a fair coin.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from aeroshm.errors import ConfigError


@dataclass(frozen=True)
class InputSchedule:
    """Event list with generation metadata.

    angles_deg has shape (n_events, n_surfaces); hold_s is the per-event
    hold duration in seconds.
    """

    angles_deg: np.ndarray
    hold_s: float
    mode: str
    bound_deg: float
    min_angle_deg: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "angles_deg", np.atleast_2d(np.asarray(self.angles_deg, dtype=float)))
        if self.hold_s <= 0.0:
            raise ConfigError("hold_s must be positive")
        mags = np.abs(self.angles_deg)
        if np.any(mags > self.bound_deg + 1e-12):
            raise ConfigError(f"commanded angle exceeds +/-{self.bound_deg} deg")
        if self.mode == "lhs-large" and np.any(mags < self.min_angle_deg - 1e-12):
            raise ConfigError(f"large-angle schedule requires |angle| >= {self.min_angle_deg} deg")

    @property
    def n_events(self) -> int:
        return self.angles_deg.shape[0]

    @property
    def n_surfaces(self) -> int:
        return self.angles_deg.shape[1]

    def repeated(self, times: int) -> "InputSchedule":
        """Tile the event list; replicates pass through fresh noise later."""
        return InputSchedule(
            angles_deg=np.tile(self.angles_deg, (times, 1)),
            hold_s=self.hold_s,
            mode=self.mode,
            bound_deg=self.bound_deg,
            min_angle_deg=self.min_angle_deg,
        )

    def to_dict(self) -> dict:
        return {
            "angles_deg": self.angles_deg.tolist(),
            "hold_s": self.hold_s,
            "mode": self.mode,
            "bound_deg": self.bound_deg,
            "min_angle_deg": self.min_angle_deg,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InputSchedule":
        return cls(
            angles_deg=np.asarray(d["angles_deg"], dtype=float),
            hold_s=float(d["hold_s"]),
            mode=str(d["mode"]),
            bound_deg=float(d["bound_deg"]),
            min_angle_deg=float(d.get("min_angle_deg", 0.0)),
        )


def make_grid_schedule(bound_deg: float, steps: int, n_surfaces: int, hold_s: float = 2.0) -> InputSchedule:
    """Cartesian product of equi-spaced angles, ordered permutations.

    steps=1 degenerates to a single event at the lower bound.
    """
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    if steps == 1:
        levels = np.array([-bound_deg])
    else:
        levels = np.linspace(-bound_deg, bound_deg, steps)
    events = np.array(list(itertools.product(levels, repeat=n_surfaces)))
    return InputSchedule(angles_deg=events, hold_s=hold_s, mode="grid", bound_deg=bound_deg)


def make_lhs_schedule(
    bound_deg: float,
    n_events: int,
    n_surfaces: int,
    seed: int,
    hold_s: float = 2.0,
    large_angles: bool = False,
    min_angle_deg: float = 5.0,
) -> InputSchedule:
    """Latin hypercube over the angle box, one sample per stratum per axis.

    With large_angles=True the magnitude band [min_angle_deg, bound_deg]
    is stratified instead and each sample gets a fair random sign, which
    covers the symmetric union of the two large-angle intervals.
    """
    if n_events < 1:
        raise ConfigError("n_events must be >= 1")
    rng = np.random.default_rng(seed)
    unit = np.empty((n_events, n_surfaces))
    for j in range(n_surfaces):
        strata = rng.permutation(n_events)
        unit[:, j] = (strata + rng.uniform(size=n_events)) / n_events

    if large_angles:
        mags = min_angle_deg + unit * (bound_deg - min_angle_deg)
        signs = rng.choice([-1.0, 1.0], size=mags.shape)
        angles = signs * mags
        mode = "lhs-large"
    else:
        angles = -bound_deg + unit * (2.0 * bound_deg)
        mode = "lhs"
        min_angle_deg = 0.0
    return InputSchedule(
        angles_deg=angles,
        hold_s=hold_s,
        mode=mode,
        bound_deg=bound_deg,
        min_angle_deg=min_angle_deg,
    )
