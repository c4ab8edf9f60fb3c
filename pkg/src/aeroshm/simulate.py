"""Time integration of the wing model and synthetic accelerometer readings.

Commanded angles are held piecewise-constant per event and integrated with
fixed-step RK4. Probe accelerations follow from the plate kinematics: a
point at (x, y) accelerates as

    y * bend_acc + (x - flex_axis) * twist_acc
      + (x - hinge_axis) * surf_acc_j   if x > hinge_axis and y on surface j.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, replace

import numpy as np

from aeroshm import kernels
from aeroshm.assembly import StateSpaceModel
from aeroshm.errors import ConfigError, IntegrityError, NumericalError
from aeroshm.schedule import InputSchedule
from aeroshm.wing import WingConfig


@dataclass(frozen=True)
class SensorLayout:
    """Probe coordinates on the planform, with integer IDs."""

    ids: tuple[int, ...]
    coords: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.ids) != len(self.coords):
            raise ConfigError("sensor ids and coords length mismatch")

    def __len__(self) -> int:
        return len(self.ids)

    def validate_on(self, cfg: WingConfig) -> None:
        for sid, (x, y) in zip(self.ids, self.coords):
            if not (0.0 <= x <= cfg.chord and 0.0 <= y <= cfg.span):
                raise ConfigError(f"sensor {sid} at ({x}, {y}) lies outside the planform")


def default_layout(cfg: WingConfig) -> SensorLayout:
    """Five probes: root LE, tip LE, outer control surface, tip TE, mid-wing.

    Sensor 3 sits on the outermost control surface and dominates the
    response to commanded inputs; sensor 5 sits near mid-chord mid-span
    where both bending and twist arms are small.
    """
    c, s = cfg.chord, cfg.span
    if cfg.n_surfaces:
        a, b = cfg.surfaces[-1]
        surf_probe = (0.5 * (cfg.hinge_axis + c), 0.5 * (a + b))
    else:
        surf_probe = (0.9 * c, 0.5 * s)
    coords = (
        (0.1 * c, 0.1 * s),
        (0.1 * c, 0.95 * s),
        surf_probe,
        (0.95 * c, 0.97 * s),
        (0.5 * c, 0.5 * s),
    )
    layout = SensorLayout(ids=(1, 2, 3, 4, 5), coords=coords)
    layout.validate_on(cfg)
    return layout


@dataclass(frozen=True)
class Trajectory:
    """Integrated states plus everything needed to recover accelerations."""

    states: np.ndarray            # (T, n_states)
    dt: float
    event_index: np.ndarray       # (T,)
    inputs_rad: np.ndarray        # (E, n_inputs)
    model: StateSpaceModel

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(1, self.states.shape[0] + 1)

    def coord_accels(self) -> np.ndarray:
        """Second derivatives of the generalised coordinates, (T, n_coords)."""
        forcing = self.inputs_rad @ self.model.B.T  # (E, n_states)
        deriv = self.states @ self.model.A.T + forcing[self.event_index]
        return deriv[:, self.model.accel_rows()]


@dataclass(frozen=True)
class SensorRecordings:
    """Per-sensor acceleration time series with event bookkeeping."""

    sample_rate: float
    signals: np.ndarray           # (L, T)
    event_index: np.ndarray       # (T,)
    sensor_ids: tuple[int, ...]
    label: str
    seed: int | None = None

    def __post_init__(self):
        if self.signals.ndim != 2:
            raise ConfigError("signals must be (sensors, samples)")
        if self.signals.shape[1] != len(self.event_index):
            raise ConfigError("event index length must match samples")
        if np.any(np.diff(self.event_index) < 0):
            raise ConfigError("event indices must be non-decreasing")
        if self.label not in ("healthy", "damaged"):
            raise ConfigError(f"unknown health label {self.label!r}")

    @property
    def n_events(self) -> int:
        return int(self.event_index[-1]) + 1 if len(self.event_index) else 0


def simulate(model: StateSpaceModel, schedule: InputSchedule, dt: float, x0=None) -> Trajectory:
    """Fixed-step RK4 of xdot = A x + B u(t), u piecewise-constant per event."""
    if dt <= 0.0:
        raise ConfigError("dt must be positive")
    if schedule.n_surfaces != model.n_inputs:
        raise ConfigError(
            f"schedule drives {schedule.n_surfaces} surfaces but model has {model.n_inputs} inputs"
        )
    inputs_rad = np.deg2rad(schedule.angles_deg)
    forcing = inputs_rad @ model.B.T
    steps = int(round(schedule.hold_s / dt))
    if steps < 1:
        raise ConfigError("hold_s shorter than one time step")
    steps_per_event = np.full(schedule.n_events, steps, dtype=np.int64)
    x0 = np.zeros(model.n_states) if x0 is None else np.asarray(x0, dtype=float)

    states = kernels.rk4_lti(model.A, forcing, steps_per_event, dt, x0)
    if not np.all(np.isfinite(states)):
        bad = int(np.argmax(~np.isfinite(states).all(axis=1)))
        raise NumericalError(f"state diverged at step {bad} (t = {bad * dt:.4f} s)")
    event_index = np.repeat(np.arange(schedule.n_events), steps)
    return Trajectory(states=states, dt=dt, event_index=event_index, inputs_rad=inputs_rad, model=model)


def sensor_accel(
    traj: Trajectory,
    layout: SensorLayout,
    cfg: WingConfig,
    label: str = "healthy",
) -> SensorRecordings:
    """Project coordinate accelerations onto probe locations."""
    layout.validate_on(cfg)
    acc = traj.coord_accels()  # columns: bend, twist, surf_1..surf_M
    signals = np.empty((len(layout), acc.shape[0]))
    for k, (x, y) in enumerate(layout.coords):
        z = y * acc[:, 0] + (x - cfg.flex_axis) * acc[:, 1]
        if x > cfg.hinge_axis:
            for j, (a, b) in enumerate(cfg.surfaces):
                if a <= y <= b:
                    z = z + (x - cfg.hinge_axis) * acc[:, 2 + j]
        signals[k] = z
    return SensorRecordings(
        sample_rate=1.0 / traj.dt,
        signals=signals,
        event_index=traj.event_index.copy(),
        sensor_ids=tuple(layout.ids),
        label=label,
    )


def add_noise(recordings: SensorRecordings, sigma: float, seed: int) -> SensorRecordings:
    """Add i.i.d. zero-mean Gaussian noise, the turbulence stand-in."""
    if sigma < 0.0:
        raise ConfigError("sigma must be non-negative")
    rng = np.random.default_rng(seed)
    noisy = recordings.signals + rng.normal(0.0, sigma, size=recordings.signals.shape)
    return replace(recordings, signals=noisy, seed=seed)


def noise_scale(recordings: SensorRecordings, fraction: float, ref_sensor: int = 3) -> float:
    """Noise sigma as a fraction of the RMS of the reference sensor."""
    idx = recordings.sensor_ids.index(ref_sensor)
    rms = float(np.sqrt(np.mean(recordings.signals[idx] ** 2)))
    return fraction * rms


def config_digest(payload: dict) -> str:
    """Stable hash of a JSON-serialisable configuration."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def write_recordings(path, recordings: SensorRecordings, schedule: InputSchedule, config_hash: str = "") -> None:
    """CSV of (time, sensor_*, event_id, label) plus a JSON sidecar."""
    times = np.arange(1, recordings.signals.shape[1] + 1) / recordings.sample_rate
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["time"] + [f"sensor_{i}" for i in recordings.sensor_ids] + ["event_id", "label"]
        )
        for t in range(recordings.signals.shape[1]):
            row = [repr(float(times[t]))]
            row += [repr(float(v)) for v in recordings.signals[:, t]]
            row += [int(recordings.event_index[t]), recordings.label]
            writer.writerow(row)
    sidecar = {
        "seed": recordings.seed,
        "config_hash": config_hash,
        "schedule": schedule.to_dict(),
        "sample_rate": recordings.sample_rate,
        "sensor_ids": list(recordings.sensor_ids),
        "label": recordings.label,
    }
    with open(str(path) + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)


def read_recordings(path) -> tuple[SensorRecordings, dict]:
    """Inverse of write_recordings; returns the recordings and the sidecar."""
    try:
        with open(str(path) + ".json") as fh:
            sidecar = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"missing or corrupt sidecar for {path}: {exc}") from None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[0] != "time" or header[-1] != "label":
            raise IntegrityError(f"unexpected recordings header in {path}")
        n_sensors = len(header) - 3
        signals, events = [], []
        label = "healthy"
        for row in reader:
            signals.append([float(v) for v in row[1 : 1 + n_sensors]])
            events.append(int(row[-2]))
            label = row[-1]
    recordings = SensorRecordings(
        sample_rate=float(sidecar["sample_rate"]),
        signals=np.asarray(signals).T,
        event_index=np.asarray(events, dtype=int),
        sensor_ids=tuple(int(i) for i in sidecar["sensor_ids"]),
        label=label,
        seed=sidecar.get("seed"),
    )
    return recordings, sidecar
