"""Experiment harness: hyperparameter search and the comparative studies.

Three named experiments mirror the published comparisons:

  dim-compare     grid-ordered inputs, event-space rank 2 vs rank 3
  angle-compare   LHS inputs, full angle range vs large angles only
  per-cluster     large-angle LHS, one global boundary vs per-cluster ones

Every experiment runs the same pipeline: simulate healthy and damaged
recordings, extract the feature tensor, decompose the healthy training
events, project everything else into event space, standardise, then train
and score one-class SVMs over an (nu, gamma) grid. Damage is the positive
class throughout.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from aeroshm.assembly import assemble, to_state_space
from aeroshm.clustering import cluster_split
from aeroshm.cp import cp_als, to_event_space
from aeroshm.errors import ConfigError, NumericalError
from aeroshm.features import FeatureTensor, featurize
from aeroshm.kde import fit_kde, generate_negatives, kde_density
from aeroshm.metrics import ConfusionMatrix, confusion, f1
from aeroshm.ocsvm import score, train_ocsvm
from aeroshm.schedule import make_grid_schedule, make_lhs_schedule
from aeroshm.simulate import add_noise, default_layout, noise_scale, sensor_accel, simulate
from aeroshm.wing import actuator_from_dict, inject_damage, wing_from_dict

EXPERIMENTS = ("dim-compare", "angle-compare", "per-cluster")


@dataclass(frozen=True)
class ExperimentReport:
    """Deterministic experiment results plus wall-clock diagnostics.

    The runtime is kept out of to_json_dict so replaying a run with the
    same config and seed reproduces the report file byte for byte.
    """

    experiment: str
    config_hash: str
    seed: int
    variants: dict = field(default_factory=dict)
    runtime_s: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "variants": self.variants,
        }

    def best_f1(self, variant: str) -> float:
        return self.variants[variant]["best"]["f1"]


def _predict(model, points) -> list[str]:
    return ["healthy" if v >= 0.0 else "damaged" for v in np.atleast_1d(score(model, points))]


def grid_search(train_pts, eval_pts, labels, nu_grid, gamma_grid, svm_tol: float = 1e-6) -> dict:
    """Train per (nu, gamma), score the evaluation set, pick the max F1.

    Ties break towards smaller nu, then smaller gamma. Solver failures
    mark the cell failed and the sweep continues.
    """
    if not len(nu_grid) or not len(gamma_grid):
        raise ConfigError("hyperparameter grids must be non-empty")
    cells = []
    best = None
    for nu in sorted(float(v) for v in nu_grid):
        for gamma in sorted(float(v) for v in gamma_grid):
            cell = {"nu": nu, "gamma": gamma}
            try:
                model = train_ocsvm(train_pts, nu=nu, gamma=gamma, tol=svm_tol)
                cm = confusion(labels, _predict(model, eval_pts))
                cell["confusion"] = cm.as_dict()
                cell["f1"] = f1(cm)
            except (NumericalError, ConfigError) as exc:
                cell["failed"] = str(exc)
            cells.append(cell)
            if "f1" in cell and (best is None or cell["f1"] > best["f1"]):
                best = cell
    if best is None:
        raise NumericalError("every grid cell failed")
    return {"cells": cells, "best": best}


def _dataset(config: dict, schedule, seeds) -> tuple[FeatureTensor, FeatureTensor]:
    """Simulate healthy and damaged recordings and featurise both.

    Noise sigma comes from the healthy run (a fraction of the reference
    sensor RMS) and is applied to both health states with independent
    seeded streams.
    """
    wing = wing_from_dict(config["wing"])
    act = actuator_from_dict(config["actuator"])
    layout = default_layout(wing)
    dt = config["simulation"]["dt"]
    n_bins = config["features"]["n_bins"]
    taper = config["features"]["taper"]

    healthy_model = to_state_space(assemble(wing, act))
    damaged_model = to_state_space(
        assemble(wing, inject_damage(act, config["damage"]["severity"]))
    )

    rec_h = sensor_accel(simulate(healthy_model, schedule, dt), layout, wing, label="healthy")
    rec_d = sensor_accel(simulate(damaged_model, schedule, dt), layout, wing, label="damaged")
    sigma = noise_scale(rec_h, config["noise"]["fraction"])
    rec_h = add_noise(rec_h, sigma, seed=seeds["noise_healthy"])
    rec_d = add_noise(rec_d, sigma, seed=seeds["noise_damaged"])
    return featurize(rec_h, n_bins, taper), featurize(rec_d, n_bins, taper)


def _event_split(n_events: int, train_fraction: float, seed: int):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_events)
    n_train = int(round(train_fraction * n_events))
    n_train = min(max(n_train, 2), n_events - 1)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


class Standardizer:
    """Per-axis zero-mean unit-variance transform fitted on training points."""

    def __init__(self, points: np.ndarray):
        self.mean = points.mean(axis=0)
        std = points.std(axis=0)
        self.std = np.where(std > 0.0, std, 1.0)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points) - self.mean) / self.std


def _event_space_variant(healthy: FeatureTensor, damaged: FeatureTensor, rank: int, config: dict, seeds) -> dict:
    """Decompose healthy training events and project the rest into event space."""
    n_h = healthy.shape[2]
    train_idx, eval_idx = _event_split(
        n_h, config["experiment"]["train_fraction"], seeds["split"]
    )
    cp_cfg = config["cp"]
    factors = cp_als(
        healthy.data[:, :, train_idx],
        rank,
        tol=cp_cfg["tol"],
        max_iter=cp_cfg["max_iter"],
        seed=seeds["cp"],
        n_restarts=cp_cfg["n_restarts"],
        ridge=cp_cfg["ridge"],
    )
    train_pts = factors.c
    eval_slices = np.concatenate(
        [
            np.moveaxis(healthy.data[:, :, eval_idx], 2, 0),
            np.moveaxis(damaged.data, 2, 0),
        ]
    )
    eval_pts = to_event_space(factors, eval_slices)
    labels = ["healthy"] * len(eval_idx) + ["damaged"] * damaged.shape[2]

    scale = Standardizer(train_pts)
    sensor_energy = np.concatenate(
        [healthy.sensor_energy()[train_idx]]
    )
    return {
        "factors": factors,
        "train_idx": train_idx,
        "eval_idx": eval_idx,
        "train_pts": scale(train_pts),
        "eval_pts": scale(eval_pts),
        "labels": labels,
        "train_sensor_energy": sensor_energy,
        "sensor_ids": healthy.sensor_ids,
    }


def _variant_payload(data: dict, search: dict) -> dict:
    return {
        "rank": data["factors"].rank,
        "cp_fit_error": float(data["factors"].fit_history[-1]),
        "train_events": [int(i) for i in data["train_idx"]],
        "eval_events": [int(i) for i in data["eval_idx"]],
        "cells": search["cells"],
        "best": search["best"],
    }


def _scatter(data: dict, search: dict) -> dict:
    """Point cloud with scores under the best model, for plot emission."""
    best = search["best"]
    model = train_ocsvm(data["train_pts"], nu=best["nu"], gamma=best["gamma"])
    eval_scores = np.atleast_1d(score(model, data["eval_pts"]))
    train_scores = np.atleast_1d(score(model, data["train_pts"]))
    return {
        "train_points": data["train_pts"],
        "train_scores": train_scores,
        "eval_points": data["eval_pts"],
        "eval_scores": eval_scores,
        "labels": data["labels"],
        "model": model,
    }


def _negatives_diagnostic(data: dict, search: dict, config: dict, seed: int) -> dict:
    """KDE artificial negatives scored by the best model (diagnostic only)."""
    kde_cfg = config["kde"]
    model_kde = fit_kde(data["train_pts"], kde_cfg["bandwidth"])
    negatives = generate_negatives(
        model_kde,
        kde_cfg["n_negatives"],
        density_quantile=kde_cfg["density_quantile"],
        box_margin=kde_cfg["box_margin"],
        seed=seed,
    )
    best = search["best"]
    svm = train_ocsvm(data["train_pts"], nu=best["nu"], gamma=best["gamma"])
    rejected = float(np.mean(np.atleast_1d(score(svm, negatives)) < 0.0))
    density_at_train = kde_density(model_kde, data["train_pts"])
    return {
        "n_negatives": int(len(negatives)),
        "fraction_rejected_by_svm": rejected,
        "kde_bandwidth": float(model_kde.bandwidth),
        "train_density_median": float(np.median(density_at_train)),
    }


def _per_cluster_results(data: dict, config: dict, seeds, nu_grid, gamma_grid, svm_tol) -> dict:
    """Split event space, grid-search one model per cluster, score routed points."""
    cluster_cfg = config["cluster"]
    k = cluster_cfg["k"] or len(data["sensor_ids"])
    k = min(k, len(data["train_pts"]) - 1)
    split = cluster_split(
        data["train_pts"],
        k=k,
        seed=seeds["cluster"],
        nu=min(nu_grid),
        gamma=min(gamma_grid),
        sensor_energy=data["train_sensor_energy"],
        sensor_ids=data["sensor_ids"],
        routing=cluster_cfg["routing"],
        retry_cap=cluster_cfg["retry_cap"],
    )
    eval_pts = np.asarray(data["eval_pts"])
    labels = np.asarray(data["labels"])
    owners = split.assign(eval_pts)
    train_owners = split.labels

    clusters = {}
    for c in range(split.k):
        members = data["train_pts"][train_owners == c]
        routed = owners == c
        entry = {
            "train_points": int(len(members)),
            "eval_points": int(routed.sum()),
            "attributed_sensor": split.attribution.get(c),
        }
        if routed.sum() == 0 or len(members) < 2:
            entry["skipped"] = "no routed evaluation points or too few members"
            clusters[f"cluster_{c}"] = entry
            continue
        try:
            search = grid_search(
                members, eval_pts[routed], list(labels[routed]), nu_grid, gamma_grid, svm_tol
            )
            entry["cells"] = search["cells"]
            entry["best"] = search["best"]
        except (NumericalError, ConfigError) as exc:
            entry["skipped"] = str(exc)
        clusters[f"cluster_{c}"] = entry

    scored = [v["best"]["f1"] for v in clusters.values() if "best" in v]
    return {
        "k": split.k,
        "clusters": clusters,
        "best_cluster_f1": max(scored) if scored else None,
        "cluster_assignments": [int(c) for c in train_owners],
    }


def run_experiment(name: str, config: dict, seed: int) -> tuple[ExperimentReport, dict]:
    """Execute a named comparative study.

    Returns the report plus an artifact dict holding the event-space
    scatter data (and per-cluster boundaries where relevant) keyed by
    variant, for plot emission by the CLI.
    """
    from aeroshm.pipeline_config import config_hash  # local import to avoid a cycle

    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; pick one of {EXPERIMENTS}")
    t0 = time.perf_counter()
    root = np.random.SeedSequence(seed)
    streams = root.spawn(8)
    seeds = {
        "schedule": int(streams[0].generate_state(1)[0] % 2**31),
        "noise_healthy": int(streams[1].generate_state(1)[0] % 2**31),
        "noise_damaged": int(streams[2].generate_state(1)[0] % 2**31),
        "split": int(streams[3].generate_state(1)[0] % 2**31),
        "cp": int(streams[4].generate_state(1)[0] % 2**31),
        "cluster": int(streams[5].generate_state(1)[0] % 2**31),
        "kde": int(streams[6].generate_state(1)[0] % 2**31),
    }
    sched_cfg = config["schedule"]
    svm_cfg = config["svm"]
    nu_grid = svm_cfg["nu_grid"]
    gamma_grid = svm_cfg["gamma_grid"]
    svm_tol = svm_cfg["tol"]
    n_surf = len(config["wing"]["surface_edges"]) // 2

    variants: dict = {}
    artifacts: dict = {}

    def run_variant(key, schedule, rank):
        stage = f"{name}/{key}"
        try:
            healthy, damaged = _dataset(config, schedule, seeds)
            data = _event_space_variant(healthy, damaged, rank, config, seeds)
            search = grid_search(
                data["train_pts"], data["eval_pts"], data["labels"], nu_grid, gamma_grid, svm_tol
            )
        except (NumericalError, ConfigError) as exc:
            raise NumericalError(f"stage {stage} failed: {exc}") from exc
        variants[key] = _variant_payload(data, search)
        artifacts[key] = _scatter(data, search)
        return data, search

    if name == "dim-compare":
        schedule = make_grid_schedule(
            sched_cfg["bound_deg"], sched_cfg["grid_steps"], n_surf, sched_cfg["hold_s"]
        ).repeated(sched_cfg["grid_repeats"])
        run_variant("rank_2", schedule, config["experiment"]["rank_low"])
        run_variant("rank_3", schedule, config["experiment"]["rank_high"])

    elif name == "angle-compare":
        rank = config["experiment"]["rank"]
        full = make_lhs_schedule(
            sched_cfg["bound_deg"], sched_cfg["lhs_events"], n_surf,
            seed=seeds["schedule"], hold_s=sched_cfg["hold_s"],
        )
        large = make_lhs_schedule(
            sched_cfg["bound_deg"], sched_cfg["lhs_events"], n_surf,
            seed=seeds["schedule"], hold_s=sched_cfg["hold_s"],
            large_angles=True, min_angle_deg=sched_cfg["min_angle_deg"],
        )
        data, search = run_variant("full_range", full, rank)
        variants["full_range"]["negatives"] = _negatives_diagnostic(
            data, search, config, seeds["kde"]
        )
        run_variant("large_angles", large, rank)

    elif name == "per-cluster":
        rank = config["experiment"]["rank"]
        large = make_lhs_schedule(
            sched_cfg["bound_deg"], sched_cfg["lhs_events"], n_surf,
            seed=seeds["schedule"], hold_s=sched_cfg["hold_s"],
            large_angles=True, min_angle_deg=sched_cfg["min_angle_deg"],
        )
        data, search = run_variant("global", large, rank)
        try:
            per_cluster = _per_cluster_results(data, config, seeds, nu_grid, gamma_grid, svm_tol)
        except (NumericalError, ConfigError) as exc:
            raise NumericalError(f"stage {name}/per_cluster failed: {exc}") from exc
        variants["per_cluster"] = per_cluster
        artifacts["per_cluster"] = {"data": data, "results": per_cluster}

    report = ExperimentReport(
        experiment=name,
        config_hash=config_hash(config),
        seed=seed,
        variants=variants,
        runtime_s=time.perf_counter() - t0,
    )
    return report, artifacts
