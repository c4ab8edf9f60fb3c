"""Shared on-disk format: a JSON header line plus raw float64 payloads.

Layout: one UTF-8 JSON line holding metadata and array descriptors
(name, shape), then the arrays' little-endian float64 bytes concatenated
in descriptor order. The header's "kind" tag tells inspectors what the
payload means; "format" is bumped on layout changes.
"""

from __future__ import annotations

import json

import numpy as np

from aeroshm.cp import CPFactors
from aeroshm.errors import IntegrityError
from aeroshm.features import FeatureTensor
from aeroshm.ocsvm import OcsvmModel

FORMAT = "aeroshm-bin-1"


def save_arrays(path, kind: str, meta: dict, arrays: dict) -> None:
    header = {
        "format": FORMAT,
        "kind": kind,
        "meta": meta,
        "arrays": [{"name": k, "shape": list(np.asarray(v).shape)} for k, v in arrays.items()],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for value in arrays.values():
            fh.write(np.ascontiguousarray(value, dtype="<f8").tobytes())


def load_arrays(path, expect_kind: str | None = None) -> tuple[dict, dict]:
    """Read (header, arrays); validates the format tag and payload size."""
    with open(path, "rb") as fh:
        line = fh.readline()
        try:
            header = json.loads(line.decode())
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise IntegrityError(f"{path}: corrupted or non-aeroshm header") from None
        if not isinstance(header, dict) or header.get("format") != FORMAT:
            raise IntegrityError(f"{path}: unknown artifact format")
        if expect_kind is not None and header.get("kind") != expect_kind:
            raise IntegrityError(
                f"{path}: expected kind {expect_kind!r}, found {header.get('kind')!r}"
            )
        arrays = {}
        for desc in header["arrays"]:
            shape = tuple(int(s) for s in desc["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(8 * count)
            if len(buf) != 8 * count:
                raise IntegrityError(f"{path}: truncated payload for array {desc['name']!r}")
            arrays[desc["name"]] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
        if fh.read(1):
            raise IntegrityError(f"{path}: trailing bytes after declared payload")
    return header, arrays


def save_tensor(path, tensor: FeatureTensor) -> None:
    meta = {
        "feature_labels": list(tensor.feature_labels),
        "sensor_ids": list(tensor.sensor_ids),
        "event_labels": list(tensor.event_labels),
        "provenance": tensor.provenance,
        "endianness": "little",
    }
    save_arrays(path, "feature_tensor", meta, {"data": tensor.data})


def load_tensor(path) -> FeatureTensor:
    header, arrays = load_arrays(path, expect_kind="feature_tensor")
    meta = header["meta"]
    return FeatureTensor(
        data=arrays["data"],
        feature_labels=tuple(meta["feature_labels"]),
        sensor_ids=tuple(int(i) for i in meta["sensor_ids"]),
        event_labels=tuple(meta["event_labels"]),
        provenance=meta.get("provenance", {}),
    )


def save_factors(path, factors: CPFactors) -> None:
    save_arrays(
        path,
        "cp_factors",
        {"rank": factors.rank, "meta": factors.meta},
        {
            "a": factors.a,
            "b": factors.b,
            "c": factors.c,
            "weights": factors.weights,
            "fit_history": factors.fit_history,
        },
    )


def load_factors(path) -> CPFactors:
    header, arrays = load_arrays(path, expect_kind="cp_factors")
    return CPFactors(
        a=arrays["a"],
        b=arrays["b"],
        c=arrays["c"],
        weights=arrays["weights"],
        fit_history=arrays["fit_history"],
        meta=header["meta"].get("meta", {}),
    )


def save_ocsvm(path, model: OcsvmModel, extra_meta: dict | None = None) -> None:
    meta = {
        "offset": model.offset,
        "gamma": model.gamma,
        "nu": model.nu,
        "train_size": model.train_size,
    }
    if extra_meta:
        meta.update(extra_meta)
    save_arrays(
        path,
        "ocsvm",
        meta,
        {"support_vectors": model.support_vectors, "dual_coefs": model.dual_coefs},
    )


def load_ocsvm(path) -> tuple[OcsvmModel, dict]:
    header, arrays = load_arrays(path, expect_kind="ocsvm")
    meta = header["meta"]
    model = OcsvmModel(
        support_vectors=arrays["support_vectors"],
        dual_coefs=arrays["dual_coefs"],
        offset=float(meta["offset"]),
        gamma=float(meta["gamma"]),
        nu=float(meta["nu"]),
        train_size=int(meta["train_size"]),
    )
    return model, meta


def describe(path) -> str:
    """Human-readable one-artifact summary used by the inspect command."""
    header, arrays = load_arrays(path)
    kind = header["kind"]
    meta = header.get("meta", {})
    lines = [f"kind: {kind}"]
    if kind == "feature_tensor":
        shape = arrays["data"].shape
        lines.append(f"shape: {shape[0]} features x {shape[1]} sensors x {shape[2]} events")
        labels = meta.get("event_labels", [])
        lines.append(f"events: {labels.count('healthy')} healthy, {labels.count('damaged')} damaged")
    elif kind == "cp_factors":
        weights = np.sort(arrays["weights"])[::-1]
        lines.append(f"rank: {len(weights)}")
        lines.append(
            "factor shapes: a" + str(arrays["a"].shape)
            + " b" + str(arrays["b"].shape)
            + " c" + str(arrays["c"].shape)
        )
        lines.append("weights: " + ", ".join(f"{w:.6g}" for w in weights))
        lines.append(f"final fit error: {arrays['fit_history'][-1]:.6g}")
    elif kind == "ocsvm":
        lines.append(
            f"nu: {meta['nu']}  gamma: {meta['gamma']}  offset: {meta['offset']:.6g}"
        )
        lines.append(
            f"support vectors: {arrays['support_vectors'].shape[0]} of {meta['train_size']} training points"
        )
    else:
        lines.append(f"arrays: {', '.join(a['name'] for a in header['arrays'])}")
    return "\n".join(lines)
