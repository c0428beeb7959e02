"""Field snapshots and deterministic serialization helpers.

A snapshot is a flat little-endian float64 binary (packed interior values in
row-major mask order) plus a JSON sidecar carrying the grid geometry and a
run-length encoded mask.  Round trips are bit-exact.  All JSON emitted here is
canonical (sorted keys, fixed separators), so reruns produce byte-identical
artifacts.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grid import Grid, ScalarField

__all__ = [
    "mask_to_rle",
    "mask_from_rle",
    "write_field",
    "read_field",
    "canonical_json",
    "write_json",
    "write_ndjson",
    "read_ndjson",
    "config_hash",
]

FORMAT = "eulerstab-field-v1"


def mask_to_rle(mask: np.ndarray) -> list[int]:
    """Row-major alternating run lengths, starting with a (possibly zero)
    run of False."""
    flat = np.asarray(mask, dtype=bool).ravel()
    runs = []
    current = False
    count = 0
    for bit in flat:
        if bit == current:
            count += 1
        else:
            runs.append(count)
            current = bit
            count = 1
    runs.append(count)
    return runs


def mask_from_rle(rle: list[int], shape: tuple[int, int]) -> np.ndarray:
    total = shape[0] * shape[1]
    flat = np.zeros(total, dtype=bool)
    pos = 0
    value = False
    for run in rle:
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    if pos != total:
        raise ConfigError(f"mask rle covers {pos} cells, expected {total}")
    return flat.reshape(shape)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_json(obj) + "\n", encoding="utf-8")


def write_ndjson(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(canonical_json(row) + "\n")


def read_ndjson(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def write_field(field: ScalarField, stem) -> tuple[Path, Path]:
    """Write <stem>.f64 and <stem>.json; returns the two paths."""
    stem = Path(stem)
    grid = field.grid
    bin_path = stem.with_suffix(".f64")
    json_path = stem.with_suffix(".json")
    bin_path.write_bytes(field.values.astype("<f8").tobytes())
    sidecar = {
        "format": FORMAT,
        "shape": {"kind": grid.kind, "params": grid.params},
        "nx": grid.nx,
        "ny": grid.ny,
        "h": grid.h,
        "x0": grid.x0,
        "y0": grid.y0,
        "lx": grid.lx,
        "ly": grid.ly,
        "mask_rle": mask_to_rle(grid.mask),
        "count": grid.n_interior,
        "dtype": "<f8",
        "order": "C",
    }
    write_json(json_path, sidecar)
    return bin_path, json_path


def read_field(stem) -> ScalarField:
    stem = Path(stem)
    sidecar = json.loads(stem.with_suffix(".json").read_text(encoding="utf-8"))
    if sidecar.get("format") != FORMAT:
        raise ConfigError(f"unknown snapshot format {sidecar.get('format')!r}")
    mask = mask_from_rle(sidecar["mask_rle"], (sidecar["ny"], sidecar["nx"]))
    grid = Grid(
        sidecar["shape"]["kind"],
        sidecar["h"],
        sidecar["x0"],
        sidecar["y0"],
        mask,
        sidecar["lx"],
        sidecar["ly"],
        sidecar["shape"].get("params"),
    )
    values = np.fromfile(stem.with_suffix(".f64"), dtype="<f8")
    if values.size != sidecar["count"]:
        raise ConfigError(
            f"snapshot holds {values.size} values, sidecar says {sidecar['count']}"
        )
    return ScalarField(grid, values)
