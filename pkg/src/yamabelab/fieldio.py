"""Field files: a CSV value table plus a JSON metadata sidecar.

``save_field(u, "f.csv")`` writes ``f.csv`` (columns ``m_index, cell_index,
value``) and ``f.json`` (factor parameters). Values use 17 significant digits,
which round-trips every float64 exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .domain import Field, Homogeneous, Line1D, Radial, WeightedGraph
from .errors import DomainError, FormatError, IoError

FORMAT_NAME = "yamabelab-field"
FORMAT_VERSION = 1
COLUMNS = ["m_index", "cell_index", "value"]


def metadata_path(path) -> Path:
    return Path(path).with_suffix(".json")


def manifold_to_dict(M) -> dict:
    if isinstance(M, Homogeneous):
        return {"kind": "Homogeneous", "volume": M.volume, "scalar_curvature": M.scalar_curvature}
    return {
        "kind": "WeightedGraph",
        "node_weights": list(M.node_weights),
        "scalar_curvature": list(M.scalar_curvature),
        "edges": [[i, j, c] for i, j, c in M.edges],
    }


def manifold_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "Homogeneous":
        return Homogeneous(float(d["volume"]), float(d["scalar_curvature"]))
    if kind == "WeightedGraph":
        edges = tuple(tuple(e) for e in d.get("edges", []))
        return WeightedGraph(tuple(d["node_weights"]), tuple(d["scalar_curvature"]), edges)
    raise FormatError(f"unknown manifold kind {kind!r}")


def euclid_to_dict(E) -> dict:
    if isinstance(E, Line1D):
        return {"kind": "Line1D", "half_extent": E.half_extent, "spacing": E.spacing}
    return {"kind": "Radial", "n": E.n, "r_max": E.r_max, "cell_count": E.cell_count}


def euclid_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "Line1D":
        return Line1D(int(d["half_extent"]), float(d["spacing"]))
    if kind == "Radial":
        return Radial(int(d["n"]), float(d["r_max"]), int(d["cell_count"]))
    raise FormatError(f"unknown Euclidean factor kind {kind!r}")


def save_field(u: Field, path, source: str = "") -> None:
    path = Path(path)
    meta = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "manifold": manifold_to_dict(u.manifold),
        "euclid": euclid_to_dict(u.euclid),
        "shape": list(u.values.shape),
        "created": {"by": f"yamabelab {__version__}", "source": source},
    }
    try:
        metadata_path(path).write_text(json.dumps(meta, indent=2) + "\n")
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for (i, k), v in np.ndenumerate(u.values):
                w.writerow([i, k, "%.17g" % v])
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_field(path) -> Field:
    path = Path(path)
    try:
        meta = json.loads(metadata_path(path).read_text())
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"metadata is not valid JSON: {exc}") from exc

    if meta.get("format") != FORMAT_NAME:
        raise FormatError(f"not a field file (format={meta.get('format')!r})")
    try:
        M = manifold_from_dict(meta["manifold"])
        E = euclid_from_dict(meta["euclid"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"incomplete metadata: {exc}") from exc
    except DomainError as exc:
        raise FormatError(f"invalid factor parameters: {exc}") from exc

    shape = (M.node_count, E.cell_count)
    if list(meta.get("shape", shape)) != list(shape):
        raise FormatError(f"declared shape {meta.get('shape')} does not match the factors {shape}")
    if not rows or [c.strip() for c in rows[0]] != COLUMNS:
        raise FormatError(f"expected header {COLUMNS}")
    body = [r for r in rows[1:] if r]
    if len(body) != shape[0] * shape[1]:
        raise FormatError(f"expected {shape[0] * shape[1]} value rows, found {len(body)}")

    vals = np.full(shape, np.nan)
    for r in body:
        if len(r) != 3:
            raise FormatError(f"malformed row {r!r}")
        try:
            i, k, v = int(r[0]), int(r[1]), float(r[2])
        except ValueError as exc:
            raise FormatError(f"malformed row {r!r}") from exc
        if not (0 <= i < shape[0] and 0 <= k < shape[1]):
            raise FormatError(f"index out of range in row {r!r}")
        if not math.isnan(vals[i, k]):
            raise FormatError(f"duplicate entry for ({i}, {k})")
        if not math.isfinite(v) or v < 0:
            raise FormatError(f"values must be finite and nonnegative, got {r[2]!r}")
        vals[i, k] = v
    return Field(M, E, vals)
