"""Writers for OBJ meshes, CSV tables and JSON run manifests.

Floats are written with 17 significant digits so that every double
round-trips exactly and reruns are byte-identical.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .uniform import Mesh


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def write_obj(path: Path, mesh: Mesh, comment: str | None = None) -> Path:
    """Nodes as ``v``, bars as ``l`` line elements, facets as ``f`` triangles."""
    path = Path(path)
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines += ["v " + " ".join(fmt(c) for c in p) for p in mesh.nodes]
    lines += [f"l {a + 1} {b + 1}" for a, b in mesh.bars]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.facets]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_obj(path: Path) -> Mesh:
    nodes, bars, facets = [], [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            nodes.append([float(v) for v in parts[1:4]])
        elif parts[0] == "l":
            bars.append([int(v) - 1 for v in parts[1:3]])
        elif parts[0] == "f":
            facets.append([int(v) - 1 for v in parts[1:4]])
    return Mesh(nodes=np.array(nodes), bars=np.array(bars, dtype=int).reshape(-1, 2),
                facets=np.array(facets, dtype=int).reshape(-1, 3),
                base_nodes=np.empty(0, dtype=int), apex_nodes=np.empty(0, dtype=int))


def write_csv(path: Path, columns: dict[str, np.ndarray]) -> Path:
    path = Path(path)
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise ValueError("columns have different lengths")
    out = [",".join(names)]
    for i in range(n):
        out.append(",".join(fmt(c[i]) for c in cols))
    path.write_text("\n".join(out) + "\n")
    return path


def read_csv(path: Path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().splitlines()
    names = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]).reshape(-1, len(names))
    return {n: data[:, i] for i, n in enumerate(names)}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, Path):
        return str(x)
    return x


def write_manifest(path: Path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    return path
