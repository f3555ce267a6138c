"""Vertex export: CSV, plain homogeneous V-representation, and JSON.

Floats are written with 17 significant digits (CSV, vrep) or Python's
shortest round-trip repr (JSON); both read back to the identical double.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curve import Angle
from .polytopes import PolytopeInstance, expand_redundant

SCHEMA_VERSION = 1


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def vertices_csv(inst: PolytopeInstance, coords: np.ndarray | None = None) -> str:
    """CSV text with columns ``index, block, angle, x0, x1, ...``."""
    V = inst.vertices if coords is None else coords
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "block", "angle"] + [f"x{j}" for j in range(V.shape[1])])
    for i, (row, lab) in enumerate(zip(V, inst.labels)):
        w.writerow([i, lab.block, str(lab.angle)] + [fmt(x) for x in row])
    return buf.getvalue()


@dataclass(frozen=True)
class VertexTable:
    indices: np.ndarray
    blocks: np.ndarray
    angles: tuple[Angle, ...]
    vertices: np.ndarray


def parse_vertices_csv(text: str) -> VertexTable:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:3] != ["index", "block", "angle"]:
        raise ValueError("not a vertex CSV: expected header index,block,angle,...")
    body = rows[1:]
    ncoord = len(rows[0]) - 3
    for r in body:
        if len(r) != ncoord + 3:
            raise ValueError(f"row has {len(r)} fields, expected {ncoord + 3}")
    V = np.array([[float(x) for x in r[3:]] for r in body], dtype=float).reshape(len(body), ncoord)
    return VertexTable(np.array([int(r[0]) for r in body], dtype=int),
                       np.array([int(r[1]) for r in body], dtype=int),
                       tuple(Angle.parse(r[2]) for r in body), V)


def read_vertices_csv(path) -> VertexTable:
    return parse_vertices_csv(Path(path).read_text())


def vertices_vrep(inst: PolytopeInstance, coords: np.ndarray | None = None) -> str:
    """One line per vertex: ``1`` followed by the coordinates."""
    V = inst.vertices if coords is None else coords
    return "".join(" ".join(["1"] + [fmt(x) for x in row]) + "\n" for row in V)


def instance_dict(inst: PolytopeInstance) -> dict:
    d = inst.summary()
    d["antipodal_map"] = [int(a) for a in inst.antipodal]
    d["block_columns"] = [list(c) for c in inst.block_columns]
    d["labels"] = [{"block": lab.block, "angle": str(lab.angle), "cluster": lab.cluster}
                   for lab in inst.labels]
    d["vertices"] = [[float(x) for x in row] for row in inst.vertices]
    return d


def export(inst: PolytopeInstance, fmt_name: str, redundant: bool = False) -> str:
    """Render ``inst`` as ``csv``, ``vrep`` or ``json`` text."""
    coords = expand_redundant(inst) if redundant else None
    if fmt_name == "csv":
        return vertices_csv(inst, coords)
    if fmt_name == "vrep":
        return vertices_vrep(inst, coords)
    if fmt_name == "json":
        d = instance_dict(inst)
        if coords is not None:
            d["vertices"] = [[float(x) for x in row] for row in coords]
        d["embedding"] = "redundant" if redundant else "deduplicated"
        d["schema_version"] = SCHEMA_VERSION
        return json.dumps(d, sort_keys=True, indent=1) + "\n"
    raise ValueError(f"unknown export format {fmt_name!r}")
