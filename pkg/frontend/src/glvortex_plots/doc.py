"""Snapshot documents: parse the simulator's CSV/VTK/glmesh outputs.

The parsers read the files exactly as the simulator writes them (legacy
ASCII VTK 3.0 unstructured triangle grids, CSV snapshots with one row per
node, and the sectioned plain-text glmesh format) and expose everything as
a :class:`SnapshotDoc`. Serialization round-trips preserve field values
exactly (17 significant digits).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SnapshotDoc", "read_glmesh", "load_snapshot"]

FMT = "%.17g"


class SnapshotParseError(ValueError):
    pass


@dataclass
class SnapshotDoc:
    """Node coordinates, triangle connectivity and named nodal fields."""

    nodes: np.ndarray
    triangles: np.ndarray
    fields: dict = field(default_factory=dict)
    title: str = ""

    def __post_init__(self):
        n = self.nodes.shape[0]
        if self.triangles.size and (
            self.triangles.min() < 0 or self.triangles.max() >= n
        ):
            raise SnapshotParseError("triangle references a node out of range")
        for name, values in self.fields.items():
            if values.shape != (n,):
                raise SnapshotParseError(
                    f"field {name!r} has {values.shape[0]} values for {n} nodes"
                )

    @property
    def field_names(self):
        return sorted(self.fields)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_vtk(cls, path) -> "SnapshotDoc":
        with open(path) as f:
            lines = [ln.rstrip("\n") for ln in f]
        if not lines or not lines[0].startswith("# vtk DataFile"):
            raise SnapshotParseError(f"{path}: not a legacy VTK file")
        title = lines[1] if len(lines) > 1 else ""
        pos = 2
        nodes = tris = None
        fields = {}
        n_points = 0
        while pos < len(lines):
            parts = lines[pos].split()
            pos += 1
            if not parts:
                continue
            key = parts[0].upper()
            if key == "POINTS":
                n_points = int(parts[1])
                vals = []
                while len(vals) < 3 * n_points:
                    vals += lines[pos].split()
                    pos += 1
                arr = np.array(vals, dtype=float).reshape(n_points, 3)
                nodes = arr[:, :2]
            elif key == "CELLS":
                m = int(parts[1])
                rows = []
                for _ in range(m):
                    entry = lines[pos].split()
                    pos += 1
                    if entry[0] != "3":
                        raise SnapshotParseError(
                            f"{path}: only triangle cells supported, got size {entry[0]}"
                        )
                    rows.append([int(v) for v in entry[1:4]])
                tris = np.array(rows, dtype=np.int64)
            elif key == "CELL_TYPES":
                m = int(parts[1])
                for _ in range(m):
                    if lines[pos].strip() != "5":
                        raise SnapshotParseError(f"{path}: non-triangle cell type")
                    pos += 1
            elif key == "POINT_DATA":
                n_points = int(parts[1])
            elif key == "SCALARS":
                name = parts[1]
                pos += 1  # LOOKUP_TABLE line
                vals = []
                while len(vals) < n_points:
                    vals += lines[pos].split()
                    pos += 1
                fields[name] = np.array(vals, dtype=float)
            elif key == "VECTORS":
                name = parts[1]
                vals = []
                while len(vals) < 3 * n_points:
                    vals += lines[pos].split()
                    pos += 1
                arr = np.array(vals, dtype=float).reshape(n_points, 3)
                fields[f"{name}x"] = arr[:, 0]
                fields[f"{name}y"] = arr[:, 1]
        if nodes is None or tris is None:
            raise SnapshotParseError(f"{path}: missing POINTS or CELLS section")
        return cls(nodes=nodes, triangles=tris, fields=fields, title=title)

    @classmethod
    def from_csv(cls, csv_path, mesh_path) -> "SnapshotDoc":
        """CSV snapshot (one row per node) plus the glmesh connectivity."""
        nodes, tris = read_glmesh(mesh_path)
        with open(csv_path) as f:
            header = f.readline().strip().split(",")
            data = np.loadtxt(f, delimiter=",", ndmin=2)
        if data.shape[0] != nodes.shape[0]:
            raise SnapshotParseError(
                f"{csv_path}: {data.shape[0]} rows for {nodes.shape[0]} mesh nodes"
            )
        cols = {name: data[:, i] for i, name in enumerate(header)}
        xy = np.column_stack([cols.pop("x"), cols.pop("y")])
        if np.abs(xy - nodes).max() > 1e-9:
            raise SnapshotParseError(
                f"{csv_path}: node coordinates disagree with {mesh_path}"
            )
        return cls(nodes=nodes, triangles=tris, fields=cols)

    # -- serialization -----------------------------------------------------

    def to_vtk(self, path) -> None:
        n, m = self.nodes.shape[0], self.triangles.shape[0]
        with open(path, "w", newline="\n") as f:
            f.write("# vtk DataFile Version 3.0\n")
            f.write((self.title or "snapshot") + "\n")
            f.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
            f.write(f"POINTS {n} double\n")
            for x, y in self.nodes:
                f.write(f"{FMT % x} {FMT % y} 0\n")
            f.write(f"CELLS {m} {4 * m}\n")
            for a, b, c in self.triangles:
                f.write(f"3 {a} {b} {c}\n")
            f.write(f"CELL_TYPES {m}\n")
            for _ in range(m):
                f.write("5\n")
            f.write(f"POINT_DATA {n}\n")
            for name in self.field_names:
                f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                for v in self.fields[name]:
                    f.write(FMT % v + "\n")


def read_glmesh(path):
    """Parse the sectioned plain-text mesh format; returns (nodes, triangles)."""
    tokens = []
    with open(path) as f:
        for raw in f:
            text = raw.split("#", 1)[0].strip()
            if text:
                tokens.append(text.split())
    if not tokens or tokens[0] != ["glmesh", "1"]:
        raise SnapshotParseError(f"{path}: missing 'glmesh 1' header")
    pos = 1

    def section(name, width):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] != name:
            raise SnapshotParseError(f"{path}: expected section {name!r}")
        count = int(tokens[pos][1])
        pos += 1
        rows = tokens[pos : pos + count]
        pos += count
        if len(rows) != count or any(len(r) != width for r in rows):
            raise SnapshotParseError(f"{path}: malformed section {name!r}")
        return rows

    nodes = np.array(section("nodes", 2), dtype=float)
    tris = np.array(section("triangles", 3), dtype=np.int64)
    section("boundary", 3)
    return nodes, tris


def load_snapshot(path, mesh=None) -> SnapshotDoc:
    """Dispatch on extension: .vtk standalone, .csv needs a glmesh file."""
    path = str(path)
    if path.endswith(".vtk"):
        return SnapshotDoc.from_vtk(path)
    if path.endswith(".csv"):
        if mesh is None:
            raise SnapshotParseError(
                "CSV snapshots carry no connectivity; pass the glmesh file"
            )
        return SnapshotDoc.from_csv(path, mesh)
    raise SnapshotParseError(f"unrecognized snapshot format: {path}")
