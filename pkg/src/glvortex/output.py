"""Snapshot and diagnostics writers (CSV and legacy ASCII VTK).

All floats are written with 17 significant digits and LF line endings, so
reruns of the same configuration produce byte-identical files.
"""

from __future__ import annotations

import os

import numpy as np

from .post import Diagnostics, FieldSnapshot

__all__ = ["snapshot_filename", "write_snapshot", "write_diagnostics"]

FMT = "%.17g"


def snapshot_filename(snapshot: FieldSnapshot, ext: str) -> str:
    return f"snap_t{snapshot.time:.3f}_{snapshot.solver}.{ext}"


def write_snapshot(snapshot: FieldSnapshot, out_dir, formats=("csv",)) -> list:
    """Write one snapshot in the requested formats; returns the file paths.

    Files are written atomically (temp file + rename).
    """
    paths = []
    os.makedirs(out_dir, exist_ok=True)
    for fmt in formats:
        name = snapshot_filename(snapshot, fmt)
        path = os.path.join(out_dir, name)
        tmp = path + ".tmp"
        with open(tmp, "w", newline="\n") as f:
            if fmt == "csv":
                _write_csv(snapshot, f)
            elif fmt == "vtk":
                _write_vtk(snapshot, f)
            else:
                raise ValueError(f"unknown snapshot format {fmt!r}")
        os.replace(tmp, path)
        paths.append(path)
    return paths


def _write_csv(s: FieldSnapshot, f):
    cols = ["x", "y", "re_psi", "im_psi", "density", "B", "Ax", "Ay"]
    data = [
        s.mesh.nodes[:, 0], s.mesh.nodes[:, 1],
        s.re_psi, s.im_psi, s.density, s.b_field,
        s.a_field[:, 0], s.a_field[:, 1],
    ]
    if s.e_field is not None:
        cols += ["Ex", "Ey"]
        data += [s.e_field[:, 0], s.e_field[:, 1]]
    f.write(",".join(cols) + "\n")
    table = np.column_stack(data)
    for row in table:
        f.write(",".join(FMT % v for v in row) + "\n")


def _write_vtk(s: FieldSnapshot, f):
    mesh = s.mesh
    n, m = mesh.n_nodes, mesh.n_triangles
    f.write("# vtk DataFile Version 3.0\n")
    f.write(f"glvortex t={s.time:.6f} solver={s.solver}\n")
    f.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
    f.write(f"POINTS {n} double\n")
    for x, y in mesh.nodes:
        f.write(f"{FMT % x} {FMT % y} 0\n")
    f.write(f"CELLS {m} {4 * m}\n")
    for a, b, c in mesh.triangles:
        f.write(f"3 {a} {b} {c}\n")
    f.write(f"CELL_TYPES {m}\n")
    for _ in range(m):
        f.write("5\n")
    f.write(f"POINT_DATA {n}\n")
    for name, vals in (("density", s.density), ("B", s.b_field),
                       ("re_psi", s.re_psi), ("im_psi", s.im_psi)):
        f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
        for v in vals:
            f.write(FMT % v + "\n")
    vectors = [("A", s.a_field)]
    if s.e_field is not None:
        vectors.append(("E", s.e_field))
    for name, vals in vectors:
        f.write(f"VECTORS {name} double\n")
        for vx, vy in vals:
            f.write(f"{FMT % vx} {FMT % vy} 0\n")


def write_diagnostics(diag: Diagnostics, path) -> str:
    """One CSV row per time step."""
    arrays = diag.as_arrays()
    keys = ["t", "mean_density", "min_density", "max_abs_psi",
            "energy", "vortices", "psi_iters", "field_iters"]
    tmp = str(path) + ".tmp"
    with open(tmp, "w", newline="\n") as f:
        f.write(",".join(keys) + "\n")
        for i in range(arrays["t"].shape[0]):
            row = []
            for k in keys:
                v = arrays[k][i]
                row.append(str(int(v)) if k in ("vortices", "psi_iters", "field_iters") else FMT % v)
            f.write(",".join(row) + "\n")
    os.replace(tmp, path)
    return str(path)
