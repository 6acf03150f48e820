"""Filled-contour and wireframe figure rendering over triangulations."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.tri import Triangulation

from .doc import SnapshotDoc, load_snapshot, read_glmesh

__all__ = ["render_contours", "render_mesh", "DENSITY_SCALE"]

# density lives on a fixed scale so frames of one run are comparable
DENSITY_SCALE = (0.0, 1.0)
DEFAULT_LEVELS = 21


class MissingFieldError(KeyError):
    pass


def _png_kwargs():
    # strip the creation date so identical inputs give identical bytes
    return {"metadata": {"Date": None}}


def render_contours(snapshot, field_name, out_path, levels=DEFAULT_LEVELS, mesh=None):
    """Write a filled-contour raster of one nodal field.

    ``snapshot`` is a SnapshotDoc or a path (.vtk standalone, .csv plus
    ``mesh``). Density uses the fixed [0, 1] color scale; other fields are
    scaled to their data range.
    """
    doc = snapshot if isinstance(snapshot, SnapshotDoc) else load_snapshot(snapshot, mesh)
    if field_name not in doc.fields:
        raise MissingFieldError(
            f"no field {field_name!r}; available: {', '.join(doc.field_names)}"
        )
    values = doc.fields[field_name]
    tri = Triangulation(doc.nodes[:, 0], doc.nodes[:, 1], doc.triangles)
    if field_name == "density":
        lo, hi = DENSITY_SCALE
    else:
        lo, hi = float(values.min()), float(values.max())
        if hi - lo < 1e-30:
            lo, hi = lo - 0.5, hi + 0.5
    level_values = np.linspace(lo, hi, int(levels))
    fig, ax = plt.subplots(figsize=(4.8, 4.2))
    cs = ax.tricontourf(tri, np.clip(values, lo, hi), levels=level_values, cmap="viridis")
    fig.colorbar(cs, ax=ax, shrink=0.85)
    ax.set_aspect("equal")
    ax.set_title(field_name)
    fig.tight_layout()
    fig.savefig(out_path, dpi=110, **_png_kwargs())
    plt.close(fig)
    return out_path


def render_mesh(source, out_path, mesh=None):
    """Write a wireframe rendering of a triangulation.

    ``source`` is a glmesh path, a snapshot path, or a SnapshotDoc.
    """
    if isinstance(source, SnapshotDoc):
        nodes, tris = source.nodes, source.triangles
    else:
        text = str(source)
        if text.endswith(".glmesh"):
            nodes, tris = read_glmesh(text)
        else:
            doc = load_snapshot(text, mesh)
            nodes, tris = doc.nodes, doc.triangles
    tri = Triangulation(nodes[:, 0], nodes[:, 1], tris)
    fig, ax = plt.subplots(figsize=(4.8, 4.2))
    ax.triplot(tri, color="black", linewidth=0.4)
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(out_path, dpi=110, **_png_kwargs())
    plt.close(fig)
    return out_path
