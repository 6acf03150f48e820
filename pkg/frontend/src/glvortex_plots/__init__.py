"""Figure rendering for glvortex snapshot and mesh files."""

from .doc import SnapshotDoc, load_snapshot, read_glmesh
from .render import render_contours, render_mesh

__version__ = "0.1.0"

__all__ = ["SnapshotDoc", "load_snapshot", "read_glmesh", "render_contours", "render_mesh"]
