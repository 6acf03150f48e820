"""Script entry points: plot-contours and plot-mesh."""

from __future__ import annotations

import argparse
import sys

from .doc import SnapshotParseError
from .render import DEFAULT_LEVELS, MissingFieldError, render_contours, render_mesh


def main_contours(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="plot-contours",
        description="Render filled contours of a nodal field from a snapshot "
        "(.vtk standalone, or .csv plus --mesh).",
    )
    ap.add_argument("snapshot")
    ap.add_argument("--field", default="density")
    ap.add_argument("--out", required=True)
    ap.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    ap.add_argument("--mesh", help="glmesh file (required for CSV snapshots)")
    args = ap.parse_args(argv)
    try:
        render_contours(args.snapshot, args.field, args.out,
                        levels=args.levels, mesh=args.mesh)
    except (MissingFieldError, SnapshotParseError, OSError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


def main_mesh(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="plot-mesh",
        description="Render the wireframe of a glmesh file or snapshot.",
    )
    ap.add_argument("source")
    ap.add_argument("--out", required=True)
    ap.add_argument("--mesh", help="glmesh file (for CSV snapshots)")
    args = ap.parse_args(argv)
    try:
        render_mesh(args.source, args.out, mesh=args.mesh)
    except (SnapshotParseError, OSError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main_contours())
