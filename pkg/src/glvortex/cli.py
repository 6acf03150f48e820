"""Command-line interface: run, compare, mesh, selftest.

All failures exit nonzero with a single ``error: ...`` line on stderr.
``GLVORTEX_THREADS`` caps the internal BLAS/solver parallelism.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import config as cfg
from . import fem, hodge, mesh as meshmod, output, post, tdgl
from .errors import GlvortexError

__all__ = ["main"]


def _limit_threads():
    n = os.environ.get("GLVORTEX_THREADS")
    if not n:
        return
    try:
        limit = max(1, int(n))
    except ValueError:
        raise GlvortexError(f"GLVORTEX_THREADS={n!r} is not an integer") from None
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limit)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(limit)


def _load_config(args) -> cfg.RunConfig:
    if args.preset and args.config:
        raise GlvortexError("give either a config file or --preset, not both")
    if args.preset:
        run = cfg.preset(args.preset, full=getattr(args, "full", False))
    elif args.config:
        run = cfg.parse_config(args.config)
    else:
        raise GlvortexError("a config file or --preset NAME is required")
    if getattr(args, "solver", None):
        run = cfg.apply_solver(run, args.solver)
    if getattr(args, "out", None):
        run = cfg.RunConfig(
            mesh=run.mesh, params=run.params, psi0=run.psi0,
            snapshot_times=run.snapshot_times, output_dir=args.out,
            formats=run.formats, name=run.name,
        )
    return run


def execute_run(run: cfg.RunConfig, quiet=False):
    """Generate the mesh, advance the solver, write snapshots + diagnostics."""
    t0 = time.time()
    mesh = meshmod.generate_mesh(run.mesh)
    space = fem.build_space(mesh, run.params.degree)
    out_dir = run.output_dir
    os.makedirs(out_dir, exist_ok=True)
    sentinel = os.path.join(out_dir, ".partial")
    with open(sentinel, "w") as f:
        f.write("run in progress\n")
    try:
        result = tdgl.run(
            space, run.params, run.psi0, snapshot_times=run.snapshot_times
        )
        paths = []
        for snap in result.snapshots:
            paths += output.write_snapshot(snap, out_dir, run.formats)
        diag_path = output.write_diagnostics(
            result.diagnostics,
            os.path.join(out_dir, f"diagnostics_{run.params.solver.value}.csv"),
        )
    finally:
        if os.path.exists(sentinel):
            os.remove(sentinel)
    if not quiet:
        print(f"{run.name}: solver={run.params.solver.value} "
              f"steps={run.params.n_steps} dofs={space.n_dofs} "
              f"wall={time.time() - t0:.1f}s")
        for p in paths + [diag_path]:
            print(f"  wrote {p}")
    return result, space


def _cmd_run(args) -> int:
    run = _load_config(args)
    execute_run(run)
    return 0


def _cmd_compare(args) -> int:
    base = _load_config(args)
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if not solvers:
        raise GlvortexError("--solvers needs at least one solver")
    out_dir = args.out or base.output_dir
    os.makedirs(out_dir, exist_ok=True)
    sweep = []
    if args.mesh_sweep:
        if base.mesh.domain not in ("unit_square", "lshape"):
            raise GlvortexError("--mesh-sweep needs a unit_square or lshape domain")
        sweep = [int(s) for s in args.mesh_sweep.split(",")]
        if sorted(sweep) != sweep or len(sweep) < 2:
            raise GlvortexError("--mesh-sweep wants an increasing list like 16,32,64")
    lines = []
    report = {}

    def run_one(run_cfg, tag):
        run_cfg = cfg.RunConfig(
            mesh=run_cfg.mesh, params=run_cfg.params, psi0=run_cfg.psi0,
            snapshot_times=run_cfg.snapshot_times,
            output_dir=os.path.join(out_dir, tag), formats=base.formats,
            name=f"{base.name}_{tag}",
        )
        t0 = time.time()
        result, space = execute_run(run_cfg, quiet=True)
        return result, space, time.time() - t0

    meshes = sweep or [base.mesh.m]
    for m in meshes:
        mesh_cfg = cfg.RunConfig(
            mesh=cfg.MeshSpec(**{**base.mesh.__dict__, "m": m}) if sweep else base.mesh,
            params=base.params, psi0=base.psi0,
            snapshot_times=base.snapshot_times, output_dir=base.output_dir,
            formats=base.formats, name=base.name,
        )
        for solver in solvers:
            run_cfg = cfg.apply_solver(mesh_cfg, solver)
            tag = f"{solver}_m{m}" if sweep else solver
            result, space, wall = run_one(run_cfg, tag)
            report[(solver, m)] = (result, space)
            nv = result.diagnostics.vortices[-1]
            lines.append(f"run {tag}: wall={wall:.1f}s vortices_at_end={nv}")

    # pairwise density differences at each snapshot time (same mesh)
    for m in meshes:
        for i, s1 in enumerate(solvers):
            for s2 in solvers[i + 1:]:
                r1, sp1 = report[(s1, m)]
                r2, sp2 = report[(s2, m)]
                for snap1, snap2 in zip(r1.snapshots, r2.snapshots):
                    d = post.compare_fields(sp1, snap1.density, sp2, snap2.density)
                    lines.append(
                        f"diff m={m} t={snap1.time:g} {s1} vs {s2}: rel_l2={d:.6f}"
                    )
    # refinement-stability distance per solver across the sweep
    if sweep:
        for solver in solvers:
            for m_lo, m_hi in zip(sweep[:-1], sweep[1:]):
                r1, sp1 = report[(solver, m_lo)]
                r2, sp2 = report[(solver, m_hi)]
                d = post.compare_fields(
                    sp1, r1.snapshots[-1].density, sp2, r2.snapshots[-1].density
                )
                lines.append(
                    f"stability {solver} m={m_lo}->{m_hi} "
                    f"t={r1.snapshots[-1].time:g}: rel_l2={d:.6f}"
                )
    path = os.path.join(out_dir, "report.txt")
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"wrote {path}")
    return 0


def _cmd_mesh(args) -> int:
    if args.check:
        m = meshmod.read_mesh(args.check)
        deg = math.degrees(m.min_angle())
        print(
            f"{args.check}: {m.n_nodes} nodes, {m.n_triangles} triangles, "
            f"{len(m.boundary_edges)} boundary edges, min angle {deg:.2f} deg: OK"
        )
        return 0
    if not args.domain:
        raise GlvortexError("--domain is required unless --check is given")
    refine = None
    if args.refine_levels:
        if args.refine_center is None or args.refine_radius is None:
            raise GlvortexError("--refine-levels needs --refine-center and --refine-radius")
        cx, cy = (float(v) for v in args.refine_center.split(","))
        refine = meshmod.RefineSpec((cx, cy), args.refine_radius, args.refine_levels)
    spec = meshmod.MeshSpec(
        domain=args.domain, m=args.m, boundary_points=args.boundary_points,
        notch_depth=args.notch_depth, notch_halfangle=args.notch_halfangle,
        path=args.file, refine=refine,
    )
    m = meshmod.generate_mesh(spec)
    if not args.out:
        raise GlvortexError("--out FILE is required when generating")
    meshmod.write_mesh(m, args.out)
    print(f"wrote {args.out}: {m.n_nodes} nodes, {m.n_triangles} triangles")
    return 0


def _cmd_selftest(args) -> int:
    failures = 0

    def check(name, value, lo, hi):
        nonlocal failures
        ok = lo <= value <= hi
        print(f"{'PASS' if ok else 'FAIL'} {name}: {value:.3f} (expected [{lo}, {hi}])")
        failures += 0 if ok else 1

    degrees = (1,) if args.quick else (1, 2)
    ms = (8, 16, 32) if args.quick else (16, 32, 64)
    for r in degrees:
        errs = []
        for m in ms:
            mesh = meshmod.gen_unit_square(m)
            space = fem.build_space(mesh, r)
            x, y = space.qpoints[..., 0], space.qpoints[..., 1]
            pi = math.pi
            # curl(sin pi x sin pi y) + grad(cos pi x cos pi y)
            cu = np.stack([pi * np.sin(pi * x) * np.cos(pi * y),
                           -pi * np.cos(pi * x) * np.sin(pi * y)], axis=-1)
            gv = np.stack([-pi * np.sin(pi * x) * np.cos(pi * y),
                           -pi * np.cos(pi * x) * np.sin(pi * y)], axis=-1)
            field = cu + gv
            rec = hodge.reconstruct(space, hodge.decompose_vector(space, field))
            errs.append(math.sqrt(space.integrate(((rec - field) ** 2).sum(axis=-1))))
        rate = math.log2(errs[0] / errs[-1]) / (len(ms) - 1)
        check(f"decomposition round-trip rate (degree {r})", rate, r - 0.25, r + 0.35)

    errs = []
    for m in ms:
        mesh = meshmod.gen_unit_square(m)
        space = fem.build_space(mesh, 1)
        stiff = fem.stiffness_matrix(space)
        x, y = space.qpoints[..., 0], space.qpoints[..., 1]
        pi = math.pi
        rhs = fem.load_vector(space, 2 * pi**2 * np.sin(pi * x) * np.sin(pi * y))
        a2, b2 = fem.constrain_dirichlet(space, stiff, rhs, space.boundary_dofs, 0.0)
        u = fem.solve_spd(a2, b2)
        diff = space.values_at_quad(u) - np.sin(pi * x) * np.sin(pi * y)
        errs.append(math.sqrt(space.integrate(diff**2)))
    rate = math.log2(errs[0] / errs[-1]) / (len(ms) - 1)
    check("manufactured Poisson rate (degree 1)", rate, 1.8, 2.2)
    if failures:
        raise GlvortexError(f"selftest: {failures} check(s) failed")
    print("selftest passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="glvortex",
        description="Finite-element simulator for 2D superconducting vortex "
        "dynamics (time-dependent Ginzburg-Landau equations).",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_config_args(p, with_solver=True):
        p.add_argument("config", nargs="?", help="run configuration file")
        p.add_argument("--preset", choices=cfg.PRESET_NAMES,
                       help="named study configuration")
        p.add_argument("--full", action="store_true",
                       help="extend long-horizon presets to their complete range")
        p.add_argument("--out", help="output directory (default from config)")
        if with_solver:
            p.add_argument("--solver", choices=("temporal", "lorentz", "hodge"),
                           help="override the solver (default: hodge)")

    p_run = sub.add_parser("run", help="execute one configuration")
    add_config_args(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="run several solvers on one configuration")
    add_config_args(p_cmp, with_solver=False)
    p_cmp.add_argument("--solvers", default="temporal,lorentz,hodge",
                       help="comma list of solvers (default: all three)")
    p_cmp.add_argument("--mesh-sweep", help="comma list of increasing mesh sizes")
    p_cmp.set_defaults(func=_cmd_compare)

    p_mesh = sub.add_parser("mesh", help="generate, refine or validate meshes")
    p_mesh.add_argument("--domain", choices=("unit_square", "lshape", "disk_notch", "file"))
    p_mesh.add_argument("--m", type=int, default=16)
    p_mesh.add_argument("--boundary-points", type=int, default=256)
    p_mesh.add_argument("--notch-depth", type=float, default=0.25)
    p_mesh.add_argument("--notch-halfangle", type=float, default=0.1 * math.pi)
    p_mesh.add_argument("--file", help="input mesh for --domain file")
    p_mesh.add_argument("--refine-center", help="cx,cy")
    p_mesh.add_argument("--refine-radius", type=float)
    p_mesh.add_argument("--refine-levels", type=int, default=0)
    p_mesh.add_argument("--out", help="output .glmesh path")
    p_mesh.add_argument("--check", help="validate an existing mesh file")
    p_mesh.set_defaults(func=_cmd_mesh)

    p_self = sub.add_parser("selftest", help="decomposition and solver sanity suite")
    p_self.add_argument("--quick", action="store_true", help="coarser, faster variant")
    p_self.set_defaults(func=_cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _limit_threads()
        return args.func(args)
    except GlvortexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
