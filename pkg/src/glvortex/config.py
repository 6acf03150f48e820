"""Run configuration: flat sectioned text files and the example presets.

Config format: ``key = value`` lines under ``[mesh]``, ``[params]``,
``[time]`` and ``[output]`` headers; blank lines and ``#`` comments ignored;
unknown keys are hard errors with their line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError, InvalidParameterError
from .mesh import MeshSpec, RefineSpec
from .tdgl import SimParams, SolverKind

__all__ = ["RunConfig", "parse_config", "preset", "PRESET_NAMES", "apply_solver"]


@dataclass(frozen=True)
class RunConfig:
    """Everything one run needs: mesh, parameters, initial data, outputs."""

    mesh: MeshSpec
    params: SimParams
    psi0: complex = 1.0
    snapshot_times: tuple = ()
    output_dir: str = "out"
    formats: tuple = ("csv",)
    name: str = "run"

    def __post_init__(self):
        for t in self.snapshot_times:
            k = round(t / self.params.tau)
            if t < 0 or t > self.params.t_end + 1e-9 or abs(k * self.params.tau - t) > 1e-9 * max(1.0, abs(t)):
                raise ConfigError(
                    f"snapshot time {t} is not a multiple of tau within [0, T]"
                )
        for f in self.formats:
            if f not in ("csv", "vtk"):
                raise ConfigError(f"unknown output format {f!r}")


_SECTIONS = {
    "mesh": {
        "domain", "m", "boundary_points", "notch_depth", "notch_halfangle",
        "path", "refine_center", "refine_radius", "refine_levels",
    },
    "params": {"eta", "kappa", "h", "solver", "degree", "track_w", "psi0", "a0"},
    "time": {"tau", "t", "snapshots"},
    "output": {"dir", "formats"},
}


def _parse_complex(text):
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse complex constant {text!r}") from None


def parse_config(path) -> RunConfig:
    """Parse and validate a run-configuration file."""
    entries = {}  # (section, key) -> (value, lineno)
    section = None
    with open(path) as f:
        for ln, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip().lower()
                if section not in _SECTIONS:
                    raise ConfigError(f"{path}: line {ln}: unknown section [{section}]")
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {ln}: expected 'key = value'")
            if section is None:
                raise ConfigError(f"{path}: line {ln}: key outside any [section]")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lower()
            if key not in _SECTIONS[section]:
                raise ConfigError(f"{path}: line {ln}: unknown key {key!r} in [{section}]")
            entries[(section, key)] = (value, ln)

    def get(section, key, cast, default=None, required=False):
        if (section, key) not in entries:
            if required:
                raise ConfigError(f"{path}: missing required key {key!r} in [{section}]")
            return default
        value, ln = entries[(section, key)]
        try:
            return cast(value)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: line {ln}: bad value for {key!r}: {exc}") from None

    as_bool = lambda s: {"true": True, "false": False, "1": True, "0": False}[s.lower()]
    as_floats = lambda s: tuple(float(x) for x in s.replace(",", " ").split())
    as_names = lambda s: tuple(x.strip() for x in s.split(",") if x.strip())

    domain = get("mesh", "domain", str, required=True)
    refine = None
    levels = get("mesh", "refine_levels", int, default=0)
    if levels:
        center = get("mesh", "refine_center", as_floats, required=True)
        radius = get("mesh", "refine_radius", float, required=True)
        refine = RefineSpec(center=center, radius=radius, levels=levels)
    try:
        mesh = MeshSpec(
            domain=domain,
            m=get("mesh", "m", int, default=16),
            boundary_points=get("mesh", "boundary_points", int, default=256),
            notch_depth=get("mesh", "notch_depth", float, default=0.25),
            notch_halfangle=get("mesh", "notch_halfangle", float, default=0.1 * math.pi),
            path=get("mesh", "path", str),
            refine=refine,
        )
        params = SimParams(
            eta=get("params", "eta", float, default=1.0),
            kappa=get("params", "kappa", float, required=True),
            h_ext=get("params", "h", float, required=True),
            tau=get("time", "tau", float, required=True),
            t_end=get("time", "t", float, required=True),
            solver=SolverKind.parse(get("params", "solver", str, default="hodge")),
            degree=get("params", "degree", int, default=1),
            track_w=get("params", "track_w", as_bool, default=None) or False,
        )
    except InvalidParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if get("params", "a0", str, default="zero") != "zero":
        raise ConfigError(f"{path}: only a0 = zero is supported")
    if (("params", "track_w") not in entries) and params.solver is SolverKind.HODGE:
        params = replace(params, track_w=True)
    return RunConfig(
        mesh=mesh,
        params=params,
        psi0=get("params", "psi0", _parse_complex, default=1.0 + 0.0j),
        snapshot_times=get("time", "snapshots", as_floats, default=(params.t_end,)),
        output_dir=get("output", "dir", str, default="out"),
        formats=get("output", "formats", as_names, default=("csv",)),
    )


# ---------------------------------------------------------------------------
# presets: the simulation studies shipped with the solver
# ---------------------------------------------------------------------------

# study 1: L-shape domain (reentrant corner), kappa=10, H=5
# study 2: notched disk at three applied fields (0.8 / 0.9 / 2.02)
# study 3: unit square (convex control case)
_PRESETS = {
    "example31": dict(
        mesh=dict(domain="lshape", m=16),
        eta=1.0, kappa=10.0, h=5.0, tau=0.1, t=40.0, degree=1,
        psi0=0.6 + 0.8j, snapshots=(5.0, 20.0, 40.0),
    ),
    "example32_h08": dict(
        mesh=dict(domain="disk_notch", boundary_points=256),
        eta=1.0, kappa=4.0, h=0.8, tau=0.1, t=5000.0, degree=1,
        psi0=1.0 + 0.0j, snapshots=(20.0, 100.0, 5000.0),
        full_t=15000.0, full_snapshots=(20.0, 100.0, 15000.0),
    ),
    "example32_h09": dict(
        mesh=dict(domain="disk_notch", boundary_points=256),
        eta=1.0, kappa=4.0, h=0.9, tau=0.1, t=5000.0, degree=1,
        psi0=1.0 + 0.0j, snapshots=(25.0, 30.0, 5000.0),
    ),
    "example32_h202": dict(
        mesh=dict(
            domain="disk_notch", boundary_points=256,
            refine=dict(center=(0.75, 0.0), radius=0.3, levels=2),
        ),
        eta=1.0, kappa=4.0, h=2.02, tau=0.1, t=100.0, degree=2,
        psi0=1.0 + 0.0j, snapshots=(25.0, 50.0, 100.0),
    ),
    "example33": dict(
        mesh=dict(domain="unit_square", m=32),
        eta=1.0, kappa=10.0, h=5.0, tau=0.1, t=40.0, degree=1,
        psi0=0.6 + 0.8j, snapshots=(5.0, 20.0, 40.0),
    ),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str, solver="hodge", full: bool = False) -> RunConfig:
    """Expand a named preset into a RunConfig.

    ``full`` switches the long-horizon presets to their complete time range.
    """
    if name not in _PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    spec = _PRESETS[name]
    mesh_kw = dict(spec["mesh"])
    if "refine" in mesh_kw:
        mesh_kw["refine"] = RefineSpec(**mesh_kw["refine"])
    t_end = spec["t"]
    snaps = spec["snapshots"]
    if full and "full_t" in spec:
        t_end = spec["full_t"]
        snaps = spec["full_snapshots"]
    solver = SolverKind.parse(str(solver))
    params = SimParams(
        eta=spec["eta"], kappa=spec["kappa"], h_ext=spec["h"],
        tau=spec["tau"], t_end=t_end, solver=solver, degree=spec["degree"],
        track_w=(solver is SolverKind.HODGE),
    )
    return RunConfig(
        mesh=MeshSpec(**mesh_kw),
        params=params,
        psi0=spec["psi0"],
        snapshot_times=snaps,
        name=name,
    )


def apply_solver(config: RunConfig, solver) -> RunConfig:
    """Copy of a config running under a different solver."""
    kind = SolverKind.parse(str(solver))
    params = replace(config.params, solver=kind, track_w=(kind is SolverKind.HODGE))
    return replace(config, params=params)
