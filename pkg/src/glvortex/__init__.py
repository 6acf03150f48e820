"""Finite-element simulation of 2D superconducting vortex dynamics.

Solves the time-dependent Ginzburg-Landau equations on curved polygons
(possibly with reentrant corners) under three formulations: the temporal
gauge, the Lorentz gauge, and a reformulation that carries the magnetic
potential as its divergence-free and curl-free scalar potentials, advanced
through well-posed heat and Poisson problems.
"""

from .config import PRESET_NAMES, RunConfig, parse_config, preset
from .fem import FeSpace, build_space
from .hodge import PotentialPair, decompose_current, decompose_vector, reconstruct
from .mesh import (
    MeshSpec,
    TriMesh,
    gen_disk_notch,
    gen_lshape,
    gen_unit_square,
    generate_mesh,
    read_mesh,
    refine_local,
    write_mesh,
)
from .post import FieldSnapshot, compare_fields, density, free_energy, vortex_regions
from .tdgl import SimParams, SimState, SolverKind, init_state, make_stepper, run

__version__ = "0.1.0"

__all__ = [
    "MeshSpec", "TriMesh", "gen_unit_square", "gen_lshape", "gen_disk_notch",
    "generate_mesh", "refine_local", "read_mesh", "write_mesh",
    "FeSpace", "build_space",
    "PotentialPair", "decompose_vector", "decompose_current", "reconstruct",
    "SimParams", "SimState", "SolverKind", "init_state", "make_stepper", "run",
    "FieldSnapshot", "density", "free_energy", "vortex_regions", "compare_fields",
    "RunConfig", "parse_config", "preset", "PRESET_NAMES",
    "__version__",
]
