import os
import subprocess
import sys

import pytest

TINY_CONFIG = """\
[mesh]
domain = unit_square
m = 4

[params]
kappa = 4
H = 1.0
psi0 = 0.6+0.8i

[time]
tau = 0.1
t = 0.2
snapshots = 0.2

[output]
dir = {out}
formats = csv,vtk
"""


def run_cli(*args):
    """Invoke the simulator CLI in a subprocess (file-format interface only)."""
    proc = subprocess.run(
        [sys.executable, "-m", "glvortex.cli", *args],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"glvortex {' '.join(args)} failed: {proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def tiny_run(tmp_path_factory):
    """One small simulator run: returns (out_dir, glmesh path)."""
    root = tmp_path_factory.mktemp("tiny")
    out = root / "out"
    cfg = root / "run.cfg"
    cfg.write_text(TINY_CONFIG.format(out=out))
    run_cli("run", str(cfg))
    mesh = root / "square4.glmesh"
    run_cli("mesh", "--domain", "unit_square", "--m", "4", "--out", str(mesh))
    return out, mesh
