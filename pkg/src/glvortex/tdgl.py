"""Time steppers for the three TDGL formulations.

All three advance (psi, magnetic potential) by one linearized backward-Euler
step: the order parameter is solved first with the potential and |psi|^2
frozen at the previous level, then the potential is updated with the fresh
supercurrent. They differ only in how the potential is represented and
advanced:

* ``temporal``  - nodal vector potential, curl-curl diffusion (degenerate
  parabolic), no phase-rotation term in the psi equation;
* ``lorentz``   - nodal vector potential, curl-curl + div-div diffusion,
  psi equation carries the i*eta*kappa gauge coupling;
* ``hodge``     - the potential is carried as two scalar fields (stream
  function u, potential v) advanced by heat equations driven by the
  decomposed supercurrent; the vector field is reconstructed as
  curl(u) + grad(v) wherever the schemes need it.

The Hodge route can optionally track the induction offset w = curl(A) - H,
from which B = w + H and E = -curl(w) - F are reconstructed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from . import fem, post
from .errors import InvalidParameterError, SolverError
from .fem import FeSpace
from .hodge import DecompositionSolver, PotentialPair, decompose_current, decompose_vector, reconstruct

__all__ = [
    "SolverKind",
    "SimParams",
    "SimState",
    "RunResult",
    "compute_supercurrent",
    "init_state",
    "make_stepper",
    "HodgeStepper",
    "TemporalGaugeStepper",
    "LorentzGaugeStepper",
    "run",
]


class SolverKind(str, enum.Enum):
    TEMPORAL = "temporal"
    LORENTZ = "lorentz"
    HODGE = "hodge"

    @classmethod
    def parse(cls, name: str) -> "SolverKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise InvalidParameterError(
                f"unknown solver {name!r}; expected temporal, lorentz or hodge"
            ) from None


@dataclass(frozen=True)
class SimParams:
    """Physical and numerical parameters of a run."""

    eta: float
    kappa: float
    h_ext: float
    tau: float
    t_end: float
    solver: SolverKind = SolverKind.HODGE
    degree: int = 1
    track_w: bool = False

    def __post_init__(self):
        if self.eta <= 0:
            raise InvalidParameterError("eta must be > 0")
        if self.kappa <= 0:
            raise InvalidParameterError("kappa must be > 0")
        if self.tau <= 0:
            raise InvalidParameterError("tau must be > 0")
        if self.t_end < self.tau:
            raise InvalidParameterError("t_end must be >= tau")
        if self.degree not in (1, 2):
            raise InvalidParameterError("degree must be 1 or 2")
        object.__setattr__(self, "solver", SolverKind(self.solver))

    @property
    def n_steps(self):
        return int(round(self.t_end / self.tau))


@dataclass(frozen=True)
class SimState:
    """One time level of a simulation.

    Hodge states carry the potential pair (and optionally w); gauge states
    carry the stacked nodal vector potential ``avec`` = [Ax; Ay]. ``a_quad``
    caches the magnetic potential at quadrature points and, for Hodge states,
    always equals reconstruct(pair).
    """

    t: float
    psi: np.ndarray
    a_quad: np.ndarray
    pair: PotentialPair | None = None
    w: np.ndarray | None = None
    avec: np.ndarray | None = None


def compute_supercurrent(space: FeSpace, psi_new, psi_old, a_quad, kappa) -> np.ndarray:
    """Supercurrent Re[conj(psi_old) ((i/kappa) grad psi_new + A psi_new)]
    at quadrature points."""
    po = space.values_at_quad(psi_old)
    pn = space.values_at_quad(psi_new)
    gn = space.grads_at_quad(psi_new)
    term = (1j / kappa) * gn + a_quad * pn[..., None]
    return (np.conj(po)[..., None] * term).real


def _sample_vector(space, a0):
    """Vector initial data at quadrature points; a0 is None or f(x, y) -> (ax, ay)."""
    x, y = space.qpoints[..., 0], space.qpoints[..., 1]
    if a0 is None:
        return np.zeros(space.qpoints.shape)
    ax, ay = a0(x, y)
    return np.stack([np.broadcast_to(ax, x.shape), np.broadcast_to(ay, x.shape)], axis=-1)


def init_state(space: FeSpace, params: SimParams, psi0, a0=None, curl_a0=None) -> SimState:
    """Initial state: psi interpolated, potential representation per solver.

    ``psi0`` is a complex constant or callable; ``a0`` None (zero field) or a
    callable returning the two components. For Hodge runs with track_w,
    ``curl_a0`` supplies the pointwise curl of a0 (defaults to zero); w0 is
    its interpolant minus H in the interior and 0 on the boundary.
    """
    psi = np.asarray(space.interpolate(psi0), dtype=complex)
    if params.solver is SolverKind.HODGE:
        a_samples = _sample_vector(space, a0)
        pair = decompose_vector(space, a_samples)
        w = None
        if params.track_w:
            curl = space.interpolate(curl_a0) if curl_a0 is not None else np.zeros(space.n_dofs)
            w = curl - params.h_ext
            w[space.boundary_dofs] = 0.0
        return SimState(t=0.0, psi=psi, a_quad=reconstruct(space, pair), pair=pair, w=w)
    n = space.n_dofs
    if a0 is None:
        avec = np.zeros(2 * n)
    else:
        x, y = space.dof_coords[:, 0], space.dof_coords[:, 1]
        ax, ay = a0(x, y)
        avec = np.concatenate([np.broadcast_to(ax, (n,)), np.broadcast_to(ay, (n,))])
    rot, constrained = _normal_rotation(space)
    y = rot.T @ avec
    y[constrained] = 0.0
    avec = rot @ y
    return SimState(t=0.0, psi=psi, a_quad=_vector_at_quad(space, avec), avec=avec)


def _vector_at_quad(space, avec):
    n = space.n_dofs
    return np.stack(
        [space.values_at_quad(avec[:n]), space.values_at_quad(avec[n:])], axis=-1
    )


def _normal_rotation(space):
    """Rotation to tangential/normal DOFs on the boundary, plus the
    constrained index set for A.n = 0 (both components at corners)."""
    n = space.n_dofs
    rows, cols, vals = [], [], []
    constrained = []
    corner = set(int(c) for c in space.corner_dofs)
    bset = set(int(d) for d in space.boundary_dofs)
    for i in range(n):
        if i in bset and i not in corner:
            nx, ny = space.boundary_dof_normals[i]
            tx, ty = -ny, nx
            rows += [i, n + i, i, n + i]
            cols += [i, i, n + i, n + i]
            vals += [tx, ty, nx, ny]
            constrained.append(n + i)
        else:
            rows += [i, n + i]
            cols += [i, n + i]
            vals += [1.0, 1.0]
            if i in corner:
                constrained += [i, n + i]
    rot = sp.coo_matrix((vals, (rows, cols)), shape=(2 * n, 2 * n)).tocsr()
    return rot, np.asarray(constrained, dtype=np.int64)


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------


class _StepperBase:
    """Shared psi-equation machinery (linearized backward Euler)."""

    gauge_coupling = True  # overridden by the temporal gauge

    def __init__(self, space: FeSpace, params: SimParams):
        if params.degree != space.degree:
            raise InvalidParameterError(
                f"params.degree={params.degree} does not match the space degree {space.degree}"
            )
        self.space = space
        self.params = params
        self.pattern = fem.assembly_pattern(space)
        self.mass = fem.mass_matrix(space)
        self.stiffness = fem.stiffness_matrix(space)
        self.weights = space.dof_measures()
        eta, kappa, tau = params.eta, params.kappa, params.tau
        self._psi_const_data = (
            (eta / tau) * self.mass.data + (1.0 / kappa**2) * self.stiffness.data
        )
        self._mass_eta_tau = (eta / tau) * self.mass

    def step_psi(self, psi, a_quad, stats=None):
        """One linearized implicit step of the order parameter.

        Solves, for all test functions phi:
        eta (psi1 - psi0, phi)/tau + ((i/k) grad psi1 + A psi1,
        (i/k) grad phi + A phi) + ((|psi0|^2 - 1) psi1, phi)
        [+ i eta kappa (A, grad(psi1 conj(phi)))] = 0
        with A and |psi0|^2 frozen at the previous level.

        All component matrices share the cell-connectivity sparsity, so the
        system is built at the CSR-data level without sparse additions.
        """
        space, p = self.space, self.params
        psi_q = space.values_at_quad(psi)
        weight = (np.abs(psi_q) ** 2 - 1.0) + (a_quad**2).sum(axis=-1)
        wm = self.pattern.scatter_data(fem._mass_local(space, weight))
        conv = self.pattern.scatter_data(fem._convection_local(space, a_quad))
        conv_t = conv[self.pattern.transpose_perm]
        data = (self._psi_const_data + wm) + (1j / p.kappa) * (conv - conv_t)
        if self.gauge_coupling:
            data = data + (1j * p.eta * p.kappa) * (conv + conv_t)
        system = self.pattern.matrix(data)
        rhs = self._mass_eta_tau @ psi
        return fem.solve_complex(system, rhs, x0=psi, stats=stats)

    def step(self, state: SimState, psi_stats=None, field_stats=None) -> SimState:
        raise NotImplementedError


class HodgeStepper(_StepperBase):
    """Advance the reformulated system: psi, then the supercurrent split
    (p, q), then heat steps for the potentials u, v (and optionally w)."""

    def __init__(self, space, params):
        super().__init__(space, params)
        tau = params.tau
        self.decomp = DecompositionSolver(space)
        heat = (1.0 / tau) * self.mass + self.stiffness
        self.heat = heat.tocsr()
        zeros = np.zeros(space.n_dofs)
        self.heat_dirichlet, _ = fem.constrain_dirichlet(
            space, self.heat, zeros, space.boundary_dofs, 0.0
        )
        self._heat_solver = fem.FactorizedSolver(self.heat)
        self._heat_dirichlet_solver = fem.FactorizedSolver(self.heat_dirichlet)
        self.bdofs = space.boundary_dofs

    def _heat_dirichlet_solve(self, rhs, stats):
        b = rhs.copy()
        b[self.bdofs] = 0.0
        return self._heat_dirichlet_solver.solve(b, stats=stats)

    def step(self, state, psi_stats=None, field_stats=None):
        space, p = self.space, self.params
        tau = p.tau
        recon = reconstruct(space, state.pair)
        if not np.array_equal(recon, state.a_quad):
            raise AssertionError("stale potential cache: a_quad != reconstruct(pair)")
        try:
            psi1 = self.step_psi(state.psi, state.a_quad, stats=psi_stats)
        except SolverError as exc:
            raise SolverError(f"psi equation: {exc}") from exc
        current = compute_supercurrent(space, psi1, state.psi, state.a_quad, p.kappa)
        try:
            p_pot, q_pot = decompose_current(
                space, current, solver=self.decomp, stats=field_stats
            )
        except SolverError as exc:
            raise SolverError(f"supercurrent decomposition: {exc}") from exc
        try:
            rhs_u = (1.0 / tau) * (self.mass @ state.pair.u) + p.h_ext * self.weights \
                - self.mass @ p_pot
            u1 = self._heat_dirichlet_solve(rhs_u, field_stats)
        except SolverError as exc:
            raise SolverError(f"stream-function update: {exc}") from exc
        try:
            rhs_v = (1.0 / tau) * (self.mass @ state.pair.v) - self.mass @ q_pot
            v1 = self._heat_solver.solve(rhs_v, stats=field_stats)
            v1 = self.decomp.shift_meanzero(v1)
        except SolverError as exc:
            raise SolverError(f"potential update: {exc}") from exc
        w1 = None
        if state.w is not None:
            try:
                rhs_w = (1.0 / tau) * (self.mass @ state.w) \
                    - fem.curl_pairing_vector(space, current)
                w1 = self._heat_dirichlet_solve(rhs_w, field_stats)
            except SolverError as exc:
                raise SolverError(f"induction-offset update: {exc}") from exc
        pair1 = PotentialPair(u=u1, v=v1)
        a1 = reconstruct(space, pair1)
        new = SimState(t=state.t + tau, psi=psi1, a_quad=a1, pair=pair1, w=w1)
        if not np.array_equal(new.a_quad, reconstruct(space, new.pair)):
            raise AssertionError("stale potential cache after step")
        return new


class _VectorPotentialStepper(_StepperBase):
    """Shared machinery of the temporal- and Lorentz-gauge steppers: one
    linear solve for the constrained nodal vector potential per step."""

    include_divdiv = False

    def __init__(self, space, params):
        super().__init__(space, params)
        tau = params.tau
        p00 = fem.partial_stiffness_matrix(space, 0, 0)
        p01 = fem.partial_stiffness_matrix(space, 0, 1)
        p10 = p01.T.tocsr()
        p11 = fem.partial_stiffness_matrix(space, 1, 1)
        curlcurl = sp.bmat([[p11, -p10], [-p01, p00]], format="csr")
        system = (1.0 / tau) * sp.block_diag([self.mass, self.mass], format="csr") + curlcurl
        if self.include_divdiv:
            system = system + sp.bmat([[p00, p01], [p10, p11]], format="csr")
        self.rot, self.constrained = _normal_rotation(space)
        rotated = (self.rot.T @ system @ self.rot).tocsr()
        zeros = np.zeros(2 * space.n_dofs)
        self.system, _ = fem.eliminate_dofs(rotated, zeros, self.constrained, 0.0)
        self._system_solver = fem.FactorizedSolver(self.system)
        # (H, curl a) right side: constant over the run
        ex = np.zeros(space.qpoints.shape); ex[..., 0] = 1.0
        ey = np.zeros(space.qpoints.shape); ey[..., 1] = 1.0
        gx = fem.grad_pairing_vector(space, ex)
        gy = fem.grad_pairing_vector(space, ey)
        self.curl_rhs = params.h_ext * np.concatenate([-gy, gx])

    def step(self, state, psi_stats=None, field_stats=None):
        space, p = self.space, self.params
        n = space.n_dofs
        try:
            psi1 = self.step_psi(state.psi, state.a_quad, stats=psi_stats)
        except SolverError as exc:
            raise SolverError(f"psi equation: {exc}") from exc
        current = compute_supercurrent(space, psi1, state.psi, state.a_quad, p.kappa)
        rhs = (1.0 / p.tau) * np.concatenate(
            [self.mass @ state.avec[:n], self.mass @ state.avec[n:]]
        )
        rhs = rhs - np.concatenate(
            [fem.load_vector(space, current[..., 0]), fem.load_vector(space, current[..., 1])]
        )
        rhs = rhs + self.curl_rhs
        b = self.rot.T @ rhs
        b[self.constrained] = 0.0
        try:
            y = self._system_solver.solve(b, stats=field_stats)
        except SolverError as exc:
            raise SolverError(f"vector-potential update: {exc}") from exc
        avec1 = self.rot @ y
        return SimState(
            t=state.t + p.tau, psi=psi1, a_quad=_vector_at_quad(space, avec1), avec=avec1
        )


class TemporalGaugeStepper(_VectorPotentialStepper):
    """phi = 0 gauge: degenerate curl-curl diffusion for A, no phase-rotation
    term in the psi equation (its boundary condition is natural in the
    kinetic form)."""

    gauge_coupling = False
    include_divdiv = False


class LorentzGaugeStepper(_VectorPotentialStepper):
    """phi = -div A gauge: curl-curl + div-div (non-degenerate) diffusion and
    the i*eta*kappa coupling in the psi equation."""

    gauge_coupling = True
    include_divdiv = True


_STEPPERS = {
    SolverKind.TEMPORAL: TemporalGaugeStepper,
    SolverKind.LORENTZ: LorentzGaugeStepper,
    SolverKind.HODGE: HodgeStepper,
}


def make_stepper(space: FeSpace, params: SimParams):
    return _STEPPERS[params.solver](space, params)


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    final_state: SimState
    snapshots: list
    diagnostics: post.Diagnostics


def _snapshot_steps(params, snapshot_times):
    steps = {}
    for t in snapshot_times:
        k = round(t / params.tau)
        if abs(k * params.tau - t) > 1e-9 * max(1.0, abs(t)) or not 0 <= k <= params.n_steps:
            raise InvalidParameterError(
                f"snapshot time {t} is not a multiple of tau within [0, T]"
            )
        steps[int(k)] = float(t)
    return steps


def _curl_at_quad(space, state, params):
    if state.avec is not None:
        n = space.n_dofs
        gax = space.grads_at_quad(state.avec[:n])
        gay = space.grads_at_quad(state.avec[n:])
        return gay[..., 0] - gax[..., 1]
    if state.w is not None:
        return space.values_at_quad(state.w) + params.h_ext
    return None


def _make_snapshot(space, state, prev_state, params, mass, solver_tag, stats=None):
    n_nodes = space.mesh.n_nodes
    psi = state.psi
    re, im = psi.real[:n_nodes], psi.imag[:n_nodes]
    b_nodal = post.magnetic_induction(space, state, params, mass=mass)[:n_nodes]
    if state.avec is not None:
        n = space.n_dofs
        a_nodal = np.column_stack([state.avec[:n][:n_nodes], state.avec[n:][:n_nodes]])
        e_nodal = None
        if prev_state is not None:
            # finite-difference estimate of dA/dt (the grad(div A) part of the
            # gauge solvers' electric field is omitted)
            de = (state.avec - prev_state.avec) / params.tau
            e_nodal = np.column_stack([de[:n][:n_nodes], de[n:][:n_nodes]])
    else:
        ax = post.project_to_nodal(space, state.a_quad[..., 0], mass=mass, stats=stats)
        ay = post.project_to_nodal(space, state.a_quad[..., 1], mass=mass, stats=stats)
        a_nodal = np.column_stack([ax[:n_nodes], ay[:n_nodes]])
        e_nodal = None
        if state.w is not None and prev_state is not None:
            current = compute_supercurrent(
                space, state.psi, prev_state.psi, prev_state.a_quad, params.kappa
            )
            e_quad = post.electric_field(space, state, current)
            ex = post.project_to_nodal(space, e_quad[..., 0], mass=mass, stats=stats)
            ey = post.project_to_nodal(space, e_quad[..., 1], mass=mass, stats=stats)
            e_nodal = np.column_stack([ex[:n_nodes], ey[:n_nodes]])
    return post.FieldSnapshot(
        time=state.t,
        solver=solver_tag,
        mesh=space.mesh,
        re_psi=re.copy(),
        im_psi=im.copy(),
        density=re**2 + im**2,
        b_field=b_nodal,
        a_field=a_nodal,
        e_field=e_nodal,
    )


def run(
    space: FeSpace,
    params: SimParams,
    psi0,
    a0=None,
    snapshot_times=(),
    curl_a0=None,
    step_hook=None,
) -> RunResult:
    """Advance N = round(T/tau) uniform steps and collect outputs.

    Emits a FieldSnapshot at every requested time (multiples of tau) and one
    Diagnostics row per step; deterministic for fixed inputs. ``step_hook``,
    when given, is called as step_hook(step_index, state) after every step.
    """
    snap_at = _snapshot_steps(params, snapshot_times)
    stepper = make_stepper(space, params)
    state = init_state(space, params, psi0, a0=a0, curl_a0=curl_a0)
    mass = stepper.mass
    adjacency = post.node_adjacency(space.mesh)
    node_areas = post.lumped_node_areas(space.mesh)
    weights = stepper.weights
    area = weights.sum()
    solver_tag = params.solver.value
    snapshots = []
    diagnostics = post.Diagnostics()

    def record(state, psi_iters, field_iters):
        dens = post.density(state.psi)
        curl_quad = _curl_at_quad(space, state, params)
        energy = (
            post.free_energy(space, state.psi, state.a_quad, curl_quad, params.kappa, params.h_ext)
            if curl_quad is not None
            else math.nan
        )
        dmax = float(dens.max())
        thr = 0.1 * dmax if dmax > 0 else 0.0
        regions = post.vortex_regions(
            space.mesh, dens[: space.mesh.n_nodes], thr,
            adjacency=adjacency, node_areas=node_areas,
        ) if thr > 0 else []
        diagnostics.append(
            t=state.t,
            mean_density=float(weights @ dens) / area,
            min_density=float(dens.min()),
            max_abs_psi=math.sqrt(dmax),
            energy=energy,
            vortices=len(regions),
            psi_iters=psi_iters,
            field_iters=field_iters,
        )

    if 0 in snap_at:
        snapshots.append(_make_snapshot(space, state, None, params, mass, solver_tag))
    record(state, 0, 0)
    n_steps = params.n_steps
    for k in range(1, n_steps + 1):
        psi_stats, field_stats = {}, {}
        try:
            new_state = stepper.step(state, psi_stats=psi_stats, field_stats=field_stats)
        except (SolverError, AssertionError) as exc:
            raise SolverError(f"step {k} (t={state.t + params.tau:.6g}): {exc}") from exc
        # keep reported times exact multiples of tau
        new_state = replace(new_state, t=k * params.tau)
        record(new_state, psi_stats.get("iterations", 0), field_stats.get("iterations", 0))
        if k in snap_at:
            snapshots.append(
                _make_snapshot(space, new_state, state, params, mass, solver_tag)
            )
        if step_hook is not None:
            step_hook(k, new_state)
        state = new_state
    return RunResult(final_state=state, snapshots=snapshots, diagnostics=diagnostics)
