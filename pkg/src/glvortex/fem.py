"""Lagrange finite element spaces, sparse assembly and linear solvers.

The element tables are vectorized over triangles: an :class:`FeSpace`
precomputes basis values and physical gradients at the quadrature points of
every cell, and the assembly routines reduce them with ``einsum`` into COO
triplets. Three solver kernels cover everything the time steppers need:
CG for SPD systems, deflated CG for the singular pure-Neumann systems, and
BiCGStab with a direct sparse-LU fallback for the complex non-Hermitian
order-parameter system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CompatibilityError, InvalidParameterError, SolverError
from .mesh import CORNER, INTERIOR, TriMesh
from .quadrature import QuadRule, quadrature_rule

__all__ = [
    "FeSpace",
    "build_space",
    "mass_matrix",
    "stiffness_matrix",
    "weighted_mass_matrix",
    "convection_matrix",
    "partial_stiffness_matrix",
    "load_vector",
    "grad_pairing_vector",
    "curl_pairing_vector",
    "solve_spd",
    "solve_neumann_meanzero",
    "solve_complex",
    "constrain_dirichlet",
    "eliminate_dofs",
]

DEFAULT_TOL = 1e-10


def _p1_tables(xy):
    q = xy.shape[0]
    lam0 = 1.0 - xy[:, 0] - xy[:, 1]
    phi = np.column_stack([lam0, xy[:, 0], xy[:, 1]])
    grad = np.broadcast_to(
        np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]), (q, 3, 2)
    ).copy()
    return phi, grad


def _p2_tables(xy):
    q = xy.shape[0]
    l1 = 1.0 - xy[:, 0] - xy[:, 1]
    l2 = xy[:, 0]
    l3 = xy[:, 1]
    lam = np.column_stack([l1, l2, l3])
    dlam = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    phi = np.empty((q, 6))
    grad = np.empty((q, 6, 2))
    for i in range(3):
        phi[:, i] = lam[:, i] * (2.0 * lam[:, i] - 1.0)
        grad[:, i] = (4.0 * lam[:, i] - 1.0)[:, None] * dlam[i]
    # edge dof e_i sits opposite vertex i, between vertices j and k
    for i, (j, k) in enumerate(((1, 2), (2, 0), (0, 1))):
        phi[:, 3 + i] = 4.0 * lam[:, j] * lam[:, k]
        grad[:, 3 + i] = 4.0 * (lam[:, j, None] * dlam[k] + lam[:, k, None] * dlam[j])
    return phi, grad


@dataclass(frozen=True)
class FeSpace:
    """Continuous Lagrange space of degree 1 or 2 over a TriMesh.

    DOF ordering: the mesh vertices first, then (for degree 2) one DOF per
    mesh edge at its midpoint. ``boundary_dof_normals`` holds the outward
    unit normal for smooth boundary DOFs (NaN rows elsewhere); corner DOFs
    are listed in ``corner_dofs`` and carry two normals in the mesh corners.
    """

    mesh: TriMesh
    degree: int
    dof_coords: np.ndarray
    cell_dofs: np.ndarray
    boundary_dofs: np.ndarray
    corner_dofs: np.ndarray
    boundary_dof_normals: np.ndarray
    edges: np.ndarray
    quad: QuadRule
    phi: np.ndarray = field(repr=False)  # (Q, nloc)
    gphi: np.ndarray = field(repr=False)  # (M, Q, nloc, 2)
    qpoints: np.ndarray = field(repr=False)  # (M, Q, 2)
    qweights: np.ndarray = field(repr=False)  # (M, Q)
    detj: np.ndarray = field(repr=False)
    phi2: np.ndarray = field(init=False, repr=False)  # (Q, nloc, nloc)
    gphi_flat: np.ndarray = field(init=False, repr=False)  # (M, nloc, Q*2)
    _pattern: object = field(init=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(
            self, "phi2", self.phi[:, :, None] * self.phi[:, None, :]
        )
        m, q = self.qweights.shape
        object.__setattr__(
            self,
            "gphi_flat",
            np.ascontiguousarray(
                self.gphi.transpose(0, 2, 1, 3).reshape(m, self.cell_dofs.shape[1], q * 2)
            ),
        )
        for a in (
            self.dof_coords,
            self.cell_dofs,
            self.boundary_dofs,
            self.corner_dofs,
            self.boundary_dof_normals,
            self.phi,
            self.gphi,
            self.qpoints,
            self.qweights,
            self.detj,
            self.phi2,
        ):
            a.setflags(write=False)

    @property
    def n_dofs(self):
        return self.dof_coords.shape[0]

    @property
    def n_local(self):
        return self.cell_dofs.shape[1]

    # -- field evaluation --------------------------------------------------

    def interpolate(self, f):
        """Nodal interpolant: evaluate callable (or constant) at DOF coords."""
        if np.isscalar(f) or isinstance(f, complex):
            return np.full(self.n_dofs, f)
        vals = f(self.dof_coords[:, 0], self.dof_coords[:, 1])
        return np.broadcast_to(vals, (self.n_dofs,)).copy()

    def values_at_quad(self, coeffs):
        """(M, Q) values of the FE function at all quadrature points."""
        return coeffs[self.cell_dofs] @ self.phi.T

    def grads_at_quad(self, coeffs):
        """(M, Q, 2) gradients of the FE function at all quadrature points."""
        m, q = self.qweights.shape
        out = np.matmul(coeffs[self.cell_dofs][:, None, :], self.gphi_flat)
        return out.reshape(m, q, 2)

    def integrate(self, values):
        """Integrate per-quadrature-point values (M, Q) over the domain."""
        return float(np.einsum("cq,cq->", self.qweights, values, optimize=True))

    def sample_at_quad(self, f):
        """Evaluate a callable or constant at all quadrature points -> (M, Q)."""
        if np.isscalar(f) or isinstance(f, complex):
            return np.full(self.qweights.shape, f)
        return f(self.qpoints[..., 0], self.qpoints[..., 1])

    def dof_measures(self):
        """Integral of each basis function (row sums of the mass matrix)."""
        return load_vector(self, 1.0)


def build_space(mesh: TriMesh, r: int) -> FeSpace:
    """Build the degree-r Lagrange space with quadrature and geometry tables.

    The default quadrature integrates every polynomial form of the scheme
    exactly: degree 4 for r=1 and degree 8 for r=2 (the latter covers the
    |psi|^2-weighted mass of quartic products).
    """
    if r not in (1, 2):
        raise InvalidParameterError(f"unsupported element degree {r}")
    quad = quadrature_rule(4 if r == 1 else 8)
    xy = quad.xy
    nv = mesh.n_nodes
    tris = mesh.triangles

    # unique edges, sorted pairs in lexicographic order for determinism
    pairs = np.sort(
        np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]]), axis=1
    )
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    inverse = inverse.reshape(3, -1).T  # per-cell local edges (01, 12, 20)

    if r == 1:
        phi, grad_ref = _p1_tables(xy)
        cell_dofs = tris.copy()
        dof_coords = mesh.nodes.copy()
    else:
        phi, grad_ref = _p2_tables(xy)
        # local edge dofs opposite vertices 0,1,2 are edges (1,2),(2,0),(0,1)
        e12, e20, e01 = inverse[:, 1], inverse[:, 2], inverse[:, 0]
        cell_dofs = np.column_stack(
            [tris, nv + e12, nv + e20, nv + e01]
        )
        mid = 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])
        dof_coords = np.vstack([mesh.nodes, mid])

    p = mesh.nodes[tris]
    j11 = p[:, 1, 0] - p[:, 0, 0]
    j21 = p[:, 1, 1] - p[:, 0, 1]
    j12 = p[:, 2, 0] - p[:, 0, 0]
    j22 = p[:, 2, 1] - p[:, 0, 1]
    detj = j11 * j22 - j12 * j21
    inv_jt = np.empty((len(tris), 2, 2))
    inv_jt[:, 0, 0] = j22 / detj
    inv_jt[:, 0, 1] = -j21 / detj
    inv_jt[:, 1, 0] = -j12 / detj
    inv_jt[:, 1, 1] = j11 / detj
    gphi = np.einsum("cde,qje->cqjd", inv_jt, grad_ref)
    qpoints = (
        p[:, None, 0, :]
        + xy[None, :, 0, None] * np.stack([j11, j21], axis=1)[:, None, :]
        + xy[None, :, 1, None] * np.stack([j12, j22], axis=1)[:, None, :]
    )
    qweights = quad.weights[None, :] * detj[:, None]

    # boundary DOFs with outward normals
    bset = {(_a, _b) if _a < _b else (_b, _a) for _a, _b, _m in mesh.boundary_edges}
    bdofs = sorted(int(v) for v in mesh.boundary_nodes())
    n_dofs = dof_coords.shape[0]
    normals = np.full((n_dofs, 2), np.nan)
    normals[: nv] = mesh.node_normals
    corner_dofs = np.array(sorted(mesh.corners), dtype=np.int64)
    if r == 2:
        directed = set()
        for t in tris:
            tv = (int(t[0]), int(t[1]), int(t[2]))
            directed.update(((tv[0], tv[1]), (tv[1], tv[2]), (tv[2], tv[0])))
        for ei, (a, b) in enumerate(edges):
            if (int(a), int(b)) in bset:
                bdofs.append(nv + ei)
                d = mesh.nodes[b] - mesh.nodes[a]
                # orient per the owning CCW triangle so the normal points out
                n = np.array([d[1], -d[0]]) / np.linalg.norm(d)
                if (int(a), int(b)) not in directed:
                    n = -n
                normals[nv + ei] = n
    return FeSpace(
        mesh=mesh,
        degree=r,
        dof_coords=dof_coords,
        cell_dofs=np.ascontiguousarray(cell_dofs, dtype=np.int64),
        boundary_dofs=np.array(sorted(bdofs), dtype=np.int64),
        corner_dofs=corner_dofs,
        boundary_dof_normals=normals,
        edges=edges,
        quad=quad,
        phi=phi,
        gphi=gphi,
        qpoints=qpoints,
        qweights=qweights,
        detj=detj,
    )


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


class AssemblyPattern:
    """Cached CSR sparsity of the cell-connectivity pattern.

    Every bilinear form on a space shares one sparsity structure, so local
    (M, nloc, nloc) blocks scatter into the CSR data array with a fixed slot
    permutation; assembling a matrix is then one ``bincount``. The pattern is
    structurally symmetric and ``transpose_perm`` maps each slot to the slot
    of the transposed entry.
    """

    def __init__(self, space):
        nd = space.n_dofs
        cd = space.cell_dofs
        rows = np.repeat(cd, space.n_local, axis=1).ravel()
        cols = np.tile(cd, (1, space.n_local)).ravel()
        key = rows.astype(np.int64) * nd + cols
        codes, slot = np.unique(key, return_inverse=True)
        self.n = nd
        self.nnz = codes.shape[0]
        self.slot = slot.astype(np.int64)
        self.indices = (codes % nd).astype(np.int32)
        counts = np.bincount(codes // nd, minlength=nd)
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int32)
        self.transpose_perm = np.searchsorted(codes, (codes % nd) * nd + codes // nd)

    def scatter(self, local) -> sp.csr_matrix:
        flat = np.asarray(local).ravel()
        if np.iscomplexobj(flat):
            data = np.bincount(self.slot, weights=flat.real, minlength=self.nnz) \
                + 1j * np.bincount(self.slot, weights=flat.imag, minlength=self.nnz)
        else:
            data = np.bincount(self.slot, weights=flat, minlength=self.nnz)
        return self.matrix(data)

    def scatter_data(self, local) -> np.ndarray:
        return np.bincount(self.slot, weights=np.asarray(local).ravel(), minlength=self.nnz)

    def matrix(self, data) -> sp.csr_matrix:
        m = sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
        m.has_canonical_format = True
        return m


def assembly_pattern(space: FeSpace) -> AssemblyPattern:
    if space._pattern is None:
        object.__setattr__(space, "_pattern", AssemblyPattern(space))
    return space._pattern


def _mass_local(space, c=None):
    w = space.qweights if c is None else space.qweights * c
    k = space.n_local
    q = w.shape[1]
    return (w @ space.phi2.reshape(q, k * k)).reshape(-1, k, k)


def _stiffness_local(space):
    return np.einsum(
        "cq,cqkd,cqjd->ckj", space.qweights, space.gphi, space.gphi, optimize=True
    )


def _convection_local(space, vec):
    # t[c,q,j] = vec . grad(phi_j); local[c,k,j] = sum_q w[c,q] phi[q,k] t[c,q,j]
    t = (vec[:, :, None, :] * space.gphi).sum(axis=-1)
    wt = space.qweights[:, :, None] * t
    return np.matmul(space.phi.T, wt)


def mass_matrix(space: FeSpace) -> sp.csr_matrix:
    return assembly_pattern(space).scatter(_mass_local(space))


def stiffness_matrix(space: FeSpace) -> sp.csr_matrix:
    return assembly_pattern(space).scatter(_stiffness_local(space))


def weighted_mass_matrix(space: FeSpace, c) -> sp.csr_matrix:
    """Mass matrix weighted by a coefficient sampled at quadrature points.

    ``c`` is an (M, Q) array (real or complex) or a scalar.
    """
    cq = c if isinstance(c, np.ndarray) else np.full(space.qweights.shape, c)
    return assembly_pattern(space).scatter(_mass_local(space, cq))


def convection_matrix(space: FeSpace, vec) -> sp.csr_matrix:
    """Entries ∫ phi_k (vec · grad phi_j) dx with vec given at quad points (M,Q,2)."""
    return assembly_pattern(space).scatter(_convection_local(space, vec))


def partial_stiffness_matrix(space: FeSpace, a: int, b: int) -> sp.csr_matrix:
    """Entries ∫ (∂_a phi_k)(∂_b phi_j) dx for a, b in {0, 1}."""
    local = np.einsum(
        "cq,cqk,cqj->ckj", space.qweights, space.gphi[..., a], space.gphi[..., b],
        optimize=True,
    )
    return assembly_pattern(space).scatter(local)


def _scatter_vec(space, local):
    b = np.zeros(space.n_dofs, dtype=local.dtype)
    np.add.at(b, space.cell_dofs.ravel(), local.ravel())
    return b


def load_vector(space: FeSpace, g) -> np.ndarray:
    """Right side entries ∫ g phi_k dx with g at quad points (M, Q) or scalar."""
    gq = g if isinstance(g, np.ndarray) else np.full(space.qweights.shape, g)
    local = (space.qweights * gq) @ space.phi
    return _scatter_vec(space, local)


def grad_pairing_vector(space: FeSpace, vec) -> np.ndarray:
    """Right side entries ∫ vec · grad phi_k dx, vec at quad points (M, Q, 2)."""
    local = np.einsum("cq,cqd,cqkd->ck", space.qweights, vec, space.gphi, optimize=True)
    return _scatter_vec(space, local)


def curl_pairing_vector(space: FeSpace, vec) -> np.ndarray:
    """Right side entries ∫ vec · curl phi_k dx with curl phi = (∂y phi, -∂x phi)."""
    rot = np.stack([vec[..., 1], -vec[..., 0]], axis=-1)
    return -grad_pairing_vector(space, rot)


# ---------------------------------------------------------------------------
# linear solvers
# ---------------------------------------------------------------------------


class _Counter:
    def __init__(self):
        self.n = 0

    def __call__(self, _xk):
        self.n += 1


def _record(stats, iterations, residual):
    if stats is not None:
        stats["iterations"] = stats.get("iterations", 0) + iterations
        stats["residual"] = residual


def solve_spd(A, b, tol: float = DEFAULT_TOL, maxiter=None, stats=None) -> np.ndarray:
    """Conjugate gradients with Jacobi preconditioning for SPD systems.

    Guarantees relative residual ||b - Ax|| / ||b|| <= tol; raises
    :class:`SolverError` if the iteration budget (default 10 * dim) is spent.
    """
    b = np.asarray(b)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        _record(stats, 0, 0.0)
        return np.zeros_like(b, dtype=float)
    n = b.shape[0]
    maxiter = maxiter or 10 * n
    d = A.diagonal()
    M = spla.LinearOperator((n, n), matvec=lambda x: x / d)
    cnt = _Counter()
    x, info = spla.cg(A, b, rtol=tol, atol=0.0, maxiter=maxiter, M=M, callback=cnt)
    res = np.linalg.norm(b - A @ x) / nb
    _record(stats, cnt.n, res)
    if info != 0 or res > tol * 1.01:
        raise SolverError(
            f"CG failed after {cnt.n} iterations (relative residual {res:.3e})",
            residual=res,
            iterations=cnt.n,
        )
    return x


def solve_neumann_meanzero(
    A, b, weights, tol: float = DEFAULT_TOL, maxiter=None, stats=None, scale=None
) -> np.ndarray:
    """Solve a singular pure-Neumann system; returns the zero-mean solution.

    ``A`` must be symmetric positive semidefinite with nullspace spanned by
    constants and ``b`` orthogonal to constants within 1e-10 * ||b||. The
    constant component is deflated inside CG and the result is shifted to
    zero mass-weighted mean (``weights`` are the basis-function integrals).

    ``scale``, when given, is a problem magnitude (e.g. the L2 norm of the
    field the right side was assembled from) used to keep the compatibility
    check meaningful when the exact right side vanishes and ||b|| is pure
    assembly roundoff.
    """
    b = np.asarray(b, dtype=float)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        _record(stats, 0, 0.0)
        return np.zeros_like(b)
    n = b.shape[0]
    const_part = abs(b.sum()) / np.sqrt(n)
    if const_part > 1e-10 * max(nb, scale or 0.0):
        raise CompatibilityError(
            "right side has a constant component "
            f"(relative size {const_part / nb:.3e}); the pure-Neumann problem "
            "is incompatible",
            residual=const_part / nb,
        )

    def project(x):
        return x - x.mean()

    d = A.diagonal()
    op = spla.LinearOperator((n, n), matvec=lambda x: project(A @ project(x)))
    M = spla.LinearOperator((n, n), matvec=lambda x: project(x / d))
    cnt = _Counter()
    maxiter = maxiter or 10 * n
    x, info = spla.cg(
        op, project(b), rtol=tol, atol=0.0, maxiter=maxiter, M=M, callback=cnt
    )
    x = project(x)
    res = np.linalg.norm(project(b - A @ x)) / nb
    _record(stats, cnt.n, res)
    if info != 0 or res > tol * 1.01:
        raise SolverError(
            f"deflated CG failed after {cnt.n} iterations "
            f"(relative residual {res:.3e})",
            residual=res,
            iterations=cnt.n,
        )
    # mass-weighted zero mean of the FE function
    x = x - (weights @ x) / weights.sum()
    return x


def solve_complex(A, b, tol: float = DEFAULT_TOL, x0=None, stats=None) -> np.ndarray:
    """Solve a complex nonsingular sparse system.

    BiCGStab with Jacobi preconditioning; on breakdown or non-convergence the
    solve falls back to a direct sparse LU factorization. Raises
    :class:`SolverError` only if the direct path also misses the residual
    contract (e.g. a singular matrix).
    """
    b = np.asarray(b, dtype=complex)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        _record(stats, 0, 0.0)
        return np.zeros_like(b)
    n = b.shape[0]
    d = A.diagonal()
    ok = np.abs(d) > 0
    dinv = np.where(ok, 1.0 / np.where(ok, d, 1.0), 1.0)
    M = spla.LinearOperator((n, n), matvec=lambda x: x * dinv, dtype=complex)
    cnt = _Counter()
    x, info = spla.bicgstab(
        A, b, x0=x0, rtol=tol, atol=0.0, maxiter=10 * n, M=M, callback=cnt
    )
    if info == 0:
        res = np.linalg.norm(b - A @ x) / nb
        if res <= tol * 1.01:
            _record(stats, cnt.n, res)
            return x
    # direct factorization fallback
    try:
        x = spla.splu(sp.csc_matrix(A)).solve(b)
    except RuntimeError as exc:
        raise SolverError(f"direct factorization failed: {exc}") from exc
    res = np.linalg.norm(b - A @ x) / nb
    _record(stats, cnt.n, res)
    if not np.isfinite(res) or res > max(tol, 1e-8):
        raise SolverError(
            f"direct solve missed the residual contract (relative residual {res:.3e})",
            residual=res,
        )
    return x


class FactorizedSolver:
    """Prefactorized direct solve for a matrix reused across many steps.

    Verifies the same relative-residual contract as :func:`solve_spd` on
    every call (one extra matvec). Determinism: SuperLU with its default
    ordering is reproducible for a fixed matrix.
    """

    def __init__(self, A, tol: float = DEFAULT_TOL):
        self.A = A.tocsr()
        self.tol = tol
        self.lu = spla.splu(sp.csc_matrix(A))

    def solve(self, b, stats=None):
        nb = np.linalg.norm(b)
        if nb == 0.0:
            _record(stats, 0, 0.0)
            return np.zeros_like(b)
        x = self.lu.solve(b)
        res = np.linalg.norm(b - self.A @ x) / nb
        _record(stats, 1, res)
        if not np.isfinite(res) or res > self.tol:
            raise SolverError(
                f"factorized solve missed the residual contract ({res:.3e})",
                residual=res,
            )
        return x


class FactorizedMeanZero:
    """Direct solve of the singular pure-Neumann system via a bordered
    factorization.

    The zero-mean constraint enters as a Lagrange multiplier: solve
    [[A, w], [w^T, 0]] [x; lam] = [b; 0] with w the basis-function integrals.
    Equivalent to the deflated-CG route of :func:`solve_neumann_meanzero`
    (same compatibility check, mass-weighted zero mean, residual contract)
    but one backsubstitution per step.
    """

    def __init__(self, A, weights, tol: float = DEFAULT_TOL):
        self.A = A.tocsr()
        self.weights = np.asarray(weights, dtype=float)
        self.tol = tol
        n = self.A.shape[0]
        w = sp.csc_matrix(self.weights.reshape(n, 1))
        bordered = sp.bmat([[self.A, w], [w.T, None]], format="csc")
        self.lu = spla.splu(bordered)
        self.n = n

    def solve(self, b, stats=None, scale=None):
        b = np.asarray(b, dtype=float)
        nb = np.linalg.norm(b)
        if nb == 0.0:
            _record(stats, 0, 0.0)
            return np.zeros_like(b)
        const_part = abs(b.sum()) / np.sqrt(self.n)
        if const_part > 1e-10 * max(nb, scale or 0.0):
            raise CompatibilityError(
                "right side has a constant component "
                f"(relative size {const_part / nb:.3e}); the pure-Neumann "
                "problem is incompatible",
                residual=const_part / nb,
            )
        x = self.lu.solve(np.concatenate([b, [0.0]]))[: self.n]
        r = b - self.A @ x
        res = np.linalg.norm(r - r.mean()) / max(nb, scale or 0.0)
        _record(stats, 1, res)
        if not np.isfinite(res) or res > self.tol:
            raise SolverError(
                f"bordered solve missed the residual contract ({res:.3e})",
                residual=res,
            )
        return x - (self.weights @ x) / self.weights.sum()


def eliminate_dofs(A, b, dofs, values):
    """Symmetric elimination of prescribed DOFs from a sparse system.

    Returns (A2, b2) with unit diagonal rows/columns at ``dofs`` and the
    complement equations corrected by the prescribed values.
    """
    n = b.shape[0]
    dofs = np.asarray(dofs, dtype=np.int64)
    vals = np.broadcast_to(np.asarray(values), dofs.shape)
    z = np.zeros(n, dtype=np.result_type(vals.dtype, b.dtype, float))
    z[dofs] = vals
    b2 = b - A @ z
    b2[dofs] = vals
    keep = np.ones(n)
    keep[dofs] = 0.0
    dk = sp.diags(keep)
    pin = sp.diags(1.0 - keep)
    A2 = (dk @ A @ dk + pin).tocsr()
    return A2, b2


def constrain_dirichlet(space: FeSpace, A, b, dofs, values):
    """Impose x[d] = values[d] by symmetric elimination.

    ``dofs`` must be boundary DOFs of the space.
    """
    dofs = np.asarray(dofs, dtype=np.int64)
    if dofs.size:
        outside = np.setdiff1d(dofs, space.boundary_dofs)
        if outside.size:
            raise InvalidParameterError(
                f"DOF {int(outside[0])} is not a boundary DOF"
            )
    if dofs.size == 0:
        return A.copy(), np.asarray(b).copy()
    return eliminate_dofs(A, np.asarray(b), dofs, values)
