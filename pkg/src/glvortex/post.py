"""Physical observables, field comparisons and snapshot containers.

Everything here is a pure read-only computation over solver states or nodal
arrays: superconducting density, magnetic induction, electric field, the
Ginzburg-Landau free energy, low-density (vortex) region detection, gauge
transformations, and relative L2 differences between fields living on
different meshes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import fem
from .errors import EvaluationError, FieldUnavailableError
from .fem import FeSpace
from .mesh import TriMesh

__all__ = [
    "FieldSnapshot",
    "Diagnostics",
    "VortexRegion",
    "density",
    "project_to_nodal",
    "magnetic_induction",
    "electric_field",
    "free_energy",
    "vortex_regions",
    "gauge_transform",
    "compare_fields",
    "node_adjacency",
    "lumped_node_areas",
    "locate_points",
    "eval_at_points",
]


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSnapshot:
    """Nodal fields of one time level, sized by the mesh node count."""

    time: float
    solver: str
    mesh: TriMesh
    re_psi: np.ndarray
    im_psi: np.ndarray
    density: np.ndarray
    b_field: np.ndarray
    a_field: np.ndarray  # (N, 2)
    e_field: np.ndarray | None = None  # (N, 2) when available

    def __post_init__(self):
        dev = np.abs(self.density - (self.re_psi**2 + self.im_psi**2)).max()
        if dev > 1e-14:
            raise ValueError(f"snapshot density inconsistent with psi ({dev:.2e})")


@dataclass
class Diagnostics:
    """Per-step scalar time series of a run."""

    t: list = field(default_factory=list)
    mean_density: list = field(default_factory=list)
    min_density: list = field(default_factory=list)
    max_abs_psi: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    vortices: list = field(default_factory=list)
    psi_iters: list = field(default_factory=list)
    field_iters: list = field(default_factory=list)

    def append(self, **kw):
        for k, v in kw.items():
            getattr(self, k).append(v)

    def as_arrays(self):
        return {k: np.asarray(getattr(self, k)) for k in (
            "t", "mean_density", "min_density", "max_abs_psi",
            "energy", "vortices", "psi_iters", "field_iters",
        )}


class VortexRegion(NamedTuple):
    centroid: tuple
    area: float
    nodes: np.ndarray


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------


def density(psi: np.ndarray) -> np.ndarray:
    """Pointwise superconducting density |psi|^2 at the DOFs."""
    return np.abs(psi) ** 2


def project_to_nodal(space: FeSpace, quad_vals, mass=None, stats=None) -> np.ndarray:
    """L2-project per-quadrature-point values onto the nodal space."""
    mass = mass if mass is not None else fem.mass_matrix(space)
    b = fem.load_vector(space, quad_vals)
    return fem.solve_spd(mass, b, stats=stats)


def magnetic_induction(space: FeSpace, state, params, mass=None) -> np.ndarray:
    """Nodal magnetic induction B.

    Hodge-reformulated states must track the induction offset field w
    (B = w + H); vector-potential states get the L2 projection of the
    piecewise-polynomial curl of A.
    """
    if state.avec is None:
        if state.w is None:
            raise FieldUnavailableError(
                "magnetic induction needs track_w for the Hodge-reformulated solver"
            )
        return state.w + params.h_ext
    n = space.n_dofs
    gax = space.grads_at_quad(state.avec[:n])
    gay = space.grads_at_quad(state.avec[n:])
    curl = gay[..., 0] - gax[..., 1]
    return project_to_nodal(space, curl, mass=mass)


def electric_field(space: FeSpace, state, current) -> np.ndarray:
    """Electric field -curl(w) - F at quadrature points (needs track_w)."""
    if state.w is None:
        raise FieldUnavailableError("electric field needs track_w")
    gw = space.grads_at_quad(state.w)
    e = np.empty_like(current)
    e[..., 0] = -gw[..., 1] - current[..., 0]
    e[..., 1] = gw[..., 0] - current[..., 1]
    return e


def free_energy(space: FeSpace, psi, a_quad, curl_quad, kappa, applied_h) -> float:
    """Ginzburg-Landau free energy by quadrature.

    integral of |(i/kappa) grad psi + A psi|^2 + (|psi|^2 - 1)^2 / 2
    + |curl A - H|^2, with curl A supplied at quadrature points.
    """
    psi_q = space.values_at_quad(psi)
    gpsi = space.grads_at_quad(psi)
    kin = (1j / kappa) * gpsi + a_quad * psi_q[..., None]
    dens = np.abs(psi_q) ** 2
    integrand = (np.abs(kin) ** 2).sum(axis=-1) + 0.5 * (dens - 1.0) ** 2
    integrand = integrand + (curl_quad - applied_h) ** 2
    return space.integrate(integrand)


def node_adjacency(mesh: TriMesh) -> sp.csr_matrix:
    """Symmetric node-to-node adjacency over triangle edges."""
    t = mesh.triangles
    rows = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
    cols = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
    n = mesh.n_nodes
    a = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    return ((a + a.T) > 0).tocsr()


def lumped_node_areas(mesh: TriMesh) -> np.ndarray:
    """One third of the incident triangle areas per node."""
    areas = mesh.signed_areas()
    out = np.zeros(mesh.n_nodes)
    np.add.at(out, mesh.triangles.ravel(), np.repeat(areas / 3.0, 3))
    return out


def vortex_regions(
    mesh: TriMesh, dens: np.ndarray, threshold: float,
    adjacency=None, node_areas=None,
) -> list[VortexRegion]:
    """Connected components of {nodes: density < threshold}.

    Components are returned with lumped areas and area-weighted centroids,
    sorted lexicographically by centroid for determinism.
    """
    mask = np.asarray(dens)[: mesh.n_nodes] < threshold
    if not mask.any():
        return []
    adjacency = adjacency if adjacency is not None else node_adjacency(mesh)
    node_areas = node_areas if node_areas is not None else lumped_node_areas(mesh)
    idx = np.flatnonzero(mask)
    sub = adjacency[idx][:, idx]
    ncomp, labels = connected_components(sub, directed=False)
    regions = []
    for c in range(ncomp):
        nodes = idx[labels == c]
        wts = node_areas[nodes]
        area = float(wts.sum())
        cx, cy = (mesh.nodes[nodes] * wts[:, None]).sum(axis=0) / area
        regions.append(VortexRegion(centroid=(float(cx), float(cy)), area=area, nodes=nodes))
    regions.sort(key=lambda r: r.centroid)
    return regions


def gauge_transform(space: FeSpace, psi, a_quad, phi, chi, kappa, chi_rate=None):
    """Apply (psi, A, phi) -> (psi e^{i kappa chi}, A + grad chi, phi - dt chi).

    ``chi`` is a nodal field; the phase rotates psi at the DOFs and grad(chi)
    shifts A at the quadrature points. ``chi_rate`` (nodal d(chi)/dt) defaults
    to zero, i.e. a static gauge function leaves phi unchanged.
    """
    psi2 = psi * np.exp(1j * kappa * chi)
    a2 = a_quad + space.grads_at_quad(chi)
    phi2 = phi if chi_rate is None else phi - chi_rate
    return psi2, a2, phi2


# ---------------------------------------------------------------------------
# cross-mesh comparison
# ---------------------------------------------------------------------------


class _Locator:
    """Bucket-grid point location over a triangulation."""

    def __init__(self, mesh: TriMesh):
        self.mesh = mesh
        p = mesh.nodes[mesh.triangles]
        self.lo = mesh.nodes.min(axis=0)
        self.hi = mesh.nodes.max(axis=0)
        m = mesh.n_triangles
        self.nb = max(1, int(math.sqrt(m)))
        ext = np.maximum(self.hi - self.lo, 1e-30)
        self.h = ext / self.nb
        tlo = np.floor((p.min(axis=1) - self.lo) / self.h).astype(int).clip(0, self.nb - 1)
        thi = np.floor((p.max(axis=1) - self.lo) / self.h).astype(int).clip(0, self.nb - 1)
        buckets = {}
        for ti in range(m):
            for bx in range(tlo[ti, 0], thi[ti, 0] + 1):
                for by in range(tlo[ti, 1], thi[ti, 1] + 1):
                    buckets.setdefault((bx, by), []).append(ti)
        self.buckets = buckets
        # barycentric transforms
        a = p[:, 0]
        self.a = a
        d1 = p[:, 1] - a
        d2 = p[:, 2] - a
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        self.inv = np.empty((m, 2, 2))
        self.inv[:, 0, 0] = d2[:, 1] / det
        self.inv[:, 0, 1] = -d2[:, 0] / det
        self.inv[:, 1, 0] = -d1[:, 1] / det
        self.inv[:, 1, 1] = d1[:, 0] / det

    def locate(self, pts, tol=1e-10):
        pts = np.asarray(pts, dtype=float)
        n = pts.shape[0]
        cell = np.floor((pts - self.lo) / self.h).astype(int).clip(0, self.nb - 1)
        pt_idx = []
        tri_idx = []
        for i in range(n):
            cands = self.buckets.get((cell[i, 0], cell[i, 1]), ())
            pt_idx.extend([i] * len(cands))
            tri_idx.extend(cands)
        pt_idx = np.asarray(pt_idx, dtype=np.int64)
        tri_idx = np.asarray(tri_idx, dtype=np.int64)
        found = np.full(n, -1, dtype=np.int64)
        bary = np.zeros((n, 3))
        if pt_idx.size:
            d = pts[pt_idx] - self.a[tri_idx]
            lm = np.einsum("pde,pe->pd", self.inv[tri_idx], d)
            l0 = 1.0 - lm.sum(axis=1)
            lam = np.column_stack([l0, lm])
            ok = (lam >= -tol).all(axis=1)
            # keep the first (lowest tri index) hit per point, deterministically
            order = np.lexsort((tri_idx, pt_idx))
            for k in order:
                if ok[k] and found[pt_idx[k]] < 0:
                    found[pt_idx[k]] = tri_idx[k]
                    bary[pt_idx[k]] = lam[k]
        missing = np.flatnonzero(found < 0)
        if missing.size:
            x, y = pts[missing[0]]
            raise EvaluationError(
                f"point ({x:.6g}, {y:.6g}) lies outside the source mesh "
                f"(and {missing.size - 1} more)"
            )
        return found, bary


def locate_points(mesh: TriMesh, pts, tol=1e-10):
    """Triangle index and barycentric coordinates for each query point."""
    return _Locator(mesh).locate(pts, tol=tol)


def eval_at_points(space: FeSpace, coeffs, pts, locator=None, tol=1e-10):
    """Evaluate an FE function at arbitrary points by element search."""
    locator = locator or _Locator(space.mesh)
    tri, lam = locator.locate(np.asarray(pts, dtype=float), tol=tol)
    if space.degree == 1:
        vals = np.einsum("pj,pj->p", lam, coeffs[space.mesh.triangles[tri]])
        return vals
    l1, l2, l3 = lam[:, 0], lam[:, 1], lam[:, 2]
    shp = np.column_stack([
        l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), l3 * (2 * l3 - 1),
        4 * l2 * l3, 4 * l3 * l1, 4 * l1 * l2,
    ])
    return np.einsum("pj,pj->p", shp, coeffs[space.cell_dofs[tri]])


def compare_fields(space_f: FeSpace, f, space_g: FeSpace, g, subdomain=None) -> float:
    """Relative L2 difference ||f - g|| / ||g|| over an optional subdomain.

    Quadrature runs on g's (finer) mesh; f is evaluated there by element
    search and local interpolation. ``subdomain`` is a predicate over point
    arrays (pts shaped (..., 2)) selecting where to compare.
    """
    qp = space_g.qpoints
    gv = space_g.values_at_quad(g)
    if space_f is space_g or space_f.mesh is space_g.mesh:
        fv = space_f.values_at_quad(f)
    else:
        flat = qp.reshape(-1, 2)
        fv = eval_at_points(space_f, f, flat).reshape(gv.shape)
    w = space_g.qweights
    if subdomain is not None:
        mask = subdomain(qp)
        w = np.where(mask, w, 0.0)
    num = float(np.sqrt((w * np.abs(fv - gv) ** 2).sum()))
    den = float(np.sqrt((w * np.abs(gv) ** 2).sum()))
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den
