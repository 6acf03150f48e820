"""Triangulations of the simulation domains.

Generates conforming triangular meshes of the unit square, the L-shape domain
and a unit disk with a triangular boundary notch, refines them locally by
longest-edge bisection, classifies boundary nodes (normals, corners), and
reads/writes the plain-text ``glmesh`` format.

All meshes are immutable after construction and validated against the
structural invariants (positive triangle areas, closed boundary loops, no
duplicate nodes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidParameterError, MeshError, MeshFormatError, RefinementError

__all__ = [
    "Corner",
    "TriMesh",
    "MeshSpec",
    "gen_unit_square",
    "gen_lshape",
    "gen_disk_notch",
    "generate_mesh",
    "refine_local",
    "read_mesh",
    "write_mesh",
]

# Two boundary-edge normals are "the same" below this angle; above it the
# shared node is a corner.
CORNER_ANGLE_TOL = 1e-8
# Nodes on the unit circle (the only curved boundary in the suite) are
# recognised within this distance and get the exact radial normal.
CIRCLE_TOL = 1e-12

INTERIOR, BOUNDARY, CORNER = 0, 1, 2


class Corner(NamedTuple):
    """Boundary corner: the two adjacent outward edge normals and the
    interior angle between the boundary directions, in radians."""

    normals: np.ndarray  # (2, 2): incoming-edge normal, outgoing-edge normal
    interior_angle: float


@dataclass(frozen=True)
class TriMesh:
    """Conforming triangulation of a curved polygon.

    nodes : (N, 2) float array
    triangles : (M, 3) int array, counterclockwise
    boundary_edges : (K, 3) int array of (a, b, marker)

    Node classification (computed): ``node_kind`` is INTERIOR/BOUNDARY/CORNER
    per node, ``node_normals`` holds the outward unit normal for non-corner
    boundary nodes (NaN elsewhere), and ``corners`` maps corner node index to
    a :class:`Corner`.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    node_kind: np.ndarray = field(init=False, repr=False)
    node_normals: np.ndarray = field(init=False, repr=False)
    corners: dict = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.ascontiguousarray(np.asarray(self.nodes, dtype=float))
        tris = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        bnd = np.ascontiguousarray(np.asarray(self.boundary_edges, dtype=np.int64))
        if bnd.size == 0:
            bnd = bnd.reshape(0, 3)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "boundary_edges", bnd)
        self._validate()
        kind, normals, corners = _classify_boundary(nodes, tris, bnd)
        object.__setattr__(self, "node_kind", kind)
        object.__setattr__(self, "node_normals", normals)
        object.__setattr__(self, "corners", corners)
        for a in (nodes, tris, bnd, kind, normals):
            a.setflags(write=False)

    # -- queries ---------------------------------------------------------

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    def signed_areas(self):
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def min_angle(self):
        """Smallest interior angle over all triangles, in radians."""
        p = self.nodes[self.triangles]
        angles = []
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
            dot = (a * b).sum(axis=1)
            angles.append(np.arctan2(np.abs(cross), dot))
        return float(np.min(angles))

    def boundary_nodes(self):
        return np.flatnonzero(self.node_kind != INTERIOR)

    # -- validation ------------------------------------------------------

    def _validate(self):
        nodes, tris, bnd = self.nodes, self.triangles, self.boundary_edges
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise MeshError("nodes must be an (N, 2) array")
        if not np.all(np.isfinite(nodes)):
            raise MeshError("node coordinates must be finite")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise MeshError("triangles must be an (M, 3) array")
        n = nodes.shape[0]
        if tris.size and (tris.min() < 0 or tris.max() >= n):
            raise MeshError("triangle references a node out of range")
        areas = self.signed_areas()
        if np.any(areas <= 0):
            bad = int(np.argmin(areas))
            raise MeshError(
                f"triangle {bad} has non-positive signed area {areas[bad]:.3e}"
            )
        used = np.zeros(n, dtype=bool)
        used[tris.ravel()] = True
        if not used.all():
            raise MeshError(f"node {int(np.flatnonzero(~used)[0])} belongs to no triangle")
        # duplicate nodes within 1e-12 of the coordinate span (two offset
        # grids so near-coincident pairs straddling a cell edge are caught)
        span = float(np.ptp(nodes, axis=0).max()) or 1.0
        tol = 1e-12 * span
        for offset in (0.0, 0.5):
            keys = np.floor(nodes / tol + offset).astype(np.int64)
            _, first, counts = np.unique(
                keys, axis=0, return_index=True, return_counts=True
            )
            for cell in first[counts > 1]:
                same = np.flatnonzero((keys == keys[cell]).all(axis=1))
                d = np.linalg.norm(nodes[same] - nodes[cell], axis=1)
                near = same[d <= tol]
                if near.size > 1:
                    raise MeshError(
                        f"duplicate nodes {int(near[0])} and {int(near[1])} "
                        "within tolerance"
                    )
        # boundary edges: each must be an edge of exactly one triangle
        owners = _edge_triangle_count(tris)
        if bnd.size:
            if bnd[:, :2].min() < 0 or bnd[:, :2].max() >= n:
                raise MeshError("boundary edge references a node out of range")
            for a, b, _ in bnd:
                cnt = owners.get(_ekey(a, b), 0)
                if cnt != 1:
                    raise MeshError(
                        f"boundary edge ({a},{b}) belongs to {cnt} triangles, expected 1"
                    )
        # interior edges must be shared by exactly two triangles
        bset = {_ekey(a, b) for a, b, _ in bnd}
        for e, cnt in owners.items():
            if cnt == 1 and e not in bset:
                raise MeshError(f"triangle edge {e} is on the boundary but not marked")
            if cnt > 2:
                raise MeshError(f"edge {e} shared by {cnt} triangles")
        # closed loops: every boundary node has exactly two incident boundary edges
        if bnd.size:
            deg = np.zeros(n, dtype=int)
            np.add.at(deg, bnd[:, 0], 1)
            np.add.at(deg, bnd[:, 1], 1)
            bad = np.flatnonzero((deg != 0) & (deg != 2))
            if bad.size:
                raise MeshError(
                    f"boundary node {int(bad[0])} has {int(deg[bad[0]])} incident "
                    "boundary edges, expected 2"
                )


def _ekey(a, b):
    return (a, b) if a < b else (b, a)


def _edge_triangle_count(tris):
    owners = {}
    for t in tris:
        for i in range(3):
            e = _ekey(int(t[i]), int(t[(i + 1) % 3]))
            owners[e] = owners.get(e, 0) + 1
    return owners


def _classify_boundary(nodes, tris, bnd):
    """Per-node classification from the boundary-edge cycle.

    Boundary edges are oriented so the interior lies on the left (matching the
    CCW triangle that owns them); the outward normal of direction d is
    (d_y, -d_x).
    """
    n = nodes.shape[0]
    kind = np.zeros(n, dtype=np.uint8)
    normals = np.full((n, 2), np.nan)
    corners = {}
    if bnd.size == 0:
        return kind, normals, corners

    directed = {}
    for t in tris:
        for i in range(3):
            directed[(int(t[i]), int(t[(i + 1) % 3]))] = True
    out_edge = {}
    in_edge = {}
    for a, b, _ in bnd:
        a, b = int(a), int(b)
        if (a, b) not in directed:  # stored reversed relative to CCW
            a, b = b, a
        out_edge[a] = b
        in_edge[b] = a

    radius = np.linalg.norm(nodes, axis=1)
    on_circle = np.abs(radius - 1.0) < CIRCLE_TOL

    for v in out_edge:
        a = in_edge[v]
        b = out_edge[v]
        d_in = nodes[v] - nodes[a]
        d_out = nodes[b] - nodes[v]
        d_in = d_in / np.linalg.norm(d_in)
        d_out = d_out / np.linalg.norm(d_out)
        n_in = np.array([d_in[1], -d_in[0]])
        n_out = np.array([d_out[1], -d_out[0]])
        dev = math.atan2(
            abs(d_in[0] * d_out[1] - d_in[1] * d_out[0]), float(d_in @ d_out)
        )
        if on_circle[v] and on_circle[a] and on_circle[b]:
            # vertex of the sampled circular arc: a discretization kink, not a
            # geometric corner; carries the exact radial normal
            kind[v] = BOUNDARY
            normals[v] = nodes[v] / radius[v]
            continue
        if dev > CORNER_ANGLE_TOL:
            turn = math.atan2(
                d_in[0] * d_out[1] - d_in[1] * d_out[0], float(d_in @ d_out)
            )
            kind[v] = CORNER
            corners[v] = Corner(
                normals=np.array([n_in, n_out]), interior_angle=math.pi - turn
            )
        else:
            kind[v] = BOUNDARY
            nv = n_in + n_out
            nv /= np.linalg.norm(nv)
            # exact radial normal on the circular arc
            r = np.linalg.norm(nodes[v])
            if abs(r - 1.0) < CIRCLE_TOL and nv @ (nodes[v] / r) > 0.8:
                nv = nodes[v] / r
            normals[v] = nv
    return kind, normals, corners


# ---------------------------------------------------------------------------
# specs and generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefineSpec:
    center: tuple
    radius: float
    levels: int

    def __post_init__(self):
        if self.levels < 0:
            raise InvalidParameterError("refine levels must be >= 0")
        if self.levels > 0 and self.radius <= 0:
            raise InvalidParameterError("refine radius must be > 0")


@dataclass(frozen=True)
class MeshSpec:
    """Declarative mesh request; expanded by :func:`generate_mesh`."""

    domain: str  # unit_square | lshape | disk_notch | file
    m: int = 16
    boundary_points: int = 256
    notch_depth: float = 0.25
    notch_halfangle: float = 0.1 * math.pi
    path: str | None = None
    refine: RefineSpec | None = None

    def __post_init__(self):
        if self.domain not in ("unit_square", "lshape", "disk_notch", "file"):
            raise InvalidParameterError(f"unknown domain kind {self.domain!r}")
        if self.domain in ("unit_square", "lshape") and self.m < 2:
            raise InvalidParameterError("m must be >= 2")
        if self.domain == "disk_notch":
            if self.boundary_points < 16:
                raise InvalidParameterError("boundary_points must be >= 16")
            if not 0.0 < self.notch_depth < 1.0:
                raise InvalidParameterError("notch_depth must be in (0, 1)")
            if not 0.0 < self.notch_halfangle < math.pi / 4:
                raise InvalidParameterError("notch_halfangle must be in (0, pi/4)")
        if self.domain == "file" and not self.path:
            raise InvalidParameterError("file domain requires a path")


def generate_mesh(spec: MeshSpec) -> TriMesh:
    """Expand a MeshSpec: generate (or read) the mesh and apply local refinement."""
    if spec.domain == "unit_square":
        mesh = gen_unit_square(spec.m)
    elif spec.domain == "lshape":
        mesh = gen_lshape(spec.m)
    elif spec.domain == "disk_notch":
        mesh = gen_disk_notch(spec)
    else:
        mesh = read_mesh(spec.path)
    if spec.refine is not None and spec.refine.levels > 0:
        mesh = refine_local(
            mesh, spec.refine.center, spec.refine.radius, spec.refine.levels
        )
    return mesh


def gen_unit_square(m: int) -> TriMesh:
    """Uniform right-triangle mesh of [0,1]^2 with (m+1)^2 grid nodes.

    Each cell is split along the same diagonal (lower-left to upper-right).
    Boundary markers: 1 bottom, 2 right, 3 top, 4 left.
    """
    if m < 2:
        raise InvalidParameterError("m must be >= 2")
    xs = np.linspace(0.0, 1.0, m + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def nid(i, j):
        return i * (m + 1) + j

    tris = []
    for i in range(m):
        for j in range(m):
            v00, v10 = nid(i, j), nid(i + 1, j)
            v01, v11 = nid(i, j + 1), nid(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    bnd = []
    for i in range(m):
        bnd.append((nid(i, 0), nid(i + 1, 0), 1))  # bottom
        bnd.append((nid(m, i), nid(m, i + 1), 2))  # right
        bnd.append((nid(i + 1, m), nid(i, m), 3))  # top
        bnd.append((nid(0, i + 1), nid(0, i), 4))  # left
    return TriMesh(nodes, np.array(tris), np.array(bnd))


def gen_lshape(m: int) -> TriMesh:
    """Quasi-uniform mesh of the L-shape with mesh size h = 1/m.

    Domain: [-1/2,1/2]^2 minus the closed upper-right quadrant
    [0,1/2]x[0,1/2]; the reentrant corner sits at the origin (interior angle
    3*pi/2). ``m`` must be even so the corner is a grid point.
    """
    if m < 2:
        raise InvalidParameterError("m must be >= 2")
    if m % 2 != 0:
        raise InvalidParameterError("m must be even for the L-shape")
    xs = np.linspace(-0.5, 0.5, m + 1)
    half = m // 2
    idx = -np.ones((m + 1, m + 1), dtype=np.int64)
    coords = []
    for i in range(m + 1):
        for j in range(m + 1):
            if i <= half or j <= half:  # x <= 0 or y <= 0
                idx[i, j] = len(coords)
                coords.append((xs[i], xs[j]))
    nodes = np.array(coords)
    tris = []
    for i in range(m):
        for j in range(m):
            if i >= half and j >= half:  # cell inside the removed quadrant
                continue
            v00, v10 = idx[i, j], idx[i + 1, j]
            v01, v11 = idx[i, j + 1], idx[i + 1, j + 1]
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    bnd = []
    for i in range(m):
        bnd.append((idx[i, 0], idx[i + 1, 0], 1))  # bottom y=-1/2
    for j in range(half):
        bnd.append((idx[m, j], idx[m, j + 1], 2))  # right x=1/2, y in [-1/2,0]
    for i in range(m, half, -1):
        bnd.append((idx[i, half], idx[i - 1, half], 3))  # y=0, x in [0,1/2]
    for j in range(half, m):
        bnd.append((idx[half, j], idx[half, j + 1], 4))  # x=0, y in [0,1/2]
    for i in range(half, 0, -1):
        bnd.append((idx[i, m], idx[i - 1, m], 5))  # top y=1/2, x in [-1/2,0]
    for j in range(m, 0, -1):
        bnd.append((idx[0, j], idx[0, j - 1], 6))  # left x=-1/2
    return TriMesh(nodes, np.array(tris), np.array(bnd))


def _notch_radius(theta, depth, halfangle):
    """Domain radius at polar angle theta in [-halfangle, halfangle].

    The boundary there is the straight notch edge from the apex
    (1 - depth, 0) to the shoulder (cos(halfangle), +-sin(halfangle)).
    """
    a = 1.0 - depth
    c, s = math.cos(halfangle), math.sin(halfangle)
    th = np.abs(theta)
    return a * s / (s * np.cos(th) - (c - a) * np.sin(th))


def gen_disk_notch(spec: MeshSpec) -> TriMesh:
    """Layered triangulation of the unit disk with an inward triangular notch.

    The notch is cut at polar angle 0: apex at radius 1 - notch_depth, edges
    running to the circle at angles +-notch_halfangle. The boundary carries
    ``boundary_points`` nodes in total; arc nodes lie exactly on the unit
    circle. The apex node is the single reentrant corner; the two shoulder
    nodes are convex corners. Markers: 1 arc, 2 lower notch edge, 3 upper.
    """
    if spec.domain != "disk_notch":
        raise InvalidParameterError("spec.domain must be 'disk_notch'")
    nb = spec.boundary_points
    depth, alpha = spec.notch_depth, spec.notch_halfangle

    # uniform boundary angles with the three defect corners snapped exact
    theta = 2.0 * math.pi * np.arange(nb) / nb
    i_up = int(np.argmin(np.abs(theta - alpha)))
    i_lo = int(np.argmin(np.abs(theta - (2.0 * math.pi - alpha))))
    if i_up == 0 or i_lo == 0 or i_up == i_lo:
        raise InvalidParameterError(
            "degenerate notch: boundary sampling cannot resolve the defect"
        )
    theta[i_up] = alpha
    theta[i_lo] = 2.0 * math.pi - alpha

    def domain_radius(th):
        th = np.mod(th, 2.0 * math.pi)
        signed = np.where(th > math.pi, th - 2.0 * math.pi, th)
        r = np.ones_like(signed)
        in_notch = np.abs(signed) < alpha - 1e-15
        if np.any(in_notch):
            r[in_notch] = _notch_radius(signed[in_notch], depth, alpha)
        return r

    n_rings = max(3, round(nb / (2.0 * math.pi)))
    rings = []  # list of node-index arrays, innermost first
    coords = [(0.0, 0.0)]
    for k in range(1, n_rings + 1):
        if k < n_rings:
            nk = max(8, round(nb * k / n_rings))
            th = 2.0 * math.pi * np.arange(nk) / nk
        else:
            th = theta
        r = (k / n_rings) * domain_radius(th)
        start = len(coords)
        for t, rr in zip(th, r):
            if k == n_rings and not (abs(t) < alpha - 1e-12 or t > 2 * math.pi - alpha + 1e-12):
                # exact circle coordinates on the arc
                coords.append((math.cos(t), math.sin(t)))
            else:
                coords.append((rr * math.cos(t), rr * math.sin(t)))
        rings.append((np.arange(start, len(coords)), th))
    nodes = np.array(coords)

    tris = []
    first_ring, first_theta = rings[0]
    for i in range(len(first_ring)):
        j = (i + 1) % len(first_ring)
        tris.append((0, first_ring[i], first_ring[j]))
    for (inner, th_a), (outer, th_b) in zip(rings[:-1], rings[1:]):
        tris.extend(_zip_rings(inner, th_a, outer, th_b))

    boundary_ring, btheta = rings[-1]
    bnd = []
    for i in range(nb):
        j = (i + 1) % nb
        midt = _mid_angle(btheta[i], btheta[j])
        signed = midt - 2.0 * math.pi if midt > math.pi else midt
        if signed <= -alpha + 1e-12 or signed >= alpha - 1e-12:
            marker = 1
        elif signed < 0:
            marker = 2
        else:
            marker = 3
        bnd.append((boundary_ring[i], boundary_ring[j], marker))
    return TriMesh(nodes, np.array(tris), np.array(bnd))


def _mid_angle(t0, t1):
    if t1 < t0:
        t1 += 2.0 * math.pi
    return math.fmod(0.5 * (t0 + t1), 2.0 * math.pi)


def _zip_rings(inner, th_in, outer, th_out):
    """Triangulate the annulus between two rings by merging node angles."""
    na, nb = len(inner), len(outer)
    tris = []
    i = j = 0
    # unwrapped angle of the k-th step around each ring
    ang_a = lambda k: th_in[k % na] + 2.0 * math.pi * (k // na)
    ang_b = lambda k: th_out[k % nb] + 2.0 * math.pi * (k // nb)
    while i < na or j < nb:
        adv_a = i < na and (j >= nb or ang_a(i + 1) <= ang_b(j + 1))
        if adv_a:
            tris.append((inner[i % na], outer[j % nb], inner[(i + 1) % na]))
            i += 1
        else:
            tris.append((inner[i % na], outer[j % nb], outer[(j + 1) % nb]))
            j += 1
    return tris


# ---------------------------------------------------------------------------
# local refinement
# ---------------------------------------------------------------------------


def refine_local(mesh: TriMesh, center, radius: float, levels: int) -> TriMesh:
    """Bisect all triangles within `radius` of `center` `levels` times.

    Longest-edge bisection with conformity closure; new boundary nodes on
    circular-arc segments (both endpoints on the unit circle) are projected
    onto the exact circle. With levels=0 the input mesh is returned unchanged.
    """
    if levels < 0:
        raise InvalidParameterError("levels must be >= 0")
    if levels == 0:
        return mesh
    if radius <= 0:
        raise InvalidParameterError("radius must be > 0")
    center = np.asarray(center, dtype=float)
    for _ in range(levels):
        mesh = _bisect_pass(mesh, center, radius, sweep_budget=10 * levels)
    return mesh


def _bisect_pass(mesh, center, radius, sweep_budget):
    nodes = [tuple(p) for p in mesh.nodes]
    coords = np.array(nodes)
    tris = [tuple(int(v) for v in t) for t in mesh.triangles]
    alive = [True] * len(tris)
    bmark = {_ekey(int(a), int(b)): int(m) for a, b, m in mesh.boundary_edges}
    on_circle = np.abs(np.linalg.norm(coords, axis=1) - 1.0) < CIRCLE_TOL
    circle_flags = list(on_circle)
    midpoint = {}

    def get_midpoint(a, b):
        e = _ekey(a, b)
        if e in midpoint:
            return midpoint[e]
        p = 0.5 * (np.asarray(nodes[a]) + np.asarray(nodes[b]))
        proj = e in bmark and circle_flags[a] and circle_flags[b]
        if proj:
            p = p / np.linalg.norm(p)  # arc midpoint
        m = len(nodes)
        nodes.append(tuple(p))
        circle_flags.append(bool(proj))
        midpoint[e] = m
        if e in bmark:
            marker = bmark.pop(e)
            bmark[_ekey(a, m)] = marker
            bmark[_ekey(m, b)] = marker
        return m

    def longest_edge(t):
        best = None
        for i in range(3):
            a, b = t[i], t[(i + 1) % 3]
            d = np.asarray(nodes[a]) - np.asarray(nodes[b])
            # deterministic tie-break on the node pair
            key = (-float(d @ d), _ekey(a, b))
            if best is None or key < best[0]:
                best = (key, i)
        return best[1]

    def split(ti):
        t = tris[ti]
        i = longest_edge(t)
        a, b, c = t[i], t[(i + 1) % 3], t[(i + 2) % 3]
        m = get_midpoint(a, b)
        alive[ti] = False
        tris.append((a, m, c))
        alive.append(True)
        tris.append((m, b, c))
        alive.append(True)

    d = coords[[list(t) for t in tris]] - center
    within = (np.linalg.norm(d, axis=2) <= radius).any(axis=1)
    for ti in np.flatnonzero(within):
        split(int(ti))

    for _ in range(max(sweep_budget, 10)):
        dirty = False
        for ti in range(len(tris)):
            if not alive[ti]:
                continue
            t = tris[ti]
            if any(
                _ekey(t[i], t[(i + 1) % 3]) in midpoint for i in range(3)
            ):
                split(ti)
                dirty = True
        if not dirty:
            break
    else:
        raise RefinementError(
            f"conformity closure did not terminate within {max(sweep_budget, 10)} sweeps"
        )

    new_tris = [t for t, a in zip(tris, alive) if a]
    new_bnd = [(a, b, m) for (a, b), m in sorted(bmark.items())]
    return TriMesh(np.array(nodes), np.array(new_tris), np.array(new_bnd))


# ---------------------------------------------------------------------------
# glmesh text format
# ---------------------------------------------------------------------------


def write_mesh(mesh: TriMesh, path) -> None:
    """Write the sectioned plain-text glmesh format (see read_mesh)."""
    with open(path, "w", newline="\n") as f:
        f.write("glmesh 1\n")
        f.write(f"nodes {mesh.n_nodes}\n")
        for x, y in mesh.nodes:
            f.write(f"{x:.17g} {y:.17g}\n")
        f.write(f"triangles {mesh.n_triangles}\n")
        for i, j, k in mesh.triangles:
            f.write(f"{i} {j} {k}\n")
        f.write(f"boundary {len(mesh.boundary_edges)}\n")
        for a, b, m in mesh.boundary_edges:
            f.write(f"{a} {b} {m}\n")


def read_mesh(path) -> TriMesh:
    """Parse a glmesh file.

    Format: header line ``glmesh 1``; section ``nodes N`` with N ``x y``
    lines; ``triangles M`` with M ``i j k`` lines (0-based); ``boundary K``
    with K ``a b marker`` lines. Blank lines and ``#`` comments are ignored.
    Clockwise triangles are accepted and reoriented.
    """
    with open(path) as f:
        raw = f.readlines()
    lines = []  # (lineno, text)
    for ln, text in enumerate(raw, start=1):
        text = text.split("#", 1)[0].strip()
        if text:
            lines.append((ln, text))
    pos = 0

    def fail(ln, msg):
        raise MeshFormatError(f"{path}: line {ln}: {msg}")

    def next_line(what):
        nonlocal pos
        if pos >= len(lines):
            raise MeshFormatError(f"{path}: unexpected end of file, expected {what}")
        ln, text = lines[pos]
        pos += 1
        return ln, text

    ln, header = next_line("header")
    if header.split() != ["glmesh", "1"]:
        fail(ln, f"bad header {header!r}, expected 'glmesh 1'")

    def section(name, width, cast):
        ln, text = next_line(f"section '{name}'")
        parts = text.split()
        if len(parts) != 2 or parts[0] != name:
            fail(ln, f"expected section '{name} N', got {text!r}")
        try:
            count = int(parts[1])
        except ValueError:
            fail(ln, f"bad count in section header {text!r}")
        rows = []
        for _ in range(count):
            ln2, t2 = next_line(f"{name} entry")
            p = t2.split()
            if len(p) != width:
                fail(ln2, f"expected {width} fields, got {len(p)}")
            try:
                rows.append([cast(v) for v in p])
            except ValueError:
                fail(ln2, f"bad value in {t2!r}")
        return rows

    nodes = np.array(section("nodes", 2, float), dtype=float).reshape(-1, 2)
    tris = np.array(section("triangles", 3, int), dtype=np.int64).reshape(-1, 3)
    bnd = np.array(section("boundary", 3, int), dtype=np.int64).reshape(-1, 3)
    if pos != len(lines):
        fail(lines[pos][0], f"trailing content {lines[pos][1]!r}")

    n = nodes.shape[0]
    for ti, t in enumerate(tris):
        for v in t:
            if v < 0 or v >= n:
                raise MeshFormatError(
                    f"{path}: triangle {ti} references missing node {int(v)} "
                    f"(only {n} nodes)"
                )
    # reorient clockwise triangles
    p = nodes[tris]
    cross = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
        p[:, 1, 1] - p[:, 0, 1]
    ) * (p[:, 2, 0] - p[:, 0, 0])
    flip = cross < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    try:
        return TriMesh(nodes, tris, bnd)
    except MeshError as exc:
        raise MeshFormatError(f"{path}: {exc}") from exc
