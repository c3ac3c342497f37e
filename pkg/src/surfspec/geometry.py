"""Benchmark surface meshes, refinement, adjacency and discrete spaces.

All meshes are oriented flat-triangle surface triangulations.  Closed
meshes carry outward normals (positive signed volume of the cone
decomposition); open screens have consistently oriented normals and a
boundary whose edges belong to exactly one panel.
"""
import json

import numpy as np

from .errors import CapacityError, MeshValidationError

DISJOINT = 0
COMMON_VERTEX = 1
COMMON_EDGE = 2
IDENTICAL = 3

_CLASS_NAMES = {
    DISJOINT: "Disjoint",
    COMMON_VERTEX: "CommonVertex",
    COMMON_EDGE: "CommonEdge",
    IDENTICAL: "Identical",
}


class SurfaceMesh:
    """Immutable oriented triangle mesh.

    Attributes
    ----------
    vertices : (nv, 3) float array
    panels : (np, 3) int array, vertex index triples
    panel_areas : (np,) positive areas
    panel_normals : (np, 3) unit normals
    panel_diameters : (np,) longest edge per panel
    is_closed : bool
    mesh_size : float, max panel diameter
    projection : None or "sphere"; refined vertices are re-projected when set
    """

    def __init__(self, vertices, panels, closed=None, projection=None, validate=True):
        vertices = np.ascontiguousarray(vertices, dtype=float)
        panels = np.ascontiguousarray(panels, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise MeshValidationError("vertices must be an (n, 3) array")
        if panels.ndim != 2 or panels.shape[1] != 3:
            raise MeshValidationError("panels must be an (n, 3) array")
        self.vertices = vertices
        self.panels = panels
        if validate:
            self._validate_indices()

        tri = vertices[panels]
        e01 = tri[:, 1] - tri[:, 0]
        e02 = tri[:, 2] - tri[:, 0]
        cross = np.cross(e01, e02)
        twice_area = np.linalg.norm(cross, axis=1)
        if validate and np.any(twice_area <= 0.0):
            bad = int(np.argmin(twice_area))
            raise MeshValidationError(f"panel {bad}: zero or negative area")
        self.panel_areas = 0.5 * twice_area
        self.panel_normals = cross / twice_area[:, None]
        self.panel_centroids = tri.mean(axis=1)
        edges = np.stack([
            np.linalg.norm(tri[:, 0] - tri[:, 1], axis=1),
            np.linalg.norm(tri[:, 1] - tri[:, 2], axis=1),
            np.linalg.norm(tri[:, 2] - tri[:, 0], axis=1),
        ], axis=1)
        self.panel_diameters = edges.max(axis=1)
        self.mesh_size = float(self.panel_diameters.max())

        edge_count = self._edge_counts()
        if closed is None:
            closed = bool(np.all(edge_count == 2))
        if validate:
            if closed and np.any(edge_count != 2):
                raise MeshValidationError("closed mesh has an edge not shared by exactly two panels")
            if not closed and np.any(edge_count > 2):
                raise MeshValidationError("open mesh has an edge shared by more than two panels")
        self.is_closed = closed
        if validate and closed and self.signed_volume() <= 0.0:
            raise MeshValidationError("closed mesh is not outward oriented (signed volume <= 0)")
        self.projection = projection

        for arr in (self.vertices, self.panels, self.panel_areas,
                    self.panel_normals, self.panel_centroids, self.panel_diameters):
            arr.flags.writeable = False

    def _validate_indices(self):
        nv = len(self.vertices)
        for i, p in enumerate(self.panels):
            if np.any(p < 0) or np.any(p >= nv):
                raise MeshValidationError(f"panel {i}: vertex index out of range")
            if len(set(p.tolist())) != 3:
                raise MeshValidationError(f"panel {i}: duplicated vertex indices")

    def _edge_counts(self):
        e = np.concatenate([self.panels[:, [0, 1]], self.panels[:, [1, 2]], self.panels[:, [2, 0]]])
        e.sort(axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return counts

    def signed_volume(self):
        tri = self.vertices[self.panels]
        return float(np.einsum("ij,ij->", np.cross(tri[:, 0], tri[:, 1]), tri[:, 2]) / 6.0)

    @property
    def n_panels(self):
        return len(self.panels)

    @property
    def n_vertices(self):
        return len(self.vertices)

    def total_area(self):
        return float(self.panel_areas.sum())

    def __repr__(self):
        kind = "closed" if self.is_closed else "open"
        return (f"SurfaceMesh({self.n_panels} panels, {self.n_vertices} vertices, "
                f"{kind}, h={self.mesh_size:.4g})")


class DofSpace:
    """Discrete trial/test space on a mesh.

    kind "S0": piecewise constants, one dof per panel.
    kind "S1": continuous piecewise linears, one dof per vertex; on open
    screens boundary vertices can be excluded (homogeneous condition).
    """

    def __init__(self, mesh, kind, exclude_boundary=False):
        if kind not in ("S0", "S1"):
            raise ValueError(f"unknown space kind {kind!r}")
        self.mesh = mesh
        self.kind = kind
        if kind == "S0":
            self.dof_count = mesh.n_panels
            self.vertex_to_dof = None
        else:
            keep = np.ones(mesh.n_vertices, dtype=bool)
            if exclude_boundary:
                keep[boundary_vertices(mesh)] = False
            v2d = np.full(mesh.n_vertices, -1, dtype=np.int64)
            v2d[keep] = np.arange(int(keep.sum()))
            self.vertex_to_dof = v2d
            self.dof_count = int(keep.sum())


def boundary_vertices(mesh):
    """Vertices on edges that belong to exactly one panel."""
    e = np.concatenate([mesh.panels[:, [0, 1]], mesh.panels[:, [1, 2]], mesh.panels[:, [2, 0]]])
    e = np.sort(e, axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    return np.unique(uniq[counts == 1])


# ----------------------------------------------------------------------
# generators

_SPHERE_LEVEL_GUARD = 7


def _icosahedron():
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    v /= np.linalg.norm(v[0])
    f = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    # orient outward
    tri = v[f]
    n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    flip = np.einsum("ij,ij->i", n, tri.mean(axis=1)) < 0
    f[flip] = f[flip][:, [0, 2, 1]]
    return v, f


def icosphere(m):
    """Icosahedron with each face split into m^2 triangles, projected to the
    unit sphere.  Vertex identification along shared edges is structural
    (no floating point comparisons)."""
    if m < 1:
        raise ValueError("subdivision m must be >= 1")
    v0, f0 = _icosahedron()
    verts = [p for p in v0]
    edge_cache = {}
    panels = []

    def edge_point(a, b, i):
        key = (a, b, i) if a < b else (b, a, m - i)
        if key not in edge_cache:
            edge_cache[key] = len(verts)
            verts.append(v0[a] + (v0[b] - v0[a]) * (i / m))
        return edge_cache[key]

    for (A, B, C) in f0:
        face_cache = {}

        def node(i, j):
            k = m - i - j
            if k == m:
                return A
            if i == m:
                return B
            if j == m:
                return C
            if j == 0:
                return edge_point(A, B, i)
            if i == 0:
                return edge_point(A, C, j)
            if k == 0:
                return edge_point(B, C, j)
            if (i, j) not in face_cache:
                face_cache[(i, j)] = len(verts)
                verts.append(v0[A] + (v0[B] - v0[A]) * (i / m) + (v0[C] - v0[A]) * (j / m))
            return face_cache[(i, j)]

        for i in range(m):
            for j in range(m - i):
                panels.append([node(i, j), node(i + 1, j), node(i, j + 1)])
                if i + j < m - 1:
                    panels.append([node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)])

    verts = np.array(verts)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    return SurfaceMesh(verts, np.array(panels, dtype=np.int64), projection="sphere")


def make_sphere(level):
    """Unit-sphere mesh: icosahedron subdivided `level` times (20*4^level panels)."""
    if level < 0:
        raise ValueError("level must be non-negative")
    if level > _SPHERE_LEVEL_GUARD:
        raise CapacityError(f"sphere level {level} exceeds guard {_SPHERE_LEVEL_GUARD}")
    return icosphere(2 ** level)


class _VertexPool:
    """Deduplicates lattice vertices via exact integer keys."""

    def __init__(self, scale):
        self.scale = scale
        self.table = {}
        self.points = []

    def add(self, key_ints):
        key = tuple(key_ints)
        if key not in self.table:
            self.table[key] = len(self.points)
            self.points.append(np.array(key_ints, dtype=float) / self.scale)
        return self.table[key]


def _crisscross_face(pool, origin, du, dv, nu, nv, scale, flip):
    """Triangulate an nu x nv rectangle grid into 4 triangles per cell
    (cell-center split).  Integer lattice keys: origin + i*du + j*dv in
    units of 1/(2*scale); centers land on odd coordinates."""
    panels = []
    o = np.asarray(origin)
    du = np.asarray(du)
    dv = np.asarray(dv)
    for i in range(nu):
        for j in range(nv):
            c00 = pool.add(o + 2 * i * du + 2 * j * dv)
            c10 = pool.add(o + 2 * (i + 1) * du + 2 * j * dv)
            c11 = pool.add(o + 2 * (i + 1) * du + 2 * (j + 1) * dv)
            c01 = pool.add(o + 2 * i * du + 2 * (j + 1) * dv)
            cc = pool.add(o + (2 * i + 1) * du + (2 * j + 1) * dv)
            quads = [(c00, c10, cc), (c10, c11, cc), (c11, c01, cc), (c01, c00, cc)]
            for (a, b, c) in quads:
                panels.append((a, c, b) if flip else (a, b, c))
    return panels


def make_cube(n=2):
    """Closed surface of the unit cube [0,1]^3, crisscross-triangulated with
    n x n cells per face."""
    scale = 2 * n
    pool = _VertexPool(scale)
    panels = []
    S = 2 * n  # full side length in half-lattice units
    faces = [
        # (origin, du, dv, flip) with outward orientation
        ((0, 0, 0), (0, 1, 0), (1, 0, 0), False),   # z=0, normal -z
        ((0, 0, S), (1, 0, 0), (0, 1, 0), False),   # z=1, normal +z
        ((0, 0, 0), (1, 0, 0), (0, 0, 1), False),   # y=0, normal -y
        ((0, S, 0), (0, 0, 1), (1, 0, 0), False),   # y=1, normal +y
        ((0, 0, 0), (0, 0, 1), (0, 1, 0), False),   # x=0, normal -x
        ((S, 0, 0), (0, 1, 0), (0, 0, 1), False),   # x=1, normal +x
    ]
    for origin, du, dv, flip in faces:
        panels += _crisscross_face(pool, origin, du, dv, n, n, scale, flip)
    return SurfaceMesh(np.array(pool.points), np.array(panels, dtype=np.int64))


def make_lshape(n=5):
    """Closed boundary of the L-shaped prism (-1,1)^3 minus [0,1]^2 x [-1,1].

    Crisscross triangulation with cell size 1/n; total area 22.  The default
    n=5 gives mesh size h=0.2; one refinement yields h=0.1.
    """
    scale = 2 * n
    pool = _VertexPool(scale)
    panels = []
    # L cross-section polygon (ccw), coordinates in cell units relative to (-1,-1)
    poly = [(0, 0), (2 * n, 0), (2 * n, n), (n, n), (n, 2 * n), (0, 2 * n)]

    def in_lshape(i, j):
        # cell with corner (i, j): inside the L iff not in the removed quadrant
        return not (i >= n and j >= n)

    S = 2 * n
    # top (z=+1, outward +z) and bottom (z=-1, outward -z) faces
    for i in range(2 * n):
        for j in range(2 * n):
            if not in_lshape(i, j):
                continue
            top = _crisscross_face(pool, (2 * i, 2 * j, 2 * S), (1, 0, 0), (0, 1, 0), 1, 1, scale, False)
            bot = _crisscross_face(pool, (2 * i, 2 * j, 0), (0, 1, 0), (1, 0, 0), 1, 1, scale, False)
            panels += top + bot
    # lateral faces along the polygon edges, z spanning [0, 2n] cells
    for (a, b) in zip(poly, poly[1:] + poly[:1]):
        dx = np.sign(b[0] - a[0])
        dy = np.sign(b[1] - a[1])
        length = abs(b[0] - a[0]) + abs(b[1] - a[1])
        origin = (2 * a[0], 2 * a[1], 0)
        du = (dx, dy, 0)
        dv = (0, 0, 1)
        panels += _crisscross_face(pool, origin, du, dv, length, 2 * n, scale, False)
    pts = np.array(pool.points)
    # shift from [0,2]^2 x [0,2] cell coordinates to the physical box
    pts = pts - 1.0
    return SurfaceMesh(pts, np.array(panels, dtype=np.int64))


def make_screen(n=8):
    """Open unit-square screen [0,1]^2 x {0} with 2*n^2 panels (diagonal
    split), all normals (0, 0, 1)."""
    pool = _VertexPool(n)
    panels = []
    for i in range(n):
        for j in range(n):
            c00 = pool.add((i, j, 0))
            c10 = pool.add((i + 1, j, 0))
            c11 = pool.add((i + 1, j + 1, 0))
            c01 = pool.add((i, j + 1, 0))
            panels.append((c00, c10, c11))
            panels.append((c00, c11, c01))
    return SurfaceMesh(np.array(pool.points), np.array(panels, dtype=np.int64), closed=False)


def refine(mesh):
    """Split every panel into four by edge midpoints.

    Sphere-projected meshes (mesh.projection == "sphere") get their new
    vertices re-projected to the unit sphere.
    """
    verts = [v for v in mesh.vertices]
    cache = {}

    def midpoint(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in cache:
            cache[key] = len(verts)
            verts.append(0.5 * (mesh.vertices[a] + mesh.vertices[b]))
        return cache[key]

    panels = []
    for (a, b, c) in mesh.panels:
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        panels += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    verts = np.array(verts)
    if mesh.projection == "sphere":
        verts = verts / np.linalg.norm(verts, axis=1)[:, None]
    return SurfaceMesh(verts, np.array(panels, dtype=np.int64),
                       closed=mesh.is_closed, projection=mesh.projection)


# ----------------------------------------------------------------------
# panel-pair classification

class PanelPairClass:
    """Adjacency class of a panel pair plus matched local vertex orders.

    perm_i / perm_j reorder the local vertices of the two panels so that
    shared vertices come first and, for common edges, in the same order on
    both panels (the reference order assumed by the singular quadrature).
    """

    __slots__ = ("kind", "perm_i", "perm_j")

    def __init__(self, kind, perm_i, perm_j):
        self.kind = kind
        self.perm_i = perm_i
        self.perm_j = perm_j

    @property
    def name(self):
        return _CLASS_NAMES[self.kind]

    def __repr__(self):
        return f"PanelPairClass({self.name}, {self.perm_i}, {self.perm_j})"


def classify_pair(mesh, i, j):
    """Classify panels (i, j) by vertex-set intersection and return the
    matched local permutations."""
    if not (0 <= i < mesh.n_panels and 0 <= j < mesh.n_panels):
        raise IndexError(f"panel index out of range: ({i}, {j})")
    if i == j:
        return PanelPairClass(IDENTICAL, (0, 1, 2), (0, 1, 2))
    pi = mesh.panels[i]
    pj = mesh.panels[j]
    shared = [v for v in pi if v in pj]
    if len(shared) == 0:
        return PanelPairClass(DISJOINT, (0, 1, 2), (0, 1, 2))

    def perm_for(panel, first):
        rest = [a for a in range(3) if panel[a] not in first]
        lead = [int(np.where(panel == v)[0][0]) for v in first]
        return tuple(lead + rest)

    if len(shared) == 1:
        return PanelPairClass(COMMON_VERTEX, perm_for(pi, shared), perm_for(pj, shared))
    if len(shared) == 2:
        return PanelPairClass(COMMON_EDGE, perm_for(pi, shared), perm_for(pj, shared))
    raise MeshValidationError(f"panels {i} and {j} share all three vertices but differ")


def vertex_panel_adjacency(mesh):
    """CSR-style (offsets, panel_ids): the panels touching each vertex."""
    counts = np.zeros(mesh.n_vertices + 1, dtype=np.int64)
    for p in mesh.panels.ravel():
        counts[p + 1] += 1
    offsets = np.cumsum(counts)
    data = np.empty(offsets[-1], dtype=np.int64)
    cursor = offsets[:-1].copy()
    for ip, panel in enumerate(mesh.panels):
        for v in panel:
            data[cursor[v]] = ip
            cursor[v] += 1
    return offsets, data


def panel_neighbors(mesh):
    """Sorted lists of vertex-sharing panels per panel (excluding self), as
    CSR (offsets, ids)."""
    offsets, data = vertex_panel_adjacency(mesh)
    neigh = []
    for ip, panel in enumerate(mesh.panels):
        s = set()
        for v in panel:
            s.update(data[offsets[v]:offsets[v + 1]].tolist())
        s.discard(ip)
        neigh.append(sorted(s))
    counts = np.array([len(s) for s in neigh], dtype=np.int64)
    off = np.concatenate([[0], np.cumsum(counts)])
    flat = np.concatenate([np.array(s, dtype=np.int64) for s in neigh]) if off[-1] else \
        np.empty(0, dtype=np.int64)
    return off, flat


# ----------------------------------------------------------------------
# mesh I/O (JSON)

def mesh_io_write(mesh, path):
    """Write the documented JSON mesh format (17-significant-digit decimals)."""
    rows = []
    for v in mesh.vertices:
        rows.append("[" + ",".join(f"{x:.17g}" for x in v) + "]")
    panels = ",".join("[%d,%d,%d]" % tuple(p) for p in mesh.panels)
    parts = [
        '"vertices":[' + ",".join(rows) + "]",
        '"panels":[' + panels + "]",
        '"closed":' + ("true" if mesh.is_closed else "false"),
    ]
    if mesh.projection is not None:
        parts.append(f'"projection":"{mesh.projection}"')
    with open(path, "w") as fh:
        fh.write("{" + ",".join(parts) + "}")


def mesh_io_read(path):
    """Read a mesh JSON file, validating structure and indices."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MeshValidationError(f"malformed mesh file {path}: {exc}") from exc
    for key in ("vertices", "panels", "closed"):
        if key not in obj:
            raise MeshValidationError(f"mesh file missing key {key!r}")
    return SurfaceMesh(np.array(obj["vertices"], dtype=float),
                       np.array(obj["panels"], dtype=np.int64),
                       closed=bool(obj["closed"]),
                       projection=obj.get("projection"))
