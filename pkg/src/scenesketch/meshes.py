"""Triangle meshes: tube extrusion along strokes, bounds, workspace
normalization, brush sculpting, and convex hulls.

All constructors produce watertight, outward-oriented meshes (signed
volume > 0); diagnostics for both properties live here as well.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateBounds, DegenerateInput, DegenerateSegment, EmptyMesh
from .strokes import Point3

_MERGE_TOL = 1e-9

DEFAULT_BRUSH_RADIUS = 0.05  # meters
DEFAULT_BRUSH_STRENGTH = 0.5


@dataclass
class Mesh:
    vertices: list[Point3]
    triangles: list[tuple[int, int, int]]

    def __post_init__(self):
        n = len(self.vertices)
        for t in self.triangles:
            a, b, c = t
            if not (0 <= a < n and 0 <= b < n and 0 <= c < n):
                raise ValueError(f"triangle {t} references a missing vertex")
            if a == b or b == c or a == c:
                raise ValueError(f"degenerate triangle {t}")

    def vertex_array(self) -> np.ndarray:
        return np.array([p.as_tuple() for p in self.vertices], dtype=float)

    def triangle_array(self) -> np.ndarray:
        return np.array(self.triangles, dtype=int).reshape(-1, 3)

    @staticmethod
    def from_arrays(vertices: np.ndarray, triangles: Iterable[Sequence[int]]) -> "Mesh":
        pts = [Point3(float(x), float(y), float(z)) for x, y, z in np.asarray(vertices, dtype=float)]
        return Mesh(pts, [(int(a), int(b), int(c)) for a, b, c in triangles])


@dataclass(frozen=True)
class AABB:
    min: Point3
    max: Point3

    def __post_init__(self):
        if self.min.x > self.max.x or self.min.y > self.max.y or self.min.z > self.max.z:
            raise ValueError("AABB min must be <= max componentwise")

    @staticmethod
    def from_points(points: Sequence[Point3]) -> "AABB":
        if not points:
            raise ValueError("need at least one point")
        xs = [p.x for p in points]
        ys = [p.y for p in points]
        zs = [p.z for p in points]
        return AABB(Point3(min(xs), min(ys), min(zs)), Point3(max(xs), max(ys), max(zs)))

    @property
    def center(self) -> Point3:
        return Point3((self.min.x + self.max.x) / 2.0,
                      (self.min.y + self.max.y) / 2.0,
                      (self.min.z + self.max.z) / 2.0)

    @property
    def extents(self) -> Point3:
        return self.max - self.min

    @property
    def max_extent(self) -> float:
        e = self.extents
        return max(e.x, e.y, e.z)

    def corners(self) -> list[Point3]:
        lo, hi = self.min, self.max
        return [Point3(x, y, z)
                for x in (lo.x, hi.x) for y in (lo.y, hi.y) for z in (lo.z, hi.z)]

    def translated(self, offset: Point3) -> "AABB":
        return AABB(self.min + offset, self.max + offset)

    def contains(self, p: Point3, tol: float = 0.0) -> bool:
        return (self.min.x - tol <= p.x <= self.max.x + tol
                and self.min.y - tol <= p.y <= self.max.y + tol
                and self.min.z - tol <= p.z <= self.max.z + tol)


class BrushMode(Enum):
    RAISE = "raise"
    LOWER = "lower"
    SMOOTH = "smooth"


@dataclass(frozen=True)
class Brush:
    center: Point3
    radius: float = DEFAULT_BRUSH_RADIUS
    strength: float = DEFAULT_BRUSH_STRENGTH
    mode: BrushMode = BrushMode.RAISE

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("brush radius must be > 0")
        if not (0 < self.strength <= 1):
            raise ValueError("brush strength must be in (0, 1]")


def compute_aabb(mesh: Mesh) -> AABB:
    if not mesh.vertices:
        raise EmptyMesh("mesh has no vertices")
    return AABB.from_points(mesh.vertices)


def _collapse_duplicates(points: Sequence[Point3]) -> list[Point3]:
    out: list[Point3] = []
    for p in points:
        if out and p.distance_to(out[-1]) < _MERGE_TOL:
            continue
        out.append(p)
    return out


def tube_mesh_from_stroke(points: Sequence[Point3], radius: float, sides: int) -> Mesh:
    """Closed tube around a polyline with flat end caps.

    Ring frames are carried along the polyline by rotating the previous frame
    with the tangent change (parallel transport), so the tube does not twist.
    Consecutive duplicate points are collapsed. Vertex count after collapsing
    is len(points)*sides + 2.
    """
    if radius <= 0:
        raise ValueError("radius must be > 0")
    if sides < 3:
        raise ValueError("need at least 3 sides")
    pts = _collapse_duplicates(points)
    if len(pts) < 2:
        raise DegenerateSegment("stroke collapses to a single point")

    n = len(pts)
    tangents: list[np.ndarray] = []
    arr = np.array([p.as_tuple() for p in pts])
    for i in range(n):
        if i == 0:
            d = arr[1] - arr[0]
        elif i == n - 1:
            d = arr[-1] - arr[-2]
        else:
            d = arr[i + 1] - arr[i - 1]
        tangents.append(d / np.linalg.norm(d))

    # initial normal: axis least aligned with the first tangent
    t0 = tangents[0]
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(t0)))] = 1.0
    normal = np.cross(axis, t0)
    normal /= np.linalg.norm(normal)

    frames = []
    prev_t = t0
    for i in range(n):
        t = tangents[i]
        rot_axis = np.cross(prev_t, t)
        s = np.linalg.norm(rot_axis)
        c = float(np.dot(prev_t, t))
        if s > 1e-12:
            k = rot_axis / s
            ang = math.atan2(s, c)
            normal = (normal * math.cos(ang)
                      + np.cross(k, normal) * math.sin(ang)
                      + k * np.dot(k, normal) * (1 - math.cos(ang)))
            normal /= np.linalg.norm(normal)
        binormal = np.cross(t, normal)
        frames.append((normal.copy(), binormal))
        prev_t = t

    verts = np.empty((n * sides + 2, 3))
    for i in range(n):
        nrm, bnm = frames[i]
        for k in range(sides):
            ang = 2.0 * math.pi * k / sides
            verts[i * sides + k] = arr[i] + radius * (math.cos(ang) * nrm + math.sin(ang) * bnm)
    apex0 = n * sides
    apex1 = n * sides + 1
    verts[apex0] = arr[0]
    verts[apex1] = arr[-1]

    tris: list[tuple[int, int, int]] = []
    for i in range(n - 1):
        for k in range(sides):
            k1 = (k + 1) % sides
            a, b = i * sides + k, i * sides + k1
            c, d = (i + 1) * sides + k, (i + 1) * sides + k1
            tris.append((a, c, d))
            tris.append((a, d, b))
    for k in range(sides):
        k1 = (k + 1) % sides
        tris.append((apex0, k, k1))
        tris.append((apex1, (n - 1) * sides + k1, (n - 1) * sides + k))

    mesh = Mesh.from_arrays(verts, tris)
    if signed_volume(mesh) < 0:
        mesh = flipped(mesh)
    return mesh


def normalize_to_workspace(mesh: Mesh, sketch_bounds: AABB) -> Mesh:
    """Uniformly scale and translate so the mesh AABB is centered on
    ``sketch_bounds`` with matching largest extent."""
    e = sketch_bounds.extents
    if max(e.x, e.y, e.z) < 1e-9:
        raise DegenerateBounds("sketch bounds have no extent")
    box = compute_aabb(mesh)
    mesh_extent = box.max_extent
    scale = 1.0 if mesh_extent < 1e-12 else sketch_bounds.max_extent / mesh_extent
    mc, sc = box.center, sketch_bounds.center
    out = [Point3(sc.x + scale * (p.x - mc.x),
                  sc.y + scale * (p.y - mc.y),
                  sc.z + scale * (p.z - mc.z)) for p in mesh.vertices]
    return Mesh(out, list(mesh.triangles))


def vertex_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Area-weighted vertex normals; rows for isolated vertices are zero."""
    normals = np.zeros_like(vertices)
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    face = np.cross(b - a, c - a)  # magnitude = 2 * area
    for col in range(3):
        np.add.at(normals, triangles[:, col], face)
    norms = np.linalg.norm(normals, axis=1)
    ok = norms > 1e-20
    normals[ok] /= norms[ok, None]
    return normals


def _edge_neighbors(n_vertices: int, triangles: np.ndarray) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(n_vertices)]
    for a, b, c in triangles:
        adj[a].update((b, c))
        adj[b].update((a, c))
        adj[c].update((a, b))
    return adj


def sculpt(mesh: Mesh, brush: Brush) -> Mesh:
    """Apply one brush pass. RAISE/LOWER displace along vertex normals with a
    smoothstep falloff; SMOOTH pulls vertices toward their edge-neighbor
    centroid. Topology is untouched; all updates read original positions."""
    if not mesh.vertices:
        raise EmptyMesh("cannot sculpt an empty mesh")
    verts = mesh.vertex_array()
    tris = mesh.triangle_array()
    center = np.array(brush.center.as_tuple())
    dist = np.linalg.norm(verts - center, axis=1)
    inside = dist <= brush.radius
    new = verts.copy()

    if brush.mode is BrushMode.SMOOTH:
        adj = _edge_neighbors(len(verts), tris)
        for i in np.nonzero(inside)[0]:
            if not adj[i]:
                continue
            centroid = verts[list(adj[i])].mean(axis=0)
            new[i] = verts[i] + brush.strength * (centroid - verts[i])
    else:
        normals = vertex_normals(verts, tris)
        u = np.clip(dist / brush.radius, 0.0, 1.0)
        falloff = (1.0 - u) ** 2 * (1.0 + 2.0 * u)  # smoothstep from 1 at center to 0 at rim
        amount = brush.strength * brush.radius * falloff
        if brush.mode is BrushMode.LOWER:
            amount = -amount
        new[inside] += normals[inside] * amount[inside, None]

    return Mesh([Point3(*row) for row in new], list(mesh.triangles))


# --- convex hull ---

def _dedup_points(arr: np.ndarray) -> np.ndarray:
    kept: list[int] = []
    for i in range(len(arr)):
        if kept and np.min(np.linalg.norm(arr[kept] - arr[i], axis=1)) < _MERGE_TOL:
            continue
        kept.append(i)
    return np.array(kept, dtype=int)


def _initial_simplex(pts: np.ndarray, tol: float) -> list[int]:
    lo = np.argmin(pts, axis=0)
    hi = np.argmax(pts, axis=0)
    cand = list(dict.fromkeys(list(lo) + list(hi)))
    best, i0, i1 = -1.0, -1, -1
    for a in cand:
        for b in cand:
            d = float(np.linalg.norm(pts[a] - pts[b]))
            if d > best:
                best, i0, i1 = d, a, b
    if best < tol:
        raise DegenerateInput("all points coincide within tolerance")
    d01 = pts[i1] - pts[i0]
    d01 /= np.linalg.norm(d01)
    off = pts - pts[i0]
    perp = off - np.outer(off @ d01, d01)
    i2 = int(np.argmax(np.linalg.norm(perp, axis=1)))
    if np.linalg.norm(perp[i2]) < tol:
        raise DegenerateInput("points are collinear within tolerance")
    nrm = np.cross(pts[i1] - pts[i0], pts[i2] - pts[i0])
    nrm /= np.linalg.norm(nrm)
    plane_d = off @ nrm
    i3 = int(np.argmax(np.abs(plane_d)))
    if abs(plane_d[i3]) < tol:
        raise DegenerateInput("points are coplanar within tolerance")
    return [i0, i1, i2, i3]


def _face_planes(pts: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = pts[faces[:, 0]]
    nrm = np.cross(pts[faces[:, 1]] - a, pts[faces[:, 2]] - a)
    lens = np.linalg.norm(nrm, axis=1)
    lens[lens == 0] = 1.0
    nrm = nrm / lens[:, None]
    return nrm, np.einsum("ij,ij->i", nrm, a)


def convex_hull(points: Sequence[Point3], tol: float = 1e-9) -> Mesh:
    """Convex hull as a watertight outward-oriented triangle mesh.

    Incremental construction: start from an extreme tetrahedron, repeatedly
    insert the point farthest outside the current hull, replacing the faces
    it sees with a fan to the horizon. Points within ``tol`` of the hull are
    treated as interior.
    """
    pts_all = np.array([p.as_tuple() for p in points], dtype=float).reshape(-1, 3)
    if len(pts_all) < 4:
        raise DegenerateInput("need at least 4 points")
    keep = _dedup_points(pts_all)
    pts = pts_all[keep]
    if len(pts) < 4:
        raise DegenerateInput("fewer than 4 distinct points")

    i0, i1, i2, i3 = _initial_simplex(pts, tol)
    centroid = pts[[i0, i1, i2, i3]].mean(axis=0)
    faces = []
    for tri in ((i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)):
        a, b, c = tri
        nrm = np.cross(pts[b] - pts[a], pts[c] - pts[a])
        if np.dot(nrm, centroid - pts[a]) > 0:
            tri = (a, c, b)
        faces.append(tri)

    while True:
        farr = np.array(faces, dtype=int)
        nrm, d = _face_planes(pts, farr)
        dist = pts @ nrm.T - d  # (points, faces) signed distances
        best_per_point = dist.max(axis=1)
        p_idx = int(np.argmax(best_per_point))
        if best_per_point[p_idx] <= tol:
            break
        visible = set(np.nonzero(dist[p_idx] > tol)[0].tolist())
        twin = {}
        for fi, (a, b, c) in enumerate(faces):
            twin[(a, b)] = fi
            twin[(b, c)] = fi
            twin[(c, a)] = fi
        horizon = []
        for fi in visible:
            a, b, c = faces[fi]
            for e in ((a, b), (b, c), (c, a)):
                if twin[(e[1], e[0])] not in visible:
                    horizon.append(e)
        faces = [f for fi, f in enumerate(faces) if fi not in visible]
        for a, b in horizon:
            faces.append((a, b, p_idx))

    used = sorted({i for f in faces for i in f})
    remap = {old: new for new, old in enumerate(used)}
    verts = [Point3(*pts[i]) for i in used]
    tris = [(remap[a], remap[b], remap[c]) for a, b, c in faces]
    return Mesh(verts, tris)


# --- diagnostics ---

def edge_counts(mesh: Mesh) -> tuple[Counter, Counter]:
    """(undirected, directed) edge incidence counters."""
    undirected: Counter = Counter()
    directed: Counter = Counter()
    for a, b, c in mesh.triangles:
        for e in ((a, b), (b, c), (c, a)):
            directed[e] += 1
            undirected[tuple(sorted(e))] += 1
    return undirected, directed


def is_watertight(mesh: Mesh) -> bool:
    """Every undirected edge on exactly 2 faces, every directed edge once
    (closed and consistently oriented)."""
    if not mesh.triangles:
        return False
    undirected, directed = edge_counts(mesh)
    return (all(v == 2 for v in undirected.values())
            and all(v == 1 for v in directed.values()))


def signed_volume(mesh: Mesh) -> float:
    """Divergence-theorem volume; positive for outward-oriented closed meshes."""
    verts = mesh.vertex_array()
    tris = mesh.triangle_array()
    a = verts[tris[:, 0]]
    b = verts[tris[:, 1]]
    c = verts[tris[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def flipped(mesh: Mesh) -> Mesh:
    return Mesh(list(mesh.vertices), [(a, c, b) for a, b, c in mesh.triangles])


def convexity_residual(mesh: Mesh) -> float:
    """Largest distance of any vertex above any face plane (0 for convex)."""
    verts = mesh.vertex_array()
    tris = mesh.triangle_array()
    nrm, d = _face_planes(verts, tris)
    return float(np.max(verts @ nrm.T - d))
