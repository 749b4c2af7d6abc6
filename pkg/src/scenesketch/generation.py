"""Sketch-conditioned object generation.

The deep generative backend sits behind a small interface: a generator takes
an encoded sketch and returns a base mesh in workspace-local coordinates.
Two deterministic geometric baselines ship with the package so the whole
loop runs offline:

* ``tubes``  - the strokes themselves as a union of tube meshes;
* ``hull``   - the convex hull of all stroke points.

Stochastic "variants" are reproduced as seeded per-vertex jitter: variant 0
is the unjittered base shape, variants k >= 1 draw displacements from an RNG
keyed on (seed, k). Every variant is re-normalized to the sketch bounds, so
responses are a pure function of the request.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateInput, DegenerateSegment, EmptySketch, GenerationFailed
from .meshes import AABB, Mesh, compute_aabb, convex_hull, normalize_to_workspace, tube_mesh_from_stroke
from .strokes import Point3, Sketch

TUBE_RADIUS_FRACTION = 0.02  # of the sketch's largest extent
JITTER_FRACTION = 0.01
MAX_VARIANTS = 8


class GeneratorKind(Enum):
    TUBES = "tubes"
    HULL = "hull"


@dataclass(frozen=True)
class EncodedStroke:
    points: tuple[Point3, ...]
    timestamps: tuple[float, ...]


@dataclass(frozen=True)
class SketchEncoding:
    """Workspace-local stroke data with order and timing preserved."""

    strokes: tuple[EncodedStroke, ...]

    def all_points(self) -> list[Point3]:
        return [p for s in self.strokes for p in s.points]

    def bounds(self) -> AABB:
        return AABB.from_points(self.all_points())


@dataclass(frozen=True)
class GenerateRequest:
    request_id: str
    encoding: SketchEncoding
    generator: GeneratorKind = GeneratorKind.TUBES
    variants: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (1 <= self.variants <= MAX_VARIANTS):
            raise ValueError(f"variants must be in [1, {MAX_VARIANTS}]")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class GenerateResponse:
    request_id: str
    meshes: tuple[Mesh, ...]


def encode_sketch(sketch: Sketch) -> SketchEncoding:
    """World -> workspace-local transform with timestamps rebased to 0."""
    if not sketch.strokes:
        raise EmptySketch("sketch has no strokes")
    t0 = min(t for s in sketch.strokes for t in s.timestamps)
    strokes = tuple(
        EncodedStroke(
            points=tuple(sketch.workspace.to_local(p) for p in s.points),
            timestamps=tuple(t - t0 for t in s.timestamps),
        )
        for s in sketch.strokes
    )
    return SketchEncoding(strokes=strokes)


def _base_mesh(encoding: SketchEncoding, generator: GeneratorKind) -> Mesh:
    bounds = encoding.bounds()
    extent = bounds.max_extent
    if extent < 1e-9:
        raise GenerationFailed("sketch has no spatial extent")
    if generator is GeneratorKind.TUBES:
        radius = TUBE_RADIUS_FRACTION * extent
        vertices: list[Point3] = []
        triangles: list[tuple[int, int, int]] = []
        for stroke in encoding.strokes:
            try:
                tube = tube_mesh_from_stroke(list(stroke.points), radius, sides=8)
            except DegenerateSegment as exc:
                raise GenerationFailed(f"stroke degenerate: {exc}")
            offset = len(vertices)
            vertices.extend(tube.vertices)
            triangles.extend((a + offset, b + offset, c + offset)
                             for a, b, c in tube.triangles)
        return Mesh(vertices, triangles)
    try:
        return convex_hull(encoding.all_points())
    except DegenerateInput as exc:
        raise GenerationFailed(f"hull degenerate: {exc}")


def _jitter(mesh: Mesh, extent: float, seed: int, variant: int) -> Mesh:
    rng = np.random.default_rng(np.random.SeedSequence([seed, variant]))
    verts = mesh.vertex_array()
    disp = rng.uniform(-1.0, 1.0, verts.shape)
    norms = np.linalg.norm(disp, axis=1)
    disp /= np.maximum(norms, 1.0)[:, None]  # clamp into the unit ball
    verts = verts + disp * (JITTER_FRACTION * extent)
    return Mesh.from_arrays(verts, mesh.triangles)


def generate(request: GenerateRequest) -> GenerateResponse:
    """Produce ``variants`` meshes, each centered and scaled to the sketch
    bounds. Deterministic: identical requests yield identical vertex data."""
    if not request.encoding.strokes:
        raise GenerationFailed("empty encoding")
    bounds = request.encoding.bounds()
    extent = bounds.max_extent
    base = _base_mesh(request.encoding, request.generator)
    meshes = []
    for k in range(request.variants):
        mesh = base if k == 0 else _jitter(base, extent, request.seed, k)
        meshes.append(normalize_to_workspace(mesh, bounds))
    return GenerateResponse(request_id=request.request_id, meshes=tuple(meshes))
