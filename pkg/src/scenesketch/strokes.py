"""Stroke capture primitives: 3D points, calibrated workspaces, polyline
simplification, poly-Bezier fitting, and mirrored duplication.

World frame is right-handed, meters, +y up, ground plane y=0, north = -z,
east = +x. Workspace-local coordinates live in [0, size]^3 with the local
frame rotated about +y by the workspace yaw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

from .errors import DegenerateCorners

DEFAULT_RDP_EPSILON = 0.002  # meters; controller jitter scale
DEFAULT_WORKSPACE_SIZE = 0.5  # meters


@dataclass(frozen=True)
class Point3:
    """Immutable 3D point/vector in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite point ({self.x}, {self.y}, {self.z})")

    def __add__(self, other: "Point3") -> "Point3":
        return Point3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Point3") -> "Point3":
        return Point3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "Point3":
        return Point3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def dot(self, other: "Point3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Point3") -> "Point3":
        return Point3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def distance_to(self, other: "Point3") -> float:
        return (self - other).norm()

    def normalized(self) -> "Point3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize zero vector")
        return Point3(self.x / n, self.y / n, self.z / n)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


class StrokeMode(Enum):
    FREEHAND = "freehand"
    LINE = "line"


class MirrorPlane(Enum):
    LEFT_RIGHT = "left_right"
    FRONT_BACK = "front_back"


@dataclass(frozen=True)
class MirrorRef:
    source_id: str
    plane: MirrorPlane


@dataclass
class Stroke:
    """Ordered, timestamped point sequence captured in one pen gesture."""

    id: str
    mode: StrokeMode
    points: list[Point3]
    timestamps: list[float]
    mirror_of: Optional[MirrorRef] = None

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError(f"stroke {self.id!r} needs at least 2 points")
        if len(self.points) != len(self.timestamps):
            raise ValueError(f"stroke {self.id!r}: points/timestamps length mismatch")
        if any(b < a for a, b in zip(self.timestamps, self.timestamps[1:])):
            raise ValueError(f"stroke {self.id!r}: timestamps must be non-decreasing")
        if self.mode is StrokeMode.LINE and len(self.points) != 2:
            raise ValueError(f"LINE stroke {self.id!r} must have exactly 2 points")


def line_stroke(stroke_id: str, start: Point3, end: Point3,
                t0: float = 0.0, t1: float = 0.0) -> Stroke:
    """Build a LINE stroke; intermediate controller samples are discarded."""
    return Stroke(stroke_id, StrokeMode.LINE, [start, end], [t0, max(t0, t1)])


@dataclass(frozen=True)
class Workspace:
    """Cubic drawing volume. ``origin`` is the front-lower-left corner; the
    front edge runs along local +x, rotated about +y by ``yaw``."""

    origin: Point3
    size: float = DEFAULT_WORKSPACE_SIZE
    yaw: float = 0.0

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("workspace size must be > 0")

    def to_local(self, p: Point3) -> Point3:
        d = p - self.origin
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        # inverse of the +y rotation by yaw
        return Point3(c * d.x - s * d.z, d.y, s * d.x + c * d.z)

    def to_world(self, p: Point3) -> Point3:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return Point3(
            self.origin.x + c * p.x + s * p.z,
            self.origin.y + p.y,
            self.origin.z - s * p.x + c * p.z,
        )


@dataclass
class Sketch:
    strokes: list[Stroke] = field(default_factory=list)
    workspace: Workspace = field(default_factory=lambda: Workspace(Point3(0.0, 0.0, 0.0)))

    def __post_init__(self):
        self.validate()

    def validate(self):
        ids = [s.id for s in self.strokes]
        if len(set(ids)) != len(ids):
            raise ValueError("stroke ids must be unique")
        known = set(ids)
        for s in self.strokes:
            if s.mirror_of is not None and s.mirror_of.source_id not in known:
                raise ValueError(
                    f"stroke {s.id!r} mirrors unknown stroke {s.mirror_of.source_id!r}")

    def add(self, stroke: Stroke) -> None:
        self.strokes.append(stroke)
        self.validate()


def workspace_from_corners(left: Point3, right: Point3,
                           size: float = DEFAULT_WORKSPACE_SIZE) -> Workspace:
    """Calibrate a workspace from its front-left and front-right corners.

    Yaw is the ground-plane heading of left->right; the origin sits at the
    left corner lifted to the corners' mean height.
    """
    if size <= 0:
        raise ValueError("size must be > 0")
    dx = right.x - left.x
    dz = right.z - left.z
    if math.hypot(dx, dz) < 1e-6:
        raise DegenerateCorners("left and right corners coincide in the ground plane")
    yaw = math.atan2(-dz, dx)
    origin = Point3(left.x, (left.y + right.y) / 2.0, left.z)
    return Workspace(origin=origin, size=size, yaw=yaw)


def _point_segment_distance(p: Point3, a: Point3, b: Point3) -> float:
    """3D distance from p to segment ab (degenerate segments allowed)."""
    ab = b - a
    denom = ab.dot(ab)
    if denom == 0.0:
        return p.distance_to(a)
    t = (p - a).dot(ab) / denom
    t = min(1.0, max(0.0, t))
    return p.distance_to(a + ab * t)


def simplify_stroke(points: Sequence[Point3], epsilon: float = DEFAULT_RDP_EPSILON) -> list[Point3]:
    """Ramer-Douglas-Peucker simplification with 3D point-to-segment distance.

    Keeps both endpoints; every removed point lies within ``epsilon`` of the
    chord between the kept points that bracket it. A point is retained only
    when its deviation is strictly greater than ``epsilon``.
    """
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    pts = list(points)
    keep = [False] * len(pts)
    keep[0] = keep[-1] = True
    stack = [(0, len(pts) - 1)]
    while stack:
        first, last = stack.pop()
        d_max = epsilon
        idx = -1
        for i in range(first + 1, last):
            d = _point_segment_distance(pts[i], pts[first], pts[last])
            if d > d_max:
                d_max = d
                idx = i
        if idx >= 0:
            keep[idx] = True
            stack.append((first, idx))
            stack.append((idx, last))
    return [p for p, k in zip(pts, keep) if k]


@dataclass(frozen=True)
class BezierSegment:
    """One cubic segment with 4 control points."""

    p0: Point3
    p1: Point3
    p2: Point3
    p3: Point3

    def point_at(self, t: float) -> Point3:
        u = 1.0 - t
        return (self.p0 * (u * u * u) + self.p1 * (3 * u * u * t)
                + self.p2 * (3 * u * t * t) + self.p3 * (t * t * t))

    def tangent_at(self, t: float) -> Point3:
        u = 1.0 - t
        return ((self.p1 - self.p0) * (3 * u * u)
                + (self.p2 - self.p1) * (6 * u * t)
                + (self.p3 - self.p2) * (3 * t * t))


@dataclass(frozen=True)
class PolyBezier:
    """Chain of cubic segments, C0 by construction and C1 at interior joints."""

    segments: tuple[BezierSegment, ...]

    def __post_init__(self):
        for a, b in zip(self.segments, self.segments[1:]):
            if a.p3 is not b.p0 and a.p3 != b.p0:
                raise ValueError("segments must share joint control points")

    @property
    def joints(self) -> list[Point3]:
        return [self.segments[0].p0] + [s.p3 for s in self.segments]

    def point_at(self, u: float) -> Point3:
        """Evaluate at u in [0, len(segments)]; the integer part selects the segment."""
        n = len(self.segments)
        if u >= n:
            return self.segments[-1].point_at(1.0)
        if u <= 0:
            return self.segments[0].point_at(0.0)
        i = int(u)
        return self.segments[i].point_at(u - i)

    def sample(self, samples_per_segment: int = 32) -> list[Point3]:
        out = []
        for i, seg in enumerate(self.segments):
            start = 0 if i == 0 else 1
            for k in range(start, samples_per_segment + 1):
                out.append(seg.point_at(k / samples_per_segment))
        return out


def fit_poly_bezier(points: Sequence[Point3]) -> PolyBezier:
    """Interpolating C1 fit: one cubic per consecutive point pair with joint
    tangents taken from neighboring-point differences. Interior joints use
    the central difference; ends use the parabolic (Bessel) condition, which
    degrades gracefully to the chord for 2-point input."""
    pts = list(points)
    n = len(pts)
    if n < 2:
        raise ValueError("need at least 2 points")
    tangents: list[Point3] = []
    for i in range(n):
        if i == 0:
            if n == 2:
                tangents.append(pts[1] - pts[0])
            else:
                tangents.append((pts[1] - pts[0]) * 2.0 - (pts[2] - pts[0]) * 0.5)
        elif i == n - 1:
            if n == 2:
                tangents.append(pts[-1] - pts[-2])
            else:
                tangents.append((pts[-1] - pts[-2]) * 2.0 - (pts[-1] - pts[-3]) * 0.5)
        else:
            tangents.append((pts[i + 1] - pts[i - 1]) * 0.5)
    segments = []
    for i in range(n - 1):
        segments.append(BezierSegment(
            pts[i],
            pts[i] + tangents[i] * (1.0 / 3.0),
            pts[i + 1] - tangents[i + 1] * (1.0 / 3.0),
            pts[i + 1],
        ))
    return PolyBezier(tuple(segments))


def mirror_stroke(stroke: Stroke, plane: MirrorPlane, workspace: Workspace,
                  new_id: Optional[str] = None) -> Stroke:
    """Reflect a stroke across the workspace's central vertical plane.

    LEFT_RIGHT reflects local x about size/2; FRONT_BACK reflects local z.
    Timestamps are copied; the result records its source stroke.
    """
    size = workspace.size  # reflection about the center plane: x' = size - x
    mirrored: list[Point3] = []
    for p in stroke.points:
        q = workspace.to_local(p)
        if plane is MirrorPlane.LEFT_RIGHT:
            q = Point3(size - q.x, q.y, q.z)
        else:
            q = Point3(q.x, q.y, size - q.z)
        mirrored.append(workspace.to_world(q))
    return Stroke(
        id=new_id if new_id is not None else f"{stroke.id}~{plane.value}",
        mode=stroke.mode,
        points=mirrored,
        timestamps=list(stroke.timestamps),
        mirror_of=MirrorRef(stroke.id, plane),
    )


def grid_points(workspace: Workspace, spacing_h: float, spacing_v: float) -> list[Point3]:
    """Reference lattice inside the workspace cube, in world coordinates.

    Horizontal spacing applies to local x and z, vertical to local y; counts
    are floor(size/spacing)+1 per axis.
    """
    if spacing_h <= 0 or spacing_v <= 0:
        raise ValueError("spacings must be > 0")
    # guard against 0.4999999 style float drop-outs
    n_h = int(math.floor(workspace.size / spacing_h + 1e-9)) + 1
    n_v = int(math.floor(workspace.size / spacing_v + 1e-9)) + 1
    out = []
    for i in range(n_h):
        for j in range(n_v):
            for k in range(n_h):
                out.append(workspace.to_world(
                    Point3(i * spacing_h, j * spacing_v, k * spacing_h)))
    return out
