"""Scene composition: transforms with quaternion rotation, object placement,
gravity settling on axis-aligned bounds, environment state, and the object
library used to stash and re-instantiate edited objects.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .errors import UnknownId, UnknownKey
from .meshes import AABB, Mesh, compute_aabb
from .strokes import Point3

Quat = tuple[float, float, float, float]  # (w, x, y, z)

_REST_GAP = 1e-6


def quat_identity() -> Quat:
    return (1.0, 0.0, 0.0, 0.0)


def quat_normalize(q: Quat) -> Quat:
    w, x, y, z = q
    n = math.sqrt(w * w + x * x + y * y + z * z)
    if n == 0.0:
        raise ValueError("cannot normalize zero quaternion")
    return (w / n, x / n, y / n, z / n)


def quat_multiply(a: Quat, b: Quat) -> Quat:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_from_axis_angle(axis: Point3, angle: float) -> Quat:
    u = axis.normalized()
    half = angle / 2.0
    s = math.sin(half)
    return (math.cos(half), u.x * s, u.y * s, u.z * s)


def quat_rotate(q: Quat, v: Point3) -> Point3:
    w, x, y, z = q
    # v' = v + 2*u x (u x v + w*v), u = (x, y, z)
    u = Point3(x, y, z)
    t = u.cross(v) * 2.0
    return v + t * w + u.cross(t)


@dataclass(frozen=True)
class Transform:
    position: Point3 = field(default_factory=lambda: Point3(0.0, 0.0, 0.0))
    rotation: Quat = field(default_factory=quat_identity)
    scale: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        w, x, y, z = self.rotation
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"quaternion norm {n} deviates from 1 beyond 1e-6")
        if any(s <= 0 for s in self.scale):
            raise ValueError("scale components must be > 0")

    def apply(self, p: Point3) -> Point3:
        sx, sy, sz = self.scale
        scaled = Point3(p.x * sx, p.y * sy, p.z * sz)
        return quat_rotate(self.rotation, scaled) + self.position


@dataclass(frozen=True)
class MaterialDescriptor:
    base_color: tuple[float, float, float] = (0.8, 0.8, 0.8)
    material_tags: tuple[str, ...] = ()

    def __post_init__(self):
        if any(not (0.0 <= c <= 1.0) for c in self.base_color):
            raise ValueError("color components must be in [0, 1]")


class Weather(Enum):
    CLEAR = "clear"
    CLOUDY = "cloudy"
    FOGGY = "foggy"
    RAINY = "rainy"
    SNOWY = "snowy"


@dataclass(frozen=True)
class Light:
    position: Point3
    intensity: float = 1.0
    range: float = 5.0

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("light intensity must be >= 0")
        if self.range <= 0:
            raise ValueError("light range must be > 0")


@dataclass
class Environment:
    time_of_day: float = 12.0
    weather: Weather = Weather.CLEAR
    lights: list[Light] = field(default_factory=list)

    def __post_init__(self):
        self.time_of_day = self.time_of_day % 24.0


@dataclass
class SceneObject:
    id: str
    mesh: Mesh
    transform: Transform = field(default_factory=Transform)
    material: MaterialDescriptor = field(default_factory=MaterialDescriptor)
    label: str = ""
    library_key: Optional[str] = None

    def __post_init__(self):
        if not self.mesh.vertices:
            raise ValueError("scene object mesh must be non-empty")

    def world_vertices(self) -> list[Point3]:
        return [self.transform.apply(v) for v in self.mesh.vertices]

    def world_aabb(self) -> AABB:
        return AABB.from_points(self.world_vertices())


@dataclass
class Scene:
    objects: list[SceneObject] = field(default_factory=list)
    environment: Environment = field(default_factory=Environment)
    bounds: AABB = field(
        default_factory=lambda: AABB(Point3(-5.0, 0.0, -5.0), Point3(5.0, 3.0, 5.0)))
    _next_id: int = field(default=1, repr=False, compare=False)

    def __post_init__(self):
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ValueError("object ids must be unique")
        self._next_id = len(self.objects) + 1

    def _fresh_id(self) -> str:
        existing = {o.id for o in self.objects}
        while True:
            candidate = f"obj-{self._next_id}"
            self._next_id += 1
            if candidate not in existing:
                return candidate

    def get(self, object_id: str) -> SceneObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise UnknownId(f"no object {object_id!r}")

    def place(self, mesh: Mesh, transform: Optional[Transform] = None,
              material: Optional[MaterialDescriptor] = None, label: str = "",
              library_key: Optional[str] = None) -> str:
        obj = SceneObject(
            id=self._fresh_id(),
            mesh=mesh,
            transform=transform if transform is not None else Transform(),
            material=material if material is not None else MaterialDescriptor(),
            label=label,
            library_key=library_key,
        )
        self.objects.append(obj)
        return obj.id

    def duplicate(self, object_id: str) -> str:
        src = self.get(object_id)
        copy = SceneObject(
            id=self._fresh_id(),
            mesh=src.mesh,
            transform=src.transform,
            material=src.material,
            label=src.label,
            library_key=src.library_key,
        )
        self.objects.append(copy)
        return copy.id

    def remove(self, object_id: str) -> None:
        obj = self.get(object_id)
        self.objects.remove(obj)

    def settle(self, object_id: str) -> Transform:
        """Drop an object straight down onto the highest supporting top among
        footprint-overlapping objects, or the floor at y=0. Never moves up."""
        obj = self.get(object_id)
        box = obj.world_aabb()
        support = 0.0
        for other in self.objects:
            if other.id == object_id:
                continue
            ob = other.world_aabb()
            overlap_x = box.min.x < ob.max.x and ob.min.x < box.max.x
            overlap_z = box.min.z < ob.max.z and ob.min.z < box.max.z
            if overlap_x and overlap_z and ob.max.y <= box.min.y + _REST_GAP:
                support = max(support, ob.max.y)
        drop = box.min.y - support
        if drop > 0.0:
            t = obj.transform
            obj.transform = replace(t, position=t.position + Point3(0.0, -drop, 0.0))
        return obj.transform


def scale_about_fixed_corner(obj: SceneObject, dragged_corner: tuple[bool, bool, bool],
                             factor: float) -> Transform:
    """Uniform scale by ``factor`` keeping the world AABB corner opposite the
    dragged one fixed. Corner flags select max (True) or min per axis."""
    if factor <= 0:
        raise ValueError("factor must be > 0")
    box = obj.world_aabb()
    fixed = Point3(
        box.min.x if dragged_corner[0] else box.max.x,
        box.min.y if dragged_corner[1] else box.max.y,
        box.min.z if dragged_corner[2] else box.max.z,
    )
    t = obj.transform
    sx, sy, sz = t.scale
    new_pos = fixed + (t.position - fixed) * factor
    obj.transform = Transform(position=new_pos,
                              rotation=t.rotation,
                              scale=(sx * factor, sy * factor, sz * factor))
    return obj.transform


_AXIS_VECTORS = {
    "x": Point3(1.0, 0.0, 0.0),
    "y": Point3(0.0, 1.0, 0.0),
    "z": Point3(0.0, 0.0, 1.0),
}


def rotate_about_axis(obj: SceneObject, axis: str, angle: float) -> Transform:
    """World-axis rotation composed onto the object's orientation."""
    axis = axis.lower()
    if axis not in _AXIS_VECTORS:
        raise ValueError("axis must be one of x, y, z")
    q = quat_from_axis_angle(_AXIS_VECTORS[axis], angle)
    t = obj.transform
    obj.transform = replace(t, rotation=quat_normalize(quat_multiply(q, t.rotation)))
    return obj.transform


def sun_direction(time_of_day: float) -> Point3:
    """Unit direction of incoming sunlight for the day-cycle slider.

    Elevation follows a sine arc peaking overhead at 12h and dipping below
    the horizon outside 6h-18h; azimuth sweeps east -> south -> west. The
    vector points from the sun toward the ground (down at noon).
    """
    h = time_of_day % 24.0
    elevation = (math.pi / 2.0) * math.sin(math.pi * (h - 6.0) / 12.0)
    azimuth = math.pi * (h - 6.0) / 12.0
    ce = math.cos(elevation)
    sun = Point3(ce * math.cos(azimuth), math.sin(elevation), ce * math.sin(azimuth))
    return Point3(-sun.x, -sun.y, -sun.z)


def sun_elevation(time_of_day: float) -> float:
    """Elevation angle in radians; negative means night."""
    h = time_of_day % 24.0
    return (math.pi / 2.0) * math.sin(math.pi * (h - 6.0) / 12.0)


def _slugify(label: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", label.lower()).strip("-")
    return slug or "object"


class ObjectLibrary:
    """In-memory store of reusable object templates.

    Retrieval resets position and rotation to identity (the caller spawns the
    object in front of the user) while keeping mesh, scale, material, and
    label exactly as stored.
    """

    def __init__(self):
        self._entries: dict[str, SceneObject] = {}
        self._counter = 0

    def keys(self) -> list[str]:
        return list(self._entries)

    def store(self, obj: SceneObject) -> str:
        self._counter += 1
        key = f"{_slugify(obj.label)}-{self._counter}"
        self._entries[key] = SceneObject(
            id=key,
            mesh=obj.mesh,
            transform=obj.transform,
            material=obj.material,
            label=obj.label,
            library_key=key,
        )
        return key

    def retrieve(self, key: str) -> SceneObject:
        if key not in self._entries:
            raise UnknownKey(f"no library entry {key!r}")
        src = self._entries[key]
        return SceneObject(
            id=key,
            mesh=src.mesh,
            transform=Transform(scale=src.transform.scale),
            material=src.material,
            label=src.label,
            library_key=key,
        )
