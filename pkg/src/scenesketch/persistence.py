"""File formats: OBJ meshes, sketch and scene JSON, and the on-disk object
library.

All output is canonical so artifacts diff cleanly: UTF-8, "\n" endings,
fixed key order, and floats written as their shortest round-trip decimal.
OBJ coordinates are additionally capped at 9 significant digits; the cap is
applied value-first so export -> import -> export is byte-identical.
"""

from __future__ import annotations

import json
import logging
import math
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ParseError, SchemaError, UnknownKey, UnknownWeather
from .meshes import AABB, Mesh, compute_aabb, tube_mesh_from_stroke
from .scene import (
    Environment,
    Light,
    MaterialDescriptor,
    Scene,
    SceneObject,
    Transform,
    Weather,
    quat_normalize,
)
from .strokes import (
    MirrorPlane,
    MirrorRef,
    Point3,
    Sketch,
    Stroke,
    StrokeMode,
    Workspace,
)

logger = logging.getLogger(__name__)

_QUAT_KEEP_TOL = 1e-9   # below this, stored components are kept bit-exact
_QUAT_WARN_TOL = 1e-3


def format_coordinate(x: float) -> str:
    """Shortest round-trip decimal capped at 9 significant digits.

    The cap rounds the value first, then prints that value's shortest
    representation, which makes the formatting a fixed point of
    parse-then-format."""
    return repr(float("%.9g" % x))


# --- OBJ ---

def export_obj(mesh: Mesh) -> bytes:
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {format_coordinate(v.x)} {format_coordinate(v.y)} "
                     f"{format_coordinate(v.z)}")
    for a, b, c in mesh.triangles:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    return ("\n".join(lines) + "\n").encode("utf-8")


_IGNORED_OBJ_DIRECTIVES = {"vn", "vt", "vp", "usemtl", "mtllib", "o", "g", "s", "l", "p"}


def _parse_face_index(token: str, n_vertices: int, line_no: int) -> int:
    head = token.split("/")[0]
    try:
        idx = int(head)
    except ValueError:
        raise ParseError(line_no, f"bad face index {token!r}")
    if idx <= 0:
        raise ParseError(line_no, f"face index {idx} is not 1-based positive")
    if idx > n_vertices:
        raise ParseError(line_no, f"face index {idx} exceeds vertex count {n_vertices}")
    return idx - 1


def import_obj(data: bytes) -> Mesh:
    """Parse vertices and (fan-triangulated) faces; comments, blank lines and
    unsupported directives are skipped."""
    vertices: list[Point3] = []
    triangles: list[tuple[int, int, int]] = []
    for line_no, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError(line_no, "vertex needs 3 coordinates")
            try:
                x, y, z = (float(p) for p in parts[1:4])
            except ValueError:
                raise ParseError(line_no, f"bad vertex coordinates {parts[1:4]}")
            if not all(math.isfinite(c) for c in (x, y, z)):
                raise ParseError(line_no, "non-finite vertex coordinate")
            vertices.append(Point3(x, y, z))
        elif tag == "f":
            if len(parts) < 4:
                raise ParseError(line_no, "face needs at least 3 indices")
            idx = [_parse_face_index(p, len(vertices), line_no) for p in parts[1:]]
            for k in range(1, len(idx) - 1):
                a, b, c = idx[0], idx[k], idx[k + 1]
                if a == b or b == c or a == c:
                    raise ParseError(line_no, "degenerate face")
                triangles.append((a, b, c))
        elif tag in _IGNORED_OBJ_DIRECTIVES:
            continue
        else:
            continue  # unknown directives are ignored, matching common parsers
    return Mesh(vertices, triangles)


# --- JSON plumbing ---

def _dump_json(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _load_json(data: bytes, root: str) -> dict:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(root, f"not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise SchemaError(root, "top level must be an object")
    return doc


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing field")
    return doc[key]


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise SchemaError(path, "number must be finite")
    return float(value)


def _as_point(value, path: str) -> Point3:
    if not isinstance(value, list) or len(value) != 3:
        raise SchemaError(path, "expected [x, y, z]")
    return Point3(*(_as_number(v, f"{path}[{i}]") for i, v in enumerate(value)))


def _point_list(p: Point3) -> list[float]:
    return [float(p.x), float(p.y), float(p.z)]


def _float_list(values) -> list[float]:
    return [float(v) for v in values]


# --- sketch JSON ---

def save_sketch(sketch: Sketch) -> bytes:
    strokes = []
    for s in sketch.strokes:
        strokes.append({
            "id": s.id,
            "mode": s.mode.value,
            "points": [_point_list(p) for p in s.points],
            "timestamps": _float_list(s.timestamps),
            "mirror_of": None if s.mirror_of is None else {
                "source_id": s.mirror_of.source_id,
                "plane": s.mirror_of.plane.value,
            },
        })
    doc = {
        "workspace": {
            "origin": _point_list(sketch.workspace.origin),
            "size": float(sketch.workspace.size),
            "yaw": float(sketch.workspace.yaw),
        },
        "strokes": strokes,
    }
    return _dump_json(doc)


def load_sketch(data: bytes) -> Sketch:
    doc = _load_json(data, "$")
    ws_doc = _require(doc, "workspace", "$")
    if not isinstance(ws_doc, dict):
        raise SchemaError("$.workspace", "expected object")
    workspace = Workspace(
        origin=_as_point(_require(ws_doc, "origin", "$.workspace"), "$.workspace.origin"),
        size=_as_number(_require(ws_doc, "size", "$.workspace"), "$.workspace.size"),
        yaw=_as_number(_require(ws_doc, "yaw", "$.workspace"), "$.workspace.yaw"),
    )
    strokes_doc = _require(doc, "strokes", "$")
    if not isinstance(strokes_doc, list):
        raise SchemaError("$.strokes", "expected array")
    strokes = []
    for i, s_doc in enumerate(strokes_doc):
        path = f"$.strokes[{i}]"
        if not isinstance(s_doc, dict):
            raise SchemaError(path, "expected object")
        sid = _require(s_doc, "id", path)
        if not isinstance(sid, str):
            raise SchemaError(f"{path}.id", "expected string")
        mode_str = _require(s_doc, "mode", path)
        try:
            mode = StrokeMode(mode_str)
        except ValueError:
            raise SchemaError(f"{path}.mode", f"unknown mode {mode_str!r}")
        pts_doc = _require(s_doc, "points", path)
        if not isinstance(pts_doc, list) or len(pts_doc) < 2:
            raise SchemaError(f"{path}.points", "expected array of >= 2 points")
        points = [_as_point(p, f"{path}.points[{j}]") for j, p in enumerate(pts_doc)]
        ts_doc = _require(s_doc, "timestamps", path)
        if not isinstance(ts_doc, list) or len(ts_doc) != len(points):
            raise SchemaError(f"{path}.timestamps", "length must match points")
        timestamps = [_as_number(t, f"{path}.timestamps[{j}]")
                      for j, t in enumerate(ts_doc)]
        mirror_doc = s_doc.get("mirror_of")
        mirror = None
        if mirror_doc is not None:
            if not isinstance(mirror_doc, dict):
                raise SchemaError(f"{path}.mirror_of", "expected object or null")
            try:
                plane = MirrorPlane(_require(mirror_doc, "plane", f"{path}.mirror_of"))
            except ValueError:
                raise SchemaError(f"{path}.mirror_of.plane", "unknown mirror plane")
            mirror = MirrorRef(
                source_id=_require(mirror_doc, "source_id", f"{path}.mirror_of"),
                plane=plane,
            )
        try:
            strokes.append(Stroke(sid, mode, points, timestamps, mirror))
        except ValueError as exc:
            raise SchemaError(path, str(exc))
    try:
        return Sketch(strokes, workspace)
    except ValueError as exc:
        raise SchemaError("$.strokes", str(exc))


def sketch_to_obj(sketch: Sketch, radius: float, sides: int) -> bytes:
    """Render every stroke as a tube; vertex blocks are concatenated with
    face indices offset by the preceding block sizes."""
    vertices: list[Point3] = []
    triangles: list[tuple[int, int, int]] = []
    for stroke in sketch.strokes:
        tube = tube_mesh_from_stroke(stroke.points, radius, sides)
        offset = len(vertices)
        vertices.extend(tube.vertices)
        triangles.extend((a + offset, b + offset, c + offset)
                         for a, b, c in tube.triangles)
    return export_obj(Mesh(vertices, triangles))


# --- scene JSON ---

def _material_doc(m: MaterialDescriptor) -> dict:
    return {"base_color": _float_list(m.base_color), "tags": list(m.material_tags)}


def _load_material(doc, path: str) -> MaterialDescriptor:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected object")
    color = _require(doc, "base_color", path)
    if not isinstance(color, list) or len(color) != 3:
        raise SchemaError(f"{path}.base_color", "expected [r, g, b]")
    rgb = tuple(_as_number(c, f"{path}.base_color[{i}]") for i, c in enumerate(color))
    tags = doc.get("tags", [])
    if not isinstance(tags, list) or any(not isinstance(t, str) for t in tags):
        raise SchemaError(f"{path}.tags", "expected array of strings")
    try:
        return MaterialDescriptor(rgb, tuple(tags))
    except ValueError as exc:
        raise SchemaError(f"{path}.base_color", str(exc))


def _mesh_doc(mesh: Mesh) -> dict:
    return {
        "vertices": [_point_list(v) for v in mesh.vertices],
        "triangles": [list(t) for t in mesh.triangles],
    }


def load_mesh_doc(doc, path: str) -> Mesh:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected object")
    verts_doc = _require(doc, "vertices", path)
    tris_doc = _require(doc, "triangles", path)
    if not isinstance(verts_doc, list):
        raise SchemaError(f"{path}.vertices", "expected array")
    if not isinstance(tris_doc, list):
        raise SchemaError(f"{path}.triangles", "expected array")
    vertices = [_as_point(v, f"{path}.vertices[{i}]") for i, v in enumerate(verts_doc)]
    triangles = []
    for i, t in enumerate(tris_doc):
        if (not isinstance(t, list) or len(t) != 3
                or any(isinstance(v, bool) or not isinstance(v, int) for v in t)):
            raise SchemaError(f"{path}.triangles[{i}]", "expected [i, j, k] integers")
        triangles.append((t[0], t[1], t[2]))
    try:
        return Mesh(vertices, triangles)
    except ValueError as exc:
        raise SchemaError(path, str(exc))


def save_scene(scene: Scene) -> bytes:
    objects = []
    for obj in scene.objects:
        entry = {
            "id": obj.id,
            "label": obj.label,
            "library_key": obj.library_key,
            "position": _point_list(obj.transform.position),
            "quaternion": _float_list(obj.transform.rotation),
            "scale": _float_list(obj.transform.scale),
            "material": _material_doc(obj.material),
        }
        if obj.library_key is None:
            entry["mesh"] = _mesh_doc(obj.mesh)
        objects.append(entry)
    doc = {
        "bounds": {
            "min": _point_list(scene.bounds.min),
            "max": _point_list(scene.bounds.max),
        },
        "environment": {
            "time_of_day": float(scene.environment.time_of_day),
            "weather": scene.environment.weather.value,
            "lights": [
                {"position": _point_list(l.position),
                 "intensity": float(l.intensity),
                 "range": float(l.range)}
                for l in scene.environment.lights
            ],
        },
        "objects": objects,
    }
    return _dump_json(doc)


def _load_quaternion(value, path: str) -> tuple[float, float, float, float]:
    if not isinstance(value, list) or len(value) != 4:
        raise SchemaError(path, "expected [w, x, y, z]")
    q = tuple(_as_number(v, f"{path}[{i}]") for i, v in enumerate(value))
    n = math.sqrt(sum(c * c for c in q))
    if n == 0.0:
        raise SchemaError(path, "quaternion must be nonzero")
    if abs(n - 1.0) > _QUAT_KEEP_TOL:
        if abs(n - 1.0) > _QUAT_WARN_TOL:
            logger.warning("quaternion at %s has norm %.6f; renormalizing", path, n)
        q = quat_normalize(q)
    return q


def load_scene(data: bytes, library: Optional["LibraryStore"] = None) -> Scene:
    doc = _load_json(data, "$")
    bounds_doc = _require(doc, "bounds", "$")
    bounds = AABB(
        _as_point(_require(bounds_doc, "min", "$.bounds"), "$.bounds.min"),
        _as_point(_require(bounds_doc, "max", "$.bounds"), "$.bounds.max"),
    )
    env_doc = _require(doc, "environment", "$")
    weather_str = _require(env_doc, "weather", "$.environment")
    try:
        weather = Weather(weather_str)
    except ValueError:
        raise UnknownWeather(f"unknown weather {weather_str!r}")
    lights_doc = env_doc.get("lights", [])
    if not isinstance(lights_doc, list):
        raise SchemaError("$.environment.lights", "expected array")
    lights = []
    for i, l_doc in enumerate(lights_doc):
        path = f"$.environment.lights[{i}]"
        lights.append(Light(
            position=_as_point(_require(l_doc, "position", path), f"{path}.position"),
            intensity=_as_number(_require(l_doc, "intensity", path), f"{path}.intensity"),
            range=_as_number(_require(l_doc, "range", path), f"{path}.range"),
        ))
    environment = Environment(
        time_of_day=_as_number(_require(env_doc, "time_of_day", "$.environment"),
                               "$.environment.time_of_day"),
        weather=weather,
        lights=lights,
    )
    objects_doc = _require(doc, "objects", "$")
    if not isinstance(objects_doc, list):
        raise SchemaError("$.objects", "expected array")
    objects = []
    for i, o_doc in enumerate(objects_doc):
        path = f"$.objects[{i}]"
        if not isinstance(o_doc, dict):
            raise SchemaError(path, "expected object")
        oid = _require(o_doc, "id", path)
        label = o_doc.get("label", "")
        library_key = o_doc.get("library_key")
        if library_key is not None:
            if library is None:
                raise SchemaError(f"{path}.library_key",
                                  f"object references library key {library_key!r} "
                                  "but no library was provided")
            try:
                mesh = library.retrieve(library_key).mesh
            except UnknownKey:
                raise SchemaError(f"{path}.library_key",
                                  f"unknown library key {library_key!r}")
        else:
            mesh = load_mesh_doc(_require(o_doc, "mesh", path), f"{path}.mesh")
        scale_doc = _require(o_doc, "scale", path)
        if not isinstance(scale_doc, list) or len(scale_doc) != 3:
            raise SchemaError(f"{path}.scale", "expected [sx, sy, sz]")
        transform = Transform(
            position=_as_point(_require(o_doc, "position", path), f"{path}.position"),
            rotation=_load_quaternion(_require(o_doc, "quaternion", path),
                                      f"{path}.quaternion"),
            scale=tuple(_as_number(s, f"{path}.scale[{j}]")
                        for j, s in enumerate(scale_doc)),
        )
        try:
            objects.append(SceneObject(
                id=oid, mesh=mesh, transform=transform,
                material=_load_material(_require(o_doc, "material", path),
                                        f"{path}.material"),
                label=label, library_key=library_key,
            ))
        except ValueError as exc:
            raise SchemaError(path, str(exc))
    try:
        return Scene(objects=objects, environment=environment, bounds=bounds)
    except ValueError as exc:
        raise SchemaError("$.objects", str(exc))


# --- on-disk object library ---

@dataclass
class LibraryEntry:
    key: str
    mesh_file: str
    label: str
    material: MaterialDescriptor
    scale: tuple[float, float, float]
    extents: tuple[float, float, float]
    created_at: float


class LibraryStore:
    """Directory-backed object library: one OBJ per entry plus an index.

    Layout: <root>/index.json and <root>/<key>.obj. Retrieval resets position
    and rotation, matching the in-memory library semantics."""

    INDEX = "index.json"

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._entries: dict[str, LibraryEntry] = {}
        self._counter = 0
        index_path = self.root / self.INDEX
        if index_path.exists():
            self._load_index(index_path.read_bytes())

    def _load_index(self, data: bytes) -> None:
        doc = _load_json(data, "$")
        self._counter = int(doc.get("counter", 0))
        entries = doc.get("entries", {})
        if not isinstance(entries, dict):
            raise SchemaError("$.entries", "expected object")
        for key, e in entries.items():
            path = f"$.entries.{key}"
            mesh_file = _require(e, "mesh_file", path)
            if not (self.root / mesh_file).exists():
                raise SchemaError(f"{path}.mesh_file",
                                  f"referenced file {mesh_file!r} does not exist")
            self._entries[key] = LibraryEntry(
                key=key,
                mesh_file=mesh_file,
                label=e.get("label", ""),
                material=_load_material(_require(e, "material", path), f"{path}.material"),
                scale=tuple(_as_number(s, f"{path}.scale[{i}]")
                            for i, s in enumerate(_require(e, "scale", path))),
                extents=tuple(_as_number(s, f"{path}.extents[{i}]")
                              for i, s in enumerate(_require(e, "extents", path))),
                created_at=_as_number(e.get("created_at", 0.0), f"{path}.created_at"),
            )

    def _write_index(self) -> None:
        doc = {
            "counter": self._counter,
            "entries": {
                e.key: {
                    "mesh_file": e.mesh_file,
                    "label": e.label,
                    "material": _material_doc(e.material),
                    "scale": _float_list(e.scale),
                    "extents": _float_list(e.extents),
                    "created_at": float(e.created_at),
                }
                for e in sorted(self._entries.values(), key=lambda x: x.key)
            },
        }
        (self.root / self.INDEX).write_bytes(_dump_json(doc))

    def keys(self) -> list[str]:
        return sorted(self._entries)

    def store(self, obj: SceneObject) -> str:
        slug = re.sub(r"[^a-z0-9]+", "-", obj.label.lower()).strip("-") or "object"
        self._counter += 1
        key = f"{slug}-{self._counter}"
        mesh_file = f"{key}.obj"
        (self.root / mesh_file).write_bytes(export_obj(obj.mesh))
        box = compute_aabb(obj.mesh)
        e = box.extents
        self._entries[key] = LibraryEntry(
            key=key,
            mesh_file=mesh_file,
            label=obj.label,
            material=obj.material,
            scale=obj.transform.scale,
            extents=(e.x, e.y, e.z),
            created_at=time.time(),
        )
        self._write_index()
        return key

    def retrieve(self, key: str) -> SceneObject:
        if key not in self._entries:
            raise UnknownKey(f"no library entry {key!r}")
        entry = self._entries[key]
        mesh = import_obj((self.root / entry.mesh_file).read_bytes())
        return SceneObject(
            id=key,
            mesh=mesh,
            transform=Transform(scale=entry.scale),
            material=entry.material,
            label=entry.label,
            library_key=key,
        )
