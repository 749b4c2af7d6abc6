"""Generative 3D sketch mapping: capture strokes in a calibrated workspace,
turn sketches into meshes through a pluggable generation service, compose
scenes, and score reconstructions against ground truth."""

from .errors import SceneSketchError
from .meshes import AABB, Brush, BrushMode, Mesh, compute_aabb, convex_hull, sculpt, tube_mesh_from_stroke
from .scene import Environment, MaterialDescriptor, Scene, SceneObject, Transform, Weather
from .strokes import (
    MirrorPlane,
    Point3,
    PolyBezier,
    Sketch,
    Stroke,
    StrokeMode,
    Workspace,
    fit_poly_bezier,
    grid_points,
    mirror_stroke,
    simplify_stroke,
    workspace_from_corners,
)

__version__ = "0.1.0"

__all__ = [
    "AABB",
    "Brush",
    "BrushMode",
    "Environment",
    "MaterialDescriptor",
    "Mesh",
    "MirrorPlane",
    "Point3",
    "PolyBezier",
    "Scene",
    "SceneObject",
    "SceneSketchError",
    "Sketch",
    "Stroke",
    "StrokeMode",
    "Transform",
    "Weather",
    "Workspace",
    "compute_aabb",
    "convex_hull",
    "fit_poly_bezier",
    "grid_points",
    "mirror_stroke",
    "sculpt",
    "simplify_stroke",
    "tube_mesh_from_stroke",
    "workspace_from_corners",
]
