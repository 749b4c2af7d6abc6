"""Deterministic scene fixtures shared by unit, CLI, and acceptance tests.

The coffee-shop layout keeps the two stools in the south-west corner with
every other object strictly outside the stools' x and z intervals, so
swapping the stools corrupts exactly their own pairwise relations. Room
frame: north wall at z=0, floor at y=0.
"""

from __future__ import annotations

import numpy as np

from scenesketch.meshes import AABB, Mesh
from scenesketch.scene import MaterialDescriptor, Scene, Transform, Environment, Weather
from scenesketch.strokes import Point3

STOOL_IDS = ("obj-8", "obj-9")  # the swappable pair


def unit_box_mesh() -> Mesh:
    verts = [Point3(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    tris = [
        (0, 1, 3), (0, 3, 2), (4, 6, 7), (4, 7, 5),
        (0, 4, 5), (0, 5, 1), (2, 3, 7), (2, 7, 6),
        (0, 2, 6), (0, 6, 4), (1, 5, 7), (1, 7, 3),
    ]
    return Mesh(verts, tris)


def _place_box(scene: Scene, label: str, center_x: float, center_z: float,
               w: float, h: float, d: float,
               color=(0.6, 0.5, 0.4)) -> str:
    return scene.place(
        unit_box_mesh(),
        Transform(position=Point3(center_x - w / 2, 0.0, center_z - d / 2),
                  scale=(w, h, d)),
        MaterialDescriptor(color, ()),
        label=label,
    )


def coffee_shop_scene() -> Scene:
    """Tables, chairs, stools, and a sofa in a 6 x 4 m room."""
    scene = Scene(
        environment=Environment(time_of_day=14.0, weather=Weather.CLEAR),
        bounds=AABB(Point3(0, 0, 0), Point3(6, 3, 4)),
    )
    _place_box(scene, "sofa", 3.0, 0.5, 2.0, 0.85, 0.9, color=(0.45, 0.3, 0.25))   # obj-1
    _place_box(scene, "table", 1.8, 1.8, 0.8, 0.75, 0.8)                            # obj-2
    _place_box(scene, "table", 3.0, 1.8, 0.8, 0.75, 0.8)                            # obj-3
    _place_box(scene, "table", 4.2, 1.8, 0.8, 0.75, 0.8)                            # obj-4
    _place_box(scene, "chair", 1.8, 2.6, 0.45, 0.9, 0.45, color=(0.3, 0.3, 0.35))   # obj-5
    _place_box(scene, "chair", 3.0, 2.6, 0.45, 0.9, 0.45, color=(0.3, 0.3, 0.35))   # obj-6
    _place_box(scene, "chair", 4.2, 2.6, 0.45, 0.9, 0.45, color=(0.3, 0.3, 0.35))   # obj-7
    _place_box(scene, "stool", 0.45, 3.3, 0.35, 0.45, 0.35, color=(0.5, 0.4, 0.3))  # obj-8
    _place_box(scene, "stool", 0.85, 3.7, 0.35, 0.45, 0.35, color=(0.5, 0.4, 0.3))  # obj-9
    _place_box(scene, "chair", 5.2, 2.4, 0.45, 0.9, 0.45, color=(0.3, 0.3, 0.35))   # obj-10
    return scene


def perturbed_scene(noise_sigma: float, seed: int = 0,
                    scale_factor: float = 1.0) -> Scene:
    """Coffee-shop copy with isotropic (x, z) center noise and optional
    uniform object scaling about each footprint center."""
    scene = coffee_shop_scene()
    rng = np.random.default_rng(seed)
    for obj in scene.objects:
        t = obj.transform
        sx, sy, sz = t.scale
        # footprint center before distortion
        cx = t.position.x + sx / 2
        cz = t.position.z + sz / 2
        if noise_sigma > 0:
            cx += rng.normal(0.0, noise_sigma)
            cz += rng.normal(0.0, noise_sigma)
        new_scale = (sx * scale_factor, sy * scale_factor, sz * scale_factor)
        obj.transform = Transform(
            position=Point3(cx - new_scale[0] / 2, t.position.y, cz - new_scale[2] / 2),
            rotation=t.rotation,
            scale=new_scale,
        )
    return scene


def swapped_stools_scene() -> Scene:
    """Coffee-shop copy with the two stools' positions exchanged."""
    scene = coffee_shop_scene()
    a = scene.get(STOOL_IDS[0])
    b = scene.get(STOOL_IDS[1])
    a.transform, b.transform = (
        Transform(position=b.transform.position, rotation=a.transform.rotation,
                  scale=a.transform.scale),
        Transform(position=a.transform.position, rotation=b.transform.rotation,
                  scale=b.transform.scale),
    )
    return scene
