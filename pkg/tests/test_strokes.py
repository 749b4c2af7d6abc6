import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scenesketch.errors import DegenerateCorners
from scenesketch.strokes import (
    MirrorPlane,
    Point3,
    Sketch,
    Stroke,
    StrokeMode,
    Workspace,
    fit_poly_bezier,
    grid_points,
    line_stroke,
    mirror_stroke,
    simplify_stroke,
    workspace_from_corners,
)
from helpers import max_removed_point_error

coords = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
points3 = st.builds(Point3, coords, coords, coords)


def freehand(stroke_id, pts, t0=0.0, dt=0.01):
    return Stroke(stroke_id, StrokeMode.FREEHAND, list(pts),
                  [t0 + i * dt for i in range(len(pts))])


# --- workspace calibration ---

def test_axis_aligned_corners():
    ws = workspace_from_corners(Point3(0, 1, 0), Point3(1, 1, 0), size=0.5)
    assert ws.yaw == pytest.approx(0.0)
    assert ws.origin == Point3(0, 1, 0)
    assert ws.size == 0.5


def test_north_facing_corners():
    # heading of (0, 0, -1) is a quarter turn from east
    ws = workspace_from_corners(Point3(0, 1, 0), Point3(0, 1, -1), size=0.5)
    assert ws.yaw == pytest.approx(math.pi / 2)


def test_coincident_corners_rejected():
    with pytest.raises(DegenerateCorners):
        workspace_from_corners(Point3(0, 1, 0), Point3(0, 1, 0))


def test_corner_height_averaged():
    ws = workspace_from_corners(Point3(0, 0.8, 0), Point3(1, 1.2, 0))
    assert ws.origin.y == pytest.approx(1.0)


@given(points3)
def test_yaw_invariant_under_translation(offset):
    left, right = Point3(0.3, 1.0, -0.2), Point3(0.9, 1.1, 0.4)
    a = workspace_from_corners(left, right)
    b = workspace_from_corners(left + offset, right + offset)
    assert a.yaw == pytest.approx(b.yaw, abs=1e-12)


def test_local_world_round_trip():
    ws = workspace_from_corners(Point3(1, 0.5, 2), Point3(1.2, 0.5, 1.1))
    p = Point3(0.1, 0.2, 0.3)
    q = ws.to_local(ws.to_world(p))
    assert p.distance_to(q) < 1e-12


# --- RDP simplification ---

def test_collinear_points_collapse_to_endpoints():
    pts = [Point3(i * 0.25, 0, 0) for i in range(5)]
    assert simplify_stroke(pts, 0.01) == [pts[0], pts[-1]]


def test_zero_epsilon_keeps_noncollinear_input():
    pts = [Point3(0, 0, 0), Point3(0.5, 0.02, 0), Point3(1, 0, 0)]
    assert simplify_stroke(pts, 0.0) == pts


def test_zigzag_thresholds():
    # middle point sits 0.02 off the chord
    pts = [Point3(0, 0, 0), Point3(0.5, 0.02, 0), Point3(1, 0, 0)]
    assert simplify_stroke(pts, 0.05) == [pts[0], pts[-1]]
    assert simplify_stroke(pts, 0.01) == pts


def random_polyline(rng, max_points=30):
    n = rng.randint(2, max_points)
    return [Point3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
            for _ in range(n)]


def test_rdp_removed_points_within_epsilon():
    rng = random.Random(7)
    for _ in range(50):
        pts = random_polyline(rng)
        eps = rng.uniform(0.0, 0.5)
        simp = simplify_stroke(pts, eps)
        assert simp[0] == pts[0] and simp[-1] == pts[-1]
        assert max_removed_point_error(pts, simp) <= eps


def test_rdp_idempotent():
    rng = random.Random(11)
    for _ in range(30):
        pts = random_polyline(rng)
        eps = rng.uniform(0.0, 0.4)
        once = simplify_stroke(pts, eps)
        assert simplify_stroke(once, eps) == once


def test_rdp_monotone_in_epsilon():
    rng = random.Random(13)
    for _ in range(30):
        pts = random_polyline(rng)
        e1 = rng.uniform(0.0, 0.2)
        e2 = e1 + rng.uniform(0.0, 0.3)
        assert len(simplify_stroke(pts, e2)) <= len(simplify_stroke(pts, e1))


def test_rdp_output_is_subsequence():
    rng = random.Random(17)
    pts = random_polyline(rng, max_points=20)
    simp = simplify_stroke(pts, 0.1)
    it = iter(pts)
    assert all(any(p == q for q in it) for p in simp)


# --- poly-Bezier fitting ---

def test_two_point_fit_is_the_straight_line():
    pb = fit_poly_bezier([Point3(0, 0, 0), Point3(1, 0, 0)])
    assert len(pb.segments) == 1
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        p = pb.segments[0].point_at(t)
        assert p.distance_to(Point3(t, 0, 0)) < 1e-15


def test_collinear_input_stays_on_the_line():
    pts = [Point3(0, 0, 0), Point3(1, 1, 0), Point3(3, 3, 0)]
    pb = fit_poly_bezier(pts)
    for seg in pb.segments:
        for ctrl in (seg.p0, seg.p1, seg.p2, seg.p3):
            assert abs(ctrl.x - ctrl.y) < 1e-12 and abs(ctrl.z) < 1e-12
    for s in pb.sample(64):
        assert abs(s.x - s.y) < 1e-12


def test_quarter_circle_radial_error():
    pts = [Point3(math.cos(a), math.sin(a), 0)
           for a in [i * math.pi / 6 for i in range(4)]]
    pb = fit_poly_bezier(pts)
    for j, p in enumerate(pts):
        assert pb.joints[j].distance_to(p) == 0.0
    worst = max(abs(math.hypot(s.x, s.y) - 1.0)
                for seg in pb.segments
                for s in (seg.point_at(t / 100) for t in range(101)))
    assert worst < 0.02


def test_joints_equal_inputs_exactly():
    pts = [Point3(0.1, 0.2, 0.3), Point3(0.5, -0.1, 0.8), Point3(1.0, 0.4, -0.2)]
    pb = fit_poly_bezier(pts)
    assert pb.joints == pts


def test_tangent_continuity_at_joints():
    rng = random.Random(3)
    pts = [Point3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
           for _ in range(6)]
    pb = fit_poly_bezier(pts)
    for a, b in zip(pb.segments, pb.segments[1:]):
        t_in = a.tangent_at(1.0)
        t_out = b.tangent_at(0.0)
        assert t_in.distance_to(t_out) < 1e-12


# --- mirroring ---

def test_mirror_left_right_local_coords():
    ws = Workspace(Point3(0, 0, 0), size=0.5)
    s = freehand("a", [Point3(0.1, 0.2, 0.3), Point3(0.2, 0.2, 0.3)])
    m = mirror_stroke(s, MirrorPlane.LEFT_RIGHT, ws)
    assert m.points[0].distance_to(Point3(0.4, 0.2, 0.3)) < 1e-12
    assert m.mirror_of.source_id == "a"
    assert m.mirror_of.plane is MirrorPlane.LEFT_RIGHT
    assert m.timestamps == s.timestamps


def test_point_on_plane_is_fixed():
    ws = Workspace(Point3(0, 0, 0), size=0.5)
    s = freehand("a", [Point3(0.25, 0.1, 0.1), Point3(0.25, 0.3, 0.2)])
    m = mirror_stroke(s, MirrorPlane.LEFT_RIGHT, ws)
    for orig, mirr in zip(s.points, m.points):
        assert orig.distance_to(mirr) < 1e-12


def test_mirror_is_involution():
    ws = workspace_from_corners(Point3(2, 1, -3), Point3(2.3, 1, -3.4))
    s = freehand("a", [Point3(2.1, 1.2, -3.1), Point3(2.2, 1.3, -3.3)])
    twice = mirror_stroke(mirror_stroke(s, MirrorPlane.FRONT_BACK, ws),
                          MirrorPlane.FRONT_BACK, ws)
    for orig, back in zip(s.points, twice.points):
        assert orig.distance_to(back) < 1e-9


@settings(max_examples=50)
@given(st.lists(points3, min_size=2, max_size=8))
def test_mirror_preserves_pairwise_distances(pts):
    ws = Workspace(Point3(0.5, 0, -0.5), size=0.5, yaw=0.7)
    s = freehand("a", pts)
    m = mirror_stroke(s, MirrorPlane.LEFT_RIGHT, ws)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d0 = s.points[i].distance_to(s.points[j])
            d1 = m.points[i].distance_to(m.points[j])
            assert abs(d0 - d1) < 1e-9


# --- grid ---

def test_grid_single_cell():
    ws = Workspace(Point3(0, 0, 0), size=0.5)
    assert len(grid_points(ws, 0.5, 0.5)) == 8


def test_grid_3x3x3():
    ws = Workspace(Point3(0, 0, 0), size=0.5)
    assert len(grid_points(ws, 0.25, 0.25)) == 27


def test_grid_mixed_spacing():
    ws = Workspace(Point3(0, 0, 0), size=0.5)
    assert len(grid_points(ws, 0.25, 0.5)) == 18


def test_grid_points_stay_in_cube():
    ws = workspace_from_corners(Point3(1, 1, 1), Point3(1, 1, 0.4), size=0.6)
    for p in grid_points(ws, 0.2, 0.3):
        q = ws.to_local(p)
        for v in (q.x, q.y, q.z):
            assert -1e-9 <= v <= ws.size + 1e-9


# --- stroke and sketch types ---

def test_line_stroke_has_two_points():
    s = line_stroke("l1", Point3(0, 0, 0), Point3(1, 1, 1))
    assert s.mode is StrokeMode.LINE
    assert len(s.points) == 2


def test_line_stroke_rejects_extra_points():
    with pytest.raises(ValueError):
        Stroke("l", StrokeMode.LINE,
               [Point3(0, 0, 0), Point3(1, 0, 0), Point3(2, 0, 0)], [0, 1, 2])


def test_timestamps_must_not_decrease():
    with pytest.raises(ValueError):
        Stroke("s", StrokeMode.FREEHAND,
               [Point3(0, 0, 0), Point3(1, 0, 0)], [1.0, 0.5])


def test_sketch_rejects_duplicate_ids():
    a = freehand("a", [Point3(0, 0, 0), Point3(1, 0, 0)])
    b = freehand("a", [Point3(0, 1, 0), Point3(1, 1, 0)])
    with pytest.raises(ValueError):
        Sketch([a, b])


def test_sketch_rejects_dangling_mirror_ref():
    ws = Workspace(Point3(0, 0, 0))
    a = freehand("a", [Point3(0.1, 0.1, 0.1), Point3(0.2, 0.1, 0.1)])
    m = mirror_stroke(a, MirrorPlane.LEFT_RIGHT, ws)
    with pytest.raises(ValueError):
        Sketch([m])  # source stroke missing
    Sketch([a, m])  # and fine together


def test_nonfinite_point_rejected():
    with pytest.raises(ValueError):
        Point3(float("nan"), 0, 0)
