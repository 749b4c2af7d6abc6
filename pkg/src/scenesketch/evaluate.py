"""Scene accuracy scoring against ground truth.

A reconstructed scene is projected top-down to 2D footprints, optimally
matched to the ground-truth plan, then scored on three axes:

* position accuracy: per-pair ``1/(1 + d)`` over center distance, optionally
  min-max normalized across an evaluation batch;
* dimension accuracy: rectangle IoU of footprint boxes, plus a binarized
  fraction at a threshold;
* topology accuracy: the fraction of pairwise order relations along the
  north-south and east-west axes preserved by the sketch.

Unmatched ground-truth objects count as misses (score 0); extra sketch
objects are reported but excluded from the means. North is -z, east is +x.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    DegenerateCorrespondence,
    EmptyInput,
    EmptyScene,
    NoFeasibleMatching,
    SchemaError,
    TooFewPairs,
)
from .scene import Scene

DEFAULT_IOU_THRESHOLD = 0.5
DEFAULT_TIE_EPSILON = 0.01  # meters
CI_Z = 1.96  # normal-approximation 95% interval


@dataclass(frozen=True)
class Footprint2D:
    object_id: str
    center: tuple[float, float]  # (x, z)
    bbox: tuple[float, float, float, float]  # (min_x, min_z, max_x, max_z)
    category: Optional[str] = None

    def __post_init__(self):
        min_x, min_z, max_x, max_z = self.bbox
        if min_x > max_x or min_z > max_z:
            raise ValueError("bbox min must be <= max per axis")
        cx, cz = self.center
        if not (min_x <= cx <= max_x and min_z <= cz <= max_z):
            raise ValueError("center must lie inside bbox")


@dataclass
class ScenePlan:
    footprints: list[Footprint2D] = field(default_factory=list)

    def __post_init__(self):
        ids = [f.object_id for f in self.footprints]
        if len(set(ids)) != len(ids):
            raise ValueError("footprint object ids must be unique")

    def by_id(self, object_id: str) -> Footprint2D:
        for f in self.footprints:
            if f.object_id == object_id:
                return f
        raise KeyError(object_id)

    def translated(self, dx: float, dz: float) -> "ScenePlan":
        return ScenePlan([
            Footprint2D(
                f.object_id,
                (f.center[0] + dx, f.center[1] + dz),
                (f.bbox[0] + dx, f.bbox[1] + dz, f.bbox[2] + dx, f.bbox[3] + dz),
                f.category,
            ) for f in self.footprints
        ])


@dataclass
class Matching:
    pairs: list[tuple[str, str]]  # (sketch_id, truth_id)
    unmatched_truth: list[str]
    unmatched_sketch: list[str]


@dataclass
class OpaResult:
    per_pair: list[dict]
    mean: float
    missing_truth: int = 0  # unmatched truth objects, scored 0 in the means
    normalized_mean: Optional[float] = None
    flags: list[str] = field(default_factory=list)


@dataclass
class OdaResult:
    per_pair: list[dict]
    mean_iou: float
    binary_fraction: float
    threshold: float


@dataclass
class EvaluationReport:
    matching: Matching
    opa: OpaResult
    oda: OdaResult
    ota: Optional[float]
    flags: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "opa": {
                "per_pair": self.opa.per_pair,
                "mean": self.opa.mean,
                "normalized_mean": self.opa.normalized_mean,
            },
            "oda": {
                "per_pair": self.oda.per_pair,
                "mean_iou": self.oda.mean_iou,
                "binary_fraction": self.oda.binary_fraction,
                "threshold": self.oda.threshold,
            },
            "ota": self.ota,
            "matching": {
                "pairs": [{"sketch_id": s, "truth_id": t} for s, t in self.matching.pairs],
                "unmatched_truth": list(self.matching.unmatched_truth),
                "unmatched_sketch": list(self.matching.unmatched_sketch),
            },
            "flags": sorted(set(self.flags + self.opa.flags)),
        }


def project_topdown(scene: Scene) -> ScenePlan:
    """Project each object's world-space mesh AABB onto the ground plane."""
    if not scene.objects:
        raise EmptyScene("scene has no objects")
    footprints = []
    for obj in scene.objects:
        box = obj.world_aabb()
        c = box.center
        footprints.append(Footprint2D(
            object_id=obj.id,
            center=(c.x, c.z),
            bbox=(box.min.x, box.min.z, box.max.x, box.max.z),
            category=obj.label or None,
        ))
    return ScenePlan(footprints)


# --- perspective correction ---

def rectify(points: Sequence[tuple[float, float]],
            targets: Sequence[tuple[float, float]]) -> np.ndarray:
    """Homography mapping 4 observed 2D points onto their references.

    Solved by direct linear transform on the 8x9 system; the null-space
    vector is normalized so h33 = 1 when it is meaningfully nonzero.
    """
    if len(points) != 4 or len(targets) != 4:
        raise ValueError("need exactly 4 correspondences")
    src = np.asarray(points, dtype=float)
    dst = np.asarray(targets, dtype=float)

    for trio in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        a, b, c = (src[i] for i in trio)
        area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(area) < 1e-12:
            raise DegenerateCorrespondence(f"source points {trio} are collinear")

    rows = []
    for (x, y), (u, v) in zip(src, dst):
        rows.append([x, y, 1, 0, 0, 0, -u * x, -u * y, -u])
        rows.append([0, 0, 0, x, y, 1, -v * x, -v * y, -v])
    a_mat = np.array(rows)
    _, s, vt = np.linalg.svd(a_mat)
    if s[-2] < 1e-12 * max(1.0, s[0]):
        raise DegenerateCorrespondence("correspondences admit no unique homography")
    h = vt[-1].reshape(3, 3)
    if abs(h[2, 2]) > 1e-12:
        h = h / h[2, 2]
    return h


def _apply_h(h: np.ndarray, x: float, y: float) -> tuple[float, float]:
    p = h @ np.array([x, y, 1.0])
    if abs(p[2]) < 1e-15:
        raise DegenerateCorrespondence("point maps to infinity")
    return float(p[0] / p[2]), float(p[1] / p[2])


def apply_homography(h: np.ndarray, plan: ScenePlan) -> ScenePlan:
    """Map every footprint; boxes are re-axis-aligned from mapped corners."""
    out = []
    for f in plan.footprints:
        cx, cz = _apply_h(h, *f.center)
        min_x, min_z, max_x, max_z = f.bbox
        corners = [_apply_h(h, x, z)
                   for x in (min_x, max_x) for z in (min_z, max_z)]
        xs = [p[0] for p in corners]
        zs = [p[1] for p in corners]
        out.append(Footprint2D(f.object_id, (cx, cz),
                               (min(xs), min(zs), max(xs), max(zs)), f.category))
    return ScenePlan(out)


# --- matching ---

def _center_distance(a: Footprint2D, b: Footprint2D) -> float:
    return math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])


def match_objects(sketch: ScenePlan, truth: ScenePlan,
                  category_locked: bool = False) -> Matching:
    """Optimal injective assignment minimizing total center distance.

    With ``category_locked`` the assignment is solved within each category
    (equivalent to infinite cost across categories); if no category is
    shared at all the matching is infeasible.
    """
    if not sketch.footprints or not truth.footprints:
        raise EmptyScene("both plans must be non-empty")

    def solve(s_items: list[Footprint2D], t_items: list[Footprint2D]):
        cost = np.array([[_center_distance(s, t) for t in t_items] for s in s_items])
        rows, cols = linear_sum_assignment(cost)
        return [(s_items[r].object_id, t_items[c].object_id) for r, c in zip(rows, cols)]

    if not category_locked:
        pairs = solve(sketch.footprints, truth.footprints)
    else:
        by_cat_sketch: dict = {}
        by_cat_truth: dict = {}
        for f in sketch.footprints:
            by_cat_sketch.setdefault(f.category, []).append(f)
        for f in truth.footprints:
            by_cat_truth.setdefault(f.category, []).append(f)
        shared = set(by_cat_sketch) & set(by_cat_truth)
        if not shared:
            raise NoFeasibleMatching("no category is shared between the plans")
        pairs = []
        for cat in sorted(shared, key=lambda c: (c is None, c)):
            pairs.extend(solve(by_cat_sketch[cat], by_cat_truth[cat]))

    matched_sketch = {s for s, _ in pairs}
    matched_truth = {t for _, t in pairs}
    return Matching(
        pairs=pairs,
        unmatched_truth=[f.object_id for f in truth.footprints
                         if f.object_id not in matched_truth],
        unmatched_sketch=[f.object_id for f in sketch.footprints
                          if f.object_id not in matched_sketch],
    )


# --- metrics ---

def opa(matching: Matching, sketch: ScenePlan, truth: ScenePlan) -> OpaResult:
    """Position accuracy: 1/(1+d) per pair; missing truth objects score 0."""
    per_pair = []
    for s_id, t_id in matching.pairs:
        d = _center_distance(sketch.by_id(s_id), truth.by_id(t_id))
        per_pair.append({"sketch_id": s_id, "truth_id": t_id,
                         "distance": d, "score": 1.0 / (1.0 + d)})
    denom = len(per_pair) + len(matching.unmatched_truth)
    mean = sum(p["score"] for p in per_pair) / denom if denom else 0.0
    return OpaResult(per_pair=per_pair, mean=mean,
                     missing_truth=len(matching.unmatched_truth))


def normalize_opa_batch(results: Sequence[OpaResult]) -> None:
    """Min-max normalize per-pair scores across a batch, in place.

    The population is every per-pair score in the batch. When the batch is
    degenerate (all scores equal) raw scores are kept and flagged.
    """
    scores = [p["score"] for r in results for p in r.per_pair]
    if not scores:
        return
    lo, hi = min(scores), max(scores)
    if hi - lo < 1e-15:
        for r in results:
            r.flags.append("opa_normalization_degenerate")
            r.normalized_mean = r.mean
            for p in r.per_pair:
                p["score_normalized"] = p["score"]
        return
    for r in results:
        for p in r.per_pair:
            p["score_normalized"] = (p["score"] - lo) / (hi - lo)
        denom = len(r.per_pair) + r.missing_truth
        r.normalized_mean = (sum(p["score_normalized"] for p in r.per_pair) / denom
                             if denom else 0.0)


def rect_iou(a: tuple[float, float, float, float],
             b: tuple[float, float, float, float]) -> float:
    ix = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
    iz = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = ix * iz
    if inter == 0.0:
        return 0.0
    union = ((a[2] - a[0]) * (a[3] - a[1])
             + (b[2] - b[0]) * (b[3] - b[1]) - inter)
    return inter / union if union > 0 else 0.0


def oda(matching: Matching, sketch: ScenePlan, truth: ScenePlan,
        tau: float = DEFAULT_IOU_THRESHOLD) -> OdaResult:
    """Dimension accuracy: footprint IoU per pair, binarized at ``tau``
    (strictly greater); missing truth objects count as IoU 0."""
    if not (0.0 < tau < 1.0):
        raise ValueError("tau must be in (0, 1)")
    per_pair = []
    for s_id, t_id in matching.pairs:
        iou = rect_iou(sketch.by_id(s_id).bbox, truth.by_id(t_id).bbox)
        per_pair.append({"sketch_id": s_id, "truth_id": t_id,
                         "iou": iou, "binary": 1 if iou > tau else 0})
    denom = len(per_pair) + len(matching.unmatched_truth)
    if denom == 0:
        return OdaResult(per_pair, 0.0, 0.0, tau)
    return OdaResult(
        per_pair=per_pair,
        mean_iou=sum(p["iou"] for p in per_pair) / denom,
        binary_fraction=sum(p["binary"] for p in per_pair) / denom,
        threshold=tau,
    )


def _axis_relation(delta: float, tie_epsilon: float) -> int:
    if abs(delta) <= tie_epsilon:
        return 0
    return 1 if delta > 0 else -1


def ota(matching: Matching, sketch: ScenePlan, truth: ScenePlan,
        tie_epsilon: float = DEFAULT_TIE_EPSILON) -> float:
    """Topology accuracy: fraction of preserved pairwise order relations.

    Every unordered pair of matched objects contributes one north-south (z)
    and one east-west (x) relation; differences within ``tie_epsilon`` are
    ties and must stay ties.
    """
    n = len(matching.pairs)
    if n < 2:
        raise TooFewPairs("need at least 2 matched pairs")
    preserved = 0
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            s_i, t_i = matching.pairs[i]
            s_j, t_j = matching.pairs[j]
            fs_i, fs_j = sketch.by_id(s_i), sketch.by_id(s_j)
            ft_i, ft_j = truth.by_id(t_i), truth.by_id(t_j)
            for axis in (0, 1):  # x = east-west, z = north-south
                rel_truth = _axis_relation(ft_i.center[axis] - ft_j.center[axis],
                                           tie_epsilon)
                rel_sketch = _axis_relation(fs_i.center[axis] - fs_j.center[axis],
                                            tie_epsilon)
                preserved += int(rel_truth == rel_sketch)
                total += 1
    return preserved / total


def evaluate_plans(sketch: ScenePlan, truth: ScenePlan,
                   tau: float = DEFAULT_IOU_THRESHOLD,
                   tie_epsilon: float = DEFAULT_TIE_EPSILON,
                   category_locked: bool = False) -> EvaluationReport:
    matching = match_objects(sketch, truth, category_locked=category_locked)
    opa_result = opa(matching, sketch, truth)
    oda_result = oda(matching, sketch, truth, tau=tau)
    flags = []
    try:
        ota_value = ota(matching, sketch, truth, tie_epsilon=tie_epsilon)
    except TooFewPairs:
        ota_value = None
        flags.append("ota_undefined_too_few_pairs")
    if matching.unmatched_sketch:
        flags.append("extra_sketch_objects")
    if matching.unmatched_truth:
        flags.append("missing_truth_objects")
    return EvaluationReport(matching=matching, opa=opa_result, oda=oda_result,
                            ota=ota_value, flags=flags)


def evaluate_scenes(sketch_scene: Scene, truth_scene: Scene,
                    tau: float = DEFAULT_IOU_THRESHOLD,
                    tie_epsilon: float = DEFAULT_TIE_EPSILON,
                    category_locked: bool = False) -> EvaluationReport:
    report = evaluate_plans(project_topdown(sketch_scene),
                            project_topdown(truth_scene),
                            tau=tau, tie_epsilon=tie_epsilon,
                            category_locked=category_locked)
    report.flags.append("opa_raw_single_scene")
    return report


def evaluate_batch(pairs: Sequence[tuple[Scene, Scene]],
                   tau: float = DEFAULT_IOU_THRESHOLD,
                   tie_epsilon: float = DEFAULT_TIE_EPSILON,
                   category_locked: bool = False) -> list[EvaluationReport]:
    """Evaluate (sketch, truth) scene pairs with batch-wide OPA normalization."""
    reports = [
        evaluate_plans(project_topdown(s), project_topdown(t),
                       tau=tau, tie_epsilon=tie_epsilon,
                       category_locked=category_locked)
        for s, t in pairs
    ]
    normalize_opa_batch([r.opa for r in reports])
    return reports


# --- expert scorecard aggregation ---

SCORECARD_DIMENSIONS = ("SL", "OP", "SR", "OD")


@dataclass(frozen=True)
class ScorecardEntry:
    rater_id: str
    condition: str
    SL: int
    OP: int
    SR: int
    OD: int

    def __post_init__(self):
        for dim in SCORECARD_DIMENSIONS:
            v = getattr(self, dim)
            if not (1 <= v <= 7):
                raise ValueError(f"{dim} rating {v} outside 1..7")


def load_scorecard_csv(data: bytes) -> list[ScorecardEntry]:
    """Parse scorecard rows from CSV with header rater_id,condition,SL,OP,SR,OD."""
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    expected = ["rater_id", "condition", *SCORECARD_DIMENSIONS]
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != expected:
        raise SchemaError("header", f"CSV header must be {','.join(expected)}")
    entries = []
    for row_no, row in enumerate(reader, start=2):
        try:
            entries.append(ScorecardEntry(
                rater_id=row["rater_id"],
                condition=row["condition"],
                **{dim: int(row[dim]) for dim in SCORECARD_DIMENSIONS},
            ))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"row {row_no}", str(exc))
    if not entries:
        raise EmptyInput("no scorecard rows")
    return entries


def aggregate_scorecard(entries: Sequence[ScorecardEntry]) -> dict:
    """Per-condition, per-dimension mean, sample SD, and a 95% interval
    (mean +/- 1.96 * SD / sqrt(n)). Single ratings get SD 0 and a small-n flag."""
    if not entries:
        raise EmptyInput("no scorecard entries")
    out: dict = {}
    conditions = sorted({e.condition for e in entries})
    for cond in conditions:
        group = [e for e in entries if e.condition == cond]
        dims = {}
        for dim in SCORECARD_DIMENSIONS:
            values = [float(getattr(e, dim)) for e in group]
            n = len(values)
            mean = sum(values) / n
            sd = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
            half = CI_Z * sd / math.sqrt(n)
            dims[dim] = {
                "n": n,
                "mean": mean,
                "sd": sd,
                "ci95": [mean - half, mean + half],
            }
            if n < 2:
                dims[dim]["flags"] = ["small_n"]
        out[cond] = dims
    return out
