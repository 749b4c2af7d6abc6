"""Guards the committed fixture file against drift from its builder."""

from pathlib import Path

from scenesketch.evaluate import project_topdown
from scenesketch.persistence import save_scene
from fixtures import STOOL_IDS, coffee_shop_scene

DATA = Path(__file__).parent / "data"


def test_committed_truth_matches_builder():
    assert (DATA / "coffeeshop_truth.scene.json").read_bytes() == \
        save_scene(coffee_shop_scene())


def test_stools_isolated_for_swap_criterion():
    """No other object's center may fall inside the stools' x or z interval,
    and no relation may tie within the default epsilon."""
    plan = project_topdown(coffee_shop_scene())
    a = plan.by_id(STOOL_IDS[0]).center
    b = plan.by_id(STOOL_IDS[1]).center
    x_lo, x_hi = sorted((a[0], b[0]))
    z_lo, z_hi = sorted((a[1], b[1]))
    eps = 0.011  # just above the default tie epsilon
    assert x_hi - x_lo > eps and z_hi - z_lo > eps
    for f in plan.footprints:
        if f.object_id in STOOL_IDS:
            continue
        cx, cz = f.center
        assert cx < x_lo - eps or cx > x_hi + eps
        assert cz < z_lo - eps or cz > z_hi + eps
