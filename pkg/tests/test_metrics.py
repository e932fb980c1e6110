import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from olm import (
    BoundingBox,
    DimensionError,
    EvalRecord,
    ValidationError,
    corloc,
    f_measure,
    iou,
    is_localized,
    mae,
    max_f_measure,
    normalize_saliency,
)
from oracles import iou_by_pixels, max_f_bruteforce


def box(x_min, y_min, x_max, y_max):
    return BoundingBox(
        x_min,
        y_min,
        x_max,
        y_max,
        (x_max - x_min + 1) * (y_max - y_min + 1),
    )


coords = st.tuples(
    st.integers(0, 63), st.integers(0, 63), st.integers(0, 63), st.integers(0, 63)
).map(lambda t: box(min(t[0], t[2]), min(t[1], t[3]), max(t[0], t[2]), max(t[1], t[3])))


# --------------------------------------------------------------------- iou


def test_iou_frozen_half_overlap():
    # 10x10 boxes sharing a 5x10 strip: 50 / (100 + 100 - 50)
    assert iou(box(0, 0, 9, 9), box(5, 0, 14, 9)) == pytest.approx(1 / 3)


def test_iou_identical_and_disjoint():
    b = box(3, 4, 8, 9)
    assert iou(b, b) == 1.0
    assert iou(box(0, 0, 1, 1), box(5, 5, 6, 6)) == 0.0


def test_iou_single_pixel_cases():
    assert iou(box(2, 2, 2, 2), box(2, 2, 2, 2)) == 1.0
    # adjacent pixels do not intersect
    assert iou(box(2, 2, 2, 2), box(3, 2, 3, 2)) == 0.0


def test_iou_uses_inclusive_areas():
    # (0,0)-(1,1) is 4 pixels, (1,1)-(2,2) is 4 pixels, they share 1
    assert iou(box(0, 0, 1, 1), box(1, 1, 2, 2)) == pytest.approx(1 / 7)


@given(coords, coords)
def test_iou_matches_pixel_counting(a, b):
    expected = iou_by_pixels(
        (a.x_min, a.y_min, a.x_max, a.y_max), (b.x_min, b.y_min, b.x_max, b.y_max)
    )
    assert iou(a, b) == expected


@given(coords, coords)
def test_iou_symmetric_and_bounded(a, b):
    v = iou(a, b)
    assert v == iou(b, a)
    assert 0.0 <= v <= 1.0


# ------------------------------------------------------------------ corloc


def test_localization_needs_strictly_more_than_half():
    # two-pixel box vs one shared pixel: IoU is exactly 0.5 and must fail
    assert iou(box(0, 0, 1, 0), box(0, 0, 0, 0)) == 0.5
    assert not is_localized([box(0, 0, 1, 0)], [box(0, 0, 0, 0)])


def test_is_localized_any_pair_suffices():
    preds = [box(50, 50, 59, 59), box(0, 0, 9, 9)]
    actuals = [box(30, 30, 40, 40), box(0, 0, 9, 8)]
    assert is_localized(preds, actuals)
    assert not is_localized([], actuals)


def test_corloc_averages_over_images():
    records = [
        EvalRecord("a", (box(0, 0, 9, 9),), (box(0, 0, 9, 9),)),
        EvalRecord("b", (box(0, 0, 9, 9),), (box(5, 0, 14, 9),)),  # IoU 1/3
        EvalRecord("c", (box(0, 0, 1, 1),), (box(30, 30, 40, 40),)),
    ]
    assert corloc(records) == pytest.approx(1 / 3)


def test_corloc_validates_input():
    with pytest.raises(ValueError):
        corloc([])
    with pytest.raises(ValidationError):
        corloc([EvalRecord("a", (box(0, 0, 1, 1),), ())])


# --------------------------------------------------------------- normalize


def test_normalize_frozen_values():
    out = normalize_saliency(np.array([[0.0, 0.5], [1.0, 0.0]]))
    assert out.dtype == np.uint8
    assert out.tolist() == [[0, 128], [255, 0]]


def test_normalize_shifts_minimum_to_zero():
    out = normalize_saliency(np.array([[2.0, 3.0], [4.0, 2.0]]))
    assert out.tolist() == [[0, 128], [255, 0]]


def test_normalize_constant_map_is_all_zero():
    assert np.all(normalize_saliency(np.full((3, 3), 0.7)) == 0)
    assert np.all(normalize_saliency(np.zeros((2, 2))) == 0)


def test_normalize_rounds_half_up():
    # 1/255 of the range above the midpoint boundary: 127.5 rounds to 128
    out = normalize_saliency(np.array([[0.0, 0.5, 1.0]]))
    assert out.tolist() == [[0, 128, 255]]


def test_normalize_rejects_non_finite():
    with pytest.raises(ValidationError):
        normalize_saliency(np.array([[0.0, np.nan]]))
    with pytest.raises(DimensionError):
        normalize_saliency(np.zeros(4))


# --------------------------------------------------------------------- mae


def test_mae_frozen_cases():
    gt = np.array([[True, False], [False, False]])
    assert mae(np.full((2, 2), 255, np.uint8), gt) == pytest.approx(0.75)
    sal = np.array([[0, 255], [255, 0]], dtype=np.uint8)
    assert mae(sal, np.array([[False, True], [True, False]])) == 0.0
    assert mae(np.zeros((2, 2), np.uint8), np.array([[True, True], [False, False]])) == 0.5


def test_mae_complement_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(20):
        sal = rng.integers(0, 256, (9, 7)).astype(np.uint8)
        gt = rng.uniform(size=(9, 7)) > 0.6
        assert mae(255 - sal, ~gt) == pytest.approx(mae(sal, gt), abs=1e-12)


def test_mae_validates_shapes_and_range():
    with pytest.raises(DimensionError):
        mae(np.zeros((2, 2), np.uint8), np.zeros((3, 2), bool))
    with pytest.raises(ValidationError):
        mae(np.full((2, 2), 300, np.int64), np.zeros((2, 2), bool))


# --------------------------------------------------------------- f-measure


def test_f_measure_frozen_value():
    assert f_measure(0.8, 0.5) == pytest.approx(0.52 / 0.74)


def test_f_measure_zero_rule():
    assert f_measure(0.0, 0.0) == 0.0


@given(st.floats(0.0, 1.0))
def test_f_measure_at_equal_precision_recall_is_identity(p):
    assert f_measure(p, p) == pytest.approx(p, abs=1e-12)


def test_f_measure_validates_range():
    with pytest.raises(ValueError):
        f_measure(1.2, 0.5)
    with pytest.raises(ValueError):
        f_measure(0.5, -0.1)


# ------------------------------------------------------------------- max f


def test_max_f_perfect_map():
    gt = np.array([[True, False], [False, False]])
    sal = np.array([[255, 0], [0, 0]], dtype=np.uint8)
    f, t = max_f_measure(sal, gt)
    assert f == pytest.approx(1.0)
    assert t == 0  # already perfect at the lowest threshold, ties go low


def test_max_f_all_positive_split_reports_clamped_threshold():
    # gt everywhere: selecting every pixel gives F = 1 at the sweep's
    # t = -1, reported as 0
    gt = np.ones((3, 3), dtype=bool)
    sal = np.zeros((3, 3), dtype=np.uint8)
    f, t = max_f_measure(sal, gt)
    assert f == pytest.approx(1.0)
    assert t == 0


def test_max_f_frozen_constant_map():
    # sal all 255, one positive of four: P = 0.25, R = 1 at every useful t
    gt = np.array([[True, False], [False, False]])
    sal = np.full((2, 2), 255, dtype=np.uint8)
    f, t = max_f_measure(sal, gt)
    assert f == pytest.approx(1.3 * 0.25 / (0.3 * 0.25 + 1.0))
    assert t == 0


def test_max_f_rejects_empty_mask():
    with pytest.raises(ValidationError):
        max_f_measure(np.zeros((2, 2), np.uint8), np.zeros((2, 2), bool))


@given(
    hnp.arrays(
        dtype=np.uint8,
        shape=st.tuples(st.integers(1, 8), st.integers(1, 8)),
        elements=st.integers(0, 255),
    ).flatmap(
        lambda sal: st.tuples(
            st.just(sal),
            hnp.arrays(dtype=bool, shape=sal.shape).filter(lambda g: g.any()),
        )
    )
)
def test_max_f_matches_bruteforce(pair):
    sal, gt = pair
    got_f, got_t = max_f_measure(sal, gt)
    exp_f, exp_t = max_f_bruteforce(sal, gt)
    assert got_f == pytest.approx(exp_f, abs=1e-12)
    assert got_t == exp_t
