import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from olm import build_transactions, channel_threshold, make_stack
from oracles import naive_transactions


def int_valued_stacks():
    """Small nonnegative-integer-valued stacks. Integer values keep every
    mean exactly representable, so threshold comparisons are unambiguous
    no matter how the mean is accumulated."""
    return hnp.arrays(
        dtype=np.float32,
        shape=st.tuples(st.integers(1, 6), st.integers(1, 4), st.integers(1, 4)),
        elements=st.integers(0, 12).map(float),
    )


def test_threshold_is_mean_of_strict_positives():
    channel = np.array([0.0, 2.0, 4.0, 0.0, 6.0])
    assert channel_threshold(channel) == pytest.approx(4.0)


def test_threshold_ignores_zeros_not_just_any_small_value():
    channel = np.array([0.5, 0.0, 0.0, 0.0])
    assert channel_threshold(channel) == pytest.approx(0.5)


def test_threshold_none_without_positives():
    assert channel_threshold(np.zeros(9)) is None


def test_items_are_strictly_above_threshold():
    # mean of {1, 2, 3} is 2; only the 3 clears a strict comparison
    stack = make_stack("x", np.array([[[1.0, 2.0, 3.0]]]))
    db = build_transactions(stack)
    assert db.transactions == ((2,),)


def test_empty_transactions_are_retained():
    data = np.zeros((3, 2, 2), dtype=np.float32)
    data[1, 0, 0] = 5.0
    data[1, 1, 1] = 1.0
    db = build_transactions(make_stack("x", data))
    assert db.n == 3
    assert db.transactions[0] == ()
    assert db.transactions[2] == ()
    assert db.transactions[1] == (0,)  # 5 > mean(5, 1) = 3 > 1


def test_item_ids_are_row_major():
    data = np.zeros((1, 3, 4), dtype=np.float32)
    data[0, 2, 1] = 9.0
    data[0, 0, 3] = 1.0
    db = build_transactions(make_stack("x", data))
    assert db.grid_h == 3 and db.grid_w == 4
    assert db.transactions[0] == (2 * 4 + 1,)


def test_uniform_channel_yields_empty_transaction():
    # every value equals the mean, and the comparison is strict
    db = build_transactions(make_stack("x", np.full((1, 2, 2), 7.0)))
    assert db.transactions == ((),)


@given(int_valued_stacks())
def test_matches_naive_oracle(data):
    db = build_transactions(make_stack("x", data))
    assert list(db.transactions) == naive_transactions(data)


@given(int_valued_stacks(), st.sampled_from([2.0, 0.5, 8.0, 0.25, 1024.0]))
def test_power_of_two_rescale_is_exact_invariance(data, scale):
    base = build_transactions(make_stack("x", data))
    scaled = build_transactions(make_stack("x", data * np.float32(scale)))
    assert base.transactions == scaled.transactions


def test_arbitrary_positive_rescale_keeps_database():
    rng = np.random.default_rng(42)
    for trial in range(25):
        data = rng.uniform(0.0, 10.0, size=(8, 5, 5)).astype(np.float32)
        base = build_transactions(make_stack("x", data))
        for scale in (0.37, 3.0, 719.5, 1e-3):
            scaled = build_transactions(
                make_stack("x", (data.astype(np.float64) * scale).astype(np.float32))
            )
            assert base.transactions == scaled.transactions


def test_n_equals_channel_count():
    rng = np.random.default_rng(0)
    stack = make_stack("x", rng.uniform(0, 1, (17, 3, 3)))
    assert build_transactions(stack).n == 17


def test_build_validates_input():
    from olm import ValidationError

    data = np.zeros((1, 2, 2), dtype=np.float32)
    data[0, 0, 0] = np.nan
    with pytest.raises(ValidationError):
        build_transactions(make_stack("x", data))
