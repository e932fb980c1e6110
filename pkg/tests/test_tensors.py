import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from olm import (
    CorruptionError,
    DimensionError,
    FormatError,
    ValidationError,
    make_stack,
    merge_stacks,
    read_olmf,
    resample_bilinear,
    resize_bilinear,
    write_olmf,
)
from oracles import bilinear_scalar


def nonneg_f32(shape):
    return hnp.arrays(
        dtype=np.float32,
        shape=shape,
        elements=st.floats(0.0, 1e6, allow_nan=False, width=32),
    )


stack_shapes = st.tuples(
    st.integers(1, 4), st.integers(1, 5), st.integers(1, 5)
)


# ---------------------------------------------------------------- container


@given(
    st.lists(
        st.tuples(st.text(min_size=1, max_size=8), stack_shapes),
        min_size=1,
        max_size=3,
    ).flatmap(
        lambda metas: st.tuples(
            st.just([m[0] for m in metas]),
            st.tuples(*[nonneg_f32(m[1]) for m in metas]),
        )
    )
)
def test_roundtrip_bit_exact(tmp_path_factory, names_and_data):
    names, arrays = names_and_data
    path = tmp_path_factory.mktemp("olmf") / "t.olmf"
    stacks = [make_stack(n, a) for n, a in zip(names, arrays)]
    write_olmf(stacks, str(path))
    back = read_olmf(str(path))
    assert [s.layer_name for s in back] == names
    for orig, loaded in zip(stacks, back):
        assert loaded.data.dtype == np.float32
        assert loaded.data.shape == orig.data.shape
        assert np.array_equal(
            loaded.data.view(np.uint32), orig.data.view(np.uint32)
        )


def test_known_bytes(tmp_path):
    path = tmp_path / "g.olmf"
    write_olmf([make_stack("a", np.array([[[1.0, 2.5]]]))], str(path))
    expected = (
        b"OLMF"
        + struct.pack("<II", 1, 1)
        + struct.pack("<I", 1)
        + b"a"
        + struct.pack("<III", 1, 1, 2)
        + struct.pack("<2f", 1.0, 2.5)
    )
    assert path.read_bytes() == expected


def test_reserialization_is_byte_identical(tmp_path):
    rng = np.random.default_rng(3)
    stacks = [
        make_stack("relu5", rng.uniform(0, 9, (4, 3, 5))),
        make_stack("pool5", rng.uniform(0, 9, (4, 2, 3))),
    ]
    p1, p2 = tmp_path / "a.olmf", tmp_path / "b.olmf"
    write_olmf(stacks, str(p1))
    write_olmf(read_olmf(str(p1)), str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def _valid_blob() -> bytes:
    return (
        b"OLMF"
        + struct.pack("<II", 1, 1)
        + struct.pack("<I", 1)
        + b"x"
        + struct.pack("<III", 1, 1, 2)
        + struct.pack("<2f", 0.5, 1.5)
    )


def _expect_error(tmp_path, blob: bytes, exc):
    path = tmp_path / "bad.olmf"
    path.write_bytes(blob)
    with pytest.raises(exc):
        read_olmf(str(path))


def test_read_rejects_short_header(tmp_path):
    _expect_error(tmp_path, b"OLM", FormatError)


def test_read_rejects_bad_magic(tmp_path):
    _expect_error(tmp_path, b"JUNK" + _valid_blob()[4:], FormatError)


def test_read_rejects_bad_version(tmp_path):
    blob = _valid_blob()
    _expect_error(tmp_path, blob[:4] + struct.pack("<I", 9) + blob[8:], FormatError)


def test_read_rejects_truncated_payload(tmp_path):
    _expect_error(tmp_path, _valid_blob()[:-4], CorruptionError)


def test_read_rejects_trailing_bytes(tmp_path):
    _expect_error(tmp_path, _valid_blob() + b"\x00", CorruptionError)


def test_read_rejects_missing_tensor(tmp_path):
    # header claims two tensors, file holds one
    blob = _valid_blob()
    _expect_error(tmp_path, blob[:8] + struct.pack("<I", 2) + blob[12:], CorruptionError)


def test_read_rejects_non_utf8_name(tmp_path):
    blob = (
        b"OLMF"
        + struct.pack("<II", 1, 1)
        + struct.pack("<I", 1)
        + b"\xff"
        + struct.pack("<III", 1, 1, 1)
        + struct.pack("<f", 1.0)
    )
    _expect_error(tmp_path, blob, CorruptionError)


def test_read_rejects_negative_values(tmp_path):
    blob = (
        b"OLMF"
        + struct.pack("<II", 1, 1)
        + struct.pack("<I", 1)
        + b"x"
        + struct.pack("<III", 1, 1, 2)
        + struct.pack("<2f", 0.5, -1.0)
    )
    _expect_error(tmp_path, blob, ValidationError)


# --------------------------------------------------------------- validation


def test_validate_names_tensor_and_flat_index_for_nan():
    data = np.zeros((2, 3, 3), dtype=np.float32)
    data[1, 2, 1] = np.nan  # flat index 1*9 + 2*3 + 1 = 16
    with pytest.raises(ValidationError, match=r"'relu5'.*16"):
        make_stack("relu5", data).validate()


def test_validate_names_tensor_and_flat_index_for_negative():
    data = np.zeros((1, 2, 2), dtype=np.float32)
    data[0, 1, 0] = -3.0
    with pytest.raises(ValidationError, match=r"'p'.*-3.*index 2"):
        make_stack("p", data).validate()


def test_validate_rejects_wrong_ndim():
    with pytest.raises(ValidationError, match="3 dims"):
        make_stack("x", np.zeros((2, 2), dtype=np.float32)).validate()


def test_validate_rejects_empty_dimension():
    with pytest.raises(ValidationError, match=">= 1"):
        make_stack("x", np.zeros((0, 2, 2), dtype=np.float32)).validate()


def test_write_refuses_invalid_stack(tmp_path):
    data = np.full((1, 1, 1), np.inf, dtype=np.float32)
    with pytest.raises(ValidationError):
        write_olmf([make_stack("x", data)], str(tmp_path / "x.olmf"))


# ---------------------------------------------------------------- resample


def test_resample_frozen_2x2_to_4x4():
    src = np.array([[0.0, 1.0], [1.0, 0.0]])
    expected = np.array(
        [
            [0.0, 0.25, 0.75, 1.0],
            [0.25, 0.375, 0.625, 0.75],
            [0.75, 0.625, 0.375, 0.25],
            [1.0, 0.75, 0.25, 0.0],
        ]
    )
    assert np.allclose(resample_bilinear(src, 4, 4), expected, atol=1e-12)


def test_resample_identity_when_size_unchanged():
    rng = np.random.default_rng(0)
    src = rng.uniform(0, 5, (6, 7))
    assert np.allclose(resample_bilinear(src, 6, 7), src, atol=1e-12)


@given(
    hnp.arrays(
        dtype=np.float64,
        shape=st.tuples(st.integers(1, 6), st.integers(1, 6)),
        elements=st.floats(0, 100),
    ),
    st.integers(1, 9),
    st.integers(1, 9),
)
def test_resample_matches_scalar_oracle(src, th, tw):
    got = resample_bilinear(src, th, tw)
    assert np.allclose(got, bilinear_scalar(src, th, tw), atol=1e-9)


@given(
    st.floats(0, 1000),
    st.tuples(st.integers(1, 5), st.integers(1, 5)),
    st.integers(1, 12),
    st.integers(1, 12),
)
def test_resample_preserves_constants(value, shape, th, tw):
    src = np.full(shape, value)
    out = resample_bilinear(src, th, tw)
    assert np.all(np.abs(out - value) <= 1e-6 * max(1.0, value))


@given(
    hnp.arrays(
        dtype=np.float64,
        shape=st.tuples(st.integers(1, 6), st.integers(1, 6)),
        elements=st.floats(0, 100),
    ),
    st.integers(1, 16),
    st.integers(1, 16),
)
def test_resample_respects_min_max_bounds(src, th, tw):
    out = resample_bilinear(src, th, tw)
    eps = 1e-9 * max(1.0, float(np.abs(src).max()))
    assert out.min() >= src.min() - eps
    assert out.max() <= src.max() + eps


def test_resample_rejects_bad_target():
    with pytest.raises(ValueError):
        resample_bilinear(np.zeros((2, 2)), 0, 4)


def test_resize_stack_keeps_channels_and_dtype():
    stack = make_stack("relu5", np.random.default_rng(1).uniform(0, 2, (5, 3, 4)))
    out = resize_bilinear(stack, 7, 9)
    assert out.layer_name == "relu5"
    assert out.data.shape == (5, 7, 9)
    assert out.data.dtype == np.float32


def test_resize_is_per_channel():
    stack = make_stack("x", np.random.default_rng(2).uniform(0, 2, (3, 4, 4)))
    out = resize_bilinear(stack, 8, 8)
    for c in range(3):
        single = resample_bilinear(stack.data[c].astype(np.float64), 8, 8)
        assert np.allclose(out.data[c], single.astype(np.float32), atol=1e-6)


def test_merge_stacks_concatenates_in_order():
    a = make_stack("relu5", np.ones((2, 3, 3)))
    b = make_stack("pool5", np.full((4, 3, 3), 2.0))
    merged = merge_stacks(a, b)
    assert merged.layer_name == "relu5+pool5"
    assert merged.data.shape == (6, 3, 3)
    assert np.all(merged.data[:2] == 1.0)
    assert np.all(merged.data[2:] == 2.0)


def test_merge_stacks_rejects_grid_mismatch():
    a = make_stack("a", np.ones((1, 3, 3)))
    b = make_stack("b", np.ones((1, 2, 3)))
    with pytest.raises(DimensionError):
        merge_stacks(a, b)
