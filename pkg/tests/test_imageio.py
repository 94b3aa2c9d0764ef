import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from censemble.errors import DecodeError, TooSmall, ZeroDimension
from censemble.imageio import (NormalizedImage, load_and_normalize, normalized_dims,
                               resize_fraction, rotate90)

from .conftest import encode_png


def test_800_square_normalizes_to_400():
    img = load_and_normalize(encode_png(np.zeros((800, 800, 3), np.uint8)))
    assert (img.width, img.height) == (400, 400)
    assert img.raw_size_f == 480000


def test_small_image_is_not_upsized():
    arr = np.random.default_rng(1).integers(0, 256, (350, 350, 3), dtype=np.uint8)
    img = load_and_normalize(encode_png(arr))
    assert (img.width, img.height) == (350, 350)
    assert np.array_equal(img.pixels, arr)


def test_too_small_rejected():
    with pytest.raises(TooSmall):
        load_and_normalize(encode_png(np.zeros((200, 200, 3), np.uint8)))


def test_garbage_bytes_raise_decode_error():
    with pytest.raises(DecodeError):
        load_and_normalize(b"definitely not an image")


def test_alpha_composited_over_white():
    rgba = np.zeros((300, 300, 4), np.uint8)
    rgba[..., 0] = 255  # red, fully transparent
    img = load_and_normalize(encode_png(rgba))
    assert (img.pixels == 255).all()


def test_rotate90_permutation():
    img = NormalizedImage(np.array([[[1, 1, 1], [2, 2, 2]]], np.uint8))  # 2 wide, 1 high
    r = rotate90(img)
    assert (r.width, r.height) == (1, 2)
    assert r.pixels[:, 0, 0].tolist() == [1, 2]


def test_rotate90_four_times_identity(rgb_image):
    r = rgb_image
    for _ in range(4):
        r = rotate90(r)
    assert r.tobytes() == rgb_image.tobytes()


def test_rotate_keeps_raw_size():
    img = NormalizedImage(np.zeros((300, 400, 3), np.uint8))
    r = rotate90(img)
    assert (r.width, r.height) == (300, 400) and r.raw_size_f == img.raw_size_f


def test_resize_fraction_examples():
    img = NormalizedImage(np.zeros((400, 400, 3), np.uint8))
    assert resize_fraction(img, 0.4).pixels.shape[:2] == (160, 160)
    assert resize_fraction(img, 1).tobytes() == img.tobytes()
    odd = NormalizedImage(np.zeros((401, 399, 3), np.uint8))
    small = resize_fraction(odd, 0.1)
    assert (small.width, small.height) == (40, 40)


def test_resize_fraction_zero_dimension():
    img = NormalizedImage(np.zeros((4, 4, 3), np.uint8))
    with pytest.raises(ZeroDimension):
        resize_fraction(img, 0.1)


@given(st.integers(100, 3000), st.integers(100, 3000))
def test_normalized_dims_invariants(w, h):
    nw, nh = normalized_dims(w, h)
    if w * h <= 160000:
        assert (nw, nh) == (w, h)
    else:
        assert 80000 <= nw * nh <= 160000
        # aspect ratio kept to within a pixel
        assert abs(nw - w * nh / h) <= 1.0 + 1e-9 or abs(nh - h * nw / w) <= 1.0 + 1e-9


@given(st.integers(290, 900), st.integers(290, 900))
def test_normalization_idempotent(w, h):
    if w * h < 80000:
        return
    nw, nh = normalized_dims(w, h)
    assert normalized_dims(nw, nh) == (nw, nh)


def test_normalization_idempotent_end_to_end():
    arr = np.random.default_rng(2).integers(0, 256, (500, 700, 3), dtype=np.uint8)
    once = load_and_normalize(encode_png(arr))
    twice = load_and_normalize(encode_png(once.pixels))
    assert twice.pixels.shape == once.pixels.shape
