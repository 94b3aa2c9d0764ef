from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from censemble import features
from censemble.codecs.quantize import quantize
from censemble.errors import DegenerateScales
from censemble.imageio import NormalizedImage, rotate90
from censemble.transforms import lines

from .conftest import gradient_image

small_rgb = arrays(np.uint8, st.tuples(st.integers(8, 24), st.integers(8, 24), st.just(3)))


def _img(px):
    return NormalizedImage(np.asarray(px, np.uint8))


def _const(h, w, rgb):
    return _img(np.broadcast_to(np.array(rgb, np.uint8), (h, w, 3)))


def _halves(a, b, h=40, w=40):
    px = np.empty((h, w, 3), np.uint8)
    px[:, : w // 2] = a
    px[:, w // 2:] = b
    return _img(px)


def _bw_mask_image(mask):
    g = np.where(mask, 0, 255).astype(np.uint8)
    return _img(np.repeat(g[..., None], 3, axis=2))


def carpet(level):
    c = np.ones((1, 1), bool)
    for _ in range(level):
        z = np.zeros_like(c)
        c = np.block([[c, c, c], [c, z, c], [c, c, c]])
    return c


# colorfulness

def test_rgb_gray_is_zero(gray_image):
    assert features.colorfulness_rgb(gray_image) == 0.0


def test_rgb_red_green_halves():
    v = features.colorfulness_rgb(_halves((255, 0, 0), (0, 255, 0)))
    assert abs(v - (255 + 0.3 * 127.5)) < 1e-6
    assert abs(v - 293.25) < 1e-6


def test_rgb_constant_red():
    v = features.colorfulness_rgb(_const(10, 10, (255, 0, 0)))
    assert abs(v - 0.3 * np.hypot(255, 127.5)) < 1e-9
    assert abs(v - 85.5294) < 1e-3


def test_lab_gray_is_zero(gray_image):
    assert features.colorfulness_lab(gray_image) == pytest.approx(0.0, abs=1e-9)


def test_lab_red_green_above_red():
    assert (features.colorfulness_lab(_halves((255, 0, 0), (0, 255, 0)))
            > features.colorfulness_lab(_const(10, 10, (255, 0, 0))))


def test_lab_matches_independent_oracle():
    skcolor = pytest.importorskip("skimage.color")
    px = np.random.default_rng(5).integers(0, 256, size=(30, 40, 3), dtype=np.uint8)
    lab = skcolor.rgb2lab(px, illuminant="D65", observer="2").reshape(-1, 3)
    chroma = np.sqrt(lab[:, 1] ** 2 + lab[:, 2] ** 2)
    oracle = chroma.std() + 0.94 * chroma.mean()
    assert features.colorfulness_lab(_img(px)) == pytest.approx(oracle, rel=1e-4)


@given(small_rgb, st.integers(0, 2**32 - 1))
def test_colorfulness_permutation_invariant(px, seed):
    flat = px.reshape(-1, 3)
    perm = np.random.default_rng(seed).permutation(len(flat))
    shuffled = flat[perm].reshape(px.shape)
    assert features.colorfulness_rgb(_img(px)) == pytest.approx(features.colorfulness_rgb(_img(shuffled)),
                                                                rel=1e-12, abs=1e-12)
    assert features.colorfulness_lab(_img(px)) == pytest.approx(features.colorfulness_lab(_img(shuffled)),
                                                                rel=1e-12, abs=1e-12)


# color frequencies and contrast

def test_uniform_four_colors():
    px = np.zeros((20, 20, 3), np.uint8)
    px[:10, 10:] = (255, 0, 0)
    px[10:, :10] = (0, 0, 255)
    px[10:, 10:] = (255, 255, 255)
    s = features.color_frequency_stats(_img(px))
    assert abs(s["entropy"] - 2.0) < 1e-9
    assert s["max"] == 0.25 and s["mean"] == 0.25 and s["sd"] == 0.0


def test_constant_frequencies():
    s = features.color_frequency_stats(_const(9, 9, (3, 4, 5)))
    assert s["entropy"] == 0.0 and s["max"] == 1.0


def test_frequencies_match_counting_oracle():
    px = np.random.default_rng(2).integers(0, 256, size=(40, 50, 3), dtype=np.uint8)
    palette, index = quantize(px, 200)
    colors = palette[np.asarray(index).ravel()]
    counts = np.array(sorted(Counter(map(tuple, colors)).values()), float)
    p = counts / counts.sum()
    s = features.color_frequency_stats(_img(px))
    assert s["entropy"] == pytest.approx(-(p * np.log2(p)).sum(), abs=1e-12)
    assert s["max"] == pytest.approx(p.max(), abs=1e-15)
    assert s["mean"] == pytest.approx(p.mean(), abs=1e-15)
    assert s["median"] == pytest.approx(np.median(p), abs=1e-15)
    assert s["sd"] == pytest.approx(p.std(), abs=1e-15)


@given(small_rgb)
def test_entropy_bounds(px):
    s = features.color_frequency_stats(_img(px))
    distinct = len(np.unique(px.reshape(-1, 3), axis=0))
    assert -1e-12 <= s["entropy"] <= np.log2(distinct) + 1e-9


def test_contrast_black_white():
    c = features.contrast_stats(_halves((0, 0, 0), (255, 255, 255)))
    assert abs(c["range"] - 100.0) < 0.5
    assert abs(c["sd"] - 50.0) < 0.5


def test_contrast_constant():
    c = features.contrast_stats(_const(10, 12, (40, 90, 200)))
    assert c["range"] == 0.0 and c["sd"] == 0.0


# Hough angle entropy

def test_angle_entropy_blank():
    assert features.hough_angle_entropy(_const(100, 100, (255, 255, 255))) == 0.0


def _line_image(rows=(), cols=(), n=200):
    px = np.full((n, n, 3), 255, np.uint8)
    for r in rows:
        px[r - 1:r + 2] = 0
    for c in cols:
        px[:, c - 1:c + 2] = 0
    return _img(px)


def test_angle_entropy_parallel_horizontal():
    img = _line_image(rows=(40, 100, 160))
    edges = lines.canny(img.pixels[..., 0] / 255.0)
    found = lines.hough_lines(edges)
    assert found
    # accumulator oracle: every detected cell sits at theta = 90 degrees
    acc, thetas, _ = lines.hough_accumulator(edges)
    assert np.argmax(acc.max(axis=0)) == 90
    assert {round(np.rad2deg(t)) for _, t, _ in found} == {90}
    assert features.hough_angle_entropy(img) == 0.0


def test_angle_entropy_horizontal_and_vertical():
    img = _line_image(rows=(60, 140), cols=(60, 140))
    edges = lines.canny(img.pixels[..., 0] / 255.0)
    angles = Counter(round(np.rad2deg(t)) % 180 for _, t, _ in lines.hough_lines(edges))
    assert set(angles) == {0, 90} and angles[0] == angles[90]
    assert features.hough_angle_entropy(img) == pytest.approx(1.0, abs=1e-12)


# fractal dimension

def test_fractal_filled_square():
    assert abs(features.fractal_dimension(_const(200, 200, (0, 0, 0)), 1 / 3, 1 / 4) - 2.0) <= 0.1


def test_fractal_carpet():
    img = _bw_mask_image(carpet(5))
    assert abs(features.fractal_dimension(img, 1, 1) - np.log(8) / np.log(3)) <= 0.1


def test_fractal_horizontal_line():
    mask = np.zeros((200, 200), bool)
    mask[100] = True
    assert abs(features.fractal_dimension(_bw_mask_image(mask), 1 / 3, 1 / 4) - 1.0) <= 0.15


def test_fractal_empty_is_zero():
    assert features.fractal_dimension(_const(64, 64, (255, 255, 255)), 1 / 3, 1 / 4) == 0.0


def test_fractal_degenerate():
    with pytest.raises(DegenerateScales):
        features.fractal_dimension(_const(10, 10, (0, 0, 0)), 0.2, 0.1)
    with pytest.raises(ValueError):
        features.fractal_dimension(_const(10, 10, (0, 0, 0)), 0, 0.1)


@given(arrays(np.bool_, st.tuples(st.integers(32, 64), st.integers(32, 64))))
def test_fractal_range(mask):
    v = features.fractal_dimension(_bw_mask_image(mask), 1 / 2, 1 / 8)
    assert 0.0 <= v <= 2.0


def test_positions_mirror_symmetric():
    pos = features._positions(100, 30, 8)
    assert np.array_equal(np.sort(70 - pos), pos)
    assert pos[0] == 0 and pos[-1] == 70


# whole-vector properties

def test_stats_rotation_invariant():
    img = gradient_image(140, 120, seed=4)
    a = features.compute_stats(img)
    b = features.compute_stats(rotate90(img))
    assert list(a) == list(features.STAT_IDS)
    for k in a:
        if k.startswith("fractal") or k == "stats_angleentropy":
            assert b[k] == pytest.approx(a[k], rel=0.02, abs=1e-12), k
        else:
            assert b[k] == pytest.approx(a[k], rel=1e-9, abs=1e-9), k


def test_stats_rotation_invariant_lines():
    img = _line_image(rows=(50, 120), cols=(80,))
    a = features.compute_stats(img)
    b = features.compute_stats(rotate90(img))
    assert b["stats_angleentropy"] == pytest.approx(a["stats_angleentropy"], rel=0.02)


def test_stat_config_validation():
    with pytest.raises(ValueError):
        features.StatConfig(fractal_windows=((0.1, 0.1, "bilevel"),))
    with pytest.raises(ValueError):
        features.StatConfig(quantize_n=0)
