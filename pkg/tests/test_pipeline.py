import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from censemble import synth
from censemble.config import default_config, parse_config
from censemble.errors import EmptyCorpus, SchemaMismatch
from censemble.imageio import NormalizedImage
from censemble.pipeline import (ManifestRecord, compute_baselines, compute_corpus, compute_ensemble,
                                read_manifest, write_manifest)
from censemble.store import write_matrix

from .conftest import encode_png, gradient_image

SMALL = """
[ensemble]
seed = 7
target_pixels = 4096
stats = stats_colorfulness_rgb, stats_contrastsd, fractaldim2
[compress]
codecs = gif, png, jpeg100, jpeg0
scales = 1, 0.4
[transform:identity]
codecs = gif, png
scales = 1
[transform:colors_grayscale]
codecs = gif
scales = 1
[transform:blur10]
codecs = gif
scales = 1, 0.4
[transform:fft1]
codecs = gif
scales = 1
[transform:fx_scramble]
codecs = png
scales = 1
"""


@pytest.fixture(scope="module")
def small_cfg():
    return parse_config(SMALL)


def _write_images(tmp_path, n=3):
    records = []
    for i in range(n):
        p = tmp_path / f"im{i}.png"
        p.write_bytes(encode_png(gradient_image(64, 64, seed=i).pixels))
        records.append(ManifestRecord(f"im{i}", str(p), f"artist{i % 2}", 1900 + i, "s", "g", "m",
                                      {"source": f"src{i}"}))
    return records


def test_constant_baselines():
    img = NormalizedImage(np.full((400, 400, 3), 77, np.uint8))
    base, ratios, _ = compute_baselines(img)
    assert base.f == 480000
    assert all(v < 0.05 for v in ratios.values())
    assert base.b_jpeg0 <= base.b_jpeg100


@settings(max_examples=10)
@given(arrays(np.uint8, st.tuples(st.integers(20, 40), st.integers(20, 40), st.just(3))))
def test_jpeg0_never_above_jpeg100(px):
    base, _, _ = compute_baselines(NormalizedImage(px), parse_config(SMALL))
    assert base.b_jpeg0 <= base.b_jpeg100


def colorful_fixtures(size=64):
    """Multi-colored painting-like rasters: soft color blobs and color noise fields."""
    out = []
    for fam in ("gaussian_blobs", "fractal_noise"):
        for i in range(3):
            rng = synth._rng(0, fam, i)
            rng.integers(1800, 1991), rng.integers(10)  # year and artist draws, as in the generator
            params = synth.family_params(synth.SynthFamilySpec(fam), 1900, 1800, rng)
            out.append(NormalizedImage(synth.render(fam, params, rng, size, size)))
    return out


def test_identity_and_grayscale_ratios(small_cfg, gray_image):
    g = compute_ensemble(gray_image, small_cfg)
    assert g["c_identity_gif_1"] == 1.0 and g["c_identity_png_1"] == 1.0
    assert g["c_colors_grayscale_gif_1"] == 1.0
    for img in colorful_fixtures():
        c = compute_ensemble(img, small_cfg)
        assert c["c_identity_gif_1"] == 1.0
        assert c["c_colors_grayscale_gif_1"] < 1.0


def test_vector_layout(small_cfg, rgb_image):
    v = compute_ensemble(rgb_image, small_cfg)
    assert v.ids == tuple(small_cfg.feature_ids())
    assert len(v) == small_cfg.n_features
    assert np.all(np.isfinite(v.values))
    assert all(x > 0 for k, x in v.as_dict().items() if k[0] in "bc")


def test_default_config_layout():
    assert default_config().n_features == 114


def test_manifest_round_trip(tmp_path):
    recs = _write_images(tmp_path, 2)
    path = tmp_path / "manifest.csv"
    write_manifest(recs, str(path))
    back = read_manifest(str(path))
    assert [r.id for r in back] == ["im0", "im1"]
    assert back[1].extra == {"source": "src1"} and back[1].year == 1901


def test_manifest_duplicate_id(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("id,path\na,x.png\na,y.png\n")
    with pytest.raises(SchemaMismatch):
        read_manifest(str(p))


def test_workers_give_identical_bytes(tmp_path, small_cfg):
    recs = _write_images(tmp_path)
    one = compute_corpus(recs, small_cfg, workers=1).matrix
    two = compute_corpus(recs, small_cfg, workers=2).matrix
    write_matrix(one, str(tmp_path / "a.bin"))
    write_matrix(two, str(tmp_path / "b.bin"))
    assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()
    assert one.ids == ["im0", "im1", "im2"]
    assert one.meta[2]["source"] == "src2"


def test_unreadable_path_gives_error_record(tmp_path, small_cfg):
    recs = _write_images(tmp_path, 2)
    recs.insert(1, ManifestRecord("ghost", str(tmp_path / "missing.png")))
    res = compute_corpus(recs, small_cfg)
    assert res.matrix.n_rows == 2 and res.matrix.ids == ["im0", "im1"]
    assert len(res.errors) == 1 and res.errors[0].id == "ghost"


def test_undecodable_and_too_small(tmp_path, small_cfg):
    recs = _write_images(tmp_path, 1)
    (tmp_path / "junk.png").write_bytes(b"not an image")
    (tmp_path / "tiny.png").write_bytes(encode_png(np.zeros((10, 10, 3), np.uint8)))
    recs += [ManifestRecord("junk", str(tmp_path / "junk.png")),
             ManifestRecord("tiny", str(tmp_path / "tiny.png"))]
    res = compute_corpus(recs, small_cfg)
    assert res.matrix.n_rows == 1
    assert {e.id: e.error for e in res.errors} == {"junk": "DecodeError", "tiny": "TooSmall"}


def test_cache_hits(tmp_path, small_cfg):
    recs = _write_images(tmp_path)
    cache = tmp_path / "cache"
    first = compute_corpus(recs, small_cfg, cache_dir=str(cache))
    second = compute_corpus(recs, small_cfg, cache_dir=str(cache))
    assert (first.cache_hits, first.computed) == (0, 3)
    assert (second.cache_hits, second.computed) == (3, 0)
    assert second.matrix.equals(first.matrix)
    # another config misses the cache
    other = parse_config(SMALL.replace("seed = 7", "seed = 8"))
    assert compute_corpus(recs, other, cache_dir=str(cache)).cache_hits == 0


def test_append_and_schema_mismatch(tmp_path, small_cfg):
    recs = _write_images(tmp_path)
    base = compute_corpus(recs[:2], small_cfg).matrix
    grown = compute_corpus(recs[2:], small_cfg, existing=base).matrix
    assert grown.ids == ["im0", "im1", "im2"]
    other = parse_config(SMALL.replace("seed = 7", "seed = 8"))
    with pytest.raises(SchemaMismatch):
        compute_corpus(recs[2:], other, existing=base)


def test_empty_corpus(small_cfg):
    with pytest.raises(EmptyCorpus):
        compute_corpus([], small_cfg)


def test_progress_callback(tmp_path, small_cfg):
    seen = []
    compute_corpus(_write_images(tmp_path, 2), small_cfg, progress=lambda i, n: seen.append((i, n)))
    assert seen == [(1, 2), (2, 2)]


def test_dump_streams(tmp_path, small_cfg, rgb_image):
    compute_ensemble(rgb_image, small_cfg, dump_dir=str(tmp_path))
    names = [p.name for p in tmp_path.iterdir()]
    assert any(n.endswith(".gif") for n in names) and any(n.endswith(".png") for n in names)
