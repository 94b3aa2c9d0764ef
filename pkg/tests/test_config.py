import pytest

from censemble.config import default_config, load_config, parse_config
from censemble.errors import ConfigError
from censemble.features import STAT_IDS


def test_default_feature_count_and_layout():
    cfg = default_config()
    ids = cfg.feature_ids()
    assert len(ids) == cfg.n_features == 114
    assert len(set(ids)) == len(ids)
    assert ids[0] == "b_gif_1"
    assert sum(i.startswith("b_") for i in ids) == 16
    assert [i for i in ids if i.startswith("s_")] == [f"s_{s}" for s in STAT_IDS]


def test_hash_stable_and_sensitive():
    a, b = default_config(), default_config()
    assert a.config_hash() == b.config_hash()
    c = parse_config("[ensemble]\nseed = 2\n")
    d = parse_config("[ensemble]\nseed = 3\n")
    assert c.config_hash() != d.config_hash()


def test_transform_section():
    cfg = parse_config("[compress]\ncodecs = gif\nscales = 1\n"
                       "[transform:blur10]\nsigma = 4\ncodecs = gif, png\nscales = 1, 0.4\n")
    assert cfg.transforms[0].params == {"sigma": 4}
    assert cfg.feature_ids()[:5] == ["b_gif_1", "c_blur10_gif_1", "c_blur10_gif_0.4",
                                     "c_blur10_png_1", "c_blur10_png_0.4"]


@pytest.mark.parametrize("text", [
    "[bogus]\nx = 1\n",
    "[transform:no_such]\n",
    "[compress]\nscales = 1.5\n",
    "[compress]\nscales = one\n",
    "[compress]\ncodecs = webp\n",
    "[ensemble]\nseed = x\n",
    "[ensemble]\nstats = nope\n",
    "[ensemble]\nfractal1 = 0.1, 0.2\n",
    "not an ini file",
])
def test_config_errors(text):
    with pytest.raises((ConfigError, ValueError)):
        parse_config(text)


def test_unknown_param():
    with pytest.raises(ConfigError, match="radius"):
        parse_config("[transform:blur10]\nradius = 3\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "nope.cfg"))
