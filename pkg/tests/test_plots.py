import xml.etree.ElementTree as ET

import numpy as np

from censemble import plots
from censemble.analysis import rolling_trend

NS = "{http://www.w3.org/2000/svg}"


def _trend():
    rng = np.random.default_rng(0)
    t = rng.integers(1900, 1960, size=400)
    v = rng.normal(size=400)
    return list(zip(t.tolist(), v.tolist())), rolling_trend(list(t), v, min_n=50, max_window=30)


def test_trend_svg_parses_and_is_deterministic():
    pts, rows = _trend()
    a = plots.trend_svg(pts, rows)
    assert a == plots.trend_svg(pts, rows)
    root = ET.fromstring(a)
    assert root.tag == NS + "svg"
    assert len(root.findall(NS + "circle")) == len(pts)
    assert len(root.findall(NS + "polyline")) >= 5


def test_trend_svg_escapes_labels():
    pts, rows = _trend()
    ET.fromstring(plots.trend_svg(pts, rows, xlabel="a<b", ylabel="c&d", title="\"t\""))


def test_temporal_svg():
    years = np.arange(1800, 1900)
    scores = np.sin(years / 10.0)
    s = plots.temporal_svg(years, scores, fit=[(1800, 0.0), (1899, 0.5)])
    root = ET.fromstring(s)
    assert len(root.findall(NS + "circle")) == 100
    assert s == plots.temporal_svg(years, scores, fit=[(1800, 0.0), (1899, 0.5)])


def test_empty_inputs():
    ET.fromstring(plots.trend_svg([], []))
    ET.fromstring(plots.temporal_svg([], []))
