import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from censemble.errors import GroupTooSmall, SchemaMismatch
from censemble.store import MAGIC, CorpusMatrix, append_rows, read_matrix, write_matrix, zscore_matrix

finite = st.floats(-1e12, 1e12, allow_nan=False, allow_infinity=False)


def _matrix(values, groups=None):
    values = np.asarray(values, dtype=np.float64)
    n, d = values.shape
    meta = [{"id": f"img{i}", "artist": f"a{i % 3}", "year": 1900 + i,
             "era": (groups[i] if groups else "x")} for i in range(n)]
    return CorpusMatrix([f"f{j}" for j in range(d)], values, meta, "hash123")


@pytest.mark.parametrize("fmt", ["csv", "bin"])
@given(values=arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 5)), elements=finite))
def test_round_trip(tmp_path_factory, fmt, values):
    path = str(tmp_path_factory.mktemp("m") / f"m.{fmt}")
    m = _matrix(values)
    write_matrix(m, path)
    back = read_matrix(path)
    assert back.feature_ids == m.feature_ids and back.meta == m.meta
    assert back.config_hash == "hash123"
    assert np.allclose(back.values, m.values, rtol=1e-15, atol=0)


def test_csv_header_and_bin_magic(tmp_path):
    m = _matrix(np.arange(6.0).reshape(2, 3))
    write_matrix(m, str(tmp_path / "a.csv"))
    write_matrix(m, str(tmp_path / "a.bin"))
    assert (tmp_path / "a.csv").read_text().split(",")[0] == "id"
    assert (tmp_path / "a.bin").read_bytes()[:5] == MAGIC == b"CENS1"


def test_bin_columns_are_little_endian_blocks(tmp_path):
    m = _matrix(np.array([[1.0, 2.0], [3.0, 4.0]]))
    write_matrix(m, str(tmp_path / "a.bin"))
    data = (tmp_path / "a.bin").read_bytes()
    assert data[-32:] == np.array([1.0, 3.0, 2.0, 4.0], "<f8").tobytes()


def test_bad_magic(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"NOPE!" + bytes(20))
    with pytest.raises(SchemaMismatch):
        read_matrix(str(p))


def test_append_requires_same_schema():
    a = _matrix(np.ones((2, 2)))
    b = CorpusMatrix(["f0", "g"], np.ones((1, 2)), [{"id": "z"}], "hash123")
    with pytest.raises(SchemaMismatch):
        append_rows(a, b)
    assert append_rows(a, a).n_rows == 4


@given(arrays(np.float64, st.tuples(st.integers(3, 12), st.integers(1, 5)),
              elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_global_zscore(values):
    z = zscore_matrix(_matrix(values))
    for j in range(values.shape[1]):
        col = z.values[:, j]
        if np.ptp(values[:, j]) == 0:
            assert np.all(col == 0) and f"f{j}" in z.flags["zero_variance"]
        elif values[:, j].std() > 1e-6 * (1 + np.abs(values[:, j]).max()):
            assert abs(col.mean()) < 1e-9
            assert abs(col.std() - 1) < 1e-9


@given(arrays(np.int64, st.tuples(st.integers(3, 12), st.integers(1, 4)), elements=st.integers(-1000, 1000)))
def test_zscore_idempotent(values):
    z1 = zscore_matrix(_matrix(values.astype(np.float64)))
    assert np.abs(zscore_matrix(z1).values - z1.values).max() < 1e-12


def test_zscore_idempotent_example():
    v = np.random.default_rng(0).normal(size=(20, 4)) * [1, 10, 100, 1000] + 7
    z1 = zscore_matrix(_matrix(v))
    assert np.abs(zscore_matrix(z1).values - z1.values).max() < 1e-12


def test_constant_column_flagged():
    v = np.c_[np.arange(5.0), np.full(5, 3.0)]
    z = zscore_matrix(_matrix(v))
    assert np.all(z.values[:, 1] == 0)
    assert z.flags["zero_variance"] == ["f1"]


def test_grouped_zscore_independent():
    rng = np.random.default_rng(1)
    groups = ["early"] * 6 + ["late"] * 6
    v = rng.normal(size=(12, 3)) + np.r_[np.zeros(6), np.full(6, 50.0)][:, None]
    z = zscore_matrix(_matrix(v, groups), group_by="era")
    for g in ("early", "late"):
        rows = [i for i, x in enumerate(groups) if x == g]
        assert np.all(np.abs(z.values[rows].mean(axis=0)) < 1e-9)
        assert np.all(np.abs(z.values[rows].std(axis=0) - 1) < 1e-9)


def test_group_too_small():
    with pytest.raises(GroupTooSmall):
        zscore_matrix(_matrix(np.ones((3, 2)), ["a", "a", "b"]), group_by="era")
