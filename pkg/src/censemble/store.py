"""Corpus matrices: in-memory type, csv/bin persistence and z-scoring.

Binary layout (all integers little-endian)::

    b"CENS1"                      5-byte magic
    uint32 header_len             length of the JSON header in bytes
    header_len bytes              UTF-8 JSON: feature_ids, config_hash,
                                  n_rows, meta, flags
    n_features * n_rows float64   one contiguous block per column

The csv format writes ``id`` plus the feature ids as header and one row per
image; metadata and the config hash go to a ``<path>.meta.json`` sidecar.
"""

import csv
import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import GroupTooSmall, SchemaMismatch

MAGIC = b"CENS1"


@dataclass
class CorpusMatrix:
    feature_ids: tuple
    values: np.ndarray
    meta: list
    config_hash: str = ""
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.feature_ids = tuple(self.feature_ids)
        self.values = np.asarray(self.values, dtype=np.float64).reshape(len(self.meta), len(self.feature_ids))
        if len(set(self.feature_ids)) != len(self.feature_ids):
            raise SchemaMismatch("duplicate feature ids")

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def ids(self):
        return [str(m["id"]) for m in self.meta]

    def row_index(self, row_id):
        for i, m in enumerate(self.meta):
            if str(m["id"]) == str(row_id):
                return i
        raise KeyError(row_id)

    def column(self, feature_id):
        return self.values[:, self.feature_ids.index(feature_id)]

    def meta_column(self, key):
        return [m.get(key) for m in self.meta]

    def subset(self, rows):
        rows = list(rows)
        return CorpusMatrix(self.feature_ids, self.values[rows], [self.meta[i] for i in rows],
                            self.config_hash, dict(self.flags))

    def select(self, feature_ids):
        cols = [self.feature_ids.index(f) for f in feature_ids]
        return CorpusMatrix(feature_ids, self.values[:, cols], list(self.meta), self.config_hash, dict(self.flags))

    def equals(self, other):
        return (self.feature_ids == other.feature_ids and self.config_hash == other.config_hash
                and self.meta == other.meta and np.array_equal(self.values, other.values))


def _fmt(x):
    return repr(float(x))


def _header(m):
    return {
        "feature_ids": list(m.feature_ids), "config_hash": m.config_hash,
        "n_rows": m.n_rows, "meta": m.meta, "flags": m.flags,
    }


def write_matrix(m, path, fmt=None):
    fmt = fmt or _infer_format(path)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id"] + list(m.feature_ids))
            for rid, row in zip(m.ids, m.values):
                w.writerow([rid] + [_fmt(v) for v in row])
        side = _header(m)
        del side["feature_ids"]
        with open(path + ".meta.json", "w") as fh:
            json.dump(side, fh, sort_keys=True, indent=1)
    elif fmt == "bin":
        head = json.dumps(_header(m), sort_keys=True).encode()
        with open(path, "wb") as fh:
            fh.write(MAGIC + struct.pack("<I", len(head)) + head)
            fh.write(np.asfortranarray(m.values).astype("<f8").tobytes(order="F"))
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")


def read_matrix(path, fmt=None):
    fmt = fmt or _infer_format(path)
    if fmt == "bin":
        with open(path, "rb") as fh:
            data = fh.read()
        if data[:5] != MAGIC:
            raise SchemaMismatch(f"{path}: not a matrix file (bad magic)")
        (hlen,) = struct.unpack_from("<I", data, 5)
        head = json.loads(data[9:9 + hlen].decode())
        n, d = head["n_rows"], len(head["feature_ids"])
        body = np.frombuffer(data, dtype="<f8", count=n * d, offset=9 + hlen)
        values = body.reshape((n, d), order="F").astype(np.float64)
        return CorpusMatrix(head["feature_ids"], values, head["meta"], head["config_hash"], head.get("flags", {}))
    if fmt == "csv":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0][:1] != ["id"]:
            raise SchemaMismatch(f"{path}: first header field must be 'id'")
        feats = rows[0][1:]
        values = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=np.float64)
        meta = [{"id": r[0]} for r in rows[1:]]
        config_hash, flags = "", {}
        side = path + ".meta.json"
        if os.path.exists(side):
            with open(side) as fh:
                info = json.load(fh)
            if len(info.get("meta", [])) == len(meta):
                meta = info["meta"]
            config_hash = info.get("config_hash", "")
            flags = info.get("flags", {})
        return CorpusMatrix(feats, values.reshape(len(meta), len(feats)), meta, config_hash, flags)
    raise ValueError(f"unknown matrix format {fmt!r}")


def _infer_format(path):
    ext = os.path.splitext(str(path))[1].lower()
    return {".csv": "csv", ".bin": "bin"}.get(ext, "bin")


def append_rows(base, extra):
    """Concatenate two matrices that share schema and config hash."""
    if base.feature_ids != extra.feature_ids or base.config_hash != extra.config_hash:
        raise SchemaMismatch("cannot append: feature ids or config hash differ")
    return CorpusMatrix(base.feature_ids, np.vstack([base.values, extra.values]),
                        base.meta + extra.meta, base.config_hash, dict(base.flags))


def zscore_matrix(m, group_by=None):
    """Standardize columns globally or within groups of a metadata key.

    Columns with zero variance (in any group) become 0 and are listed under
    ``flags["zero_variance"]``.
    """
    if group_by is None:
        groups = {None: np.arange(m.n_rows)}
    else:
        keys = [str(v) for v in m.meta_column(group_by)]
        groups = {}
        for i, k in enumerate(keys):
            groups.setdefault(k, []).append(i)
        groups = {k: np.array(v) for k, v in groups.items()}
    out = np.empty_like(m.values)
    flat = np.zeros(len(m.feature_ids), dtype=bool)
    for key, rows in groups.items():
        if len(rows) < 2:
            raise GroupTooSmall(f"group {key!r} has {len(rows)} row(s); need at least 2")
        block = m.values[rows]
        mu = block.mean(axis=0)
        sd = block.std(axis=0)
        zero = (np.ptp(block, axis=0) == 0) | (sd == 0)
        flat |= zero
        out[rows] = np.where(zero, 0.0, (block - mu) / np.where(zero, 1.0, sd))
    flags = dict(m.flags)
    flags["zero_variance"] = [f for f, z in zip(m.feature_ids, flat) if z]
    flags["zscore"] = group_by or "global"
    return CorpusMatrix(m.feature_ids, out, list(m.meta), m.config_hash, flags)
