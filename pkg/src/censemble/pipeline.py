"""Per-image ensemble computation and the parallel corpus driver."""

import csv
import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import codecs, features, transforms
from .codecs import CodecId
from .config import EnsembleConfig, format_scale
from .errors import CensembleError, EmptyCorpus, SchemaMismatch, TransformFailed
from .imageio import NormalizedImage, load_and_normalize, resize_fraction, rotate90
from .store import CorpusMatrix, append_rows

log = logging.getLogger(__name__)

MANIFEST_FIELDS = ("id", "path", "artist", "year", "style", "genre", "medium")
CACHE_ENV = "CENSEMBLE_CACHE_DIR"


@dataclass(frozen=True)
class ManifestRecord:
    id: str
    path: str
    artist: str = ""
    year: int = None
    style: str = ""
    genre: str = ""
    medium: str = ""
    extra: dict = field(default_factory=dict)

    def meta(self):
        out = {"id": self.id, "artist": self.artist, "year": self.year,
               "style": self.style, "genre": self.genre, "medium": self.medium}
        out.update(self.extra)
        return out


def read_manifest(path):
    """Parse a manifest CSV; relative image paths resolve against its folder."""
    base = os.path.dirname(os.path.abspath(path))
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [f for f in ("id", "path") if f not in (reader.fieldnames or [])]
        if missing:
            raise SchemaMismatch(f"manifest lacks columns {missing}")
        records, seen = [], set()
        for row in reader:
            rid = row["id"].strip()
            if rid in seen:
                raise SchemaMismatch(f"duplicate manifest id {rid!r}")
            seen.add(rid)
            year = (row.get("year") or "").strip()
            try:
                year = int(year) if year else None
            except ValueError:
                raise SchemaMismatch(f"{rid}: year {year!r} is not an integer") from None
            extra = {k: v for k, v in row.items() if k not in MANIFEST_FIELDS and k is not None}
            p = row["path"]
            records.append(ManifestRecord(
                rid, p if os.path.isabs(p) else os.path.join(base, p),
                row.get("artist") or "", year, row.get("style") or "",
                row.get("genre") or "", row.get("medium") or "", extra,
            ))
    return records


def write_manifest(records, path):
    extra_keys = sorted({k for r in records for k in r.extra})
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(MANIFEST_FIELDS) + extra_keys)
        for r in records:
            w.writerow([r.id, r.path, r.artist, "" if r.year is None else r.year,
                        r.style, r.genre, r.medium] + [r.extra.get(k, "") for k in extra_keys])


def image_seed(config_seed, digest):
    """Per-image seed derived from the config seed and the image hash."""
    h = hashlib.sha256(f"{config_seed}:{digest}".encode()).digest()
    return int.from_bytes(h[:8], "little")


@dataclass(frozen=True)
class EnsembleVector:
    ids: tuple
    values: np.ndarray

    def __getitem__(self, key):
        return float(self.values[self.ids.index(key)])

    def __len__(self):
        return len(self.ids)

    def as_dict(self):
        return dict(zip(self.ids, (float(v) for v in self.values)))


def compute_baselines(img, config=None, dump_dir=None, tag="image"):
    """Rotation-averaged codec sizes over the configured scales, each over f.

    Returns ``(BaselineSizes, {feature_id: ratio})``.
    """
    cfg = config or EnsembleConfig()
    f = img.raw_size_f
    ratios = {}
    scale1 = {}
    for codec in cfg.compress_codecs:
        for s in cfg.compress_scales:
            scaled = resize_fraction(img, s)
            size = codecs.size_rotavg(scaled, codec, dump_dir, f"{tag}_b_{format_scale(s)}")
            ratios[f"b_{codec}_{format_scale(s)}"] = size / f
            if s == 1:
                scale1[codec] = size
    for codec in CodecId:
        if codec.value not in scale1:
            scale1[codec.value] = codecs.size_rotavg(img, codec)
    base = codecs.BaselineSizes(
        f=f,
        b_gif=scale1["gif"] / f, b_png=scale1["png"] / f,
        b_jpeg100=scale1["jpeg100"] / f, b_jpeg0=scale1["jpeg0"] / f,
        b_gif_bytes=scale1["gif"], b_png_bytes=scale1["png"],
    )
    return base, ratios, scale1


def _transform_size(spec, entry, scaled, codec, seed, memo, dump_dir, tag):
    """Rotation-averaged size of one transform output.

    Square-padded (DFT) outputs average four sizes: the output and its
    rotation, for the input and for the rotated input.
    """
    out = transforms.apply_pixels(spec.id, scaled.pixels, seed, spec.params, memo["up"])
    _check_dims(entry, scaled.pixels.shape, out.shape)
    size = codecs.size_rotavg(NormalizedImage(out), codec, dump_dir, tag)
    if entry.dims != "square":
        return size
    rot = transforms.apply_pixels(spec.id, rotate90(scaled).pixels, seed, spec.params, memo["rot"])
    size_r = codecs.size_rotavg(NormalizedImage(rot), codec, dump_dir, tag and tag + "_rotin")
    return (size + size_r) / 2.0


def _check_dims(entry, before, after):
    h, w = before[:2]
    if entry.dims == "same":
        ok = after[:2] == (h, w)
    elif entry.dims == "square":
        ok = after[:2] == (max(h, w),) * 2
    else:
        ok = 0 < after[0] <= h and 0 < after[1] <= w
    if not ok:
        raise TransformFailed(entry.id, f"output {after[:2]} breaks the {entry.dims!r} size rule for {h}x{w}")


def compute_ensemble(img, config=None, seed=None, dump_dir=None, tag="image"):
    """Full feature vector of a normalized image under ``config``."""
    cfg = config or EnsembleConfig()
    if seed is None:
        seed = image_seed(cfg.seed, hashlib.sha256(img.tobytes()).hexdigest())
    _, ratios, scale1 = compute_baselines(img, cfg, dump_dir, tag)
    values = dict(ratios)
    scaled_cache = {}
    memos = {}
    for spec in cfg.transforms:
        entry = transforms.get(spec.id)
        for codec in spec.codecs:
            denom = scale1[codec]
            for s in spec.scales:
                if s not in scaled_cache:
                    scaled_cache[s] = resize_fraction(img, s)
                    memos[s] = {"up": {}, "rot": {}}
                fid = f"c_{spec.id}_{codec}_{format_scale(s)}"
                dtag = f"{tag}_{fid}" if dump_dir else None
                try:
                    size = _transform_size(spec, entry, scaled_cache[s], codec, seed, memos[s], dump_dir, dtag)
                except CensembleError:
                    raise
                except Exception as exc:  # any failure inside a transform
                    raise TransformFailed(spec.id, f"{type(exc).__name__}: {exc}") from exc
                values[fid] = size / denom
    if cfg.stats:
        stats = features.compute_stats(img, cfg.stat_config, cfg.stats)
        for sid in cfg.stats:
            values[f"s_{sid}"] = stats[sid]
    ids = tuple(cfg.feature_ids())
    vec = np.array([values[i] for i in ids], dtype=np.float64)
    bad = [i for i, v in zip(ids, vec) if not np.isfinite(v)]
    if bad:
        raise TransformFailed(bad[0], "non-finite feature value")
    nonpos = [i for i, v in zip(ids, vec) if i[0] in "bc" and v <= 0]
    if nonpos:
        raise TransformFailed(nonpos[0], "non-positive compression ratio")
    return EnsembleVector(ids, vec)


@dataclass(frozen=True)
class ErrorRecord:
    id: str
    path: str
    error: str
    reason: str


@dataclass
class CorpusResult:
    matrix: CorpusMatrix
    errors: list
    cache_hits: int = 0
    computed: int = 0


def default_cache_dir():
    return os.environ.get(CACHE_ENV) or None


def _cache_path(cache_dir, digest, config_hash):
    key = hashlib.sha256(f"{digest}:{config_hash}".encode()).hexdigest()
    return os.path.join(cache_dir, key[:2], key + ".json")


def _process(record, cfg, config_hash, cache_dir, dump_dir):
    """Worker: returns (status, payload, cache_hit)."""
    try:
        with open(record.path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        return "error", ("IoError", str(exc)), False
    digest = hashlib.sha256(data).hexdigest()
    cpath = _cache_path(cache_dir, digest, config_hash) if cache_dir else None
    if cpath and os.path.exists(cpath):
        try:
            with open(cpath) as fh:
                cached = json.load(fh)
            return "ok", np.array(cached["values"], dtype=np.float64), True
        except (OSError, ValueError, KeyError):
            log.warning("ignoring unreadable cache entry %s", cpath)
    try:
        img = load_and_normalize(data, cfg.target_pixels)
        vec = compute_ensemble(img, cfg, image_seed(cfg.seed, digest), dump_dir, record.id)
    except CensembleError as exc:
        return "error", (type(exc).__name__, str(exc)), False
    if cpath:
        os.makedirs(os.path.dirname(cpath), exist_ok=True)
        tmp = f"{cpath}.{os.getpid()}.tmp"
        with open(tmp, "w") as fh:
            json.dump({"ids": list(vec.ids), "values": [float(v) for v in vec.values]}, fh)
        os.replace(tmp, cpath)
    return "ok", vec.values, False


def _process_star(args):
    return _process(*args)


def compute_corpus(manifest, config=None, workers=1, cache_dir=None, dump_dir=None,
                   progress=None, existing=None):
    """Extract every manifest image; rows follow manifest order.

    Failed images are left out of the matrix and reported in ``errors``.
    ``existing`` is a matrix to append to; its config hash must match.
    """
    cfg = config or EnsembleConfig()
    records = list(manifest)
    if not records:
        raise EmptyCorpus("manifest has no records")
    chash = cfg.config_hash()
    if existing is not None and existing.config_hash != chash:
        raise SchemaMismatch("existing matrix was produced by a different config")
    jobs = [(r, cfg, chash, cache_dir, dump_dir) for r in records]
    if workers <= 1:
        results = map(_process_star, jobs)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_process_star, jobs, chunksize=1)
    rows, meta, errors = [], [], []
    hits = computed = 0
    try:
        for i, (rec, (status, payload, hit)) in enumerate(zip(records, results), start=1):
            if status == "ok":
                rows.append(payload)
                meta.append(rec.meta())
                hits += hit
                computed += not hit
            else:
                errors.append(ErrorRecord(rec.id, rec.path, payload[0], payload[1]))
                log.warning("skipping %s: %s: %s", rec.id, payload[0], payload[1])
            if progress is not None:
                progress(i, len(records))
    finally:
        if pool is not None:
            pool.shutdown()
    ids = tuple(cfg.feature_ids())
    values = np.array(rows, dtype=np.float64).reshape(len(rows), len(ids))
    matrix = CorpusMatrix(ids, values, meta, chash, {})
    if existing is not None:
        matrix = append_rows(existing, matrix)
    return CorpusResult(matrix, errors, hits, computed)
