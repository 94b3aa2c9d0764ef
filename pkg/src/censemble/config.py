"""Ensemble configuration: INI file -> :class:`EnsembleConfig`.

Feature ids are derived from the configuration:

* ``b_<codec>_<scale>``: baseline compression ratio to the raw size f
* ``c_<transform>_<codec>_<scale>``: transform ratio to the scale-1 codec size
* ``s_<stat>``: statistical features
"""

import configparser
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources

from . import transforms
from .codecs import CodecId
from .errors import BadParams, ConfigError, UnknownTransform
from .features import STAT_IDS, StatConfig
from .imageio import TARGET_PIXELS
from .transforms import TransformSpec


def format_scale(scale):
    """``1`` for 1.0, ``0.4`` for 0.4; used in feature ids."""
    return f"{scale:g}"


@dataclass(frozen=True)
class EnsembleConfig:
    seed: int = 1729
    target_pixels: int = TARGET_PIXELS
    compress_codecs: tuple = ("gif", "png", "jpeg100", "jpeg0")
    compress_scales: tuple = (1.0, 0.4, 0.2, 0.1)
    transforms: tuple = ()
    stats: tuple = STAT_IDS
    stat_config: StatConfig = field(default_factory=StatConfig)

    def __post_init__(self):
        for c in self.compress_codecs:
            CodecId.parse(c)
        seen = set()
        for spec in self.transforms:
            entry = transforms.get(spec.id)
            if spec.id in seen:
                raise ConfigError(f"transform {spec.id!r} listed twice")
            seen.add(spec.id)
            unknown = set(spec.params) - set(entry.defaults)
            if unknown:
                raise BadParams(f"{spec.id}: unknown parameters {sorted(unknown)}")
            for c in spec.codecs:
                CodecId.parse(c)
            _check_scales(spec.scales, spec.id)
        _check_scales(self.compress_scales, "compress")
        bad = [s for s in self.stats if s not in STAT_IDS]
        if bad:
            raise ConfigError(f"unknown statistical features {bad}")

    def feature_ids(self):
        ids = [f"b_{c}_{format_scale(s)}" for c in self.compress_codecs for s in self.compress_scales]
        for spec in self.transforms:
            ids += [f"c_{spec.id}_{c}_{format_scale(s)}" for c in spec.codecs for s in spec.scales]
        ids += [f"s_{s}" for s in self.stats]
        return ids

    @property
    def n_features(self):
        return len(self.feature_ids())

    def to_dict(self):
        sc = self.stat_config
        return {
            "seed": self.seed,
            "target_pixels": self.target_pixels,
            "compress": {"codecs": list(self.compress_codecs), "scales": list(self.compress_scales)},
            "transforms": [
                {"id": t.id, "params": dict(sorted(t.params.items())),
                 "codecs": list(t.codecs), "scales": list(t.scales)}
                for t in self.transforms
            ],
            "stats": list(self.stats),
            "stat_config": {
                "quantize_n": sc.quantize_n, "hough": list(sc.hough),
                "fractal_windows": [list(w) for w in sc.fractal_windows],
                "angle_bins": sc.angle_bins,
            },
        }

    def config_hash(self):
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def with_transforms(self, specs):
        """Copy with extra transform specs appended."""
        return EnsembleConfig(
            self.seed, self.target_pixels, self.compress_codecs, self.compress_scales,
            tuple(self.transforms) + tuple(specs), self.stats, self.stat_config,
        )


def _check_scales(scales, where):
    if not scales:
        raise ConfigError(f"{where}: no scales")
    for s in scales:
        if not 0 < s <= 1:
            raise ConfigError(f"{where}: scale {s} outside (0, 1]")


def _split(value):
    return [v.strip() for v in value.replace("\n", ",").split(",") if v.strip()]


def _scalar(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _floats(value, key):
    try:
        return tuple(float(v) for v in _split(value))
    except ValueError:
        raise ConfigError(f"{key}: expected numbers, got {value!r}") from None


def parse_config(text, source="<string>"):
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    ens = cp["ensemble"] if cp.has_section("ensemble") else {}
    comp = cp["compress"] if cp.has_section("compress") else {}
    kw = {}
    try:
        if "seed" in ens:
            kw["seed"] = int(ens["seed"])
        if "target_pixels" in ens:
            kw["target_pixels"] = int(ens["target_pixels"])
    except ValueError as exc:
        raise ConfigError(f"[ensemble]: {exc}") from exc
    if "stats" in ens:
        kw["stats"] = tuple(_split(ens["stats"]))
    defaults = StatConfig()
    windows = list(defaults.fractal_windows)
    for i in range(3):
        key = f"fractal{i + 1}"
        if key in ens:
            parts = _split(ens[key])
            if len(parts) != 3:
                raise ConfigError(f"{key}: expected window, step, source")
            windows[i] = (float(parts[0]), float(parts[1]), parts[2])
    try:
        kw["stat_config"] = StatConfig(
            quantize_n=int(ens.get("quantize_n", defaults.quantize_n)),
            hough=tuple(int(v) for v in _split(ens["hough"])) if "hough" in ens else defaults.hough,
            fractal_windows=tuple(windows),
            angle_bins=int(ens.get("angle_bins", defaults.angle_bins)),
        )
    except ValueError as exc:
        raise ConfigError(f"[ensemble]: {exc}") from exc
    if "codecs" in comp:
        kw["compress_codecs"] = tuple(CodecId.parse(c).value for c in _split(comp["codecs"]))
    if "scales" in comp:
        kw["compress_scales"] = _floats(comp["scales"], "compress.scales")

    specs = []
    for section in cp.sections():
        if not section.startswith("transform:"):
            if section not in ("ensemble", "compress"):
                raise ConfigError(f"unknown section [{section}]")
            continue
        tid = section.split(":", 1)[1].strip()
        body = cp[section]
        params = {k: _scalar(v) for k, v in body.items() if k not in ("codecs", "scales")}
        codecs = tuple(CodecId.parse(c).value for c in _split(body.get("codecs", "gif")))
        scales = _floats(body.get("scales", "1"), f"{section}.scales")
        specs.append(TransformSpec(tid, params, codecs, scales))
    kw["transforms"] = tuple(specs)
    try:
        return EnsembleConfig(**kw)
    except (UnknownTransform, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None):
    """Load an INI config; ``None`` gives the packaged default."""
    if path is None:
        text = resources.files("censemble").joinpath("default.cfg").read_text()
        return parse_config(text, "default.cfg")
    try:
        with open(path) as fh:
            return parse_config(fh.read(), str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def default_config():
    return load_config(None)
