"""Synthetic labeled image corpora for tests and demonstrations.

Five families of procedurally generated images. Every image depends only on
(seed, family, index), so regenerating a corpus gives identical bytes.
Family parameters are drawn from per-family ranges, which ``params`` can fix
to a value or replace with another (low, high) range. A ``label`` gives a
family variant its own style label and random stream, so two variants of
one generator make a deliberately similar pair. A ``drift`` entry makes a
parameter a linear function of the image's year instead::

    value(year) = base + slope * (year - first_year)
"""

import hashlib
import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .pipeline import ManifestRecord, write_manifest

FAMILIES = ("constant", "stripes", "checker_noise", "gaussian_blobs", "fractal_noise")

# parameter -> (low, high) for the random draw
RANGES = {
    "constant": {"noise": (0.0, 6.0)},
    "stripes": {"period": (6.0, 48.0), "angle": (0.0, 180.0), "softness": (0.0, 1.0)},
    "checker_noise": {"cell": (6.0, 50.0), "noise": (8.0, 40.0)},
    "gaussian_blobs": {"count": (6.0, 30.0), "radius": (12.0, 70.0)},
    "fractal_noise": {"beta": (2.0, 3.2), "contrast": (0.6, 1.0)},
}


@dataclass(frozen=True)
class SynthFamilySpec:
    family: str
    params: dict = field(default_factory=dict)  # fixed values or (low, high) ranges
    drift: dict = field(default_factory=dict)  # param -> (base, slope per year)
    seed: int = 0
    label: str = None  # style label, defaults to the family

    @property
    def style(self):
        return self.label or self.family

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        bad = (set(self.params) | set(self.drift)) - set(RANGES[self.family])
        if bad:
            raise ValueError(f"{self.family}: unknown parameters {sorted(bad)}")


def _rng(seed, family, index):
    h = hashlib.sha256(f"{seed}:{family}:{index}".encode()).digest()
    return np.random.default_rng(int.from_bytes(h[:8], "little"))


def family_params(spec, year, first_year, rng):
    """Parameter values for one image: drift rule, fixed value or random draw."""
    out = {}
    for name, (lo, hi) in RANGES[spec.family].items():
        u = rng.random()  # drawn for every parameter so the stream stays aligned
        fixed = spec.params.get(name)
        if isinstance(fixed, (tuple, list)):
            lo, hi = fixed
            fixed = None
        if name in spec.drift:
            base, slope = spec.drift[name]
            out[name] = base + slope * (year - first_year)
        elif fixed is not None:
            out[name] = float(fixed)
        else:
            out[name] = lo + (hi - lo) * u
    return out


def _colors(rng, n):
    return rng.integers(0, 256, size=(n, 3)).astype(np.float64)


def _to_u8(x):
    return np.clip(np.floor(x + 0.5), 0, 255).astype(np.uint8)


def render(family, params, rng, width=400, height=400):
    """One RGB image (H, W, 3) uint8 of ``family`` with ``params``."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    if family == "constant":
        base = _colors(rng, 1)[0]
        img = base + params["noise"] * rng.standard_normal((height, width, 1))
    elif family == "stripes":
        a, b = _colors(rng, 2)
        th = np.deg2rad(params["angle"])
        phase = (xx * np.cos(th) + yy * np.sin(th)) / max(params["period"], 1.0)
        wave = np.sin(2 * np.pi * phase)
        sharp = 1.0 + 30.0 * (1.0 - params["softness"])
        mix = 0.5 + 0.5 * np.tanh(sharp * wave)
        img = a + (b - a) * mix[..., None]
    elif family == "checker_noise":
        a, b = _colors(rng, 2)
        cell = max(int(round(params["cell"])), 1)
        ox, oy = rng.integers(0, cell, size=2)
        mask = (((xx + ox) // cell + (yy + oy) // cell) % 2)[..., None]
        img = a + (b - a) * mask + params["noise"] * rng.standard_normal((height, width, 3))
    elif family == "gaussian_blobs":
        img = np.broadcast_to(_colors(rng, 1)[0], (height, width, 3)).copy()
        for _ in range(max(int(round(params["count"])), 1)):
            cx, cy = rng.random() * width, rng.random() * height
            r = params["radius"] * (0.5 + rng.random())
            w = np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * r * r))[..., None]
            img = img * (1 - w) + _colors(rng, 1)[0] * w
    elif family == "fractal_noise":
        fy = np.fft.fftfreq(height)[:, None]
        fx = np.fft.fftfreq(width)[None, :]
        f = np.hypot(fx, fy)
        f[0, 0] = 1.0
        amp = f ** (-params["beta"] / 2.0)  # power spectrum ~ 1/f^beta
        amp[0, 0] = 0.0
        chans = []
        for _ in range(3):
            spec = amp * np.exp(2j * np.pi * rng.random((height, width)))
            field_ = np.fft.ifft2(spec).real
            field_ = (field_ - field_.mean()) / (field_.std() or 1.0)
            chans.append(field_)
        mixc = _colors(rng, 2)
        img = 127.5 + params["contrast"] * 50.0 * np.stack(chans, axis=-1)
        img = img * 0.5 + 0.5 * mixc[0]
    else:
        raise ValueError(f"unknown family {family!r}")
    return _to_u8(img)


def generate_synthetic_corpus(specs, n_per_family, outdir, years=(1800, 1990), seed=0,
                              width=400, height=400, n_artists=10, manifest_name="manifest.csv"):
    """Write PNGs and a manifest; returns the manifest path.

    ``specs`` is a sequence of SynthFamilySpec or family names. The family
    (or its label) is written as ``style``; artist and year are
    synthetic.
    """
    specs = [s if isinstance(s, SynthFamilySpec) else SynthFamilySpec(s, seed=seed) for s in specs]
    img_dir = os.path.join(outdir, "images")
    os.makedirs(img_dir, exist_ok=True)
    first, last = years
    records = []
    for spec in specs:
        for i in range(n_per_family):
            rng = _rng(spec.seed, spec.style, i)
            year = int(rng.integers(first, last + 1))
            artist = f"{spec.style}_artist{int(rng.integers(n_artists)):02d}"
            params = family_params(spec, year, first, rng)
            pixels = render(spec.family, params, rng, width, height)
            rid = f"{spec.style}_{i:04d}"
            rel = os.path.join("images", rid + ".png")
            Image.fromarray(pixels, "RGB").save(os.path.join(outdir, rel), format="PNG")
            records.append(ManifestRecord(rid, rel, artist, year, spec.style, "synthetic", "digital",
                                          {"family": spec.family}))
    path = os.path.join(outdir, manifest_name)
    write_manifest(records, path)
    return path
