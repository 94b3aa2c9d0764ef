"""Compare the compiled and pure-Python kernel backends.

Arguments are captured from real codec and transform calls on a synthetic
400x400 image, then each backend is timed on the same arguments and the
outputs are checked for equality.

    python benchmarks/bench_kernels.py [--repeat 3] [--size 400]
"""

import argparse
import sys
import timeit

import numpy as np

from censemble import _pykernels, codecs, kernels, synth, transforms
from censemble.codecs import quantize
from censemble.imageio import NormalizedImage

try:
    from censemble import _kernels
except ImportError:
    _kernels = None

NAMES = ("lzw_encode", "palette_index", "jpeg_entropy", "fs_dither", "median_cut_boxes")


def capture(pixels):
    """First call arguments of every kernel while encoding/transforming ``pixels``."""
    seen = {}
    originals = {n: getattr(kernels, n) for n in NAMES}

    def recorder(name):
        def call(*args):
            seen.setdefault(name, args)
            return originals[name](*args)
        return call

    for n in NAMES:
        setattr(kernels, n, recorder(n))
    try:
        img = NormalizedImage(pixels)
        for codec in ("gif", "png", "jpeg100"):
            codecs.encode(img, codec)
        quantize.quantize(pixels, 200)
        transforms.apply_transform("colors_quantize_bw_dither", img)
    finally:
        for n, f in originals.items():
            setattr(kernels, n, f)
    return seen


def _same(a, b):
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=400)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the Python backend is available", file=sys.stderr)
        return 1
    rng = synth._rng(0, "fractal_noise", 0)
    params = synth.family_params(synth.SynthFamilySpec("fractal_noise"), 1900, 1800, rng)
    pixels = synth.render("fractal_noise", params, rng, args.size, args.size)
    calls = capture(pixels)
    print(f"{'kernel':<18}{'cython s':>12}{'python s':>12}{'speedup':>10}  equal")
    for name in NAMES:
        if name not in calls:
            print(f"{name:<18}{'not exercised':>34}")
            continue
        a = calls[name]
        fast, slow = getattr(_kernels, name), getattr(_pykernels, name)
        same = _same(fast(*a), slow(*a))
        tf = min(timeit.repeat(lambda: fast(*a), number=1, repeat=args.repeat))
        ts = min(timeit.repeat(lambda: slow(*a), number=1, repeat=args.repeat))
        print(f"{name:<18}{tf:>12.4f}{ts:>12.4f}{ts / tf:>9.1f}x  {same}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
