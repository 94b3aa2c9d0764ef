"""Fourier magnitude and phase images."""

import numpy as np

from ..colorspace import gray3, gray_int


def _square_pad(gray):
    h, w = gray.shape
    side = max(h, w)
    out = np.full((side, side), gray.mean(), dtype=np.float64)
    out[:h, :w] = gray
    return out


def fft_pair(pixels):
    """(magnitude, phase) images of the centred 2-D DFT of the grayscale.

    The grayscale is padded with its mean to a square. Magnitude is
    log(1 + |F|) min-max scaled to 0..255; phase maps [-pi, pi] to 0..255.
    Coefficients negligible against the largest have their phase zeroed.
    """
    g = _square_pad(gray_int(pixels) / 255.0)
    f = np.fft.fftshift(np.fft.fft2(g))
    mag = np.abs(f)
    logmag = np.log1p(mag)
    lo, hi = logmag.min(), logmag.max()
    if hi > lo:
        m = np.floor((logmag - lo) / (hi - lo) * 255.0 + 0.5)
    else:
        m = np.zeros_like(logmag)
    tiny = mag <= 1e-9 * max(mag.max(), 1e-300)
    phase = np.where(tiny, 0.0, np.angle(np.where(tiny, 1.0, f)))
    p = np.floor((phase + np.pi) / (2 * np.pi) * 255.0 + 0.5)
    return gray3(m.astype(np.uint8)), gray3(np.clip(p, 0, 255).astype(np.uint8))


def fft_magnitude(pixels):
    return fft_pair(pixels)[0]


def fft_phase(pixels):
    return fft_pair(pixels)[1]
