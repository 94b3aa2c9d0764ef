import io

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from PIL import Image

from censemble.imageio import NormalizedImage

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def encode_png(arr):
    buf = io.BytesIO()
    Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(buf, format="PNG")
    return buf.getvalue()


def gradient_image(h=120, w=160, seed=0):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[:h, :w]
    px = np.stack([(xx * 255 // max(w - 1, 1)), (yy * 255 // max(h - 1, 1)),
                   (xx + yy) % 256], axis=-1).astype(np.int64)
    px = px + rng.integers(-12, 13, size=px.shape)
    return NormalizedImage(np.clip(px, 0, 255).astype(np.uint8))


@pytest.fixture
def rgb_image():
    return gradient_image()


@pytest.fixture
def gray_image():
    g = gradient_image().pixels[..., 0]
    return NormalizedImage(np.repeat(g[..., None], 3, axis=2))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
