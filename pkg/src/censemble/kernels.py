"""Backend selection for the hot loops.

The compiled extension is used when it imported cleanly; otherwise the
pure-Python versions are used. Set ``CENSEMBLE_PURE_PYTHON=1`` to force the
fallback (handy for checking the two agree).
"""

import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

_ext = None
if os.environ.get("CENSEMBLE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _ext
    except ImportError:  # pragma: no cover - depends on the build
        log.debug("compiled kernels unavailable, using pure-Python fallback")
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
_impl = _ext if _ext is not None else _pykernels

lzw_encode = _impl.lzw_encode
palette_index = _impl.palette_index
jpeg_entropy = _impl.jpeg_entropy
fs_dither = _impl.fs_dither
median_cut_boxes = _impl.median_cut_boxes
