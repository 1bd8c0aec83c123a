"""Selects the stencil implementation at import time.

The compiled core (`fracwave._fdcore`, built from Cython) is preferred;
the numpy module `fracwave._fdpy` is the fallback when the extension is
missing.  Set FRACWAVE_PURE=1 in the environment before import to force
the fallback.  Fields produced by the two backends are bit-identical.
"""

from __future__ import annotations

import logging
import os

from . import _fdpy

logger = logging.getLogger(__name__)

if os.environ.get("FRACWAVE_PURE"):
    _impl = _fdpy
else:
    try:
        from . import _fdcore as _impl
    except ImportError:
        logger.info("compiled stencil core unavailable, using numpy fallback")
        _impl = _fdpy

BACKEND_NAME = _impl.BACKEND_NAME

fd_evolve_table = _impl.fd_evolve_table
fd_evolve_sep = _impl.fd_evolve_sep
fd_evolve_sep_batch = _impl.fd_evolve_sep_batch
