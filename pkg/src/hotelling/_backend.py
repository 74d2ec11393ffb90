"""Select the compiled kernels when available, else the pure-Python ones.

Set ``HOTELLING_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

fallback = _kernels_py
compiled = None

try:
    from . import _kernels as compiled  # type: ignore[no-redef]
except ImportError:  # pragma: no cover - depends on the build
    compiled = None

if compiled is not None and os.environ.get("HOTELLING_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
    kernels = compiled
else:
    kernels = fallback

log.debug("hotelling kernels: %s", "compiled" if kernels.COMPILED else "pure-python")
