"""Kernel selection: the compiled extension when importable, else the numpy fallback.

Set ``HEXFORGE_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py as fallback

compiled = None
if os.environ.get("HEXFORGE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else fallback
BACKEND = "cython" if compiled is not None else "python"

bfs_distances = _impl.bfs_distances
walk_search = _impl.walk_search
