"""Compiled copies of the kernels in ``_kernels``.

The code objects are rebound to this module's globals, so compiled callers
resolve compiled callees and numba's on-disk cache can re-import them.
"""

import types

import numba
import numpy as np  # noqa: F401  (referenced by the kernel code)

from . import _kernels as _src

for _name in ("_ancestor_mask", "_reachable", "_reachable_batch"):
    _fn = getattr(_src, _name)
    globals()[_name] = numba.njit(nogil=True, cache=True)(
        types.FunctionType(_fn.__code__, globals(), _name, _fn.__defaults__)
    )

ancestor_mask = _ancestor_mask  # noqa: F821
reachable = _reachable  # noqa: F821
reachable_batch = _reachable_batch  # noqa: F821
