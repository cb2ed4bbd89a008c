"""Hot reachability kernels for d-separation queries.

Graphs are passed as CSR-style parent/child index arrays.  Every kernel is
written once in plain Python over numpy arrays; when numba is importable and
``FCIREPAIR_NUMBA`` is not set to ``0`` the same source is compiled with
``@njit``.  ``python_impl`` always exposes the uncompiled functions so the two
paths can be compared directly.
"""

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("FCIREPAIR_NUMBA", "1") != "0"


def _ancestor_mask(par_ptr, par_idx, cond):
    # cond plus every ancestor of a cond node
    n = cond.shape[0]
    anc = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for v in range(n):
        if cond[v]:
            anc[v] = True
            stack[top] = v
            top += 1
    while top > 0:
        top -= 1
        v = stack[top]
        for k in range(par_ptr[v], par_ptr[v + 1]):
            u = par_idx[k]
            if not anc[u]:
                anc[u] = True
                stack[top] = u
                top += 1
    return anc


def _reachable(par_ptr, par_idx, ch_ptr, ch_idx, source, cond):
    """Nodes d-connected to ``source`` given the boolean mask ``cond``.

    Bayes-ball over (node, direction) states: direction 0 means the node was
    entered from a child (travelling up), 1 from a parent (travelling down).
    States are marked on push, so the stack never holds more than 2n entries.
    """
    n = cond.shape[0]
    anc = _ancestor_mask(par_ptr, par_idx, cond)
    seen = np.zeros((n, 2), dtype=np.bool_)
    out = np.zeros(n, dtype=np.bool_)
    stack_v = np.empty(2 * n, dtype=np.int64)
    stack_d = np.empty(2 * n, dtype=np.int64)
    stack_v[0] = source
    stack_d[0] = 0
    seen[source, 0] = True
    top = 1
    while top > 0:
        top -= 1
        v = stack_v[top]
        d = stack_d[top]
        blocked = cond[v]
        if not blocked:
            out[v] = True
        go_up = (d == 0 and not blocked) or (d == 1 and anc[v])
        go_down = not blocked
        if go_up:
            for k in range(par_ptr[v], par_ptr[v + 1]):
                u = par_idx[k]
                if not seen[u, 0]:
                    seen[u, 0] = True
                    stack_v[top] = u
                    stack_d[top] = 0
                    top += 1
        if go_down:
            for k in range(ch_ptr[v], ch_ptr[v + 1]):
                w = ch_idx[k]
                if not seen[w, 1]:
                    seen[w, 1] = True
                    stack_v[top] = w
                    stack_d[top] = 1
                    top += 1
    out[source] = False
    return out


def _reachable_batch(par_ptr, par_idx, ch_ptr, ch_idx, source, conds):
    # one reachability row per conditioning mask; amortises call overhead
    m = conds.shape[0]
    n = conds.shape[1]
    out = np.zeros((m, n), dtype=np.bool_)
    for i in range(m):
        out[i, :] = _reachable(par_ptr, par_idx, ch_ptr, ch_idx, source, conds[i])
    return out


python_impl = SimpleNamespace(
    ancestor_mask=_ancestor_mask,
    reachable=_reachable,
    reachable_batch=_reachable_batch,
)


if HAS_NUMBA:
    from . import _kernels_jit as numba_impl
else:  # pragma: no cover
    numba_impl = None
_active = numba_impl if USE_NUMBA else python_impl

ancestor_mask = _active.ancestor_mask
reachable = _active.reachable
reachable_batch = _active.reachable_batch

BACKEND = "numba" if USE_NUMBA else "python"
