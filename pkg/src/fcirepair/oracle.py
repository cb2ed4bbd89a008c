"""Perfect conditional-independence oracle backed by d-separation."""

from itertools import combinations, islice
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .graph_core import GraphError, ancestral_closure

DEFAULT_CAP = 5


class SeparableResult(NamedTuple):
    """Outcome of a constrained separator search.

    ``exhaustive`` is True when an absent ``witness`` proves that no
    separating set containing the required node exists at all.
    """

    witness: Optional[frozenset]
    exhaustive: bool

    @property
    def found(self):
        return self.witness is not None


def format_set(s):
    return "{" + ",".join(sorted(s)) + "}"


class IndependenceOracle:
    """Answers ``a _||_ b | s`` queries over the visible part of a LatentDag.

    Every call to :meth:`independent` increments ``queries``.  When ``log`` is
    a list, one ``? A B {S} -> yes|no`` line is appended per query.
    """

    def __init__(self, dag, log=None):
        self.dag = dag
        self.queries = 0
        self.log = log
        self._csr = dag._csr
        self._anc_cache = {}

    def _check(self, a, b, s):
        dag = self.dag
        for v in (a, b, *s):
            if v not in dag.visible:
                if v in dag.index:
                    raise GraphError(f"hidden node {v!r} in independence query")
                raise GraphError(f"unknown node {v!r}")
        if a == b:
            raise GraphError("independence query needs two distinct nodes")
        if a in s or b in s:
            raise GraphError("endpoints must not be in the conditioning set")

    def independent(self, a, b, s=()):
        s = frozenset(s)
        self._check(a, b, s)
        self.queries += 1
        dag = self.dag
        reach = _kernels.reachable(*self._csr, dag.index[a], dag.mask(s))
        answer = not reach[dag.index[b]]
        if self.log is not None:
            self.log.append(f"? {a} {b} {format_set(s)} -> {'yes' if answer else 'no'}")
        return answer

    def ancestral(self, names):
        """Visible members of the ancestral closure of ``names``."""
        key = frozenset(names)
        hit = self._anc_cache.get(key)
        if hit is None:
            hit = frozenset(ancestral_closure(self.dag, key) & self.dag.visible)
            self._anc_cache[key] = hit
        return hit

    def any_separator_within(self, a, b, pool):
        """True iff some subset of ``pool`` separates ``a`` and ``b``.

        Only the ancestral part of ``pool`` needs testing: if any subset of a
        restriction set separates, its intersection with An({a, b}) does.
        """
        core = (self.ancestral((a, b)) & frozenset(pool)) - {a, b}
        return self.independent(a, b, core)

    def first_separator(self, a, b, pool, size):
        """Lexicographically first ``size``-subset of ``pool`` separating
        ``a`` and ``b``, assuming no smaller subset of ``pool`` separates.

        Under that assumption any separator found is minimal and therefore
        lies inside An({a, b}), so non-ancestors are skipped without changing
        which subset comes first.
        """
        anc = self.ancestral((a, b))
        pool = sorted(v for v in pool if v in anc and v not in (a, b))
        if self.log is not None or size == 0:
            for combo in combinations(pool, size):
                if self.independent(a, b, combo):
                    return frozenset(combo)
            return None
        self._check(a, b, pool)
        return self._first_batched(a, b, pool, size)

    def _first_batched(self, a, b, pool, size):
        # same order as the sequential scan, evaluated in growing chunks
        dag = self.dag
        idx = np.array([dag.index[v] for v in pool], dtype=np.int64)
        src, dst = dag.index[a], dag.index[b]
        combos = combinations(range(len(pool)), size)
        chunk = 64
        while True:
            block = np.fromiter(
                (i for c in islice(combos, chunk) for i in c), dtype=np.int64
            ).reshape(-1, size)
            if block.shape[0] == 0:
                return None
            masks = np.zeros((block.shape[0], len(dag.nodes)), dtype=np.bool_)
            masks[np.arange(block.shape[0])[:, None], idx[block]] = True
            reach = _kernels.reachable_batch(*self._csr, src, masks)
            hits = np.flatnonzero(~reach[:, dst])
            if hits.size:
                self.queries += int(hits[0]) + 1
                return frozenset(pool[i] for i in block[hits[0]])
            self.queries += block.shape[0]
            chunk = min(chunk * 4, 1 << 16)

    def separable_with(self, a, b, must_contain, candidates=None, cap=DEFAULT_CAP):
        """Find a set containing ``must_contain`` that separates ``a`` and ``b``.

        Without ``candidates`` the answer is exact over all visible sets: a
        separator containing ``c`` exists iff the visible ancestral closure of
        ``{a, b, c}`` (minus the endpoints) is one.  With ``candidates`` the
        search is bounded to subsets of them of size at most ``cap``.
        """
        self._check(a, b, {must_contain})
        if must_contain in (a, b):
            raise GraphError("required node must differ from both endpoints")
        if candidates is None:
            s0 = self.ancestral((a, b, must_contain)) - {a, b}
            if self.independent(a, b, s0):
                return SeparableResult(frozenset(s0), True)
            return SeparableResult(None, True)
        pool = sorted(set(candidates) - {a, b, must_contain})
        for size in range(0, min(cap, len(pool) + 1)):
            for combo in combinations(pool, size):
                s = frozenset(combo) | {must_contain}
                if self.independent(a, b, s):
                    return SeparableResult(s, False)
        return SeparableResult(None, False)

    def separation_row(self, a, conds):
        """Batched reachability: one boolean row per conditioning mask."""
        conds = np.asarray(conds, dtype=np.bool_)
        return _kernels.reachable_batch(*self._csr, self.dag.index[a], conds)
