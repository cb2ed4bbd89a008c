"""Generating models: latent DAGs, d-separation and including path graphs."""

import re
from collections import deque
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from itertools import combinations

import numpy as np

from . import _kernels

NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


class GraphError(ValueError):
    """Malformed graph: unknown or duplicate node, cycle, bad edge."""


class GraphParseError(GraphError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def check_name(name):
    if not isinstance(name, str) or not NAME_RE.match(name):
        raise GraphError(f"invalid node name {name!r}")
    return name


class LatentDag:
    """A DAG whose nodes are flagged visible or hidden.

    Nodes are kept in byte-wise sorted order; ``index`` maps names to the
    positions used by the reachability kernels.
    """

    def __init__(self, visible, hidden=(), edges=()):
        visible = [check_name(v) for v in visible]
        hidden = [check_name(h) for h in hidden]
        everything = visible + hidden
        if len(set(everything)) != len(everything):
            seen = set()
            dup = next(v for v in everything if v in seen or seen.add(v))
            raise GraphError(f"duplicate node {dup!r}")
        self.visible = frozenset(visible)
        self.hidden = frozenset(hidden)
        self.nodes = tuple(sorted(everything))
        self.index = {v: i for i, v in enumerate(self.nodes)}

        edge_set = set()
        for parent, child in edges:
            for v in (parent, child):
                if v not in self.index:
                    raise GraphError(f"edge references unknown node {v!r}")
            if parent == child:
                raise GraphError(f"cycle: self-loop on {parent!r}")
            if (parent, child) in edge_set:
                raise GraphError(f"duplicate edge {parent} -> {child}")
            edge_set.add((parent, child))
        self.edges = frozenset(edge_set)

        self._parents = {v: [] for v in self.nodes}
        self._children = {v: [] for v in self.nodes}
        for parent, child in sorted(edge_set):
            self._parents[child].append(parent)
            self._children[parent].append(child)

        try:
            order = TopologicalSorter({v: self._parents[v] for v in self.nodes})
            self.topological_order = tuple(order.static_order())
        except CycleError as exc:
            raise GraphError(f"cycle detected through {exc.args[1]}") from None

        self._csr = self._build_csr()

    def _build_csr(self):
        def pack(lists):
            ptr = np.zeros(len(self.nodes) + 1, dtype=np.int64)
            flat = []
            for i, v in enumerate(self.nodes):
                flat.extend(self.index[u] for u in lists[v])
                ptr[i + 1] = len(flat)
            return ptr, np.asarray(flat, dtype=np.int64)

        par_ptr, par_idx = pack(self._parents)
        ch_ptr, ch_idx = pack(self._children)
        return par_ptr, par_idx, ch_ptr, ch_idx

    def __contains__(self, name):
        return name in self.index

    def __eq__(self, other):
        if not isinstance(other, LatentDag):
            return NotImplemented
        return (self.visible, self.hidden, self.edges) == (
            other.visible,
            other.hidden,
            other.edges,
        )

    def __hash__(self):
        return hash((self.visible, self.hidden, self.edges))

    def __repr__(self):
        return (
            f"LatentDag({len(self.visible)} visible, {len(self.hidden)} hidden, "
            f"{len(self.edges)} edges)"
        )

    def is_hidden(self, v):
        return v in self.hidden

    def parents(self, v):
        return tuple(self._parents[v])

    def children(self, v):
        return tuple(self._children[v])

    def sorted_visible(self):
        return tuple(sorted(self.visible))

    def mask(self, names):
        m = np.zeros(len(self.nodes), dtype=np.bool_)
        for v in names:
            m[self.index[v]] = True
        return m

    def require(self, *names):
        for v in names:
            if v not in self.index:
                raise GraphError(f"unknown node {v!r}")

    def induced(self, keep_visible):
        """Sub-DAG keeping only the given visible nodes and all hidden nodes."""
        keep = set(keep_visible) | set(self.hidden)
        edges = [(a, b) for a, b in self.edges if a in keep and b in keep]
        return LatentDag(sorted(set(keep_visible)), sorted(self.hidden), edges)


def parse_network(text):
    """Parse the line-oriented graph format into a :class:`LatentDag`.

    ``edge A <-> B`` expands to a fresh hidden node ``H_A_B`` with edges to
    both ``A`` and ``B``.
    """
    visible, hidden, edges = [], [], []
    declared = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword = parts[0]
        if keyword == "node":
            if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] != "hidden"):
                raise GraphParseError(lineno, f"expected 'node <name> [hidden]', got {line!r}")
            name = parts[1]
            if not NAME_RE.match(name):
                raise GraphParseError(lineno, f"invalid node name {name!r}")
            if name in declared:
                raise GraphParseError(lineno, f"duplicate node {name!r}")
            declared[name] = lineno
            (hidden if len(parts) == 3 else visible).append(name)
        elif keyword == "edge":
            if len(parts) != 4 or parts[2] not in ("->", "<->"):
                raise GraphParseError(lineno, f"expected 'edge A -> B' or 'edge A <-> B', got {line!r}")
            a, arrow, b = parts[1:]
            for v in (a, b):
                if v not in declared:
                    raise GraphParseError(lineno, f"unknown node {v!r}")
            if a == b:
                raise GraphParseError(lineno, f"cycle: self-loop on {a!r}")
            if arrow == "->":
                edges.append((a, b))
            else:
                h = f"H_{a}_{b}"
                if h in declared:
                    raise GraphParseError(lineno, f"duplicate node {h!r}")
                declared[h] = lineno
                hidden.append(h)
                edges += [(h, a), (h, b)]
        else:
            raise GraphParseError(lineno, f"unknown statement {keyword!r}")
    try:
        return LatentDag(visible, hidden, edges)
    except GraphError as exc:
        raise GraphParseError(len(text.splitlines()), str(exc)) from None


def _sugar_pair(g, h):
    """The (a, b) of ``edge a <-> b`` if hidden node ``h`` is such sugar."""
    kids = g.children(h)
    if h not in g.hidden or g.parents(h) or len(kids) != 2:
        return None
    if not all(k in g.visible for k in kids):
        return None
    for x, y in (kids, kids[::-1]):
        if h == f"H_{x}_{y}":
            return x, y
    return None


def network_to_text(g):
    """Serialise ``g`` so that ``parse_network`` reproduces it exactly."""
    sugar = {h: pair for h in g.hidden if (pair := _sugar_pair(g, h))}
    lines = [f"node {v}" for v in g.sorted_visible()]
    lines += [f"node {h} hidden" for h in sorted(g.hidden - sugar.keys())]
    lines += [f"edge {a} -> {b}" for a, b in sorted(g.edges) if a not in sugar]
    lines += [f"edge {a} <-> {b}" for a, b in (sugar[h] for h in sorted(sugar))]
    return "\n".join(lines) + "\n"


def ancestors(g, x):
    """All proper ancestors of ``x``."""
    g.require(x)
    out = set()
    todo = [x]
    while todo:
        v = todo.pop()
        for u in g.parents(v):
            if u not in out:
                out.add(u)
                todo.append(u)
    return out


def descendants(g, x):
    g.require(x)
    out = set()
    todo = [x]
    while todo:
        v = todo.pop()
        for w in g.children(v):
            if w not in out:
                out.add(w)
                todo.append(w)
    return out


def ancestral_closure(g, names):
    """``names`` together with all their ancestors."""
    m = _kernels.ancestor_mask(g._csr[0], g._csr[1], g.mask(names))
    return {g.nodes[i] for i in np.flatnonzero(m)}


def d_connected_set(g, a, s):
    """Every node d-connected to ``a`` given ``s`` (nodes in ``s`` excluded)."""
    g.require(a, *s)
    if a in s:
        raise GraphError(f"{a!r} is in the conditioning set")
    out = _kernels.reachable(*g._csr, g.index[a], g.mask(s))
    return {g.nodes[i] for i in np.flatnonzero(out)}


def d_separated(g, a, b, s):
    """True iff every path between ``a`` and ``b`` is blocked by ``s``."""
    s = set(s)
    g.require(a, b, *s)
    if a == b:
        raise GraphError("d_separated needs two distinct nodes")
    if a in s or b in s:
        raise GraphError("endpoints must not be in the conditioning set")
    out = _kernels.reachable(*g._csr, g.index[a], g.mask(s))
    return not out[g.index[b]]


# -- including path graphs ---------------------------------------------------

UNI = "->"
BI = "<->"


@dataclass(frozen=True)
class IpgEdge:
    """``a -> b`` for kind ``UNI``; ``a <-> b`` (with ``a < b``) for ``BI``."""

    a: str
    b: str
    kind: str

    def __str__(self):
        return f"{self.a} {self.kind} {self.b}"


class Ipg:
    def __init__(self, nodes, edges):
        self.nodes = tuple(sorted(nodes))
        self._edges = {}
        self._nbrs = {v: set() for v in self.nodes}
        for e in edges:
            if e.kind not in (UNI, BI):
                raise GraphError(f"bad edge kind {e.kind!r}")
            if e.kind == BI and e.a > e.b:
                e = IpgEdge(e.b, e.a, BI)
            key = frozenset((e.a, e.b))
            if len(key) != 2 or not key <= set(self.nodes):
                raise GraphError(f"bad edge {e}")
            if key in self._edges:
                raise GraphError(f"more than one edge between {e.a} and {e.b}")
            self._edges[key] = e
            self._nbrs[e.a].add(e.b)
            self._nbrs[e.b].add(e.a)

    @property
    def edges(self):
        return sorted(self._edges.values(), key=lambda e: tuple(sorted((e.a, e.b))))

    def __len__(self):
        return len(self._edges)

    def adjacent(self, a, b):
        return frozenset((a, b)) in self._edges

    def edge(self, a, b):
        return self._edges.get(frozenset((a, b)))

    def neighbors(self, v):
        return sorted(self._nbrs[v])

    def adjacency(self):
        return {frozenset(k) for k in self._edges}

    def arrow_at(self, a, b):
        """True iff the edge between ``a`` and ``b`` has an arrowhead at ``b``."""
        e = self._edges[frozenset((a, b))]
        return e.kind == BI or e.b == b

    def parents(self, v):
        return sorted(e.a for e in self._edges.values() if e.kind == UNI and e.b == v)

    def ancestors(self, v):
        """Proper ancestors along unidirectional edges."""
        out, todo = set(), [v]
        while todo:
            for u in self.parents(todo.pop()):
                if u not in out:
                    out.add(u)
                    todo.append(u)
        return out

    def __eq__(self, other):
        if not isinstance(other, Ipg):
            return NotImplemented
        return self.nodes == other.nodes and self._edges == other._edges


def _including_ends(g, a, b, anc):
    """End-type pairs (into a, into b) over all including paths a ... b."""
    ends = set()
    seen = set()
    todo = deque()
    for p in g.parents(a):
        todo.append((p, False, True))
    for c in g.children(a):
        todo.append((c, True, False))
    while todo:
        state = todo.popleft()
        if state in seen:
            continue
        seen.add(state)
        v, arrived_into, into_a = state
        if v == a:
            continue
        if v == b:
            ends.add((into_a, arrived_into))
            continue
        hidden = v in g.hidden
        can_collide = arrived_into and v in anc
        for p in g.parents(v):
            # leaving v along p -> v puts an arrowhead at v
            if arrived_into:
                if can_collide:
                    todo.append((p, False, into_a))
            elif hidden:
                todo.append((p, False, into_a))
        if hidden:
            for c in g.children(v):
                todo.append((c, True, into_a))
    return ends


def build_including_path_graph(g):
    """Including path graph over the visible nodes of ``g``.

    A bidirected edge wins whenever some including path is ingoing at both
    ends; otherwise the edge points into the end reached by an arrowhead.
    """
    vis = g.sorted_visible()
    anc_incl = {v: ancestors(g, v) | {v} for v in vis}
    edges = []
    for a, b in combinations(vis, 2):
        ends = _including_ends(g, a, b, anc_incl[a] | anc_incl[b])
        if (True, True) in ends:
            edges.append(IpgEdge(a, b, BI))
        elif (False, True) in ends:
            edges.append(IpgEdge(a, b, UNI))
        elif (True, False) in ends:
            edges.append(IpgEdge(b, a, UNI))
    return Ipg(vis, edges)


def d_sep_set(ipg, a, b):
    """D-Sep(a, b) on a fully oriented including path graph.

    ``v`` qualifies when a path from ``v`` reaches ``a`` through an edge with
    an arrowhead at ``a``, and every interior node of the path is a collider
    and an ancestor of ``a`` or ``b``.  Paths never run through ``b``.
    """
    for v in (a, b):
        if v not in ipg.nodes:
            raise GraphError(f"unknown node {v!r}")
    if a == b:
        raise GraphError("d_sep_set needs two distinct nodes")
    succ = (ipg.ancestors(a) | ipg.ancestors(b)) - {b}
    out = set()
    todo = deque()
    for v in ipg.neighbors(a):
        if ipg.arrow_at(v, a):
            out.add(v)
            if ipg.arrow_at(a, v):
                todo.append(v)
    # queued nodes were entered through an arrowhead
    expanded = set()
    while todo:
        v = todo.popleft()
        if v in expanded or v not in succ:
            continue
        expanded.add(v)
        for w in ipg.neighbors(v):
            if w != a and ipg.arrow_at(w, v):
                out.add(w)
                if ipg.arrow_at(v, w):
                    todo.append(w)
    return out


# -- DOT export ----------------------------------------------------------------


def dag_to_dot(g, name="G"):
    lines = [f"digraph {name} {{"]
    for v in g.nodes:
        style = ' [style=dashed]' if v in g.hidden else ""
        lines.append(f'  "{v}"{style};')
    for a, b in sorted(g.edges):
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def ipg_to_dot(ipg, name="IPG"):
    lines = [f"digraph {name} {{"]
    for v in ipg.nodes:
        lines.append(f'  "{v}";')
    for e in ipg.edges:
        extra = " [dir=both]" if e.kind == BI else ""
        lines.append(f'  "{e.a}" -> "{e.b}"{extra};')
    lines.append("}")
    return "\n".join(lines) + "\n"
