"""Partially oriented including path graphs and their path predicates."""

import enum
from collections import deque
from itertools import combinations

from .graph_core import BI, GraphError, check_name


class Mark(enum.Enum):
    TAIL = "-"
    CIRCLE = "o"
    ARROW = ">"


TAIL, CIRCLE, ARROW = Mark.TAIL, Mark.CIRCLE, Mark.ARROW

_LEFT = {TAIL: "-", CIRCLE: "o", ARROW: "<"}
_RIGHT = {TAIL: "-", CIRCLE: "o", ARROW: ">"}
_LEFT_INV = {v: k for k, v in _LEFT.items()}
_RIGHT_INV = {v: k for k, v in _RIGHT.items()}


class PdsVariant(enum.Enum):
    X = "x"
    XPRIME = "xprime"
    XDOUBLEPRIME = "xdoubleprime"


def edge_token(mark_at_a, mark_at_b):
    """Three-character edge notation, e.g. ``o->`` or ``<->``."""
    return f"{_LEFT[mark_at_a]}-{_RIGHT[mark_at_b]}"


def parse_edge_token(token):
    if len(token) != 3 or token[1] != "-":
        raise ValueError(f"bad edge token {token!r}")
    try:
        return _LEFT_INV[token[0]], _RIGHT_INV[token[2]]
    except KeyError:
        raise ValueError(f"bad edge token {token!r}") from None


def _constraint_key(left, mid, right):
    return (left, mid, right) if left <= right else (right, mid, left)


class Poipg:
    """Skeleton with per-endpoint marks plus non-collider constraints.

    ``mark(u, v)`` is the mark at the ``v`` end of the edge between ``u`` and
    ``v``; so for ``A o-> B``, ``mark(A, B)`` is ARROW and ``mark(B, A)`` is
    CIRCLE.
    """

    def __init__(self, nodes):
        nodes = [check_name(v) for v in nodes]
        if len(set(nodes)) != len(nodes):
            raise GraphError("duplicate node in Poipg")
        self.nodes = tuple(sorted(nodes))
        self._end = {v: {} for v in self.nodes}
        self.constraints = set()

    # -- structure

    def copy(self):
        other = Poipg.__new__(Poipg)
        other.nodes = self.nodes
        other._end = {v: dict(d) for v, d in self._end.items()}
        other.constraints = set(self.constraints)
        return other

    def __eq__(self, other):
        if not isinstance(other, Poipg):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self._end == other._end
            and self.constraints == other.constraints
        )

    def __repr__(self):
        return f"Poipg({len(self.nodes)} nodes, {self.num_edges()} edges, {len(self.constraints)} constraints)"

    def _require(self, *names):
        for v in names:
            if v not in self._end:
                raise GraphError(f"unknown node {v!r}")

    def add_edge(self, a, b, mark_at_a=CIRCLE, mark_at_b=CIRCLE):
        self._require(a, b)
        if a == b:
            raise GraphError("self-loop")
        if b in self._end[a]:
            raise GraphError(f"edge {a}-{b} already present")
        self._end[b][a] = mark_at_a
        self._end[a][b] = mark_at_b

    def remove_edge(self, a, b):
        self._require(a, b)
        if b not in self._end[a]:
            raise GraphError(f"no edge {a}-{b}")
        del self._end[a][b]
        del self._end[b][a]
        # constraints over a vanished edge carry no information any more
        self.constraints = {
            c for c in self.constraints if not ({a, b} <= {c[0], c[1]} or {a, b} <= {c[1], c[2]})
        }

    def adjacent(self, a, b):
        return b in self._end.get(a, ())

    def neighbors(self, v):
        return sorted(self._end[v])

    def degree(self, v):
        return len(self._end[v])

    def mark(self, u, v):
        try:
            return self._end[u][v]
        except KeyError:
            raise GraphError(f"no edge {u}-{v}") from None

    def set_mark(self, u, v, mark):
        """Set the mark at the ``v`` end of edge ``u``-``v``."""
        if v not in self._end[u]:
            raise GraphError(f"no edge {u}-{v}")
        self._end[u][v] = mark

    def edges(self):
        """Canonical ``(a, b, mark_at_a, mark_at_b)`` tuples with ``a < b``."""
        out = []
        for a in self.nodes:
            for b in sorted(self._end[a]):
                if a < b:
                    out.append((a, b, self._end[b][a], self._end[a][b]))
        return out

    def skeleton(self):
        return {frozenset((a, b)) for a, b, _, _ in self.edges()}

    def num_edges(self):
        return sum(len(d) for d in self._end.values()) // 2

    def reset_marks(self):
        for a in self.nodes:
            for b in self._end[a]:
                self._end[a][b] = CIRCLE

    # -- constraints

    def add_constraint(self, left, mid, right):
        if left == right:
            raise GraphError("degenerate constraint triple")
        if not (self.adjacent(left, mid) and self.adjacent(mid, right)):
            raise GraphError(f"constraint {left} {mid} {right} needs both edges")
        key = _constraint_key(left, mid, right)
        if key in self.constraints:
            return False
        self.constraints.add(key)
        return True

    def has_constraint(self, left, mid, right):
        return _constraint_key(left, mid, right) in self.constraints

    def sorted_constraints(self):
        return sorted(self.constraints, key=lambda c: (c[1], c[0], c[2]))

    # -- text format

    def to_text(self):
        lines = []
        isolated = [v for v in self.nodes if not self._end[v]]
        lines += [f"node {v}" for v in isolated]
        for a, b, ma, mb in self.edges():
            lines.append(f"{a} {edge_token(ma, mb)} {b}")
        for left, mid, right in self.sorted_constraints():
            lines.append(f"constraint {left} {mid} {right}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, nodes=None):
        edges, constraints, names = [], [], set(nodes or ())
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "node" and len(parts) == 2:
                    names.add(parts[1])
                elif parts[0] == "constraint" and len(parts) == 4:
                    constraints.append(tuple(parts[1:]))
                elif len(parts) == 3:
                    ma, mb = parse_edge_token(parts[1])
                    edges.append((parts[0], parts[2], ma, mb))
                    names.update((parts[0], parts[2]))
                else:
                    raise ValueError(f"unrecognised line {line!r}")
            except ValueError as exc:
                raise GraphError(f"line {lineno}: {exc}") from None
        p = cls(sorted(names))
        for a, b, ma, mb in edges:
            p.add_edge(a, b, ma, mb)
        for c in constraints:
            p.add_constraint(*c)
        return p

    @classmethod
    def from_ipg(cls, ipg):
        p = cls(ipg.nodes)
        for e in ipg.edges:
            if e.kind == BI:
                p.add_edge(e.a, e.b, ARROW, ARROW)
            else:
                p.add_edge(e.a, e.b, TAIL, ARROW)
        return p

    def to_dot(self, name="POIPG"):
        head = {TAIL: "none", CIRCLE: "odot", ARROW: "normal"}
        lines = [f"digraph {name} {{"]
        for v in self.nodes:
            lines.append(f'  "{v}";')
        for a, b, ma, mb in self.edges():
            lines.append(
                f'  "{a}" -> "{b}" [dir=both, arrowtail={head[ma]}, arrowhead={head[mb]}];'
            )
        for left, mid, right in self.sorted_constraints():
            lines.append(f'  // constraint {left} {mid} {right}')
        lines.append("}")
        return "\n".join(lines) + "\n"


def complete_unoriented(nodes):
    """Complete graph over ``nodes`` with every edge ``o-o``."""
    nodes = list(nodes)
    if not nodes:
        raise GraphError("need at least one node")
    p = Poipg(nodes)
    for a, b in combinations(p.nodes, 2):
        p.add_edge(a, b)
    return p


# -- local predicates ---------------------------------------------------------


def _triple_edges(p, a, b, c):
    if a == c:
        raise GraphError("degenerate triple")
    if not (p.adjacent(a, b) and p.adjacent(b, c)):
        raise GraphError(f"triple {a} {b} {c} is missing an edge")


def is_collider(p, a, b, c):
    _triple_edges(p, a, b, c)
    return p.mark(a, b) is ARROW and p.mark(c, b) is ARROW


def is_definite_noncollider(p, a, b, c):
    _triple_edges(p, a, b, c)
    return p.mark(a, b) is TAIL or p.mark(c, b) is TAIL or p.has_constraint(a, b, c)


def contradictions(p):
    """Constraints whose middle node carries arrowheads on both edges."""
    out = []
    for left, mid, right in p.sorted_constraints():
        if p.adjacent(left, mid) and p.adjacent(mid, right):
            if p.mark(left, mid) is ARROW and p.mark(right, mid) is ARROW:
                out.append((left, mid, right))
    return out


def directed_path_exists(p, x, y):
    """True iff ``x -> ... -> y`` along edges with a tail and an arrowhead."""
    if x == y:
        raise GraphError("directed_path_exists needs two distinct nodes")
    seen = {x}
    todo = [x]
    while todo:
        v = todo.pop()
        for w in p.neighbors(v):
            if w not in seen and p.mark(w, v) is TAIL and p.mark(v, w) is ARROW:
                if w == y:
                    return True
                seen.add(w)
                todo.append(w)
    return False


def _possible_ancestors(p, targets):
    # nodes with a potentially directed path into one of ``targets``
    out = set(targets)
    todo = list(targets)
    while todo:
        v = todo.pop()
        for w in p.neighbors(v):
            if w not in out and p.mark(v, w) is not ARROW and p.mark(w, v) is not TAIL:
                out.add(w)
                todo.append(w)
    return out


# -- Possible-D-Sep -----------------------------------------------------------


def _pds_triples(p, a, b, allowed):
    """Nodes reachable from ``a`` along paths that avoid ``b`` as an interior
    node and whose every consecutive triple passes ``allowed``; breadth-first
    over (previous, current) states."""
    out = set()
    seen = set()
    todo = deque()
    for v in p.neighbors(a):
        out.add(v)
        seen.add((a, v))
        todo.append((a, v))
    while todo:
        x, y = todo.popleft()
        if y == b:
            continue
        for z in p.neighbors(y):
            if z == x or z == a or (y, z) in seen:
                continue
            if allowed(x, y, z):
                out.add(z)
                seen.add((y, z))
                todo.append((y, z))
    return out


def _pds_xprime(p, a, b):
    # collider paths into a where circles may be read as arrowheads and
    # every interior node can still be made an ancestor of a or b
    succ = _possible_ancestors(p, (a, b)) - {b}
    out = set()
    todo = deque()
    for v in p.neighbors(a):
        if p.mark(v, a) is not TAIL:
            out.add(v)
            if p.mark(a, v) is not TAIL:
                todo.append(v)
    expanded = set()
    while todo:
        v = todo.popleft()
        if v in expanded or v not in succ:
            continue
        expanded.add(v)
        for w in p.neighbors(v):
            if w != a and p.mark(w, v) is not TAIL:
                out.add(w)
                if p.mark(v, w) is not TAIL:
                    todo.append(w)
    return out


def possible_d_sep(p, a, b, variant):
    """Possible-D-Sep(a, b) under one of three definitions.

    ``a`` is never in the result.  ``b`` may be reached but is never passed
    through; callers drop it.
    """
    p._require(a, b)
    if a == b:
        raise GraphError("possible_d_sep needs two distinct nodes")
    variant = PdsVariant(variant)
    if variant is PdsVariant.X:
        # collider, or a shielded triple
        return _pds_triples(
            p, a, b, lambda x, y, z: (p.mark(x, y) is ARROW and p.mark(z, y) is ARROW) or p.adjacent(x, z)
        )
    if variant is PdsVariant.XDOUBLEPRIME:
        return _pds_triples(p, a, b, lambda x, y, z: not p.has_constraint(x, y, z))
    return _pds_xprime(p, a, b)


# -- definite discriminating paths ---------------------------------------------


def _interior_status(p, outer, v, inner):
    """'collider', 'noncollider', or None if ``v`` is neither for sure."""
    if p.mark(outer, v) is ARROW and p.mark(inner, v) is ARROW:
        return "collider"
    if p.mark(outer, v) is TAIL or p.mark(inner, v) is TAIL or p.has_constraint(outer, v, inner):
        return "noncollider"
    return None


def _far_ends(p, v, status):
    """Nodes that may sit at the far end of a path with ``v`` interior."""
    out = set()
    for y in p.neighbors(v):
        if status == "collider":
            if p.mark(y, v) is TAIL and p.mark(v, y) is ARROW:
                out.add(y)
        elif p.mark(y, v) is ARROW:
            out.add(y)
    return out


def _side_chains(p, m, first, max_len):
    """Chains ``[first, ..., endpoint]`` leading away from ``m``.

    Every edge beyond ``first`` points toward ``m`` and every node except
    the endpoint is a collider or definite non-collider.  Yields
    ``(chain, far)`` where ``far`` is the set of admissible endpoints for the
    opposite side, or None when the chain has no interior node.  Chains that
    no opposite endpoint could complete are pruned.
    """
    yield [first], None
    stack = [([first], None)]
    while stack:
        chain, far = stack.pop()
        if len(chain) >= max_len:
            continue
        outer = chain[-1]
        inner = chain[-2] if len(chain) > 1 else m
        for w in reversed(p.neighbors(outer)):
            if w == m or w in chain or p.mark(w, outer) is not ARROW:
                continue
            status = _interior_status(p, w, outer, inner)
            if status is None:
                continue
            ends = _far_ends(p, outer, status)
            ends = ends if far is None else far & ends
            if not ends:
                continue
            item = (chain + [w], ends)
            yield item
            stack.append(item)


def iter_definite_discriminating_paths(p, m, max_len=None, triangle_only=False):
    """All definite discriminating paths for ``m``, shortest first.

    Paths are tuples ``(x, ..., m, ..., y)`` with ``x < y``.  With
    ``triangle_only`` only paths whose two neighbours of ``m`` are adjacent
    are returned.
    """
    p._require(m)
    if max_len is None:
        max_len = len(p.nodes)
    nbrs = p.neighbors(m)
    chains = {n: list(_side_chains(p, m, n, max_len)) for n in nbrs}
    by_end = {}
    for n in nbrs:
        idx = {}
        for chain, far in chains[n]:
            idx.setdefault(chain[-1], []).append((chain, far))
        by_end[n] = idx
    found = set()
    for left, right in combinations(nbrs, 2):
        if triangle_only and not p.adjacent(left, right):
            continue
        for lc, lfar in chains[left]:
            x = lc[-1]
            ends = by_end[right] if lfar is None else (y for y in lfar if y in by_end[right])
            for y in ends:
                if y == x or p.adjacent(x, y):
                    continue
                for rc, rfar in by_end[right][y]:
                    if rfar is not None and x not in rfar:
                        continue
                    if set(lc) & set(rc):
                        continue
                    path = tuple(reversed(lc)) + (m,) + tuple(rc)
                    if path[0] > path[-1]:
                        path = path[::-1]
                    found.add(path)
    return sorted(found, key=lambda u: (len(u), u))


def find_definite_discriminating_path(p, m, max_len=None):
    paths = iter_definite_discriminating_paths(p, m, max_len)
    return paths[0] if paths else None
