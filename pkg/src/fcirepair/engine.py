"""CI and FCI pipelines over a perfect independence oracle.

Every mutation of the working graph goes through :class:`_Run`, which also
appends the matching trace event, so a trace can always be replayed into the
graph it describes.
"""

import enum
import json
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Optional

from .graph_core import GraphError, LatentDag
from .oracle import IndependenceOracle, format_set
from .poipg import (
    ARROW,
    CIRCLE,
    TAIL,
    Mark,
    PdsVariant,
    Poipg,
    complete_unoriented,
    edge_token,
    iter_definite_discriminating_paths,
    parse_edge_token,
    possible_d_sep,
)

CI_VISIBLE_LIMIT = 15


class StageC(enum.Enum):
    COLLIDERS = "colliders"
    CONSTRAINTS = "constraints"


class RemovalPolicy(enum.Enum):
    IMMEDIATE = "immediate"
    DEFERRED = "deferred"
    RERUN_CD = "rerun"


@dataclass(frozen=True)
class PairOrder:
    """Order in which candidate pairs are visited.

    ``kind`` is ``lex``, ``reverse`` or ``seeded``; pairs listed in ``first``
    are moved to the front, in the order given.
    """

    kind: str = "lex"
    seed: int = 0
    first: tuple = ()

    def __post_init__(self):
        if self.kind not in ("lex", "reverse", "seeded"):
            raise ValueError(f"unknown pair order {self.kind!r}")
        object.__setattr__(self, "first", tuple(tuple(sorted(p)) for p in self.first))

    @classmethod
    def parse(cls, text, first=()):
        if text in ("lex", "reverse"):
            return cls(text, first=first)
        if text.startswith("seeded:"):
            try:
                seed = int(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad seed in {text!r}") from None
            if seed < 0:
                raise ValueError("seed must be non-negative")
            return cls("seeded", seed, first)
        raise ValueError(f"unknown pair order {text!r}")

    def __str__(self):
        return f"seeded:{self.seed}" if self.kind == "seeded" else self.kind

    def arrange(self, pairs):
        """Arrange pairs (ordered or unordered tuples) for one sweep."""
        pairs = sorted(pairs)
        if self.kind == "reverse":
            pairs.reverse()
        elif self.kind == "seeded":
            random.Random(self.seed).shuffle(pairs)
        if self.first:
            rank = {p: i for i, p in enumerate(self.first)}
            front = [p for p in pairs if tuple(sorted(p)) in rank]
            front.sort(key=lambda p: (rank[tuple(sorted(p))], p))
            pairs = front + [p for p in pairs if tuple(sorted(p)) not in rank]
        return pairs


@dataclass(frozen=True)
class RunConfig:
    pds_variant: PdsVariant = PdsVariant.X
    stage_c: StageC = StageC.COLLIDERS
    removal_policy: RemovalPolicy = RemovalPolicy.IMMEDIATE
    pair_order: PairOrder = field(default_factory=PairOrder)
    # None: exact separator search in orientation rule 2; an int bounds it
    separable_cap: Optional[int] = None
    allow_unsound: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pds_variant", PdsVariant(self.pds_variant))
        object.__setattr__(self, "stage_c", StageC(self.stage_c))
        object.__setattr__(self, "removal_policy", RemovalPolicy(self.removal_policy))
        if self.separable_cap is not None and self.separable_cap < 1:
            raise ValueError("separable_cap must be at least 1")
        if (
            self.stage_c is StageC.CONSTRAINTS
            and self.pds_variant is not PdsVariant.XDOUBLEPRIME
            and not self.allow_unsound
        ):
            raise ValueError(
                "constraint stage C needs the xdoubleprime Possible-D-Sep; "
                "pass allow_unsound=True to combine them anyway"
            )

    @classmethod
    def original(cls, **kw):
        return cls(PdsVariant.X, StageC.COLLIDERS, **kw)

    @classmethod
    def corrected(cls, **kw):
        return cls(PdsVariant.XDOUBLEPRIME, StageC.CONSTRAINTS, **kw)


class SepSets:
    """Separating sets keyed by unordered pair; the first record wins."""

    def __init__(self):
        self._sets = {}

    def record(self, a, b, s):
        key = frozenset((a, b))
        if key in self._sets:
            return False
        self._sets[key] = frozenset(s)
        return True

    def get(self, a, b):
        return self._sets.get(frozenset((a, b)))

    def __contains__(self, pair):
        return frozenset(pair) in self._sets

    def __len__(self):
        return len(self._sets)

    def items(self):
        return sorted((tuple(sorted(k)), v) for k, v in self._sets.items())

    def require(self, a, b):
        s = self.get(a, b)
        if s is None:
            raise GraphError(f"no SepSet recorded for non-adjacent pair {a} {b}")
        return s


# -- trace events ------------------------------------------------------------


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Nodes:
    names: tuple

    def text(self):
        return "Nodes: " + " ".join(self.names)


@dataclass(frozen=True)
class Phase:
    name: str
    n: Optional[int] = None

    def text(self):
        return f"Phase: {self.name}" + ("" if self.n is None else f" n={self.n}")


@dataclass(frozen=True)
class EdgeRemoval:
    a: str
    b: str
    sepset: frozenset
    phase: str = ""
    n: Optional[int] = None

    def text(self):
        return f"Edge removal: {self.a} {self.b} SepSet {format_set(self.sepset)}"


@dataclass(frozen=True)
class EdgeCount:
    phase: str
    count: int

    def text(self):
        return f"Number of edges: {self.count}"


@dataclass(frozen=True)
class Orientation:
    a: str
    b: str
    mark_a: Mark
    mark_b: Mark

    def text(self):
        return f"Orient: {self.a} {edge_token(self.mark_a, self.mark_b)} {self.b}"


@dataclass(frozen=True)
class ConstraintRecorded:
    left: str
    mid: str
    right: str

    def text(self):
        return f"Constraint: {self.left} {self.mid} {self.right}"


@dataclass(frozen=True)
class PdsQuery:
    a: str
    b: str
    nodes: frozenset

    def text(self):
        return f"Possible-D-Sep: {self.a} {self.b} {format_set(self.nodes)}"


@dataclass(frozen=True)
class Conflict:
    """A rule asked for ``wanted`` at the ``v`` end of ``u``-``v`` but found
    the non-circle mark ``current`` there."""

    u: str
    v: str
    current: Mark
    wanted: Mark
    rule: str

    def text(self):
        return f"Conflict: {self.u} {self.v} {self.current.value} {self.wanted.value} {self.rule}"


@dataclass(frozen=True)
class Reset:
    keep_constraints: bool

    def text(self):
        return "Reset orientations" + ("" if self.keep_constraints else " and constraints")


_EVENT_TYPES = {
    "nodes": Nodes,
    "phase": Phase,
    "edge_removal": EdgeRemoval,
    "edge_count": EdgeCount,
    "orientation": Orientation,
    "constraint": ConstraintRecorded,
    "pds_query": PdsQuery,
    "conflict": Conflict,
    "reset": Reset,
}
_EVENT_NAMES = {cls: name for name, cls in _EVENT_TYPES.items()}


def _event_to_json(ev):
    out = {"event": _EVENT_NAMES[type(ev)]}
    for k, v in vars(ev).items():
        if isinstance(v, frozenset):
            v = sorted(v)
        elif isinstance(v, tuple):
            v = list(v)
        elif isinstance(v, Mark):
            v = v.value
        out[k] = v
    return out


def _event_from_json(obj):
    obj = dict(obj)
    cls = _EVENT_TYPES[obj.pop("event")]
    for k in ("sepset", "nodes"):
        if k in obj and cls is not Nodes:
            obj[k] = frozenset(obj[k])
    if cls is Nodes:
        obj["names"] = tuple(obj["names"])
    for k in ("mark_a", "mark_b", "current", "wanted"):
        if k in obj:
            obj[k] = Mark(obj[k])
    return cls(**obj)


def _parse_set(token):
    if not (token.startswith("{") and token.endswith("}")):
        raise TraceFormatError(f"bad node set {token!r}")
    inner = token[1:-1].strip()
    return frozenset(v.strip() for v in inner.split(",")) if inner else frozenset()


class Trace:
    """Append-only event log with text and JSON-lines forms."""

    def __init__(self, events=()):
        self.events = list(events)

    def append(self, ev):
        self.events.append(ev)

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def __eq__(self, other):
        return isinstance(other, Trace) and self.events == other.events

    def of(self, cls):
        return [e for e in self.events if isinstance(e, cls)]

    def removals(self, phase=None):
        return [e for e in self.of(EdgeRemoval) if phase is None or e.phase == phase]

    def edge_counts(self, phase=None):
        return [e.count for e in self.of(EdgeCount) if phase is None or e.phase == phase]

    def to_text(self):
        return "".join(ev.text() + "\n" for ev in self.events)

    def to_jsonl(self):
        return "".join(json.dumps(_event_to_json(ev), sort_keys=True) + "\n" for ev in self.events)

    @classmethod
    def from_jsonl(cls, text):
        try:
            return cls(_event_from_json(json.loads(line)) for line in text.splitlines() if line.strip())
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceFormatError(f"bad JSON trace: {exc}") from None

    @classmethod
    def from_text(cls, text):
        events = []
        phase, level = "", None
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                head, _, rest = line.partition(": ")
                parts = rest.split()
                if line.startswith("Reset orientations"):
                    events.append(Reset(not line.endswith("and constraints")))
                elif head == "Nodes":
                    events.append(Nodes(tuple(parts)))
                elif head == "Phase":
                    phase = parts[0]
                    level = int(parts[1][2:]) if len(parts) > 1 else None
                    events.append(Phase(phase, level))
                elif head == "Edge removal":
                    a, b, kw, sset = parts[0], parts[1], parts[2], "".join(parts[3:])
                    if kw != "SepSet":
                        raise TraceFormatError("expected SepSet")
                    events.append(EdgeRemoval(a, b, _parse_set(sset), phase, level))
                elif head == "Number of edges":
                    events.append(EdgeCount(phase, int(parts[0])))
                elif head == "Orient":
                    ma, mb = parse_edge_token(parts[1])
                    events.append(Orientation(parts[0], parts[2], ma, mb))
                elif head == "Constraint":
                    events.append(ConstraintRecorded(*parts))
                elif head == "Possible-D-Sep":
                    events.append(PdsQuery(parts[0], parts[1], _parse_set("".join(parts[2:]))))
                elif head == "Conflict":
                    u, v, cur, want, rule = parts
                    events.append(Conflict(u, v, Mark(cur), Mark(want), rule))
                else:
                    raise TraceFormatError(f"unrecognised line {line!r}")
            except (IndexError, ValueError, TypeError) as exc:
                raise TraceFormatError(f"line {lineno}: {exc}") from None
        return cls(events)

    def replay(self):
        """Rebuild the final graph the trace describes."""
        p = None
        for ev in self.events:
            if isinstance(ev, Nodes):
                p = complete_unoriented(ev.names)
                continue
            if p is None:
                raise TraceFormatError("trace does not start with a Nodes line")
            if isinstance(ev, EdgeRemoval):
                p.remove_edge(ev.a, ev.b)
            elif isinstance(ev, Orientation):
                p.set_mark(ev.b, ev.a, ev.mark_a)
                p.set_mark(ev.a, ev.b, ev.mark_b)
            elif isinstance(ev, ConstraintRecorded):
                p.add_constraint(ev.left, ev.mid, ev.right)
            elif isinstance(ev, Reset):
                p.reset_marks()
                if not ev.keep_constraints:
                    p.constraints.clear()
        if p is None:
            raise TraceFormatError("empty trace")
        return p


# -- pipeline ----------------------------------------------------------------


class RunResult(NamedTuple):
    poipg: Poipg
    sepsets: SepSets
    trace: Trace


class _Run:
    """Working state of one pipeline run."""

    def __init__(self, oracle, p, sep=None, trace=None, cfg=None):
        self.oracle = oracle
        self.p = p
        self.sep = sep if sep is not None else SepSets()
        self.trace = trace if trace is not None else Trace()
        self.cfg = cfg or RunConfig()
        self._conflicts = set()
        self._sep_cache = {}

    def remove(self, a, b, s, phase, n=None):
        a, b = sorted((a, b))
        self.p.remove_edge(a, b)
        self.sep.record(a, b, s)
        self.trace.append(EdgeRemoval(a, b, frozenset(s), phase, n))

    def count(self, phase):
        self.trace.append(EdgeCount(phase, self.p.num_edges()))

    def set_end(self, u, v, mark, rule):
        """Put ``mark`` at the ``v`` end of ``u``-``v``; True if it changed."""
        current = self.p.mark(u, v)
        if current is mark:
            return False
        if current is not CIRCLE:
            key = (u, v, current, mark, rule)
            if key not in self._conflicts:
                self._conflicts.add(key)
                self.trace.append(Conflict(u, v, current, mark, rule))
            return False
        self.p.set_mark(u, v, mark)
        a, b = sorted((u, v))
        self.trace.append(Orientation(a, b, self.p.mark(b, a), self.p.mark(a, b)))
        return True

    def constrain(self, left, mid, right):
        if self.p.add_constraint(left, mid, right):
            key = min((left, mid, right), (right, mid, left))
            self.trace.append(ConstraintRecorded(*key))
            return True
        return False

    def reset(self, keep_constraints):
        self.p.reset_marks()
        if not keep_constraints:
            self.p.constraints.clear()
        self.trace.append(Reset(keep_constraints))

    def unshielded_triples(self):
        p = self.p
        for b in p.nodes:
            for a, c in combinations(p.neighbors(b), 2):
                if not p.adjacent(a, c):
                    yield a, b, c

    def separable_with(self, a, c, d):
        cap = self.cfg.separable_cap
        if cap is None:
            key = (a, c, d)
            if key not in self._sep_cache:
                self._sep_cache[key] = self.oracle.separable_with(a, c, d).found
            return self._sep_cache[key]
        variant = self.cfg.pds_variant
        pool = possible_d_sep(self.p, a, c, variant) | possible_d_sep(self.p, c, a, variant)
        return self.oracle.separable_with(a, c, d, candidates=pool, cap=cap).found


def _ordered_pairs(p):
    return [(x, y) for x in p.nodes for y in p.nodes if x != y]


def _step_b(run):
    p, oracle = run.p, run.oracle
    order = run.cfg.pair_order.arrange(_ordered_pairs(p))
    n = 0
    while True:
        run.trace.append(Phase("B", n))
        eligible = False
        for x, y in order:
            if not p.adjacent(x, y):
                continue
            pool = [v for v in p.neighbors(x) if v != y]
            if len(pool) < n:
                continue
            eligible = True
            if n == 0:
                found = frozenset() if oracle.independent(x, y) else None
            elif not oracle.any_separator_within(x, y, pool):
                # no subset of the pool can separate, at any size
                continue
            else:
                found = oracle.first_separator(x, y, pool, n)
            if found is not None:
                run.remove(x, y, found, "B", n)
        run.count("B")
        if not eligible:
            return
        n += 1


def _step_c_colliders(run, phase="C"):
    for a, b, c in list(run.unshielded_triples()):
        if b not in run.sep.require(a, c):
            run.set_end(a, b, ARROW, phase)
            run.set_end(c, b, ARROW, phase)


def _step_c_constraints(run):
    for a, b, c in list(run.unshielded_triples()):
        if b in run.sep.require(a, c):
            run.constrain(a, b, c)


def _step_c(run):
    run.trace.append(Phase("C"))
    if run.cfg.stage_c is StageC.COLLIDERS:
        _step_c_colliders(run)
    else:
        _step_c_constraints(run)
    run.count("C")


def _pds_search(oracle, a, b, pools):
    """First separator drawn from ``pools``: sizes ascend, and within a size
    each pool is tried in turn in lexicographic combination order."""
    if not any(oracle.any_separator_within(a, b, pool) for pool in pools):
        return None
    for size in range(max(len(pool) for pool in pools) + 1):
        for pool in pools:
            if len(pool) < size:
                continue
            if size == 0:
                if oracle.independent(a, b):
                    return frozenset()
                continue
            found = oracle.first_separator(a, b, pool, size)
            if found is not None:
                return found
    return None  # pragma: no cover - the prefilter guarantees a hit


def _step_d(run):
    p, cfg = run.p, run.cfg
    variant = cfg.pds_variant
    policy = cfg.removal_policy
    run.trace.append(Phase("D"))
    while True:
        order = cfg.pair_order.arrange((a, b) for a, b, _, _ in p.edges())
        deferred = []
        restarted = False
        for a, b in order:
            if not p.adjacent(a, b):
                continue
            pds_ab = possible_d_sep(p, a, b, variant) - {a, b}
            pds_ba = possible_d_sep(p, b, a, variant) - {a, b}
            run.trace.append(PdsQuery(a, b, frozenset(pds_ab)))
            run.trace.append(PdsQuery(b, a, frozenset(pds_ba)))
            found = _pds_search(run.oracle, a, b, (sorted(pds_ab), sorted(pds_ba)))
            if found is None:
                continue
            if policy is RemovalPolicy.DEFERRED:
                deferred.append((a, b, found))
            elif policy is RemovalPolicy.IMMEDIATE:
                run.remove(a, b, found, "D")
            else:
                run.remove(a, b, found, "D")
                run.reset(keep_constraints=False)
                _step_c(run)
                run.trace.append(Phase("D"))
                restarted = True
                break
        for a, b, found in deferred:
            run.remove(a, b, found, "D")
        if not restarted:
            break
    run.count("D")


# -- CI orientation ----------------------------------------------------------


def _ci_step_c(run):
    for a, b, c in list(run.unshielded_triples()):
        if b in run.sep.require(a, c):
            run.constrain(a, b, c)
        else:
            run.set_end(a, b, ARROW, "C")
            run.set_end(c, b, ARROW, "C")


def _directed_reach(p, a):
    seen = set()
    todo = [a]
    while todo:
        v = todo.pop()
        for w in p.neighbors(v):
            if w not in seen and p.mark(w, v) is TAIL and p.mark(v, w) is ARROW:
                seen.add(w)
                todo.append(w)
    return seen


def _rule1(run):
    p = run.p
    changed = False
    for a in p.nodes:
        reach = _directed_reach(p, a)
        for b in p.neighbors(a):
            if b in reach and p.mark(a, b) is not ARROW:
                changed |= run.set_end(a, b, ARROW, "R1")
    return changed


def _rule2(run):
    p = run.p
    changed = False
    for b in p.nodes:
        for a, c in combinations(p.neighbors(b), 2):
            if p.adjacent(a, c) or p.mark(a, b) is not ARROW or p.mark(c, b) is not ARROW:
                continue
            for d in p.neighbors(b):
                if d in (a, c) or p.mark(d, b) is ARROW:
                    continue
                if run.separable_with(a, c, d):
                    changed |= run.set_end(d, b, ARROW, "R2")
    return changed


def _rule3(run):
    p = run.p
    changed = False
    for m in p.nodes:
        for path in iter_definite_discriminating_paths(p, m, triangle_only=True):
            i = path.index(m)
            x, y = path[0], path[-1]
            left, right = path[i - 1], path[i + 1]
            sep = run.sep.get(x, y)
            if sep is None:
                continue
            if m in sep:
                changed |= run.constrain(left, m, right)
            else:
                changed |= run.set_end(left, m, ARROW, "R3")
                changed |= run.set_end(right, m, ARROW, "R3")
    return changed


def _rule4(run):
    p = run.p
    changed = False
    for left, mid, right in p.sorted_constraints():
        if not (p.adjacent(left, mid) and p.adjacent(mid, right)):
            continue
        for src, dst in ((left, right), (right, left)):
            if p.mark(src, mid) is ARROW:
                changed |= run.set_end(dst, mid, TAIL, "R4")
                changed |= run.set_end(mid, dst, ARROW, "R4")
    return changed


_RULES = (_rule1, _rule2, _rule3, _rule4)


def _ci_orient(run):
    while True:
        changed = False
        for rule in _RULES:
            changed |= rule(run)
        if not changed:
            return


# -- public phase entry points -----------------------------------------------


def _as_oracle(oracle):
    return IndependenceOracle(oracle) if isinstance(oracle, LatentDag) else oracle


def step_b(oracle, p, cfg=None, trace=None):
    """Adjacency-restricted edge removal with growing conditioning size."""
    run = _Run(_as_oracle(oracle), p, cfg=cfg, trace=trace)
    _step_b(run)
    return RunResult(run.p, run.sep, run.trace)


def step_c_colliders(p, sep, trace=None):
    run = _Run(None, p, sep, trace)
    _step_c_colliders(run)
    return p


def step_c_constraints(p, sep, trace=None):
    run = _Run(None, p, sep, trace)
    _step_c_constraints(run)
    return p


def step_d(oracle, p, sep, cfg=None, trace=None):
    """Possible-D-Sep based edge removal under the configured policy."""
    run = _Run(_as_oracle(oracle), p, sep, trace, cfg)
    _step_d(run)
    return RunResult(run.p, run.sep, run.trace)


def ci_step_c(p, sep, trace=None):
    run = _Run(None, p, sep, trace)
    _ci_step_c(run)
    return p


def ci_orient(oracle, p, sep, cfg=None, trace=None):
    """Apply the four orientation rules until nothing changes."""
    run = _Run(_as_oracle(oracle), p, sep, trace, cfg)
    _ci_orient(run)
    return p


def run_fci(dag, cfg=None, oracle=None):
    cfg = cfg or RunConfig()
    oracle = oracle or IndependenceOracle(dag)
    visible = dag.sorted_visible()
    run = _Run(oracle, complete_unoriented(visible), cfg=cfg)
    run.trace.append(Nodes(tuple(visible)))
    _step_b(run)
    _step_c(run)
    _step_d(run)
    run.trace.append(Phase("E"))
    run.reset(keep_constraints=cfg.stage_c is StageC.CONSTRAINTS)
    _ci_step_c(run)
    _ci_orient(run)
    run.count("E")
    return RunResult(run.p, run.sep, run.trace)


def run_ci(dag, oracle=None, cfg=None, limit=CI_VISIBLE_LIMIT):
    """The CI algorithm: every visible subset is a candidate separator."""
    visible = dag.sorted_visible()
    if len(visible) > limit:
        raise GraphError(f"CI needs at most {limit} visible nodes, got {len(visible)}")
    oracle = oracle or IndependenceOracle(dag)
    run = _Run(oracle, complete_unoriented(visible), cfg=cfg)
    run.trace.append(Nodes(tuple(visible)))
    run.trace.append(Phase("B"))
    for a, b in combinations(visible, 2):
        rest = [v for v in visible if v not in (a, b)]
        if not oracle.any_separator_within(a, b, rest):
            continue
        # smallest separators are ancestral, so only those are enumerated
        for size in range(len(rest) + 1):
            found = oracle.first_separator(a, b, rest, size)
            if found is not None:
                run.remove(a, b, found, "B")
                break
    run.count("B")
    run.trace.append(Phase("C"))
    _ci_step_c(run)
    run.trace.append(Phase("D"))
    _ci_orient(run)
    run.count("D")
    return RunResult(run.p, run.sep, run.trace)


# -- FCI-to-BN ---------------------------------------------------------------


class BnConversionError(GraphError):
    pass


@dataclass
class BeliefNet:
    visible: tuple
    directed: list
    latents: dict  # latent name -> (child_a, child_b)
    violated_constraints: list = field(default_factory=list)

    def to_latent_dag(self):
        edges = list(self.directed)
        for h, (a, b) in self.latents.items():
            edges += [(h, a), (h, b)]
        return LatentDag(self.visible, sorted(self.latents), edges)

    def to_text(self):
        lines = [f"node {v}" for v in self.visible]
        lines += [f"node {h} hidden" for h in sorted(self.latents)]
        lines += [f"edge {a} -> {b}" for a, b in sorted(self.directed)]
        for h in sorted(self.latents):
            a, b = self.latents[h]
            lines += [f"edge {h} -> {a}", f"edge {h} -> {b}"]
        return "\n".join(lines) + "\n"


def _latent_name(a, b, taken):
    name = f"H_{a}_{b}"
    k = 1
    while name in taken:
        k += 1
        name = f"H_{a}_{b}_{k}"
    taken.add(name)
    return name


def fci_to_bn(p):
    """Turn a final graph into a belief network.

    Bidirected edges become fresh latent parents, edges with an arrowhead at
    one end point toward it, and the remaining edges are oriented by
    backtracking so that no constraint triple becomes head-to-head and the
    result stays acyclic.  Constraints already violated by fixed marks are
    reported in ``violated_constraints``.
    """
    taken = set(p.nodes)
    latents = {}
    directed = set()
    free = []
    for a, b, ma, mb in p.edges():
        if ma is ARROW and mb is ARROW:
            latents[_latent_name(a, b, taken)] = (a, b)
        elif mb is ARROW or (ma is TAIL and mb is CIRCLE):
            directed.add((a, b))
        elif ma is ARROW or (mb is TAIL and ma is CIRCLE):
            directed.add((b, a))
        else:
            free.append((a, b))

    into = {v: set() for v in p.nodes}  # neighbours with an arrowhead at v
    for u, v in directed:
        into[v].add(u)
    for a, b in latents.values():
        into[a].add(b)
        into[b].add(a)

    def head_to_head(left, mid, right):
        return left in into[mid] and right in into[mid]

    violated = [c for c in p.sorted_constraints() if head_to_head(*c)]
    bad = set(violated)
    by_mid = {}
    for c in p.sorted_constraints():
        if c not in bad:
            by_mid.setdefault(c[1], []).append(c)

    children = {v: set() for v in p.nodes}
    for u, v in directed:
        children[u].add(v)

    def reaches(src, dst):
        seen, todo = {src}, [src]
        while todo:
            v = todo.pop()
            if v == dst:
                return True
            for w in children[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return False

    for u, v in sorted(directed):
        if reaches(v, u):
            raise BnConversionError(f"fixed edges already form a cycle through {u} -> {v}")

    blocking = []

    def place(u, v):
        if reaches(v, u):
            blocking.append(("cycle", u, v))
            return False
        for c in by_mid.get(v, ()):
            other = c[0] if c[2] == u else c[2] if c[0] == u else None
            if other is not None and other in into[v]:
                blocking.append(("constraint",) + c)
                return False
        return True

    # iterative backtracking: option 0 orients low -> high, option 1 the reverse
    choice = []
    options = []
    i = 0
    while i < len(free):
        start = options.pop() + 1 if len(options) > i else 0
        if start:
            u, v = choice.pop()
            children[u].discard(v)
            into[v].discard(u)
        a, b = free[i]
        for k in range(start, 2):
            u, v = (a, b) if k == 0 else (b, a)
            if place(u, v):
                children[u].add(v)
                into[v].add(u)
                choice.append((u, v))
                options.append(k)
                i += 1
                break
        else:
            if i == 0:
                raise BnConversionError(f"no consistent orientation; blocked by {blocking[-1]}")
            i -= 1
    return BeliefNet(
        tuple(p.nodes),
        sorted(directed | set(choice)),
        latents,
        violated,
    )
