"""Ground-truth comparison and independence-equivalence checking."""

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from . import _kernels
from .graph_core import GraphError, Ipg
from .poipg import ARROW, CIRCLE, Poipg, contradictions, edge_token

BRUTE_FORCE_LIMIT = 12


def _as_poipg(g):
    if isinstance(g, Poipg):
        return g
    if isinstance(g, Ipg):
        return Poipg.from_ipg(g)
    raise TypeError(f"expected Poipg or Ipg, got {type(g).__name__}")


@dataclass
class OrientationConflict:
    a: str
    b: str
    derived: str
    truth: str


@dataclass
class ConstraintContradiction:
    left: str
    mid: str
    right: str
    marks: str  # the two edges meeting head to head at mid


@dataclass
class DiffReport:
    superfluous_edges: list = field(default_factory=list)
    missing_edges: list = field(default_factory=list)
    orientation_conflicts: list = field(default_factory=list)
    constraint_contradictions: list = field(default_factory=list)

    def is_empty(self):
        return not (
            self.superfluous_edges
            or self.missing_edges
            or self.orientation_conflicts
            or self.constraint_contradictions
        )

    def to_dict(self):
        return {
            "superfluous_edges": [list(e) for e in self.superfluous_edges],
            "missing_edges": [list(e) for e in self.missing_edges],
            "orientation_conflicts": [asdict(c) for c in self.orientation_conflicts],
            "constraint_contradictions": [asdict(c) for c in self.constraint_contradictions],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self):
        lines = []
        for title, rows in (
            ("Superfluous edges", [f"{a} {b}" for a, b in self.superfluous_edges]),
            ("Missing edges", [f"{a} {b}" for a, b in self.missing_edges]),
            (
                "Orientation conflicts",
                [
                    f"{c.a} {c.derived} {c.b}  (truth {c.a} {c.truth} {c.b})"
                    for c in self.orientation_conflicts
                ],
            ),
            (
                "Constraint contradictions",
                [
                    f"constraint {c.left} {c.mid} {c.right} vs {c.marks}"
                    for c in self.constraint_contradictions
                ],
            ),
        ):
            lines.append(f"{title}: {len(rows)}")
            lines += [f"  {r}" for r in rows]
        return "\n".join(lines) + "\n"


def diff_vs_true_ipg(derived, truth):
    """Compare a derived graph with the true including path graph.

    ``truth`` may be an :class:`Ipg` or another :class:`Poipg`.  A circle on
    either side never conflicts; two non-circle marks at the same edge end
    conflict when they differ.
    """
    d, t = _as_poipg(derived), _as_poipg(truth)
    if set(d.nodes) != set(t.nodes):
        raise GraphError("derived and true graphs have different node sets")
    d_edges = {(a, b): (ma, mb) for a, b, ma, mb in d.edges()}
    t_edges = {(a, b): (ma, mb) for a, b, ma, mb in t.edges()}
    report = DiffReport(
        superfluous_edges=sorted(set(d_edges) - set(t_edges)),
        missing_edges=sorted(set(t_edges) - set(d_edges)),
    )
    for (a, b), marks in sorted(d_edges.items()):
        true_marks = t_edges.get((a, b))
        if true_marks is None:
            continue
        if any(
            dm is not CIRCLE and tm is not CIRCLE and dm is not tm
            for dm, tm in zip(marks, true_marks)
        ):
            report.orientation_conflicts.append(
                OrientationConflict(a, b, edge_token(*marks), edge_token(*true_marks))
            )
    for left, mid, right in contradictions(d):
        marks = f"{left} {edge_token(d.mark(mid, left), ARROW)} {mid} {edge_token(ARROW, d.mark(mid, right))} {right}"
        report.constraint_contradictions.append(ConstraintContradiction(left, mid, right, marks))
    return report


# -- belief-network equivalence ----------------------------------------------


@dataclass(frozen=True)
class Violation:
    a: str
    b: str
    s: frozenset
    bn_says: str
    truth_says: str

    def to_dict(self):
        return {
            "a": self.a,
            "b": self.b,
            "s": sorted(self.s),
            "bn_says": self.bn_says,
            "truth_says": self.truth_says,
        }

    def text(self):
        return (
            f"{self.a} {self.b} given {{{','.join(sorted(self.s))}}}: "
            f"bn {self.bn_says}, truth {self.truth_says}"
        )


def _word(dependent):
    return "dependent" if dependent else "independent"


def _source_rows(dag, src, conds, names):
    masks = np.zeros((len(conds), len(dag.nodes)), dtype=np.bool_)
    for i, s in enumerate(conds):
        for v in s:
            masks[i, dag.index[v]] = True
    reach = _kernels.reachable_batch(*dag._csr, dag.index[src], masks)
    return reach[:, [dag.index[v] for v in names]]


def bn_equivalence_check(bn, truth, max_cond=2, queries=None):
    """Every (a, b, s) on which ``bn`` and ``truth`` disagree.

    ``bn`` is a BeliefNet or LatentDag.  By default all visible pairs and all
    conditioning sets up to ``max_cond`` nodes are compared; ``queries`` may
    instead list explicit ``(a, b, s)`` triples.
    """
    model = bn.to_latent_dag() if hasattr(bn, "to_latent_dag") else bn
    if model.visible != truth.visible:
        raise GraphError("belief network and truth have different visible nodes")
    visible = sorted(truth.visible)
    out = []
    if queries is not None:
        grouped = {}
        for a, b, s in queries:
            a, b = sorted((a, b))
            s = frozenset(s)
            if a == b or a in s or b in s or not set(s) <= truth.visible:
                raise GraphError(f"malformed query {a} {b} {sorted(s)}")
            grouped.setdefault(a, []).append((b, s))
        for a in sorted(grouped):
            items = grouped[a]
            conds = [s for _, s in items]
            names = [b for b, _ in items]
            m = _source_rows(model, a, conds, names)
            t = _source_rows(truth, a, conds, names)
            for i, (b, s) in enumerate(items):
                if m[i, i] != t[i, i]:
                    out.append(Violation(a, b, s, _word(m[i, i]), _word(t[i, i])))
        return out
    for a in visible:
        others = [v for v in visible if v != a]
        conds = [frozenset(c) for k in range(max_cond + 1) for c in combinations(others, k)]
        later = [b for b in visible if b > a]
        if not later:
            continue
        m = _source_rows(model, a, conds, later)
        t = _source_rows(truth, a, conds, later)
        rows, cols = np.nonzero(m != t)
        for i, j in zip(rows, cols):
            b = later[j]
            if b in conds[i]:
                continue
            out.append(Violation(a, b, conds[i], _word(m[i, j]), _word(t[i, j])))
    out.sort(key=lambda v: (v.a, v.b, len(v.s), sorted(v.s)))
    return out


def brute_force_separable_pairs(dag, limit=BRUTE_FORCE_LIMIT):
    """Unordered visible pairs separated by at least one visible subset."""
    visible = sorted(dag.visible)
    if len(visible) > limit:
        raise GraphError(f"brute force needs at most {limit} visible nodes, got {len(visible)}")
    out = set()
    for a in visible:
        others = [v for v in visible if v != a]
        conds = [c for k in range(len(others) + 1) for c in combinations(others, k)]
        later = [b for b in visible if b > a]
        if not later:
            continue
        reach = _source_rows(dag, a, conds, later)
        holds = np.array([[b in c for b in later] for c in conds], dtype=np.bool_)
        separable = (~reach & ~holds).any(axis=0)
        out.update(frozenset((a, b)) for b, ok in zip(later, separable) if ok)
    return out


def violations_to_json(violations):
    return json.dumps([v.to_dict() for v in violations], indent=2) + "\n"


def violations_to_text(violations):
    lines = [f"Violations: {len(violations)}"]
    lines += [f"  {v.text()}" for v in violations]
    return "\n".join(lines) + "\n"
