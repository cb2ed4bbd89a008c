"""Seeded random latent DAGs and a differential check over the variant matrix."""

import random
from dataclasses import dataclass, field

from .engine import RemovalPolicy, RunConfig, run_ci, run_fci
from .graph_core import LatentDag, build_including_path_graph, network_to_text
from .poipg import PdsVariant
from .verify import brute_force_separable_pairs, diff_vs_true_ipg


def random_latent_dag(rng, visible=(4, 10), hidden=(0, 3), edge_prob=0.3):
    """Random DAG whose hidden nodes each have at least two visible children.

    Nodes are laid out in a random order and only forward edges are drawn,
    so the result is acyclic by construction.
    """
    nv = rng.randint(*visible)
    nh = rng.randint(*hidden)
    order = [f"V{i}" for i in range(nv)]
    rng.shuffle(order)
    hid = [f"H{i}" for i in range(nh)]
    for h in hid:
        # leave room for two visible children after the hidden node
        order.insert(rng.randint(0, max(0, _visible_prefix(order, nv - 2))), h)
    edges = set()
    for i, u in enumerate(order):
        for w in order[i + 1 :]:
            if rng.random() < edge_prob:
                edges.add((u, w))
    for h in hid:
        later = [w for w in order[order.index(h) + 1 :] if w.startswith("V")]
        kids = [w for w in later if (h, w) in edges]
        for w in rng.sample([w for w in later if w not in kids], max(0, 2 - len(kids))):
            edges.add((h, w))
    return LatentDag([v for v in order if v.startswith("V")], hid, sorted(edges))


def _visible_prefix(order, k):
    """Index just past the first ``k`` visible nodes of ``order``."""
    seen = 0
    for i, v in enumerate(order):
        if seen == k:
            return i
        if v.startswith("V"):
            seen += 1
    return len(order)


MATRIX = (
    RunConfig.corrected(),
    RunConfig.corrected(removal_policy=RemovalPolicy.DEFERRED),
    RunConfig.corrected(removal_policy=RemovalPolicy.RERUN_CD),
)


@dataclass
class FuzzFinding:
    iteration: int
    config: str
    problem: str
    graph: str


@dataclass
class FuzzReport:
    iterations: int = 0
    findings: list = field(default_factory=list)

    def to_text(self):
        lines = [f"Iterations: {self.iterations}", f"Findings: {len(self.findings)}"]
        for f in self.findings:
            lines.append(f"  #{f.iteration} [{f.config}] {f.problem}")
        return "\n".join(lines) + "\n"


def _config_name(cfg):
    return f"{cfg.pds_variant.value}/{cfg.stage_c.value}/{cfg.removal_policy.value}"


def fuzz(seed, iters, edge_prob=0.3, configs=MATRIX, with_ci=True):
    """Run ``iters`` random graphs through ``configs`` and, when ``with_ci``,
    through CI.  Every adjacency must match the brute-force skeleton; sound
    configurations must also agree with the true marks."""
    rng = random.Random(seed)
    report = FuzzReport()
    for it in range(iters):
        dag = random_latent_dag(rng, edge_prob=edge_prob)
        visible = sorted(dag.visible)
        separable = brute_force_separable_pairs(dag)
        expected = {
            frozenset((a, b)) for i, a in enumerate(visible) for b in visible[i + 1 :]
        } - separable
        truth = build_including_path_graph(dag)
        results = [(_config_name(cfg), run_fci(dag, cfg).poipg) for cfg in configs]
        if with_ci:
            results.append(("ci", run_ci(dag).poipg))
        for name, p in results:
            problems = []
            if p.skeleton() != expected:
                problems.append("adjacency differs from brute-force skeleton")
            elif (name == "ci" or cfg_is_corrected(name)) and not diff_vs_true_ipg(p, truth).is_empty():
                problems.append("orientation disagrees with the true graph")
            for msg in problems:
                report.findings.append(FuzzFinding(it, name, msg, network_to_text(dag)))
        report.iterations += 1
    return report


def cfg_is_corrected(name):
    return name.startswith(PdsVariant.XDOUBLEPRIME.value)
