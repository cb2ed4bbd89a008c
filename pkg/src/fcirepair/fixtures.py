"""Embedded generating networks.

``network1`` is the three-sub-network counterexample, ``network2`` the
seven-ring counterexample.  Both are stored as plain constants rather than
parsed from text so that the golden data does not depend on the parser.
"""

from .graph_core import LatentDag

NETWORK1_VISIBLE = (
    "Z1 T1 V1 b1 c1 "
    "Z2 T2 V2 b2 c2 "
    "Y3 X3 Z3 T3 V3 W3 S3 R3 B3 C3 b3 c3 P3 L1 L2"
).split()

# pairs sharing a latent common cause
NETWORK1_LATENT = [
    ("Z1", "V3"),
    ("T1", "R3"),
    ("Z2", "W3"),
    ("T2", "S3"),
    ("Z3", "R3"),
    ("R3", "X3"),
    ("T3", "S3"),
    ("S3", "Y3"),
]

NETWORK1_DIRECTED = [
    # sub-network 1
    ("V1", "Z1"), ("V1", "T1"), ("Z1", "b1"), ("b1", "R3"), ("T1", "c1"), ("c1", "V3"),
    # sub-network 2
    ("V2", "Z2"), ("V2", "T2"), ("Z2", "b2"), ("b2", "S3"), ("T2", "c2"), ("c2", "W3"),
    # sub-network 3
    ("R3", "Y3"), ("Z3", "P3"),
    ("S3", "X3"), ("X3", "P3"),
    ("R3", "P3"), ("V3", "Z3"), ("V3", "W3"), ("W3", "T3"),
    ("L1", "P3"), ("L2", "P3"), ("Z3", "B3"), ("B3", "C3"), ("C3", "Y3"),
    ("S3", "L1"), ("S3", "L2"), ("T3", "b3"), ("b3", "c3"), ("c3", "Y3"),
    ("V3", "L1"), ("V3", "L2"),
]  # fmt: skip


def _network2():
    latent, directed, visible = [], [], []
    for i in range(1, 8):
        p, q, y, x, z, t, v, s = (f"{c}{i}" for c in "pqYXZTVS")
        visible += [p, q, y, x, z, t, v, s]
        latent += [(z, x), (t, s), (s, y)]
        directed += [(s, x), (s, p), (s, q), (v, z), (v, t)]
        directed += [(u, p) for u in (z, t, v, x)]
        directed += [(u, q) for u in (z, t, v, x)]
    # ring connections: X_i receives Z_{i+2} and T_{i+3}; p_i feeds Y_{i+2},
    # q_i feeds Y_{i+3}
    for i in range(1, 8):
        two = (i + 1) % 7 + 1
        three = (i + 2) % 7 + 1
        directed += [
            (f"Z{two}", f"X{i}"),
            (f"p{i}", f"Y{two}"),
            (f"T{three}", f"X{i}"),
            (f"q{i}", f"Y{three}"),
        ]
    return visible, latent, directed


NETWORK2_VISIBLE, NETWORK2_LATENT, NETWORK2_DIRECTED = _network2()


def latent_dag(visible, latent_pairs, directed, hidden=(), hidden_edges=()):
    """Build a DAG, expanding each latent pair into a hidden node ``H_a_b``."""
    hidden = list(hidden)
    edges = list(directed) + list(hidden_edges)
    for a, b in latent_pairs:
        h = f"H_{a}_{b}"
        hidden.append(h)
        edges += [(h, a), (h, b)]
    return LatentDag(visible, hidden, edges)


def _collider3():
    return LatentDag(["A", "B", "C"], [], [("A", "C"), ("B", "C")])


def _latent_chain5():
    return latent_dag(["A", "B", "C", "D"], [("A", "B")], [("B", "C"), ("C", "D")])


FIXTURES = {
    "network1": lambda: latent_dag(NETWORK1_VISIBLE, NETWORK1_LATENT, NETWORK1_DIRECTED),
    "network2": lambda: latent_dag(NETWORK2_VISIBLE, NETWORK2_LATENT, NETWORK2_DIRECTED),
    "collider3": _collider3,
    "latent_chain5": _latent_chain5,
}


def fixture(name):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
