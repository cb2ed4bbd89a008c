from hypothesis import strategies as st

from fcirepair.graph_core import LatentDag
from fcirepair.poipg import Mark, Poipg


@st.composite
def latent_dags(draw, min_nodes=2, max_nodes=8, max_hidden=3):
    """DAGs over nodes listed in topological order, some of them hidden."""
    n = draw(st.integers(min_nodes, max_nodes))
    names = [f"N{i}" for i in range(n)]
    order = draw(st.permutations(names))
    edges = [
        (order[i], order[j])
        for i in range(n)
        for j in range(i + 1, n)
        if draw(st.booleans())
    ]
    k = draw(st.integers(0, min(max_hidden, n - 2)))
    hidden = draw(st.sets(st.sampled_from(names), min_size=k, max_size=k)) if k else set()
    visible = [v for v in names if v not in hidden]
    return LatentDag(visible, sorted(hidden), edges)


marks = st.sampled_from(list(Mark))


@st.composite
def poipgs(draw, min_nodes=3, max_nodes=7, with_constraints=True):
    """Arbitrary marked graphs, possibly with constraints."""
    n = draw(st.integers(min_nodes, max_nodes))
    names = [f"P{i}" for i in range(n)]
    p = Poipg(names)
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                p.add_edge(names[i], names[j])
                p.set_mark(names[i], names[j], draw(marks))
                p.set_mark(names[j], names[i], draw(marks))
    if with_constraints:
        for b in names:
            nbrs = p.neighbors(b)
            for x in range(len(nbrs)):
                for y in range(x + 1, len(nbrs)):
                    if draw(st.integers(0, 3)) == 0:
                        p.add_constraint(nbrs[x], b, nbrs[y])
    return p
