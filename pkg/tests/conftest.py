import numpy as np
from hypothesis import strategies as st

from faultgraph.graph import Graph


@st.composite
def small_graphs(draw, min_nodes=0, max_nodes=8):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    chosen = [pr for pr, b in zip(pairs, keep) if b]
    us = [a for a, _ in chosen]
    vs = [b for _, b in chosen]
    return Graph.from_edges(n, us, vs)


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    iu = np.triu_indices(n, 1)
    keep = rng.random(iu[0].shape[0]) < p
    return Graph.from_edges(n, iu[0][keep], iu[1][keep])


def to_networkx(g: Graph):
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(range(g.node_count))
    h.add_edges_from(g.edges().tolist())
    return h


ACCEPTANCE: list[str] = []


def record(line: str) -> None:
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
