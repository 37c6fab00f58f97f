import pytest

from trawl.graph import from_edges
from trawl.synth import cycle_graph, powerlaw_graph


@pytest.fixture
def triangle_graph():
    """0 -> {1, 2}, 1 -> {2}; vertex 2 is a sink."""
    return from_edges([0, 0, 1], [1, 2, 2], n_vertices=3)


@pytest.fixture
def two_neighbor_graph():
    """Vertex 0 with neighbors 1 (w=1) and 2 (w=3): exact pick
    probabilities 0.25 / 0.75."""
    return from_edges([0, 0], [1, 2], [1.0, 3.0], n_vertices=3)


@pytest.fixture
def five_vertex_graph():
    """Weighted digraph for second-order walk oracles: transit 0 has
    neighbors {1, 2, 3, 4}; previous vertex 1 has neighbors {0, 2}."""
    src = [0, 0, 0, 0, 1, 1, 2]
    dst = [1, 2, 3, 4, 0, 2, 3]
    w = [1.5, 2.0, 0.5, 3.0, 1.0, 1.0, 1.0]
    return from_edges(src, dst, w, n_vertices=5)


@pytest.fixture(scope="session")
def small_powerlaw():
    return powerlaw_graph(500, weighted=True, seed=3)


@pytest.fixture(scope="session")
def ring_1000():
    return cycle_graph(1000, weighted=True, seed=2)
