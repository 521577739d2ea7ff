import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rdswalk.graphs import DirectedGraph, build_graph

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def arc_sets(draw, max_n: int = 12, max_arcs: int = 40):
    """A vertex count and a raw arc list (may contain loops and duplicates)."""
    n = draw(st.integers(2, max_n))
    arcs = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_arcs))
    return n, arcs


@st.composite
def strongly_connected_graphs(draw, max_n: int = 30) -> DirectedGraph:
    """Strong connectivity forced by a Hamiltonian cycle plus random arcs."""
    n = draw(st.integers(2, max_n))
    arcs = [(i, (i + 1) % n) for i in range(n)]
    arcs += draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n))
    return build_graph([(u, v) for u, v in arcs if u != v], n)


@st.composite
def undirected_graphs(draw, max_n: int = 20) -> DirectedGraph:
    """Connected undirected graph: a random tree plus extra edges, stored as
    reciprocal arc pairs."""
    n = draw(st.integers(2, max_n))
    edges = {(draw(st.integers(0, i - 1)), i) for i in range(1, n)}
    edges |= set(draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n)))
    arcs = []
    for u, v in edges:
        if u != v:
            arcs += [(u, v), (v, u)]
    return build_graph(arcs, n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
