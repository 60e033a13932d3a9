"""Hypothesis strategies shared by the property suites."""

from __future__ import annotations

from hypothesis import strategies as st

from dynpi.abstraction import AbstractObject, Nao
from dynpi.multigraph import Edge, Multigraph

LABELS = ("a", "b")
CLASSES = ("X", "Y")


@st.composite
def dags(draw, max_nodes=6, payload=None, min_nodes=0):
    """Acyclic graphs: edges only run from higher to lower node ids."""
    n = draw(st.integers(min_nodes, max_nodes))
    pay = payload or st.sampled_from(CLASSES)
    nodes = {i: draw(pay) for i in range(n)}
    edges = set()
    for s in range(n):
        for d in range(s):
            for lab in LABELS:
                if draw(st.integers(0, 3)) == 0:
                    edges.add(Edge(s, d, lab))
    return Multigraph(nodes, frozenset(edges))


@st.composite
def digraphs(draw, max_nodes=6):
    """Arbitrary labelled graphs, cycles and self-loops included."""
    n = draw(st.integers(0, max_nodes))
    nodes = {i: draw(st.sampled_from(CLASSES)) for i in range(n)}
    edges = set()
    for s in range(n):
        for d in range(n):
            for lab in LABELS:
                if draw(st.integers(0, 4)) == 0:
                    edges.add(Edge(s, d, lab))
    return Multigraph(nodes, frozenset(edges))


aos = st.builds(
    lambda c, p, q: AbstractObject(c, (("p", p), ("q", q))),
    st.sampled_from(CLASSES), st.booleans(), st.booleans(),
)
naos = st.builds(
    lambda a, flags: Nao(a, *flags), aos,
    st.sampled_from([(False, False), (True, False), (False, True)]),
)


@st.composite
def heap_graphs(draw, max_nodes=7):
    """Heap graphs: at most one out-edge per label, abstract-object payloads."""
    n = draw(st.integers(0, max_nodes))
    nodes = {i: draw(aos) for i in range(n)}
    edges = set()
    for s in range(1, n):
        for lab in LABELS:
            if draw(st.booleans()):
                edges.add(Edge(s, draw(st.integers(0, s - 1)), lab))
    return Multigraph(nodes, frozenset(edges))
