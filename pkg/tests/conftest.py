from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from dynpi.abstraction import AbstractObject, Nao
from dynpi.multigraph import Edge, Multigraph

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def ao(cls: str, **preds) -> AbstractObject:
    return AbstractObject(cls, tuple(preds.items()))


def conn(open_=True):
    return ao("Connection", c_open=open_)


def stmt(open_=True):
    return ao("Statement", s_open=open_)


def rset(open_=True):
    return ao("ResultSet", r_open=open_)


def _jdbc_edges():
    return (
        [Edge(s, 1, "s_conn") for s in (2, 3, 4)]
        + [Edge(r, 4, "r_stmt") for r in (5, 6, 7)]
        + [Edge(r, 2, "r_stmt") for r in (8, 9)]
    )


@pytest.fixture
def jdbc_heap() -> Multigraph:
    """Nine JDBC objects just before ``executeQuery`` on statement 4."""
    nodes = {1: conn(), 2: stmt(False), 3: stmt(), 4: stmt()}
    nodes.update({r: rset(False) for r in (5, 6, 7, 8, 9)})
    return Multigraph(nodes, frozenset(_jdbc_edges()))


@pytest.fixture
def jdbc_heap_after(jdbc_heap) -> Multigraph:
    """The same heap after the call: a new open result set 10 on statement 4."""
    nodes = dict(jdbc_heap.nodes)
    nodes[10] = rset()
    return Multigraph(nodes, jdbc_heap.edges | {Edge(10, 4, "r_stmt")})


@pytest.fixture
def nested_nog() -> Multigraph:
    """A connection with many closed statements, each with many closed result sets."""
    return Multigraph(
        {"A": Nao(conn()), "B": Nao(stmt(False), pl=True), "C": Nao(rset(False), pl=True)},
        frozenset({Edge("B", "A", "s_conn"), Edge("C", "B", "r_stmt")}),
    )
