from __future__ import annotations

import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynpi.rules import DPI, rules_isomorphic
from dynpi.serialize import export_dot, export_json, graph_from_json, graph_to_json, parse_json

from .pools import pool
from .strategies import heap_graphs, naos


def test_empty_dpi_round_trip():
    text = export_json(DPI([], "jdbc", 0, "isolated"))
    back = parse_json(text)
    assert back.rules == [] and back.model == "jdbc" and export_json(back) == text


@pytest.mark.parametrize("name", ["arraylist", "hashset", "jdbc"])
@pytest.mark.parametrize("stage", ["raw", "isolated"])
def test_dpi_round_trip_is_byte_stable(name, stage):
    dpi = DPI(pool(name, stage), name, 0, stage)
    text = export_json(dpi)
    back = parse_json(text)
    assert export_json(back) == text
    assert all(rules_isomorphic(a, b) for a, b in zip(dpi.rules, back.rules))


@given(heap_graphs(6), st.data())
def test_graph_round_trip(g, data):
    from dynpi.abstraction import Nao
    from dynpi.multigraph import Multigraph
    nog = Multigraph({n: data.draw(naos.map(lambda x, a=a: Nao(a, x.pl, x.nj)))
                      for n, a in g.nodes.items()}, g.edges)
    roles = {n: "callee" for n in list(nog.nodes)[:1]}
    back, roles2 = graph_from_json(graph_to_json(nog, roles))
    assert back.nodes == nog.nodes and back.edges == nog.edges and roles2 == roles


def test_unknown_predicates_serialize_as_star():
    rules = [r for r in pool("jdbc", "isolated") if r.e is not None]
    text = export_json(DPI(rules, "jdbc", 0, "isolated"))
    assert '"*"' in text


def test_dot_has_clusters_mappings_and_stars():
    r = next(r for r in pool("jdbc", "isolated") if r.method == "Statement.executeQuery" and r.e is None
             and any(p.pl for p in r.rng.graph.nodes.values()))
    dot = export_dot(r)
    assert dot.startswith("digraph rule_") and dot.rstrip().endswith("}")
    assert "cluster_source" in dot and "cluster_destination" in dot
    assert "style=dashed" in dot and 'label="*"' in dot
    assert "style=dotted" in dot and "callee: Statement" in dot
    assert dot.count("{") == dot.count("}")
    n_maps = len(re.findall(r"style=dotted", dot))
    assert n_maps == len(r.q)
    plain = export_dot(r, cast=False)
    assert len(re.findall(r"style=dotted", plain)) == len(r.p)
