"""Generalizing singular nodes that other rules show can repeat.

A node is deficit when it is singular but one of its mappings connects it to
a non-singular node.  If some other rule's graph holds a non-singular node
with an equivalent abstract object whose surroundings embed the deficit
node's surroundings, the whole surrounding is renested after that donor.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Iterable

from .abstraction import CastNOG, nao_covers, renest, singular_closed
from .explorer import prune_redundant
from .multigraph import Multigraph, induced_subgraph, reach, subgraph_isomorphism
from .rules import MANY, ONE, Mapping, Rule

log = logging.getLogger("dynpi.extrapolate")

TAGS = ("ng", "ng2", "rng", "rng2")


def graph_of(r: Rule, tag: str) -> Multigraph:
    g = getattr(r, tag)
    return g.graph if isinstance(g, CastNOG) else g


def roles_of(r: Rule, tag: str) -> dict:
    g = getattr(r, tag)
    return dict(g.roles) if isinstance(g, CastNOG) else {}


def find_deficit(r: Rule) -> list[tuple[int, str]]:
    out = set()
    for maps, t1, t2 in ((r.p, "ng", "ng2"), (r.q, "rng", "rng2")):
        g1, g2 = graph_of(r, t1), graph_of(r, t2)
        roles1, roles2 = roles_of(r, t1), roles_of(r, t2)
        for m in maps:
            a, b = g1.nodes[m.src], g2.nodes[m.dst]
            if a.singular and not b.singular and m.src not in roles1:
                out.add((m.src, t1))
            if b.singular and not a.singular and m.dst not in roles2:
                out.add((m.dst, t2))
    return sorted(out, key=lambda x: (TAGS.index(x[1]), x[0]))


def _donor_nodes(rules: list[Rule], cast: bool):
    """Non-singular donor nodes by abstract-object key, in donor-search order."""
    tags = ("rng", "rng2") if cast else ("ng", "ng2")
    idx: dict = {}
    for r in sorted(rules, key=lambda r: r.id):
        for tag in tags:
            g = graph_of(r, tag)
            for n, nao in g.nodes.items():
                if not nao.singular:
                    idx.setdefault(nao.ao.key, []).append((r.id, tag, n))
    return idx


def _try_node(g: Multigraph, node, roles: dict, donors: list, by_id: dict, self_id: int):
    ctx = induced_subgraph(g, reach(g, [node], "context"))
    for rid, tag, dn in donors:
        if rid == self_id:
            continue
        h = graph_of(by_id[rid], tag)
        hctx = induced_subgraph(h, reach(h, [dn], "context"))
        if len(hctx) < len(ctx):
            continue

        def compat(a, b, pa, pb, dn=dn):
            if (a == node) != (b == dn):
                return False
            return nao_covers(pa, pb)

        iso = subgraph_isomorphism(ctx, hctx, compat)
        if iso is None:
            continue
        nodes = dict(g.nodes)
        for a, b in iso.node_map.items():
            if a in roles:
                continue
            nodes[a] = renest(nodes[a], h.nodes[b])
        cand = Multigraph(nodes, g.edges)
        if not singular_closed(cand):
            log.debug("rejected extrapolation of %s: breaks singular closure", node)
            continue
        return cand
    return None


def adjust_multiplicities(r: Rule) -> Rule:
    def fix(maps, g1, g2):
        srcs: dict = {}
        for m in maps:
            srcs[m.src] = srcs.get(m.src, 0) + 1
        out = set()
        for m in maps:
            if (m.mult == ONE and not g1.nodes[m.src].singular
                    and not g2.nodes[m.dst].singular and srcs[m.src] == 1):
                m = Mapping(m.src, m.dst, MANY)
            out.add(m)
        return frozenset(out)

    p = fix(r.p, r.ng, r.ng2)
    q = fix(r.q, r.rng.graph, r.rng2.graph)
    if p == r.p and q == r.q:
        return r
    return replace(r, p=p, q=q)


def _with_graph(r: Rule, tag: str, g: Multigraph) -> Rule:
    cur = getattr(r, tag)
    if isinstance(cur, CastNOG):
        return replace(r, **{tag: CastNOG(g, cur.roles)})
    return replace(r, **{tag: g})


def extrapolate_rule(r: Rule, rules: list[Rule]) -> Rule:
    by_id = {x.id: x for x in rules}
    plain = _donor_nodes(rules, cast=False)
    cast = _donor_nodes(rules, cast=True)
    for node, tag in find_deficit(r):
        g = graph_of(r, tag)
        if node not in g.nodes or not g.nodes[node].singular:
            continue
        idx = cast if tag.startswith("r") else plain
        donors = idx.get(g.nodes[node].ao.key, [])
        new = _try_node(g, node, roles_of(r, tag), donors, by_id, r.id)
        if new is not None:
            r = _with_graph(r, tag, new)
    return r


def extrapolate(rules: Iterable[Rule], passes: int = 2, prune: bool = True) -> list[Rule]:
    cur = sorted(rules, key=lambda r: r.id)
    for _ in range(passes):
        for i in range(len(cur)):
            cur[i] = extrapolate_rule(cur[i], cur)
    cur = [adjust_multiplicities(r) for r in cur]
    return prune_redundant(cur) if prune else cur
