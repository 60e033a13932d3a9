"""Merging rules that describe the same kind of call into one rule.

Two rules merge when method and exception agree and their role-reachable
cores are isomorphic over equivalent abstract objects.  Graphs are combined
bottom-up: a node of the second graph is folded into a node of the first when
both carry equivalent abstract objects, compatible repetition flags and the
same (already folded) out-edges.  In-edges are ignored, which is what lets
contexts of different shapes collapse, while keeping the fold one-to-one so
the merged rule still covers both inputs.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Iterable

from .abstraction import CastNOG, Nao
from .errors import InputError
from .explorer import prune_redundant
from .multigraph import Edge, Multigraph, induced_subgraph, isomorphism, reach, topo_layers
from .rules import MANY, ONE, Mapping, Rule, rule_covers, union_graph

log = logging.getLogger("dynpi.merge")


def nao_join(a: Nao, b: Nao) -> Nao:
    """The least nao covering both (flags only; aos must be equivalent)."""
    if a.singular or (a.pl, a.nj) == (b.pl, b.nj):
        return Nao(a.ao, b.pl or a.pl, b.nj if a.singular else a.nj)
    if b.singular:
        return a
    return Nao(a.ao, True, False)


def _flags_compatible(a: Nao, b: Nao) -> bool:
    return a.singular or b.singular or (a.pl, a.nj) == (b.pl, b.nj)


# ---------------------------------------------------------------------------
# role consistency


def _core(cng: CastNOG) -> Multigraph:
    return induced_subgraph(cng.graph, reach(cng.graph, list(cng.roles), "forward"))


def role_consistent(r: Rule, r2: Rule):
    """Witnesses ``(M1, M2)`` pairing the role-reachable cores, or None."""
    c1, c1d, c2, c2d = _core(r.rng), _core(r.rng2), _core(r2.rng), _core(r2.rng2)
    if len(c1) != len(c2) or len(c1d) != len(c2d):
        return None
    q1 = [m for m in r.q if m.src in r.rng.roles and m.dst in c1d.nodes]
    q2 = [m for m in r2.q if m.src in r2.rng.roles and m.dst in c2d.nodes]
    if len(q1) != len(q2):
        return None
    q1 = [Mapping(m.src, m.dst, ONE) for m in q1]
    q2 = [Mapping(m.src, m.dst, ONE) for m in q2]
    u1 = union_graph(c1, c1d, q1, r.rng.roles, r.rng2.roles)
    u2 = union_graph(c2, c2d, q2, r2.rng.roles, r2.rng2.roles)

    def compat(a, b, pa, pb):
        return pa[0] == pb[0] and pa[2] == pb[2] and pa[1].ao.equiv(pb[1].ao)

    iso = isomorphism(u1, u2, compat)
    if iso is None:
        return None
    m1 = {a[1]: b[1] for a, b in iso.node_map.items() if a[0] == "s"}
    m2 = {a[1]: b[1] for a, b in iso.node_map.items() if a[0] == "d"}
    return m1, m2


def mergeable(r: Rule, r2: Rule):
    if r.key != r2.key:
        return None
    return role_consistent(r, r2)


# ---------------------------------------------------------------------------
# graph folding


def _in_labels(g: Multigraph, n) -> frozenset:
    return frozenset(e.label for e in g.in_edges[n])


def fold_graphs(g1: Multigraph, g2: Multigraph, fixed: dict | None = None):
    """Fold ``g2`` into ``g1``; ``fixed`` pre-pairs ``g2`` nodes with ``g1`` nodes.

    Returns ``(merged, L1, L2)`` where ``L1``/``L2`` send input nodes to merged
    nodes.  Merged node ids are ``0..k-1``.
    """
    match: dict = dict(fixed or {})
    used = set(match.values())
    by_key: dict = {}
    for n, p in g1.nodes.items():
        by_key.setdefault(p.ao.key, []).append(n)
    out1 = {n: frozenset((e.label, e.dst) for e in g1.out_edges[n]) for n in g1.nodes}

    for layer in reversed(topo_layers(g2)):
        for b in sorted(layer, key=repr):
            if b in match:
                continue
            pb = g2.nodes[b]
            sig = set()
            for e in g2.out_edges[b]:
                if e.dst not in match:
                    sig = None
                    break
                sig.add((e.label, match[e.dst]))
            if sig is None:
                continue
            best = None
            for a in by_key.get(pb.ao.key, ()):
                if a in used or out1[a] != sig or not _flags_compatible(g1.nodes[a], pb):
                    continue
                score = (g1.nodes[a].equiv(pb), _in_labels(g1, a) == _in_labels(g2, b))
                if best is None or score > best[0]:
                    best = (score, a)
            if best is not None:
                match[b] = best[1]
                used.add(best[1])

    ids: dict = {}
    nodes: dict = {}
    for a in sorted(g1.nodes, key=repr):
        ids[("a", a)] = len(ids)
    inv = {a: b for b, a in match.items()}
    for a in g1.nodes:
        p = g1.nodes[a]
        if a in inv:
            p = nao_join(p, g2.nodes[inv[a]])
        nodes[ids[("a", a)]] = p
    for b in sorted(g2.nodes, key=repr):
        if b not in match:
            ids[("b", b)] = len(ids)
            nodes[ids[("b", b)]] = g2.nodes[b]
    L1 = {a: ids[("a", a)] for a in g1.nodes}
    L2 = {b: (L1[match[b]] if b in match else ids[("b", b)]) for b in g2.nodes}
    edges = {Edge(L1[e.src], L1[e.dst], e.label) for e in g1.edges}
    edges |= {Edge(L2[e.src], L2[e.dst], e.label) for e in g2.edges}
    return Multigraph(dict(sorted(nodes.items())), frozenset(edges)), L1, L2


def repair_edges(g: Multigraph, keep_singular: Iterable = ()) -> Multigraph:
    """Copy flags from destination to singular sources, sinks first."""
    keep = set(keep_singular)
    nodes = dict(g.nodes)
    for layer in reversed(topo_layers(g)):
        for n in sorted(layer, key=repr):
            if not nodes[n].singular or n in keep:
                continue
            succ = [nodes[e.dst] for e in g.out_edges[n] if not nodes[e.dst].singular]
            if succ:
                pick = next((s for s in succ if s.pl), succ[0])
                nodes[n] = Nao(nodes[n].ao, pick.pl, pick.nj)
    if nodes == dict(g.nodes):
        return g
    return Multigraph(nodes, g.edges)


def merge_r(cng: CastNOG, cng2: CastNOG, M: dict):
    """Merge two cast graphs whose cores are paired by ``M`` (cng node -> cng2 node)."""
    fixed = {b: a for a, b in M.items()}
    g, L1, L2 = fold_graphs(cng.graph, cng2.graph, fixed)
    roles = {L1[n]: name for n, name in cng.roles.items()}
    g = repair_edges(g, roles)
    return CastNOG(g, roles), L1, L2


def merge_n(ng: Multigraph, ng2: Multigraph):
    g, L1, L2 = fold_graphs(ng, ng2)
    return repair_edges(g), L1, L2


def combine_mappings(p, p2, Ls1, Ld1, Ls2, Ld2, src: Multigraph, dst: Multigraph,
                     protected: Iterable = ()):
    """Relocate and union two mapping sets, then fix multiplicity anomalies.

    Returns ``(mappings, src graph, dst graph)`` with flags adjusted.
    """
    protected = set(protected)
    best: dict = {}
    for maps, Ls, Ld in ((p, Ls1, Ld1), (p2, Ls2, Ld2)):
        for m in maps:
            k = (Ls[m.src], Ld[m.dst])
            if best.get(k) != MANY:
                best[k] = m.mult
    dnodes = dict(dst.nodes)
    into: dict = {}
    for (s, d) in best:
        into.setdefault(d, []).append(s)
    for d, ss in into.items():
        if d in protected:
            continue
        nao = dnodes[d]
        if len(ss) >= 2 and nao.singular:
            dnodes[d] = Nao(nao.ao, True, False)
        elif len(ss) == 1 and nao.singular and not src.nodes[ss[0]].singular:
            sn = src.nodes[ss[0]]
            dnodes[d] = Nao(nao.ao, sn.pl, sn.nj)
            best[(ss[0], d)] = MANY
    dst = Multigraph(dnodes, dst.edges) if dnodes != dict(dst.nodes) else dst
    maps = frozenset(Mapping(s, d, u) for (s, d), u in best.items())
    return maps, src, dst


def _fix_singular_many(maps, src: Multigraph, dst: Multigraph):
    return frozenset(
        Mapping(m.src, m.dst, ONE) if m.mult == MANY and (src.nodes[m.src].singular or dst.nodes[m.dst].singular) else m
        for m in maps
    )


def merge(r: Rule, r2: Rule, new_id: int | None = None) -> Rule:
    wit = mergeable(r, r2)
    if wit is None:
        raise InputError(f"{r!r} and {r2!r} are not mergeable")
    M1, M2 = wit
    rng, Ls1, Ls2 = merge_r(r.rng, r2.rng, M1)
    rng2, Ld1, Ld2 = merge_r(r.rng2, r2.rng2, M2)
    q, _, g = combine_mappings(r.q, r2.q, Ls1, Ld1, Ls2, Ld2, rng.graph, rng2.graph, rng2.roles)
    g = repair_edges(g, rng2.roles)
    rng2 = CastNOG(g, rng2.roles)
    q = _fix_singular_many(q, rng.graph, rng2.graph)

    ng, Ns1, Ns2 = merge_n(r.ng, r2.ng)
    ng2, Nd1, Nd2 = merge_n(r.ng2, r2.ng2)
    p, _, ng2 = combine_mappings(r.p, r2.p, Ns1, Nd1, Ns2, Nd2, ng, ng2)
    ng2 = repair_edges(ng2)
    p = _fix_singular_many(p, ng, ng2)
    return replace(
        r,
        id=r.id if new_id is None else new_id,
        ng=ng, ng2=ng2, rng=rng, rng2=rng2, p=p, q=q,
        context=r.context, context2=r.context2,
    )


def merge_all(rules: Iterable[Rule], prune: bool = True, check: bool = False) -> list[Rule]:
    """Fold mergeable pairs in rule-id order until no pair merges."""
    cur = sorted(rules, key=lambda r: r.id)
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(cur):
            r = cur[i]
            j = 0
            while j < len(cur):
                if j == i:
                    j += 1
                    continue
                r2 = cur[j]
                if mergeable(r, r2) is not None:
                    m = merge(r, r2)
                    if check and not (rule_covers(r, m) and rule_covers(r2, m)):
                        log.warning("merge of %r and %r does not cover its inputs", r, r2)
                    r = m
                    cur[i] = r
                    del cur[j]
                    if j < i:
                        i -= 1
                    changed = True
                    continue
                j += 1
            i += 1
    return prune_redundant(cur) if prune else cur
