"""Exception isolation: folding exception rules into three-valued cores.

Each exception rule is cut down to the part of its source cast graph that is
reachable from role-labelled nodes.  Cores with the same shape (classes,
references and roles) are joined predicate-wise; predicates that disagree
become unknown (``None``, printed as ``*``).
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Iterable

from .abstraction import AbstractObject, CastNOG, Nao
from .merger import merge_all
from .multigraph import Multigraph, induced_subgraph, reach, subgraph_isomorphism
from .rules import ONE, Mapping, Rule

log = logging.getLogger("dynpi.isolate")

UNKNOWN = None


def tri_join(a, b):
    return a if a == b else UNKNOWN


def join_preds(p1: tuple, p2: tuple) -> tuple:
    d2 = dict(p2)
    return tuple((name, tri_join(v, d2.get(name, UNKNOWN))) for name, v in p1)


def preds_match(pattern: tuple, actual: tuple) -> bool:
    """``pattern`` with unknowns as wildcards agrees with ``actual``."""
    d = dict(actual)
    return all(v is UNKNOWN or d.get(n) == v for n, v in pattern)


def core_of(cng: CastNOG) -> CastNOG:
    g = induced_subgraph(cng.graph, reach(cng.graph, list(cng.roles), "forward"))
    return CastNOG(g, {n: r for n, r in cng.roles.items() if n in g.nodes})


def _payloads(cng: CastNOG) -> Multigraph:
    return Multigraph({n: (p, cng.roles.get(n)) for n, p in cng.graph.nodes.items()}, cng.graph.edges)


def joinable(r: Rule, r2: Rule, callee_strict: bool = True):
    """Node pairing between the two source cores, or None."""
    if r.key != r2.key or r.e is None:
        return None
    c1, c2 = core_of(r.rng), core_of(r2.rng)

    def compat(a, b, pa, pb):
        (n1, role1), (n2, role2) = pa, pb
        if n1.ao.cls != n2.ao.cls or role1 != role2:
            return False
        if callee_strict and role1 is not None and "callee" in role1.split("+"):
            return n1.ao.preds == n2.ao.preds
        return True

    def prio(a, b, pa, pb):
        return sum(1 for x, y in zip(pa[0].ao.preds, pb[0].ao.preds) if x == y)

    g1, g2 = _payloads(c1), _payloads(c2)
    if len(g1) != len(g2) or len(g1.edges) != len(g2.edges):
        return None
    # candidates are tried predicate-exact first
    iso = subgraph_isomorphism(g1, g2, compat, priority=prio, loose_multiplicity=False)
    return None if iso is None else iso.node_map


def three_valued_join(cng: CastNOG, cng2: CastNOG, M: dict) -> CastNOG:
    nodes = {}
    for n, p in cng.graph.nodes.items():
        if n not in M:
            continue
        p2 = cng2.graph.nodes[M[n]]
        ao = AbstractObject(p.ao.cls, join_preds(p.ao.preds, p2.ao.preds), p.ao.lid)
        nodes[n] = Nao(ao, p.pl, p.nj)
    edges = frozenset(e for e in cng.graph.edges if e.src in nodes and e.dst in nodes)
    return CastNOG(Multigraph(nodes, edges), {n: r for n, r in cng.roles.items() if n in nodes})


def isolated_rule(r: Rule, core: CastNOG) -> Rule:
    q = frozenset(Mapping(n, n, ONE) for n in core.graph.nodes)
    empty = Multigraph({}, frozenset())
    return replace(r, ng=empty, ng2=empty, rng=core, rng2=CastNOG(core.graph, dict(core.roles)),
                   p=frozenset(), q=q)


def _isolate_group(group: list[Rule], callee_strict: bool, premerge: bool) -> list[Rule]:
    rules = merge_all(group, prune=False) if premerge else list(group)
    cur = [isolated_rule(r, core_of(r.rng)) for r in sorted(rules, key=lambda r: r.id)]
    changed = True
    while changed:
        changed = False
        for i in range(len(cur)):
            for j in range(i + 1, len(cur)):
                M = joinable(cur[i], cur[j], callee_strict)
                if M is None:
                    continue
                core = three_valued_join(cur[i].rng, cur[j].rng, M)
                cur[i] = isolated_rule(cur[i], core)
                del cur[j]
                changed = True
                break
            if changed:
                break
    return cur


def wildcard_match(pattern: CastNOG, target: CastNOG):
    """Embed ``pattern`` into ``target`` reading unknown predicates as wildcards."""
    def compat(a, b, pa, pb):
        (n1, role1), (n2, role2) = pa, pb
        if n1.ao.cls != n2.ao.cls:
            return False
        if role1 is not None and role1 != role2:
            return False
        return preds_match(n1.ao.preds, n2.ao.preds)

    return subgraph_isomorphism(_payloads(pattern), _payloads(target), compat)


def overlaps(isolated: Iterable[Rule], normal: Iterable[Rule]) -> bool:
    normal = list(normal)
    for r in isolated:
        for n in normal:
            if n.method == r.method and n.e is None and wildcard_match(r.rng, n.rng) is not None:
                return True
    return False


def isolate_all(rules: Iterable[Rule], callee_strict="auto", premerge: bool = True) -> list[Rule]:
    """Replace exception rules by their isolated forms; others pass through."""
    rules = list(rules)
    normal = [r for r in rules if r.e is None]
    groups: dict = {}
    for r in sorted(rules, key=lambda r: r.id):
        if r.e is not None:
            groups.setdefault(r.key, []).append(r)
    out = list(normal)
    for key, group in groups.items():
        if callee_strict == "auto":
            iso = _isolate_group(group, False, premerge)
            if overlaps(iso, normal):
                log.info("isolation of %s overlaps a normal rule; keeping callees apart", key)
                iso = _isolate_group(group, True, premerge)
        else:
            iso = _isolate_group(group, bool(callee_strict), premerge)
        out.extend(iso)
    return sorted(out, key=lambda r: r.id)
