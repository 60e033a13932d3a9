"""Rules: construction from invocations, covering, and isomorphism.

Covering between two rules is decided with two independent embeddings of
"union graphs": the source and destination graphs placed side by side with
each mapping added as an edge labelled by its multiplicity.  The matcher
treats multiplicity labels loosely (``one`` embeds into ``many``), which is
exactly the mapping-covering condition.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .abstraction import CastNOG, heap_graph, nao_covers, transfer_to_nested
from .errors import InternalError
from .models.base import Call, Invocation, PredicateSet
from .multigraph import (
    MULT_MANY,
    MULT_ONE,
    Edge,
    Multigraph,
    induced_subgraph,
    reach,
    subgraph_isomorphism,
)

ONE = "one"
MANY = "many"


class Mapping(NamedTuple):
    src: int
    dst: int
    mult: str = ONE


def mapping_covers(m1: Mapping, m2: Mapping, src_map: dict, dst_map: dict,
                   src_naos=None, dst_naos=None) -> bool:
    """``m1`` is covered by ``m2`` under the given witness node maps.

    ``src_naos``/``dst_naos`` are ``(payloads of m1's graphs, payloads of m2's
    graphs)`` pairs; when given, endpoint naos are compared as well.
    """
    if src_map.get(m1.src) != m2.src or dst_map.get(m1.dst) != m2.dst:
        return False
    if src_naos is not None and not nao_covers(src_naos[0][m1.src], src_naos[1][m2.src]):
        return False
    if dst_naos is not None and not nao_covers(dst_naos[0][m1.dst], dst_naos[1][m2.dst]):
        return False
    return not (m1.mult == MANY and m2.mult == ONE)


@dataclass(eq=False)
class Rule:
    method: str
    label: str
    e: str | None
    ng: Multigraph
    ng2: Multigraph
    rng: CastNOG
    rng2: CastNOG
    p: frozenset
    q: frozenset
    id: int = -1
    trace: tuple[Call, ...] = ()
    trace2: tuple[Call, ...] = ()
    context: frozenset = field(default_factory=frozenset)
    context2: frozenset = field(default_factory=frozenset)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def key(self):
        return (self.label, self.e)

    def plain_union(self) -> Multigraph:
        if "plain" not in self._cache:
            self._cache["plain"] = union_graph(self.ng, self.ng2, self.p)
        return self._cache["plain"]

    def cast_union(self) -> Multigraph:
        if "cast" not in self._cache:
            self._cache["cast"] = union_graph(
                self.rng.graph, self.rng2.graph, self.q, self.rng.roles, self.rng2.roles)
        return self._cache["cast"]

    def size(self) -> int:
        return len(self.ng) + len(self.ng2) + len(self.rng.graph) + len(self.rng2.graph)

    def __repr__(self) -> str:
        exc = f" !{self.e}" if self.e else ""
        return f"Rule#{self.id}({self.label}{exc}, |ng|={len(self.ng)}, |rng|={len(self.rng.graph)})"


@dataclass
class DPI:
    """A set of rules plus provenance."""

    rules: list
    model: str = ""
    seed: int | None = None
    stage: str = ""

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)


def _role_names(roles: Iterable[tuple[int, str]]) -> dict:
    out: dict = {}
    for lid, name in roles:
        out.setdefault(lid, []).append(name)
    return {lid: "+".join(sorted(ns)) for lid, ns in out.items()}


def _flows(objs, m1, m2) -> frozenset:
    c = Counter((m1[o], m2[o]) for o in objs)
    return frozenset(Mapping(s, d, MANY if k >= 2 else ONE) for (s, d), k in c.items())


def create_rule(invoc: Invocation, preds: PredicateSet, rule_id: int = -1) -> Rule:
    names = _role_names(invoc.roles)
    hg_s = heap_graph(preds, invoc.sp_s)
    hg_d = heap_graph(preds, invoc.sp_d)
    raos_s = [o for o in names if o in hg_s.nodes]
    raos_d = [o for o in names if o in hg_d.nodes]
    if any(o not in hg_d.nodes for o in names):
        raise InternalError("role object missing from destination snapshot")

    ctx_s = reach(hg_s, raos_s, "undirected")
    ctx_d = reach(hg_d, raos_d, "undirected")
    cast_s = reach(hg_s, raos_s, "forward") | reach(hg_s, raos_s, "backward")
    cast_d = reach(hg_d, raos_d, "forward") | reach(hg_d, raos_d, "backward")

    ng, nm_s = transfer_to_nested(induced_subgraph(hg_s, ctx_s))
    ng2, nm_d = transfer_to_nested(induced_subgraph(hg_d, ctx_d))
    rg, rm_s = transfer_to_nested(induced_subgraph(hg_s, cast_s), pinned=raos_s)
    rg2, rm_d = transfer_to_nested(induced_subgraph(hg_d, cast_d), pinned=raos_d)
    rng = CastNOG(rg, {rm_s[o]: names[o] for o in raos_s})
    rng2 = CastNOG(rg2, {rm_d[o]: names[o] for o in raos_d})

    cast_both = cast_s & cast_d
    p = _flows((ctx_s & ctx_d) - cast_both, nm_s, nm_d)
    q = _flows(cast_both, rm_s, rm_d)
    return Rule(
        method=invoc.m.qualname,
        label=invoc.label,
        e=invoc.e,
        ng=ng, ng2=ng2, rng=rng, rng2=rng2, p=p, q=q,
        id=rule_id,
        trace=invoc.sp_s.trace,
        trace2=invoc.sp_d.trace,
        context=frozenset(ctx_s),
        context2=frozenset(ctx_d),
    )


# ---------------------------------------------------------------------------
# union graphs and covering


def union_graph(g1: Multigraph, g2: Multigraph, maps: Iterable[Mapping],
                roles1=None, roles2=None) -> Multigraph:
    """Side-by-side graph with nodes ``("s", n)``/``("d", n)`` and mapping edges.

    Payloads become ``(side, nao, role)``.
    """
    roles1 = roles1 or {}
    roles2 = roles2 or {}
    nodes = {("s", n): ("s", p, roles1.get(n)) for n, p in g1.nodes.items()}
    nodes.update({("d", n): ("d", p, roles2.get(n)) for n, p in g2.nodes.items()})
    edges = {Edge(("s", e.src), ("s", e.dst), e.label) for e in g1.edges}
    edges |= {Edge(("d", e.src), ("d", e.dst), e.label) for e in g2.edges}
    for m in maps:
        edges.add(Edge(("s", m.src), ("d", m.dst), MULT_MANY if m.mult == MANY else MULT_ONE))
    return Multigraph(nodes, frozenset(edges))


def _cover_compat(with_roles: bool):
    def compat(a, b, pa, pb):
        if pa[0] != pb[0] or not nao_covers(pa[1], pb[1]):
            return False
        return not with_roles or pa[2] == pb[2]
    return compat


def _exact_first(a, b, pa, pb) -> float:
    return 1.0 if pa[1].equiv(pb[1]) else 0.0


def _ao_keys(g: Multigraph) -> set:
    return {p.ao.key for p in g.nodes.values()}


def _quick_reject(r: Rule, r2: Rule) -> bool:
    if r.key != r2.key:
        return True
    for a, b in ((r.ng, r2.ng), (r.ng2, r2.ng2), (r.rng.graph, r2.rng.graph), (r.rng2.graph, r2.rng2.graph)):
        if len(a) > len(b) or len(a.edges) > len(b.edges) or not _ao_keys(a) <= _ao_keys(b):
            return True
    return False


def covering_witness(r: Rule, r2: Rule, backend: str | None = None):
    """``(plain, cast)`` union-graph embeddings proving ``r`` ⪯ ``r2``, or None."""
    if _quick_reject(r, r2):
        return None
    cast = subgraph_isomorphism(
        r.cast_union(), r2.cast_union(), _cover_compat(True), priority=_exact_first, backend=backend,
    )
    if cast is None:
        return None
    plain = subgraph_isomorphism(
        r.plain_union(), r2.plain_union(), _cover_compat(False), priority=_exact_first, backend=backend,
    )
    if plain is None:
        return None
    return plain, cast


def rule_covers(r: Rule, r2: Rule, backend: str | None = None) -> bool:
    return covering_witness(r, r2, backend) is not None


def _iso_compat(a, b, pa, pb):
    return pa[0] == pb[0] and pa[1].equiv(pb[1]) and pa[2] == pb[2]


def _same_shape(a: Multigraph, b: Multigraph) -> bool:
    return len(a) == len(b) and len(a.edges) == len(b.edges)


def rules_isomorphic(r: Rule, r2: Rule) -> bool:
    """Equal up to renaming of nodes, with flags and multiplicities exact."""
    if r.key != r2.key or len(r.p) != len(r2.p) or len(r.q) != len(r2.q):
        return False
    pairs = ((r.ng, r2.ng), (r.ng2, r2.ng2), (r.rng.graph, r2.rng.graph), (r.rng2.graph, r2.rng2.graph))
    if not all(_same_shape(a, b) for a, b in pairs):
        return False
    u1, u2 = r.cast_union(), r2.cast_union()
    if not _same_shape(u1, u2):
        return False
    if subgraph_isomorphism(u1, u2, _iso_compat, loose_multiplicity=False) is None:
        return False
    v1, v2 = r.plain_union(), r2.plain_union()
    if not _same_shape(v1, v2):
        return False
    return subgraph_isomorphism(v1, v2, _iso_compat, loose_multiplicity=False) is not None


def check_rule(r: Rule) -> list[str]:
    """Structural invariants; returns a list of violations (empty when sound)."""
    bad = []
    for tag, maps, g1, g2 in (("p", r.p, r.ng, r.ng2), ("q", r.q, r.rng.graph, r.rng2.graph)):
        for m in maps:
            if m.src not in g1.nodes or m.dst not in g2.nodes:
                bad.append(f"{tag} mapping {m} has a dangling end")
                continue
            if m.mult == MANY and (g1.nodes[m.src].singular or g2.nodes[m.dst].singular):
                bad.append(f"{tag} mapping {m} is many between singular nodes")
    for cng in (r.rng, r.rng2):
        for n in cng.roles:
            if n not in cng.graph.nodes:
                bad.append(f"role on missing node {n}")
            elif not cng.graph.nodes[n].singular:
                bad.append(f"role node {n} is not singular")
    return bad
