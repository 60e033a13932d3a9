"""Heap graphs, nested object graphs and the reduction between them.

A heap graph has one node per concrete object (keyed by logical id) carrying
an :class:`AbstractObject`.  The reduction sweeps topological layers, lumping
pairwise downward-consistent nodes into plural nodes, then runs a partition
refinement over the whole graph and marks the surviving multi-node blocks as
injective.  Representatives are always the smallest logical id of a block.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import AbstractionDomainError, InputError
from .models.base import PredicateSet, Snapshot, evaluate
from .multigraph import (
    Edge,
    IsoMapping,
    Multigraph,
    induced_subgraph,
    is_acyclic,
    isomorphism,
    reach,
    subgraph_isomorphism,
    topo_layers,
)


@dataclass(frozen=True)
class AbstractObject:
    cls: str
    preds: tuple[tuple[str, bool], ...] = ()
    lid: int | None = field(default=None, compare=False)

    @property
    def key(self):
        return (self.cls, self.preds)

    def equiv(self, other: "AbstractObject") -> bool:
        return self.key == other.key

    def __str__(self) -> str:
        on = [n if v else f"!{n}" for n, v in self.preds]
        return f"{self.cls}({', '.join(on)})" if on else self.cls


@dataclass(frozen=True)
class Nao:
    """Nested abstract object: an abstract object plus plural/injective flags."""

    ao: AbstractObject
    pl: bool = False
    nj: bool = False

    @property
    def singular(self) -> bool:
        return not (self.pl or self.nj)

    @property
    def key(self):
        return (self.ao.key, self.pl, self.nj)

    def equiv(self, other: "Nao") -> bool:
        return self.key == other.key

    def __str__(self) -> str:
        mark = "*" if self.pl else ("+" if self.nj else "")
        return f"{self.ao}{mark}"


def nao_covers(n1: Nao, n2: Nao) -> bool:
    """``n1`` is equivalent to ``n2`` or a singular version of it."""
    if not n1.ao.equiv(n2.ao):
        return False
    return (n1.pl, n1.nj) == (n2.pl, n2.nj) or (n1.singular and not n2.singular)


def renest(n1: Nao, n2: Nao) -> Nao:
    if not n1.ao.equiv(n2.ao):
        raise InputError("renesting needs equivalent abstract objects")
    return replace(n1, pl=n2.pl, nj=n2.nj)


@dataclass(frozen=True)
class CastNOG:
    """A NOG whose role-bearing nodes carry role names (joined with ``+``)."""

    graph: Multigraph
    roles: Mapping = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]


# ---------------------------------------------------------------------------
# heap graphs


def heap_graph(preds: PredicateSet, sp: Snapshot, keep: Iterable[int] | None = None) -> Multigraph:
    vals, edges = evaluate(preds, sp)
    nodes = {lid: AbstractObject(sp.objects[lid].cls, vals[lid], lid) for lid in sp.objects}
    hg = Multigraph(nodes, frozenset(Edge(*e) for e in edges))
    return hg if keep is None else induced_subgraph(hg, keep)


def lift(hg: Multigraph) -> Multigraph:
    return Multigraph({n: Nao(ao) for n, ao in hg.nodes.items()}, hg.edges)


def _nao_eq(pinned: frozenset):
    def compat(a, b, pa, pb):
        return pa.equiv(pb) and (a in pinned) == (b in pinned)
    return compat


def _downward_consistent(nog: Multigraph, u1, u2, pinned: frozenset) -> bool:
    if {(e.dst, e.label) for e in nog.out_edges[u1]} != {(e.dst, e.label) for e in nog.out_edges[u2]}:
        return False
    h1 = induced_subgraph(nog, reach(nog, [u1], "backward"))
    h2 = induced_subgraph(nog, reach(nog, [u2], "backward"))
    base = _nao_eq(pinned)

    def compat(a, b, pa, pb):
        return (a == u1) == (b == u2) and base(a, b, pa, pb)

    return isomorphism(h1, h2, compat) is not None


def find_similars(nog: Multigraph, layer: Iterable, pinned: Iterable = ()) -> list[list]:
    """Split ``layer`` into maximal blocks of pairwise downward-consistent nodes."""
    pinned = frozenset(pinned)
    blocks: list[list] = []
    for n in sorted(layer):
        if n in pinned:
            blocks.append([n])
            continue
        for b in blocks:
            r = b[0]
            if r not in pinned and nog.nodes[r].equiv(nog.nodes[n]) and _downward_consistent(nog, r, n, pinned):
                b.append(n)
                break
        else:
            blocks.append([n])
    return blocks


def _collapse(nog: Multigraph, partition, final: bool):
    rep = {}
    nodes = {}
    for block in partition:
        r = min(block)
        for n in block:
            rep[n] = r
        nao = nog.nodes[r]
        if len(block) > 1:
            if not final:
                nao = replace(nao, pl=True)
            elif not nao.pl:
                nao = replace(nao, nj=True)
        nodes[r] = nao
    for n in nog.nodes:
        if n not in rep:
            rep[n] = n
            nodes[n] = nog.nodes[n]
    edges = frozenset(Edge(rep[e.src], rep[e.dst], e.label) for e in nog.edges)
    nodes = {n: nodes[n] for n in sorted(nodes)}
    return Multigraph(nodes, edges), rep


def lump(nog: Multigraph, partition) -> Multigraph:
    return _collapse(nog, partition, final=False)[0]


def lump_final(nog: Multigraph, partition) -> Multigraph:
    return _collapse(nog, partition, final=True)[0]


def _refine(g: Multigraph, init: dict, use_in: bool) -> list[list]:
    block = dict(init)
    while True:
        sig = {}
        for n in g.nodes:
            out = frozenset((e.label, block[e.dst]) for e in g.out_edges[n])
            inc = frozenset((e.label, block[e.src]) for e in g.in_edges[n]) if use_in else None
            sig[n] = (block[n], out, inc)
        ids: dict = {}
        new = {n: ids.setdefault(sig[n], len(ids)) for n in sorted(g.nodes, key=repr)}
        if len(ids) == len(set(block.values())):
            break
        block = new
    groups: dict = {}
    for n in sorted(g.nodes, key=repr):
        groups.setdefault(block[n], []).append(n)
    return list(groups.values())


def coarsest_partition(nog: Multigraph, universe: Iterable | None = None, pinned: Iterable = ()) -> list[list]:
    """Coarsest refinement of nao-equivalence stable under labelled in- and out-edges."""
    pinned = frozenset(pinned)
    universe = set(nog.nodes if universe is None else universe)
    init = {}
    for n in nog.nodes:
        if n in pinned or n not in universe:
            init[n] = ("pin", n)
        else:
            init[n] = nog.nodes[n].key
    return _refine(nog, init, use_in=True)


def coarsest_partition_upward(g: Multigraph, key) -> list[list]:
    """Coarsest refinement of ``key`` stable under labelled out-edges only."""
    return _refine(g, {n: key(n, p) for n, p in g.nodes.items()}, use_in=False)


def transfer_to_nested(hg: Multigraph, pinned: Iterable = ()) -> tuple[Multigraph, dict]:
    """Reduce a heap graph; returns the NOG and the node map (heap node -> NOG node)."""
    pinned = frozenset(pinned)
    nog = lift(hg)
    rep = {n: n for n in hg.nodes}
    for layer in topo_layers(hg):
        live = [n for n in layer if n in nog.nodes]
        nog, step = _collapse(nog, find_similars(nog, live, pinned), final=False)
        rep = {n: step[r] for n, r in rep.items()}
    nog, step = _collapse(nog, coarsest_partition(nog, None, pinned), final=True)
    rep = {n: step[r] for n, r in rep.items()}
    return nog, rep


def preimage_counts(node_map: Mapping) -> dict:
    counts: dict = {}
    for r in node_map.values():
        counts[r] = counts.get(r, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# queries


def nesting_levels(nog: Multigraph) -> dict:
    level = {}
    for layer in reversed(topo_layers(nog)):
        for n in layer:
            nao = nog.nodes[n]
            if nao.singular:
                level[n] = 0
                continue
            base = max((level[s] for s in nog.successors(n)), default=0)
            level[n] = base + (1 if nao.pl else 0)
    return level


def singular_closed(nog: Multigraph) -> bool:
    """Every edge leaving a singular node reaches a singular node."""
    return all(not nog.nodes[e.src].singular or nog.nodes[e.dst].singular for e in nog.edges)


def check_nog(nog: Multigraph) -> None:
    if not is_acyclic(nog):
        raise AbstractionDomainError("nested object graph has a cycle")
    if not singular_closed(nog):
        raise AbstractionDomainError("singular node points to a non-singular node")


def nog_covers(g1: Multigraph, g2: Multigraph, backend: str | None = None) -> IsoMapping | None:
    return subgraph_isomorphism(
        g1, g2, lambda a, b, pa, pb: nao_covers(pa, pb), priority=_exact_first, backend=backend
    )


def _exact_first(a, b, pa, pb) -> float:
    return 1.0 if pa.equiv(pb) else 0.0
