"""Directed, edge-labelled multigraphs and the structural queries built on them.

Node payloads are opaque here; whenever two payloads have to be compared the
caller injects the relation.  Graphs are treated as immutable values.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Hashable, Iterable, Mapping, NamedTuple

from . import _kernel
from .errors import AbstractionDomainError, InputError

Node = Hashable

#: Edge labels that carry mapping multiplicities in the union graphs used by
#: rule covering.  They are compared loosely (``one`` embeds into ``many``).
MULT_ONE = "@one"
MULT_MANY = "@many"

REACH_MODES = ("forward", "backward", "undirected", "context")


class Edge(NamedTuple):
    src: Node
    dst: Node
    label: str


@dataclass(frozen=True)
class Multigraph:
    """``nodes`` maps node id to payload; at most one edge per (src, dst, label)."""

    nodes: Mapping[Node, Any] = field(default_factory=dict)
    edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(Edge(*e) for e in self.edges))
        for e in self.edges:
            if e.src not in self.nodes or e.dst not in self.nodes:
                raise InputError(f"edge {e} references an unknown node")

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def out_edges(self) -> dict[Node, list[Edge]]:
        out: dict[Node, list[Edge]] = {n: [] for n in self.nodes}
        for e in sorted(self.edges, key=_edge_key):
            out[e.src].append(e)
        return out

    @cached_property
    def in_edges(self) -> dict[Node, list[Edge]]:
        inc: dict[Node, list[Edge]] = {n: [] for n in self.nodes}
        for e in sorted(self.edges, key=_edge_key):
            inc[e.dst].append(e)
        return inc

    def successors(self, n: Node) -> list[Node]:
        return [e.dst for e in self.out_edges[n]]

    def predecessors(self, n: Node) -> list[Node]:
        return [e.src for e in self.in_edges[n]]

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, n: object) -> bool:
        return n in self.nodes


def _edge_key(e: Edge):
    return (repr(e.src), repr(e.dst), e.label)


class IsoMapping(NamedTuple):
    node_map: dict
    edge_map: dict


def _check_nodes(g: Multigraph, ns: Iterable[Node]) -> None:
    for n in ns:
        if n not in g.nodes:
            raise InputError(f"unknown node {n!r}")


def _closure(seeds: Iterable[Node], step: Callable[[Node], Iterable[Node]]) -> set:
    seen = set(seeds)
    todo = deque(seen)
    while todo:
        n = todo.popleft()
        for m in step(n):
            if m not in seen:
                seen.add(m)
                todo.append(m)
    return seen


def reach(g: Multigraph, seeds: Iterable[Node], mode: str = "forward") -> frozenset:
    """Closure of ``seeds`` (always included) in the given direction.

    ``context`` is everything reachable from a node that reaches a seed.
    """
    seeds = list(seeds)
    _check_nodes(g, seeds)
    if mode == "forward":
        return frozenset(_closure(seeds, g.successors))
    if mode == "backward":
        return frozenset(_closure(seeds, g.predecessors))
    if mode == "undirected":
        return frozenset(_closure(seeds, lambda n: g.successors(n) + g.predecessors(n)))
    if mode == "context":
        return frozenset(_closure(_closure(seeds, g.predecessors), g.successors))
    raise InputError(f"unknown reach mode {mode!r}")


def induced_subgraph(g: Multigraph, keep: Iterable[Node]) -> Multigraph:
    keep = set(keep)
    _check_nodes(g, keep)
    nodes = {n: p for n, p in g.nodes.items() if n in keep}
    return Multigraph(nodes, frozenset(e for e in g.edges if e.src in keep and e.dst in keep))


def topo_layers(g: Multigraph) -> list[frozenset]:
    """Kahn peeling: layer 0 holds the nodes nobody points to, sinks come last."""
    indeg = {n: len(g.in_edges[n]) for n in g.nodes}
    layer = [n for n in g.nodes if indeg[n] == 0]
    layers = []
    seen = 0
    while layer:
        layers.append(frozenset(layer))
        seen += len(layer)
        nxt = []
        for n in layer:
            for e in g.out_edges[n]:
                indeg[e.dst] -= 1
                if indeg[e.dst] == 0:
                    nxt.append(e.dst)
        layer = nxt
    if seen != len(g.nodes):
        raise AbstractionDomainError("graph contains a cycle")
    return layers


def is_acyclic(g: Multigraph) -> bool:
    try:
        topo_layers(g)
    except AbstractionDomainError:
        return False
    return True


def coinciding(g: Multigraph, u1: Node, u2: Node) -> bool:
    _check_nodes(g, (u1, u2))
    out1 = {(e.dst, e.label) for e in g.out_edges[u1]}
    out2 = {(e.dst, e.label) for e in g.out_edges[u2]}
    return out1 == out2


def downward_consistent(
    g: Multigraph, u1: Node, u2: Node, payload_eq: Callable[[Any, Any], bool]
) -> bool:
    if not coinciding(g, u1, u2):
        return False
    h1 = induced_subgraph(g, reach(g, [u1], "backward"))
    h2 = induced_subgraph(g, reach(g, [u2], "backward"))

    def compat(a, b, pa, pb):
        if (a == u1) != (b == u2):
            return False
        return payload_eq(pa, pb)

    return isomorphism(h1, h2, compat) is not None


# ---------------------------------------------------------------------------
# embedding search


def _label_bits(h: Multigraph, g: Multigraph) -> dict:
    bits = {MULT_ONE: _kernel.ONE_BIT, MULT_MANY: _kernel.MANY_BIT}
    labels = sorted(({e.label for e in h.edges} | {e.label for e in g.edges}) - set(bits))
    if len(labels) > 30:
        raise InputError("too many distinct edge labels for the matcher")
    for i, lab in enumerate(labels):
        bits[lab] = 1 << i
    return bits


def _adjacency(graph: Multigraph, index: dict, bits: dict) -> list[int]:
    n = len(index)
    adj = [0] * (n * n)
    for e in graph.edges:
        adj[index[e.src] * n + index[e.dst]] |= bits[e.label]
    return adj


def subgraph_isomorphism(
    h: Multigraph,
    g: Multigraph,
    node_compat: Callable[..., bool],
    *,
    priority: Callable[..., float] | None = None,
    loose_multiplicity: bool = True,
    backend: str | None = None,
) -> IsoMapping | None:
    """Find an injective embedding of ``h`` whose image is induced in ``g``.

    ``node_compat(hn, gn, h_payload, g_payload)`` filters candidate pairs and
    ``priority`` (same signature) orders them, higher first.  Edges labelled
    ``MULT_ONE``/``MULT_MANY`` are matched loosely unless
    ``loose_multiplicity`` is false.
    """
    hn = list(h.nodes)
    gn = list(g.nodes)
    if len(hn) > len(gn):
        return None
    if not hn:
        return IsoMapping({}, {})
    hi = {n: i for i, n in enumerate(hn)}
    gi = {n: i for i, n in enumerate(gn)}
    bits = _label_bits(h, g)
    strict = 0
    for lab, b in bits.items():
        if lab not in (MULT_ONE, MULT_MANY) or not loose_multiplicity:
            strict |= b
    h_adj = _adjacency(h, hi, bits)
    g_adj = _adjacency(g, gi, bits)

    def degs(graph, n):
        out = sum(1 for e in graph.out_edges[n] if bits[e.label] & strict)
        inc = sum(1 for e in graph.in_edges[n] if bits[e.label] & strict)
        return out, inc

    gdeg = [degs(g, n) for n in gn]
    cands = []
    for n in hn:
        ho, hin = degs(h, n)
        hp = h.nodes[n]
        lst = []
        for j, m in enumerate(gn):
            if gdeg[j][0] < ho or gdeg[j][1] < hin:
                continue
            if node_compat(n, m, hp, g.nodes[m]):
                lst.append(j)
        if not lst:
            return None
        if priority is not None:
            lst.sort(key=lambda j, n=n, hp=hp: -priority(n, gn[j], hp, g.nodes[gn[j]]))
        cands.append(lst)

    # most constrained first, then keep the frontier connected
    nbrs = [set() for _ in hn]
    for e in h.edges:
        a, b = hi[e.src], hi[e.dst]
        nbrs[a].add(b)
        nbrs[b].add(a)
    order: list[int] = []
    placed = set()
    remaining = set(range(len(hn)))
    while remaining:
        best = min(remaining, key=lambda i: (-len(nbrs[i] & placed), len(cands[i]), i))
        order.append(best)
        placed.add(best)
        remaining.discard(best)

    assign = _kernel.search(len(hn), len(gn), h_adj, g_adj, order, cands, strict, backend)
    if assign is None:
        return None
    node_map = {hn[i]: gn[a] for i, a in enumerate(assign)}
    edge_map = {}
    for e in h.edges:
        s, d = node_map[e.src], node_map[e.dst]
        img = Edge(s, d, e.label)
        if img not in g.edges:
            img = Edge(s, d, MULT_MANY)
        edge_map[e] = img
    return IsoMapping(node_map, edge_map)


def isomorphism(
    h: Multigraph, g: Multigraph, node_compat: Callable[..., bool], *, backend: str | None = None
) -> IsoMapping | None:
    """Graph isomorphism with every label compared exactly."""
    if len(h.nodes) != len(g.nodes) or len(h.edges) != len(g.edges):
        return None
    return subgraph_isomorphism(h, g, node_compat, loose_multiplicity=False, backend=backend)


def payload_compat(eq: Callable[[Any, Any], bool]) -> Callable[..., bool]:
    """Lift a payload relation to the four-argument ``node_compat`` form."""
    return lambda _a, _b, pa, pb: eq(pa, pb)
