"""JSON and Graphviz output for rules and DPIs."""

from __future__ import annotations

import json
from typing import Any, Iterable

from .abstraction import AbstractObject, CastNOG, Nao, nesting_levels
from .multigraph import Edge, Multigraph
from .rules import DPI, Mapping, Rule

SCHEMA_VERSION = 1


def _tri(v):
    return "*" if v is None else v


def _untri(v):
    return None if v == "*" else v


def graph_to_json(g: Multigraph, roles: dict | None = None) -> dict:
    roles = roles or {}
    nodes = []
    for n in sorted(g.nodes):
        p = g.nodes[n]
        d: dict[str, Any] = {
            "id": n,
            "class": p.ao.cls,
            "preds": {k: _tri(v) for k, v in p.ao.preds},
            "pl": p.pl,
            "nj": p.nj,
        }
        if n in roles:
            d["role"] = roles[n]
        nodes.append(d)
    edges = [{"src": e.src, "dst": e.dst, "label": e.label}
             for e in sorted(g.edges, key=lambda e: (e.src, e.dst, e.label))]
    return {"nodes": nodes, "edges": edges}


def graph_from_json(d: dict) -> tuple[Multigraph, dict]:
    nodes = {}
    roles = {}
    for nd in d["nodes"]:
        ao = AbstractObject(nd["class"], tuple((k, _untri(v)) for k, v in nd["preds"].items()))
        nodes[nd["id"]] = Nao(ao, nd["pl"], nd["nj"])
        if "role" in nd:
            roles[nd["id"]] = nd["role"]
    edges = frozenset(Edge(e["src"], e["dst"], e["label"]) for e in d["edges"])
    return Multigraph(nodes, edges), roles


def _maps_to_json(maps) -> list:
    return [{"src": m.src, "dst": m.dst, "mult": m.mult} for m in sorted(maps)]


def _maps_from_json(lst) -> frozenset:
    return frozenset(Mapping(m["src"], m["dst"], m["mult"]) for m in lst)


def rule_to_json(r: Rule) -> dict:
    return {
        "id": r.id,
        "method": r.label,
        "qualname": r.method,
        "exception": r.e,
        "ng": graph_to_json(r.ng),
        "ng2": graph_to_json(r.ng2),
        "rng": graph_to_json(r.rng.graph, r.rng.roles),
        "rng2": graph_to_json(r.rng2.graph, r.rng2.roles),
        "p": _maps_to_json(r.p),
        "q": _maps_to_json(r.q),
    }


def rule_from_json(d: dict) -> Rule:
    ng, _ = graph_from_json(d["ng"])
    ng2, _ = graph_from_json(d["ng2"])
    rg, rroles = graph_from_json(d["rng"])
    rg2, rroles2 = graph_from_json(d["rng2"])
    return Rule(
        method=d.get("qualname", d["method"]),
        label=d["method"],
        e=d["exception"],
        ng=ng, ng2=ng2,
        rng=CastNOG(rg, rroles), rng2=CastNOG(rg2, rroles2),
        p=_maps_from_json(d["p"]), q=_maps_from_json(d["q"]),
        id=d["id"],
    )


def dpi_to_obj(dpi: DPI, stages: Iterable[dict] | None = None) -> dict:
    obj: dict[str, Any] = {"model": dpi.model, "seed": dpi.seed}
    if stages is not None:
        obj["stages"] = list(stages)
    obj["rules"] = [rule_to_json(r) for r in sorted(dpi.rules, key=lambda r: r.id)]
    return obj


def export_json(dpi: DPI, stages: Iterable[dict] | None = None) -> str:
    """Deterministic JSON; pass ``stages`` to embed stage timings and counts."""
    return json.dumps(dpi_to_obj(dpi, stages), indent=1, sort_keys=False) + "\n"


def parse_json(text: str) -> DPI:
    obj = json.loads(text)
    rules = [rule_from_json(d) for d in obj.get("rules", [])]
    return DPI(rules, obj.get("model", ""), obj.get("seed"), obj.get("stage", ""))


# ---------------------------------------------------------------------------
# Graphviz


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _node_label(nao: Nao, role: str | None, nid) -> str:
    head = f"{role}: " if role else ""
    mark = "*" if nao.pl else ("+" if nao.nj else "")
    preds = ", ".join(f"{k}={'*' if v is None else ('T' if v else 'F')}" for k, v in nao.ao.preds)
    return f"{head}{nao.ao.cls}{mark} [{nid}]" + (f"\\n{preds}" if preds else "")


def _components(g: Multigraph, keep: set) -> list[list]:
    adj: dict = {n: set() for n in keep}
    for e in g.edges:
        if e.src in keep and e.dst in keep:
            adj[e.src].add(e.dst)
            adj[e.dst].add(e.src)
    seen: set = set()
    comps = []
    for n in sorted(keep, key=repr):
        if n in seen:
            continue
        stack, comp = [n], []
        seen.add(n)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp, key=repr))
    return comps


def _emit_graph(lines: list, g: Multigraph, roles: dict, prefix: str, indent: str) -> None:
    levels = nesting_levels(g) if g.nodes else {}
    counter = [0]

    def emit(nodes: list, level: int, ind: str):
        inner = {n for n in nodes if levels[n] > level}
        for n in nodes:
            if n in inner:
                continue
            lines.append(f'{ind}{_q(prefix + str(n))} [label={_q(_node_label(g.nodes[n], roles.get(n), n))}'
                         f'{", style=bold" if n in roles else ""}];')
        for comp in _components(g, inner):
            counter[0] += 1
            lines.append(f"{ind}subgraph cluster_{prefix}rep{counter[0]} {{")
            lines.append(f'{ind}  style=dashed; label="*";')
            emit(comp, level + 1, ind + "  ")
            lines.append(f"{ind}}}")

    emit(sorted(g.nodes, key=repr), 0, indent)
    for e in sorted(g.edges, key=lambda e: (repr(e.src), repr(e.dst), e.label)):
        lines.append(f"{indent}{_q(prefix + str(e.src))} -> {_q(prefix + str(e.dst))} [label={_q(e.label)}];")


def export_dot(rule: Rule, cast: bool = True) -> str:
    """Source graph left, destination right, mappings as dotted arrows."""
    if cast:
        g1, r1, g2, r2, maps = rule.rng.graph, rule.rng.roles, rule.rng2.graph, rule.rng2.roles, rule.q
    else:
        g1, r1, g2, r2, maps = rule.ng, {}, rule.ng2, {}, rule.p
    title = rule.label + (f" !{rule.e}" if rule.e else "")
    lines = [f"digraph rule_{rule.id} {{", f"  label={_q(title)};", "  rankdir=BT;", "  node [shape=box];"]
    for name, g, roles, prefix in (("source", g1, r1, "s"), ("destination", g2, r2, "d")):
        lines.append(f"  subgraph cluster_{name} {{")
        lines.append(f"    label={_q(name)};")
        _emit_graph(lines, g, roles, prefix, "    ")
        lines.append("  }")
    for m in sorted(maps):
        lines.append(f'  {_q("s" + str(m.src))} -> {_q("d" + str(m.dst))} '
                     f'[style=dotted, constraint=false, label={_q(m.mult)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
