"""Compare the compiled and pure-Python matcher backends.

Run with ``python benchmarks/bench_match.py``.  Two workloads:
random induced-subgraph queries, and all-pairs rule covering over the raw
ArrayList rules (the dominant cost of pruning and merging).
"""

from __future__ import annotations

import argparse
import random
import time

from dynpi._kernel import available_backends
from dynpi.explorer import default_config, explore
from dynpi.models import get_model
from dynpi.multigraph import Edge, Multigraph, induced_subgraph, subgraph_isomorphism
from dynpi.rules import covering_witness


def random_graph(rng: random.Random, n: int) -> Multigraph:
    nodes = {i: rng.choice("XY") for i in range(n)}
    edges = {Edge(s, d, rng.choice("ab")) for s in range(n) for d in range(s) if rng.random() < 0.3}
    return Multigraph(nodes, frozenset(edges))


def bench_graphs(backend: str, queries, reps: int) -> float:
    same = lambda a, b, pa, pb: pa == pb
    t = time.perf_counter()
    for _ in range(reps):
        for h, g in queries:
            subgraph_isomorphism(h, g, same, backend=backend)
    return time.perf_counter() - t


def bench_rules(backend: str, groups, reps: int) -> float:
    t = time.perf_counter()
    for _ in range(reps):
        for grp in groups:
            for a in grp:
                for b in grp:
                    covering_witness(a, b, backend)
    return time.perf_counter() - t


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    queries = []
    for _ in range(300):
        g = random_graph(rng, rng.randint(8, 14))
        keep = rng.sample(sorted(g.nodes), rng.randint(3, 7))
        queries.append((induced_subgraph(g, keep), g))

    m = get_model("arraylist")
    dpi, _ = explore(m, default_config(m, seed=args.seed))
    by: dict = {}
    for r in dpi.rules:
        by.setdefault(r.key, []).append(r)
    groups = list(by.values())

    print(f"backends: {', '.join(available_backends())}")
    results = {}
    for backend in available_backends():
        results[backend] = (bench_graphs(backend, queries, args.reps), bench_rules(backend, groups, args.reps))
        g, r = results[backend]
        print(f"{backend:>9}: graphs {g:7.3f} s   rule covering {r:7.3f} s")
    if "compiled" in results:
        (pg, pr), (cg, cr) = results["python"], results["compiled"]
        print(f"  speedup: graphs {pg / cg:.2f}x   rule covering {pr / cr:.2f}x")


if __name__ == "__main__":
    main()
