"""Exhaustive bounded enumeration, used to certify pipeline output.

Breadth-first search over every call sequence whose snapshots stay within a
bound on the number of objects.  Creators create one object per call.
Snapshots are deduplicated by their abstract shape (classes, predicate
valuations, reference edges and the set of modifiers already called on each
object), up to renaming of logical ids.
"""

from __future__ import annotations

import logging
from collections import deque
from itertools import permutations, product

from .errors import InputError
from .explorer import RuleIndex, prune_redundant
from .models.base import EMPTY, PackageModel, PredicateSet, Snapshot, candidate_calls, evaluate, execute
from .rules import DPI, create_rule

log = logging.getLogger("dynpi.oracle")

MAX_STATES = 200_000


def _called(sp: Snapshot) -> dict:
    out: dict = {}
    for c in sp.trace:
        if c.callee is not None:
            out.setdefault(c.callee, set()).add(c.method)
    return out


def canonical_key(preds: PredicateSet, sp: Snapshot):
    """A key equal for two snapshots iff they are isomorphic abstract states."""
    vals, edges = evaluate(preds, sp)
    called = _called(sp)
    base = {
        lid: (o.cls, vals[lid], tuple(sorted(called.get(lid, ()))))
        for lid, o in sp.objects.items()
    }
    out_e: dict = {lid: [] for lid in sp.objects}
    in_e: dict = {lid: [] for lid in sp.objects}
    for s, d, lab in edges:
        out_e[s].append((lab, d))
        in_e[d].append((lab, s))
    # colour refinement narrows the permutations to try
    col = {lid: repr(b) for lid, b in base.items()}
    for _ in range(len(col)):
        new = {
            lid: repr((col[lid], sorted((lab, col[d]) for lab, d in out_e[lid]),
                       sorted((lab, col[s]) for lab, s in in_e[lid])))
            for lid in col
        }
        if len(set(new.values())) == len(set(col.values())):
            col = new
            break
        col = new
    groups: dict = {}
    for lid in sorted(col):
        groups.setdefault(col[lid], []).append(lid)
    order = sorted(groups)
    best = None
    for perms in product(*(permutations(groups[c]) for c in order)):
        seq = [lid for p in perms for lid in p]
        pos = {lid: i for i, lid in enumerate(seq)}
        enc = (
            tuple(base[lid] for lid in seq),
            tuple(sorted((pos[s], pos[d], lab) for s, d, lab in edges)),
        )
        if best is None or enc < best:
            best = enc
    return best


def oracle_enumerate(model: PackageModel, preds: PredicateSet | None = None, bound: int = 3,
                     max_states: int = MAX_STATES) -> DPI:
    """All rules realizable with at most ``bound`` objects, pruned."""
    if bound < 0:
        raise InputError("bound must be non-negative")
    preds = preds or model.predicates
    index = RuleIndex()
    if bound == 0:
        return DPI([], model.name, None, "oracle")
    seen = {canonical_key(preds, EMPTY)}
    queue = deque([EMPTY])
    while queue:
        sp = queue.popleft()
        for call in candidate_calls(model, sp, bound):
            inv = execute(model, sp, call)
            if len(inv.sp_d) > bound:
                continue
            r = create_rule(inv, preds, index.next_id())
            if not index.covered(r):
                index.add(r)
            key = canonical_key(preds, inv.sp_d)
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > max_states:
                raise InputError(f"oracle bound {bound} exceeds {max_states} abstract states")
            queue.append(inv.sp_d)
    log.info("oracle bound=%d states=%d rules=%d", bound, len(seen), len(index.rules))
    return DPI(prune_redundant(index.rules), model.name, None, "oracle")
