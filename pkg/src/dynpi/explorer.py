"""The universal client: randomized exploration, completion and pruning."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, replace
from itertools import product
from typing import Iterable

from .errors import InputError, InternalError
from .models.base import (
    Call,
    Invocation,
    PackageModel,
    PredicateSet,
    Snapshot,
    EMPTY,
    evaluate,
    execute,
    replay,
)
from .rules import DPI, Rule, create_rule, rule_covers

log = logging.getLogger("dynpi.explore")


@dataclass(frozen=True)
class ExploreConfig:
    seed: int = 0
    max_redundant: int = 2000
    repeat_creation_n: int = 3
    max_snapshot_objects: int = 10
    max_steps: int | None = None
    completify_rounds: int = 8
    replay_check_every: int = 50

    def __post_init__(self):
        if self.repeat_creation_n < 1:
            raise InputError("repeat_creation_n must be at least 1")
        if self.max_redundant < 0:
            raise InputError("max_redundant must be non-negative")


def default_config(model: PackageModel, **overrides) -> ExploreConfig:
    base = dict(max_redundant=model.max_redundant, max_snapshot_objects=model.max_objects)
    base.update({k: v for k, v in overrides.items() if v is not None})
    return ExploreConfig(**base)


class RuleIndex:
    """Rules grouped by (method label, exception) for covering queries."""

    def __init__(self, rules: Iterable[Rule] = ()):
        self.groups: dict = {}
        self.rules: list[Rule] = []
        for r in rules:
            self.add(r)

    def add(self, r: Rule) -> None:
        self.groups.setdefault(r.key, []).append(r)
        self.rules.append(r)

    def covered(self, r: Rule) -> bool:
        return any(rule_covers(r, r2) for r2 in self.groups.get(r.key, ()))

    def next_id(self) -> int:
        return max((r.id for r in self.rules), default=-1) + 1


def run_creator(model: PackageModel, sp: Snapshot, call: Call, n: int) -> Invocation:
    """Execute a creator ``n`` times and fold the steps into one invocation."""
    cur = sp
    roles: list = []
    inv = None
    for _ in range(n):
        inv = execute(model, cur, call)
        roles.extend(inv.roles)
        cur = inv.sp_d
    assert inv is not None
    return Invocation(inv.m, inv.e, sp, cur, tuple(roles), inv.ret)


def _same_valuation(model: PackageModel, a: Snapshot, b: Snapshot) -> bool:
    va, ea = evaluate(model.predicates, a)
    vb, eb = evaluate(model.predicates, b)
    return va == vb and ea == eb and {k: o.cls for k, o in a.objects.items()} == {
        k: o.cls for k, o in b.objects.items()
    }


def _draw_call(model: PackageModel, rng: random.Random, sps: list[Snapshot]):
    """One draw in the fixed order method, snapshot, callee, params, data.

    Returns ``(snapshot, call)`` or ``None`` when the draw is skipped.
    """
    methods = model.methods()
    m = methods[rng.randrange(len(methods))]
    sp = sps[rng.randrange(len(sps))]
    callee = None
    if not m.is_creator:
        objs = [o.lid for o in sp.of_class(m.cls)]
        if not objs:
            return None
        callee = objs[rng.randrange(len(objs))]
        if sp.called_on(m.qualname, callee):
            return None
    params = []
    for pc in m.param_classes:
        pool = [o.lid for o in sp.of_class(pc)]
        if not pool:
            return None
        params.append(pool[rng.randrange(len(pool))])
    data = model.draw_data(m, rng)
    if sp.trace and sp.trace[-1].method == m.qualname and rng.random() < 0.5:
        return None
    return sp, Call(m.qualname, callee, tuple(params), data)


def explore_loop(model: PackageModel, cfg: ExploreConfig, preds: PredicateSet | None = None):
    """The exploration loop proper; returns (rules, snapshot store)."""
    preds = preds or model.predicates
    rng = random.Random(cfg.seed)
    sps: list[Snapshot] = [EMPTY]
    index = RuleIndex()
    redundants = 0
    steps = 0
    max_steps = cfg.max_steps if cfg.max_steps is not None else 50 * (cfg.max_redundant + 100)
    while redundants < cfg.max_redundant or not index.rules:
        if steps >= max_steps:
            log.warning("step bound %d reached with %d redundants", max_steps, redundants)
            break
        steps += 1
        drawn = _draw_call(model, rng, sps)
        if drawn is None:
            continue
        sp, call = drawn
        m = model.method(call.method)
        if m.is_creator:
            if len(sp) + cfg.repeat_creation_n > cfg.max_snapshot_objects:
                continue
            inv = run_creator(model, sp, call, cfg.repeat_creation_n)
        else:
            inv = execute(model, sp, call)
        r = create_rule(inv, preds, index.next_id())
        if index.covered(r):
            redundants += 1
            if cfg.max_redundant == 0:
                break
            continue
        index.add(r)
        if len(inv.sp_d) <= cfg.max_snapshot_objects:
            sps.append(inv.sp_d)
            if cfg.replay_check_every and len(sps) % cfg.replay_check_every == 0:
                again = replay(model, inv.sp_d.trace)
                if not _same_valuation(model, again, inv.sp_d):
                    raise InternalError("replay produced a different snapshot")
        if steps % 1000 == 0:
            log.info("step=%d rules=%d redundants=%d", steps, len(index.rules), redundants)
    log.info("step=%d rules=%d redundants=%d", steps, len(index.rules), redundants)
    return index.rules, sps


def prune_redundant(rules: Iterable[Rule]) -> list[Rule]:
    """Drop every rule covered by another; mutual covering keeps the smaller id."""
    kept: dict = {}
    for r in sorted(rules, key=lambda r: r.id):
        group = kept.setdefault(r.key, [])
        if any(rule_covers(r, k) for k in group):
            continue
        group[:] = [k for k in group if not rule_covers(k, r)]
        group.append(r)
    return sorted((r for g in kept.values() for r in g), key=lambda r: r.id)


class _Replayer:
    def __init__(self, model: PackageModel):
        self.model = model
        self.memo: dict = {}

    def __call__(self, trace) -> Snapshot:
        if trace not in self.memo:
            self.memo[trace] = replay(self.model, trace)
        return self.memo[trace]


def modifier_calls(model: PackageModel, sp: Snapshot, objs: Iterable[int]) -> list[Call]:
    """Every modifier call (all parameters, all data) on the given objects."""
    out = []
    for lid in sorted(objs):
        if lid not in sp.objects:
            continue
        cls = model.classes.get(sp.objects[lid].cls)
        if cls is None:
            continue
        for m in cls.modifiers:
            pools = [[o.lid for o in sp.of_class(pc)] for pc in m.param_classes]
            for params in product(*pools):
                for data in model.data_domain(m):
                    out.append(Call(m.qualname, lid, tuple(params), data))
    return out


def completify(rules: Iterable[Rule], model: PackageModel, preds: PredicateSet | None = None,
               cfg: ExploreConfig | None = None) -> list[Rule]:
    """Run every modifier on the objects behind each rule's graphs until nothing new appears."""
    preds = preds or model.predicates
    cfg = cfg or default_config(model)
    index = RuleIndex(rules)
    replayer = _Replayer(model)
    frontier = list(index.rules)
    seen: set = set()
    for _ in range(cfg.completify_rounds):
        added = []
        for r in frontier:
            for trace, objs in ((r.trace, r.context), (r.trace2, r.context2)):
                if (trace, objs) in seen:
                    continue
                seen.add((trace, objs))
                try:
                    sp = replayer(trace)
                except InputError as ex:  # pragma: no cover - replay wraps this
                    raise InternalError(str(ex)) from ex
                if len(sp) > cfg.max_snapshot_objects:
                    continue
                for call in modifier_calls(model, sp, objs):
                    inv = execute(model, sp, call)
                    nr = create_rule(inv, preds, index.next_id())
                    if not index.covered(nr):
                        index.add(nr)
                        added.append(nr)
        if not added:
            break
        frontier = added
    else:
        log.warning("completion stopped after %d rounds", cfg.completify_rounds)
    return index.rules


def explore(model: PackageModel, cfg: ExploreConfig | None = None,
            preds: PredicateSet | None = None, complete: bool = True):
    """Exploration, pruning and completion; returns (DPI, snapshot store)."""
    cfg = cfg or default_config(model)
    rules, sps = explore_loop(model, cfg, preds)
    rules = prune_redundant(rules)
    if complete:
        rules = prune_redundant(completify(rules, model, preds, cfg))
    return DPI(rules, model.name, cfg.seed, "raw"), sps


def renumber(rules: Iterable[Rule], start: int = 0) -> list[Rule]:
    return [replace(r, id=i) for i, r in enumerate(rules, start)]
