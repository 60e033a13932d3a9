"""The end-to-end miner: explore, extrapolate, merge, isolate."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .explorer import default_config, explore
from .extrapolator import extrapolate
from .isolator import isolate_all, wildcard_match
from .merger import merge_all
from .models import get_model
from .rules import DPI, Rule, rule_covers
from .serialize import export_dot, export_json

log = logging.getLogger("dynpi.pipeline")

STAGES = ("raw", "extrapolated", "merged", "isolated")


@dataclass
class PipelineConfig:
    package: str
    seed: int = 0
    max_redundant: int | None = None
    repeat_creation: int | None = None
    callee_three_valued: str = "auto"
    model_options: dict = field(default_factory=dict)
    out: Path | None = None
    dot: bool = False
    oracle_bound: int | None = None


@dataclass
class PipelineResult:
    dpis: dict
    stages: list
    coverage: dict | None = None

    @property
    def final(self) -> DPI:
        return self.dpis["isolated"]


def _strictness(mode: str):
    return {"on": False, "off": True, "auto": "auto"}[mode]


def covers_behaviour(r: Rule, final: Iterable[Rule]) -> bool:
    """``r`` is covered (no exception) or wildcard-matched (exception) by ``final``."""
    for f in final:
        if f.key != r.key:
            continue
        if r.e is None:
            if rule_covers(r, f):
                return True
        elif wildcard_match(f.rng, r.rng) is not None:
            return True
    return False


def uncovered(rules: Iterable[Rule], final: Iterable[Rule]) -> list[Rule]:
    final = list(final)
    return [r for r in rules if not covers_behaviour(r, final)]


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    model = get_model(cfg.package, **cfg.model_options)
    ecfg = default_config(model, seed=cfg.seed, max_redundant=cfg.max_redundant,
                          repeat_creation_n=cfg.repeat_creation)
    # "on" combines callee predicates three-valued; "off" keeps them exact
    strict = _strictness(cfg.callee_three_valued)
    dpis: dict = {}
    stages: list = []

    def stage(name, fn):
        t = time.perf_counter()
        rules = fn()
        ms = round((time.perf_counter() - t) * 1000)
        dpis[name] = DPI(list(rules), model.name, cfg.seed, name)
        stages.append({"name": name, "duration_ms": ms, "rule_count": len(rules)})
        log.info("stage %s: %d rules in %d ms", name, len(rules), ms)

    stage("raw", lambda: explore(model, ecfg)[0].rules)
    stage("extrapolated", lambda: extrapolate(dpis["raw"].rules))
    stage("merged", lambda: merge_all(dpis["extrapolated"].rules))
    stage("isolated", lambda: isolate_all(dpis["merged"].rules, strict))

    coverage = None
    if cfg.oracle_bound is not None:
        from .oracle import oracle_enumerate

        t = time.perf_counter()
        odpi = oracle_enumerate(model, bound=cfg.oracle_bound)
        missing = uncovered(odpi.rules, dpis["isolated"].rules)
        coverage = {
            "bound": cfg.oracle_bound,
            "oracle_rules": len(odpi.rules),
            "uncovered": [repr(r) for r in missing],
            "duration_ms": round((time.perf_counter() - t) * 1000),
        }
    result = PipelineResult(dpis, stages, coverage)
    if cfg.out is not None:
        write_artifacts(result, Path(cfg.out), cfg.dot)
    return result


def write_artifacts(result: PipelineResult, out: Path, dot: bool = False) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name in STAGES:
        (out / f"{name}.json").write_text(export_json(result.dpis[name]))
    (out / "dpi.json").write_text(export_json(result.final))
    summary = {"model": result.final.model, "seed": result.final.seed, "stages": result.stages}
    if result.coverage is not None:
        summary["coverage"] = result.coverage
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    if dot:
        ddir = out / "dot"
        ddir.mkdir(exist_ok=True)
        for r in result.final.rules:
            (ddir / f"rule_{r.id:04d}.dot").write_text(export_dot(r))
