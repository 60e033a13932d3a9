"""Pipeline runs shared across test modules (computed once per session)."""

from __future__ import annotations

from functools import lru_cache

from dynpi.pipeline import PipelineConfig, PipelineResult, run_pipeline

MODELS = ("arraylist", "hashset", "jdbc")


@lru_cache(maxsize=None)
def pipeline(name: str, seed: int = 0, **options) -> PipelineResult:
    return run_pipeline(PipelineConfig(name, seed=seed, model_options=dict(options)))


def pool(name: str, stage: str = "raw") -> list:
    return list(pipeline(name).dpis[stage].rules)


def groups(rules, min_size=2) -> list[list]:
    """Rules bucketed by (label, exception), keeping buckets of ``min_size`` or more."""
    by: dict = {}
    for r in rules:
        by.setdefault(r.key, []).append(r)
    return [g for _, g in sorted(by.items(), key=lambda kv: repr(kv[0])) if len(g) >= min_size]
