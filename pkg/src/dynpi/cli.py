"""Command-line driver: ``dynpi --package jdbc --out out/``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import AbstractionDomainError, InputError, InternalError
from .models import REGISTRY
from .pipeline import PipelineConfig, run_pipeline

EXIT_OK, EXIT_CONFIG, EXIT_INTERNAL = 0, 2, 3


def _option(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    try:
        val = json.loads(v.lower() if v.lower() in ("true", "false") else v)
    except json.JSONDecodeError:
        val = v
    return k, val


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynpi", description="Mine a dynamic package interface.")
    ap.add_argument("--package", required=True, choices=sorted(REGISTRY))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-redundant", type=int, default=None,
                    help="redundant draws before exploration stops (model default if omitted)")
    ap.add_argument("--repeat-creation", type=int, default=None,
                    help="objects created per creator step (default 3)")
    ap.add_argument("--callee-three-valued", choices=("on", "off", "auto"), default="auto",
                    help="join callee predicates three-valued during exception isolation")
    ap.add_argument("--out", default=None, help="artifact directory")
    ap.add_argument("--dot", action="store_true", help="also write one DOT file per final rule")
    ap.add_argument("--oracle-bound", type=int, default=None,
                    help="check final rules against exhaustive enumeration up to N objects")
    ap.add_argument("--option", action="append", type=_option, default=[], metavar="KEY=VALUE",
                    help="model option, e.g. distinguish_add_return=false")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
                        format="%(name)s: %(message)s")
    cfg = PipelineConfig(
        package=args.package,
        seed=args.seed,
        max_redundant=args.max_redundant,
        repeat_creation=args.repeat_creation,
        callee_three_valued=args.callee_three_valued,
        model_options=dict(args.option),
        out=args.out,
        dot=args.dot,
        oracle_bound=args.oracle_bound,
    )
    try:
        res = run_pipeline(cfg)
    except InputError as ex:
        print(f"dynpi: configuration error: {ex}", file=sys.stderr)
        return EXIT_CONFIG
    except (InternalError, AbstractionDomainError) as ex:
        print(f"dynpi: internal error: {ex}", file=sys.stderr)
        return EXIT_INTERNAL
    for s in res.stages:
        print(f"{s['name']:<13} {s['rule_count']:>5} rules {s['duration_ms']:>8} ms")
    if res.coverage is not None:
        miss = res.coverage["uncovered"]
        print(f"oracle bound {res.coverage['bound']}: {res.coverage['oracle_rules']} rules, "
              f"{len(miss)} uncovered")
        for r in miss:
            print(f"  uncovered {r}")
        if miss:
            return EXIT_INTERNAL
    if args.out is None:
        for r in res.final.rules:
            print(r)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
