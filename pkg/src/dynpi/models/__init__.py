from __future__ import annotations

import inspect

from ..errors import InputError
from .arraylist import ArrayListModel
from .base import (
    EMPTY,
    Call,
    ClassSpec,
    ConcreteObject,
    Invocation,
    MethodSpec,
    PackageModel,
    PredicateSet,
    Snapshot,
    candidate_calls,
    evaluate,
    execute,
    list_calls,
    replay,
)
from .hashset import HashSetModel
from .jdbc import JdbcModel

REGISTRY = {
    "jdbc": JdbcModel,
    "arraylist": ArrayListModel,
    "hashset": HashSetModel,
}


def get_model(name: str, **kwargs) -> PackageModel:
    try:
        cls = REGISTRY[name]
    except KeyError:
        raise InputError(f"unknown package {name!r}; choose from {sorted(REGISTRY)}") from None
    params = inspect.signature(cls.__init__).parameters
    bad = sorted(k for k in kwargs if k not in params or k == "self")
    if bad:
        raise InputError(f"{name}: unknown model option(s) {bad}")
    return cls(**kwargs)


__all__ = [
    "EMPTY", "Call", "ClassSpec", "ConcreteObject", "Invocation", "MethodSpec",
    "PackageModel", "PredicateSet", "Snapshot", "candidate_calls", "evaluate",
    "execute", "get_model", "list_calls", "replay", "REGISTRY",
]
