"""Concrete execution layer: classes, objects, snapshots, calls and replay.

A package model is a deterministic simulation.  All object state lives in
immutable :class:`Snapshot` values; executing a call never mutates its input.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Iterable, Mapping

from ..errors import AbstractionDomainError, InputError, InternalError

CREATOR = "creator"
MODIFIER = "modifier"


@dataclass(frozen=True)
class MethodSpec:
    cls: str
    name: str
    kind: str
    param_classes: tuple[str, ...] = ()
    declared_exceptions: tuple[str, ...] = ()
    returns_value_distinguished: bool = False
    owner: str | None = None

    @property
    def qualname(self) -> str:
        return f"{self.owner or self.cls}.{self.name}"

    @property
    def is_creator(self) -> bool:
        return self.kind == CREATOR


@dataclass(frozen=True)
class ClassSpec:
    name: str
    primitive_attrs: tuple[tuple[str, str], ...] = ()
    reference_attrs: tuple[tuple[str, str], ...] = ()
    creators: tuple[MethodSpec, ...] = ()
    modifiers: tuple[MethodSpec, ...] = ()

    def __post_init__(self):
        if {m.name for m in self.creators} & {m.name for m in self.modifiers}:
            raise InputError(f"class {self.name}: creators and modifiers overlap")


@dataclass(frozen=True)
class ConcreteObject:
    lid: int
    cls: str
    state: Mapping[str, Any] = field(default_factory=dict, hash=False)

    def __getitem__(self, attr: str) -> Any:
        return self.state[attr]


@dataclass(frozen=True)
class Call:
    method: str
    callee: int | None = None
    params: tuple[int, ...] = ()
    data: tuple = ()


@dataclass(frozen=True)
class Snapshot:
    objects: Mapping[int, ConcreteObject] = field(default_factory=dict, hash=False)
    trace: tuple[Call, ...] = ()

    def __len__(self) -> int:
        return len(self.objects)

    def of_class(self, cls: str) -> list[ConcreteObject]:
        return [o for o in self.objects.values() if o.cls == cls]

    def called_on(self, method: str, lid: int) -> bool:
        return any(c.method == method and c.callee == lid for c in self.trace)


EMPTY = Snapshot()


@dataclass(frozen=True)
class Invocation:
    m: MethodSpec
    e: str | None
    sp_s: Snapshot
    sp_d: Snapshot
    roles: tuple[tuple[int, str], ...]
    ret: Any = None

    @property
    def label(self) -> str:
        if self.m.returns_value_distinguished and self.e is None:
            return f"{self.m.qualname}={str(self.ret).lower()}"
        return self.m.qualname


@dataclass(frozen=True)
class PredicateSet:
    """``scalar[cls]`` lists ``(name, fn(obj, snapshot) -> bool)``;
    ``reference`` lists ``(label, source class, attribute)``."""

    scalar: Mapping[str, tuple[tuple[str, Callable[[ConcreteObject, Snapshot], bool]], ...]]
    reference: tuple[tuple[str, str, str], ...]


class Heap:
    """Mutable working copy used while a single call executes."""

    def __init__(self, sp: Snapshot):
        self.cls = {lid: o.cls for lid, o in sp.objects.items()}
        self.state = {lid: dict(o.state) for lid, o in sp.objects.items()}
        self.created: list[int] = []

    def new(self, cls: str, **state) -> int:
        lid = max(self.cls, default=0) + 1
        self.cls[lid] = cls
        self.state[lid] = state
        self.created.append(lid)
        return lid

    def __getitem__(self, lid: int) -> dict:
        return self.state[lid]

    def objects_of(self, cls: str) -> list[int]:
        return sorted(lid for lid, c in self.cls.items() if c == cls)

    def freeze(self, trace: tuple[Call, ...]) -> Snapshot:
        objs = {
            lid: ConcreteObject(lid, self.cls[lid], dict(self.state[lid]))
            for lid in sorted(self.cls)
        }
        return Snapshot(objs, trace)


class ModelException(Exception):
    """Raised inside a model's method body; becomes invocation data."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name


class PackageModel:
    """Base class for simulated packages.

    Subclasses fill in ``name``, ``classes`` and ``predicates`` and implement
    :meth:`apply`, which runs one method against a :class:`Heap` and returns
    the call's result (or raises :class:`ModelException`).
    """

    name = "abstract"
    classes: dict[str, ClassSpec] = {}
    predicates: PredicateSet
    max_redundant = 2000
    max_objects = 8

    def methods(self) -> list[MethodSpec]:
        out = []
        for c in self.classes.values():
            out.extend(c.creators)
            out.extend(c.modifiers)
        return out

    def method(self, qualname: str) -> MethodSpec:
        for m in self.methods():
            if m.qualname == qualname:
                return m
        raise InputError(f"{self.name}: unknown method {qualname!r}")

    def data_domain(self, m: MethodSpec) -> tuple[tuple, ...]:
        """Finite set of data-argument tuples; the default takes none."""
        return ((),)

    def draw_data(self, m: MethodSpec, rng: random.Random) -> tuple:
        return rng.choice(self.data_domain(m))

    def apply(self, heap: Heap, m: MethodSpec, callee: int | None,
              params: tuple[int, ...], data: tuple) -> Any:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# operations


def execute(model: PackageModel, sp: Snapshot, call: Call) -> Invocation:
    m = model.method(call.method)
    if m.is_creator:
        if call.callee is not None:
            raise InputError("creator calls have no callee")
    else:
        if call.callee not in sp.objects:
            raise InputError(f"callee {call.callee} not in snapshot")
        if sp.objects[call.callee].cls != m.cls:
            raise InputError(f"callee {call.callee} is not a {m.cls}")
    if len(call.params) != len(m.param_classes):
        raise InputError(f"{m.qualname} takes {len(m.param_classes)} object parameters")
    for lid, pc in zip(call.params, m.param_classes):
        if lid not in sp.objects or sp.objects[lid].cls != pc:
            raise InputError(f"parameter {lid} is not a {pc} of the snapshot")

    heap = Heap(sp)
    trace = sp.trace + (call,)
    try:
        ret = model.apply(heap, m, call.callee, call.params, call.data)
        exc = None
    except ModelException as ex:
        exc, ret = ex.name, None
    if exc is not None:
        sp_d = Snapshot(sp.objects, trace)
        created: list[int] = []
    else:
        sp_d = heap.freeze(trace)
        created = heap.created

    roles: list[tuple[int, str]] = []
    if call.callee is not None:
        roles.append((call.callee, "callee"))
    for i, lid in enumerate(call.params):
        roles.append((lid, f"param_{i}"))
    for lid in created:
        roles.append((lid, "new"))
    if isinstance(ret, ObjectRef) and ret.lid not in created:
        roles.append((ret.lid, "return"))
    value = None if isinstance(ret, ObjectRef) else ret
    return Invocation(m, exc, sp, sp_d, tuple(roles), value)


@dataclass(frozen=True)
class ObjectRef:
    """Wraps an object return value so it is not mistaken for data."""

    lid: int


def replay(model: PackageModel, trace: Iterable[Call]) -> Snapshot:
    sp = EMPTY
    for call in trace:
        try:
            sp = execute(model, sp, call).sp_d
        except InputError as ex:
            raise InternalError(f"replay diverged at {call}: {ex}") from ex
    return sp


def evaluate(preds: PredicateSet, sp: Snapshot):
    """Scalar valuations per object and the labelled reference edges."""
    vals = {}
    for lid, o in sp.objects.items():
        vals[lid] = tuple((name, bool(fn(o, sp))) for name, fn in preds.scalar.get(o.cls, ()))
    edges = set()
    for label, cls, attr in preds.reference:
        for o in sp.of_class(cls):
            tgt = o.state.get(attr)
            if tgt is not None:
                edges.add((o.lid, tgt, label))
    _check_acyclic(sp.objects, edges)
    return vals, edges


def _check_acyclic(nodes, edges) -> None:
    succ: dict[int, list[int]] = {n: [] for n in nodes}
    indeg = {n: 0 for n in nodes}
    for s, d, _ in edges:
        succ[s].append(d)
        indeg[d] += 1
    todo = [n for n, k in indeg.items() if k == 0]
    seen = 0
    while todo:
        n = todo.pop()
        seen += 1
        for d in succ[n]:
            indeg[d] -= 1
            if indeg[d] == 0:
                todo.append(d)
    if seen != len(indeg):
        raise AbstractionDomainError("reference predicates form a cycle")


def candidate_calls(model: PackageModel, sp: Snapshot, max_objects: int | None = None) -> list[Call]:
    """Every call the universal client may make on ``sp``, in a fixed order.

    A modifier is never offered twice on the same object of a snapshot, and
    parameter objects must already exist (calls needing absent classes are
    skipped).
    """
    calls = []
    full = max_objects is not None and len(sp) >= max_objects
    for m in model.methods():
        pools = [[o.lid for o in sp.of_class(pc)] for pc in m.param_classes]
        if any(not p for p in pools):
            continue
        if m.is_creator:
            if full:
                continue
            callees = [None]
        else:
            callees = [o.lid for o in sp.of_class(m.cls) if not sp.called_on(m.qualname, o.lid)]
        for callee in callees:
            for params in product(*pools):
                for data in model.data_domain(m):
                    calls.append(Call(m.qualname, callee, tuple(params), data))
    return calls


def list_calls(model: PackageModel, sp: Snapshot, rng: random.Random | None = None,
               max_objects: int | None = None) -> list[Call]:
    """Candidate calls after redundancy filtering.

    With ``rng``, a call whose method equals the snapshot's last call is
    dropped with probability one half.
    """
    calls = candidate_calls(model, sp, max_objects)
    if rng is None or not sp.trace:
        return calls
    last = sp.trace[-1].method
    return [c for c in calls if c.method != last or rng.random() >= 0.5]
