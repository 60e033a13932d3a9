"""A simulated hash set over a tiny integer domain, with a fail-fast iterator.

Elements live in bucket order (the integer value itself), which is what the
iterator walks.  ``add`` may report whether the element was new.
"""

from __future__ import annotations

from .arraylist import CME, ISE, NSE
from .base import CREATOR, MODIFIER, ClassSpec, MethodSpec, ModelException, PackageModel, PredicateSet

DOMAIN = tuple(range(5))


def _following(elems, key):
    later = [e for e in sorted(elems) if e > key]
    return later[0] if later else None


class HashSetModel(PackageModel):
    name = "hashset"
    max_redundant = 2000
    max_objects = 6

    def __init__(self, distinguish_add_return: bool = True):
        self.distinguish_add_return = distinguish_add_return
        self.classes = {
            "HashSet": ClassSpec(
                "HashSet",
                primitive_attrs=(("elems", "tuple"), ("modCount", "int")),
                creators=(MethodSpec("HashSet", "new", CREATOR),),
                modifiers=(
                    MethodSpec("HashSet", "add", MODIFIER,
                               returns_value_distinguished=distinguish_add_return),
                    MethodSpec("HashSet", "iterator", MODIFIER),
                ),
            ),
            "HashItr": ClassSpec(
                "HashItr",
                primitive_attrs=(("next", "int?"), ("current", "int?"), ("expectedModCount", "int")),
                reference_attrs=(("set", "HashSet"),),
                modifiers=(
                    MethodSpec("HashItr", "next", MODIFIER, declared_exceptions=(CME, NSE)),
                    MethodSpec("HashItr", "remove", MODIFIER, declared_exceptions=(ISE, CME)),
                ),
            ),
        }

    predicates = PredicateSet(
        scalar={
            "HashSet": (("empty", lambda o, sp: len(o["elems"]) > 0),),
            "HashItr": (
                ("nextCalled", lambda o, sp: o["current"] is not None),
                ("mover", lambda o, sp: o["next"] is not None),
                ("sync", lambda o, sp: sp.objects[o["set"]]["modCount"] == o["expectedModCount"]),
            ),
        },
        reference=(("iter_of", "HashItr", "set"),),
    )

    def data_domain(self, m):
        if m.qualname == "HashSet.add":
            return tuple((v,) for v in DOMAIN)
        return ((),)

    def apply(self, heap, m, callee, params, data):
        q = m.qualname
        if q == "HashSet.new":
            heap.new("HashSet", elems=(), modCount=0)
            return None
        if q == "HashSet.add":
            s = heap[callee]
            if data[0] in s["elems"]:
                return False
            s["elems"] = tuple(sorted(s["elems"] + (data[0],)))
            s["modCount"] += 1
            return True
        if q == "HashSet.iterator":
            s = heap[callee]
            first = s["elems"][0] if s["elems"] else None
            heap.new("HashItr", set=callee, next=first, current=None,
                     expectedModCount=s["modCount"])
            return None
        it = heap[callee]
        s = heap[it["set"]]
        if q == "HashItr.next":
            if s["modCount"] != it["expectedModCount"]:
                raise ModelException(CME)
            if it["next"] is None:
                raise ModelException(NSE)
            it["current"] = it["next"]
            it["next"] = _following(s["elems"], it["current"])
            return None
        if q == "HashItr.remove":
            if it["current"] is None:
                raise ModelException(ISE)
            if s["modCount"] != it["expectedModCount"]:
                raise ModelException(CME)
            s["elems"] = tuple(e for e in s["elems"] if e != it["current"])
            s["modCount"] += 1
            it["current"] = None
            it["expectedModCount"] = s["modCount"]
            return None
        raise AssertionError(q)
