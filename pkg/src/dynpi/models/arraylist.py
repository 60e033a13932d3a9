"""A simulated fail-fast array list with its iterator."""

from __future__ import annotations

from .base import CREATOR, MODIFIER, ClassSpec, MethodSpec, ModelException, PackageModel, PredicateSet

CME = "ConcurrentModificationException"
NSE = "NoSuchElementException"
ISE = "IllegalStateException"


def _array(o, sp):
    return sp.objects[o["array"]]


class ArrayListModel(PackageModel):
    name = "arraylist"
    max_redundant = 2000
    max_objects = 6

    classes = {
        "ArrayList": ClassSpec(
            "ArrayList",
            primitive_attrs=(("size", "int"), ("modCount", "int")),
            creators=(MethodSpec("ArrayList", "new", CREATOR),),
            modifiers=(
                MethodSpec("ArrayList", "add", MODIFIER),
                MethodSpec("ArrayList", "iterator", MODIFIER),
            ),
        ),
        "Itr": ClassSpec(
            "Itr",
            primitive_attrs=(("cursor", "int"), ("lastRet", "int"), ("expectedModCount", "int")),
            reference_attrs=(("array", "ArrayList"),),
            modifiers=(
                MethodSpec("Itr", "next", MODIFIER, declared_exceptions=(CME, NSE)),
                MethodSpec("Itr", "remove", MODIFIER, declared_exceptions=(ISE, CME)),
            ),
        ),
    }

    predicates = PredicateSet(
        scalar={
            "ArrayList": (("empty", lambda o, sp: o["size"] > 0),),
            "Itr": (
                ("nextCalled", lambda o, sp: o["lastRet"] != -1),
                ("mover", lambda o, sp: _array(o, sp)["size"] > o["cursor"]),
                ("sync", lambda o, sp: _array(o, sp)["modCount"] == o["expectedModCount"]),
            ),
        },
        reference=(("iter_of", "Itr", "array"),),
    )

    def apply(self, heap, m, callee, params, data):
        q = m.qualname
        if q == "ArrayList.new":
            heap.new("ArrayList", size=0, modCount=0)
            return None
        if q == "ArrayList.add":
            a = heap[callee]
            a["size"] += 1
            a["modCount"] += 1
            return True
        if q == "ArrayList.iterator":
            heap.new("Itr", array=callee, cursor=0, lastRet=-1,
                     expectedModCount=heap[callee]["modCount"])
            return None
        it = heap[callee]
        a = heap[it["array"]]
        if q == "Itr.next":
            if a["modCount"] != it["expectedModCount"]:
                raise ModelException(CME)
            if it["cursor"] >= a["size"]:
                raise ModelException(NSE)
            it["lastRet"] = it["cursor"]
            it["cursor"] += 1
            return None
        if q == "Itr.remove":
            if it["lastRet"] < 0:
                raise ModelException(ISE)
            if a["modCount"] != it["expectedModCount"]:
                raise ModelException(CME)
            a["size"] -= 1
            a["modCount"] += 1
            it["cursor"] = it["lastRet"]
            it["lastRet"] = -1
            it["expectedModCount"] = a["modCount"]
            return None
        raise AssertionError(q)
