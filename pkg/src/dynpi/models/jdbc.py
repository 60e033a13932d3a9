"""A small simulated JDBC: connections, statements and result sets.

Every object starts open and is closed by its own ``close``.  A non-close
method raises ``"<Class> not open"`` when the callee or anything it refers to
(transitively) is closed.  ``executeQuery`` closes the statement's open result
sets and opens a new one.  Closing a statement closes its open result sets
while its connection is still open; once the connection is gone they are left
as they were.  ``cascade_connection_close`` additionally closes a connection's
statements when it closes.
"""

from __future__ import annotations

from .base import (
    CREATOR,
    MODIFIER,
    ClassSpec,
    Heap,
    MethodSpec,
    ModelException,
    PackageModel,
    PredicateSet,
)

_REFS = {"Statement": "conn", "ResultSet": "stmt"}


def _m(cls, name, kind=MODIFIER, owner=None, exc=()):
    return MethodSpec(cls, name, kind, declared_exceptions=exc, owner=owner)


class JdbcModel(PackageModel):
    name = "jdbc"
    max_redundant = 1200
    max_objects = 7

    classes = {
        "Connection": ClassSpec(
            "Connection",
            primitive_attrs=(("open", "bool"), ("rows", "int")),
            creators=(_m("Connection", "getConnection", CREATOR, owner="DriverManager"),),
            modifiers=(
                _m("Connection", "createStatement", exc=("Connection not open",)),
                _m("Connection", "close"),
            ),
        ),
        "Statement": ClassSpec(
            "Statement",
            primitive_attrs=(("open", "bool"),),
            reference_attrs=(("conn", "Connection"),),
            modifiers=(
                _m("Statement", "execute", exc=("Statement not open",)),
                _m("Statement", "executeQuery", exc=("Statement not open",)),
                _m("Statement", "close"),
            ),
        ),
        "ResultSet": ClassSpec(
            "ResultSet",
            primitive_attrs=(("open", "bool"), ("cursor", "int"), ("rows", "int")),
            reference_attrs=(("stmt", "Statement"),),
            modifiers=(
                _m("ResultSet", "next", exc=("ResultSet not open",)),
                _m("ResultSet", "close"),
            ),
        ),
    }

    predicates = PredicateSet(
        scalar={
            "Connection": (("c_open", lambda o, sp: o["open"]),),
            "Statement": (("s_open", lambda o, sp: o["open"]),),
            "ResultSet": (("r_open", lambda o, sp: o["open"]),),
        },
        reference=(("s_conn", "Statement", "conn"), ("r_stmt", "ResultSet", "stmt")),
    )

    def __init__(self, cascade_connection_close: bool = False):
        self.cascade_connection_close = cascade_connection_close

    def data_domain(self, m):
        if m.name in ("execute", "executeQuery"):
            return (("SELECT",), ("INSERT",))
        return ((),)

    def _require_open(self, heap: Heap, lid: int) -> None:
        """The callee and everything it refers to must be open."""
        cls = heap.cls[lid]
        cur = lid
        while cur is not None:
            if not heap[cur]["open"]:
                raise ModelException(f"{cls} not open")
            attr = _REFS.get(heap.cls[cur])
            cur = heap[cur][attr] if attr else None

    def apply(self, heap, m, callee, params, data):
        q = m.qualname
        if q == "DriverManager.getConnection":
            return heap.new("Connection", open=True, rows=0)
        if m.name == "close":
            st = heap[callee]
            if not st["open"]:
                return None
            st["open"] = False
            if m.cls == "Connection" and self.cascade_connection_close:
                for s in heap.objects_of("Statement"):
                    if heap[s]["conn"] == callee:
                        heap[s]["open"] = False
            elif m.cls == "Statement" and heap[st["conn"]]["open"]:
                for r in heap.objects_of("ResultSet"):
                    if heap[r]["stmt"] == callee:
                        heap[r]["open"] = False
            return None

        self._require_open(heap, callee)
        if q == "Connection.createStatement":
            return heap.new("Statement", open=True, conn=callee)
        if q == "Statement.execute":
            if data and data[0] == "INSERT":
                heap[heap[callee]["conn"]]["rows"] += 1
            return True
        if q == "Statement.executeQuery":
            for r in heap.objects_of("ResultSet"):
                if heap[r]["stmt"] == callee:
                    heap[r]["open"] = False
            rows = heap[heap[callee]["conn"]]["rows"]
            return heap.new("ResultSet", open=True, stmt=callee, cursor=0, rows=rows)
        if q == "ResultSet.next":
            st = heap[callee]
            st["cursor"] += 1
            return st["cursor"] <= st["rows"]
        raise AssertionError(q)
