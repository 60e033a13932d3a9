from __future__ import annotations

import pytest

from dynpi.errors import InputError
from dynpi.models import Call, get_model
from dynpi.models.base import EMPTY, execute
from dynpi.oracle import canonical_key, oracle_enumerate
from dynpi.pipeline import uncovered

from .pools import pipeline


def run(m, calls):
    sp = EMPTY
    for c in calls:
        sp = execute(m, sp, c).sp_d
    return sp


def test_bound_zero_is_empty_and_negative_rejected():
    m = get_model("jdbc")
    assert oracle_enumerate(m, bound=0).rules == []
    with pytest.raises(InputError):
        oracle_enumerate(m, bound=-1)


def test_bound_one_on_jdbc():
    rules = oracle_enumerate(get_model("jdbc"), bound=1).rules
    assert {r.method for r in rules if r.e is None} == {"DriverManager.getConnection", "Connection.close"}


def test_state_guard():
    with pytest.raises(InputError):
        oracle_enumerate(get_model("jdbc"), bound=4, max_states=5)


def test_canonical_key_ignores_object_identity():
    m = get_model("jdbc")
    gc, cs = Call("DriverManager.getConnection"), Call("Connection.createStatement", 1)
    a = run(m, [gc, cs, cs, Call("Statement.close", 2)])
    b = run(m, [gc, cs, cs, Call("Statement.close", 3)])
    c = run(m, [gc, cs, cs])
    assert canonical_key(m.predicates, a) == canonical_key(m.predicates, b)
    assert canonical_key(m.predicates, a) != canonical_key(m.predicates, c)


def test_canonical_key_sees_references():
    m = get_model("jdbc")
    gc = Call("DriverManager.getConnection")
    a = run(m, [gc, gc, Call("Connection.createStatement", 1), Call("Connection.createStatement", 1)])
    b = run(m, [gc, gc, Call("Connection.createStatement", 1), Call("Connection.createStatement", 2)])
    assert canonical_key(m.predicates, a) != canonical_key(m.predicates, b)


def test_oracle_grows_with_bound():
    m = get_model("arraylist")
    sizes = [len(oracle_enumerate(m, bound=b).rules) for b in (1, 2, 3)]
    assert sizes == sorted(sizes) and sizes[0] < sizes[-1]


@pytest.mark.parametrize("name,bound", [("arraylist", 4), ("hashset", 4), ("jdbc", 3)])
def test_final_dpi_covers_oracle(name, bound):
    orc = oracle_enumerate(get_model(name), bound=bound)
    assert uncovered(orc.rules, pipeline(name).final.rules) == []
