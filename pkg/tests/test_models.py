from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynpi.errors import InputError, InternalError
from dynpi.models import EMPTY, Call, get_model, list_calls
from dynpi.models.base import ClassSpec, MethodSpec, candidate_calls, evaluate, execute, replay
from dynpi.models.hashset import HashSetModel
from dynpi.models.jdbc import JdbcModel

MODELS = ("jdbc", "arraylist", "hashset")


def run(model, *calls):
    sp = EMPTY
    inv = None
    for c in calls:
        inv = execute(model, sp, c)
        sp = inv.sp_d
    return sp, inv


def valuation(model, sp):
    vals, edges = evaluate(model.predicates, sp)
    return {lid: (sp.objects[lid].cls, v) for lid, v in vals.items()}, edges


@st.composite
def traces(draw, name, max_len=12):
    model = get_model(name)
    sp = EMPTY
    calls = []
    for _ in range(draw(st.integers(0, max_len))):
        cands = candidate_calls(model, sp, model.max_objects)
        if not cands:
            break
        c = draw(st.sampled_from(cands))
        calls.append(c)
        sp = execute(model, sp, c).sp_d
    return model, calls, sp


# --- jdbc --------------------------------------------------------------------

GET = Call("DriverManager.getConnection")


def test_list_calls_empty_snapshot_only_creators():
    m = JdbcModel()
    assert [c.method for c in list_calls(m, EMPTY)] == ["DriverManager.getConnection"]


def test_list_calls_open_connection():
    m = JdbcModel()
    sp, _ = run(m, GET)
    methods = {(c.method, c.callee) for c in list_calls(m, sp)}
    assert ("Connection.createStatement", 1) in methods
    assert ("Connection.close", 1) in methods


def test_list_calls_filters_repeated_close():
    m = JdbcModel()
    sp, _ = run(m, GET, Call("Connection.close", 1))
    assert ("Connection.close", 1) not in {(c.method, c.callee) for c in list_calls(m, sp)}


def test_get_connection_on_empty():
    sp, inv = run(JdbcModel(), GET)
    assert inv.roles == ((1, "new"),)
    assert sp.objects[1].cls == "Connection" and sp.objects[1]["open"]


def test_execute_query_closes_previous_result_set():
    m = JdbcModel()
    sp, inv = run(m, GET, Call("Connection.createStatement", 1),
                  Call("Statement.executeQuery", 2, (), ("SELECT",)),
                  Call("Statement.executeQuery", 2, (), ("SELECT",)))
    assert not sp.objects[3]["open"] and sp.objects[4]["open"]
    assert dict(inv.roles) == {2: "callee", 4: "new"}


def test_next_on_closed_result_set_raises_and_keeps_state():
    m = JdbcModel()
    sp, _ = run(m, GET, Call("Connection.createStatement", 1),
                Call("Statement.executeQuery", 2, (), ("SELECT",)), Call("ResultSet.close", 3))
    inv = execute(m, sp, Call("ResultSet.next", 3))
    assert inv.e == "ResultSet not open"
    assert valuation(m, inv.sp_d) == valuation(m, sp)


def test_closed_connection_invalidates_dependents():
    m = JdbcModel()
    sp, _ = run(m, GET, Call("Connection.createStatement", 1),
                Call("Statement.executeQuery", 2, (), ("SELECT",)), Call("Connection.close", 1))
    assert execute(m, sp, Call("Statement.execute", 2, (), ("SELECT",))).e == "Statement not open"
    assert execute(m, sp, Call("ResultSet.next", 3)).e == "ResultSet not open"
    assert execute(m, sp, Call("Connection.createStatement", 1)).e == "Connection not open"


def test_cascade_option_closes_statements():
    sp, _ = run(JdbcModel(cascade_connection_close=True), GET,
                Call("Connection.createStatement", 1), Call("Connection.close", 1))
    assert not sp.objects[2]["open"]
    sp, _ = run(JdbcModel(), GET, Call("Connection.createStatement", 1), Call("Connection.close", 1))
    assert sp.objects[2]["open"]


def test_execute_validates_call():
    m = JdbcModel()
    with pytest.raises(InputError):
        execute(m, EMPTY, Call("Connection.close", 7))
    with pytest.raises(InputError):
        execute(m, EMPTY, Call("DriverManager.getConnection", 1))
    sp, _ = run(m, GET)
    with pytest.raises(InputError):
        execute(m, sp, Call("Statement.close", 1))
    with pytest.raises(InputError):
        execute(m, sp, Call("Connection.close", 1, (1,)))
    with pytest.raises(InputError):
        execute(m, sp, Call("Nope.nothing", 1))


def test_execute_does_not_mutate_source():
    m = JdbcModel()
    sp, _ = run(m, GET)
    before = dict(sp.objects[1].state)
    execute(m, sp, Call("Connection.close", 1))
    assert dict(sp.objects[1].state) == before


# --- arraylist / hashset ------------------------------------------------------


def test_arraylist_empty_predicate_is_size_positive():
    m = get_model("arraylist")
    sp, _ = run(m, Call("ArrayList.new"))
    vals, _ = evaluate(m.predicates, sp)
    assert vals[1] == (("empty", False),)
    sp, _ = run(m, Call("ArrayList.new"), Call("ArrayList.add", 1))
    assert evaluate(m.predicates, sp)[0][1] == (("empty", True),)


def test_arraylist_iterator_protocol():
    m = get_model("arraylist")
    new, add, it = Call("ArrayList.new"), Call("ArrayList.add", 1), Call("ArrayList.iterator", 1)
    sp, _ = run(m, new, add, it)
    assert execute(m, sp, Call("Itr.remove", 2)).e == "IllegalStateException"
    sp2, _ = run(m, new, add, it, Call("Itr.next", 2))
    assert execute(m, sp2, Call("Itr.remove", 2)).e is None
    sp3, _ = run(m, new, it, add)
    assert execute(m, sp3, Call("Itr.next", 2)).e == "ConcurrentModificationException"
    sp4, _ = run(m, new, it)
    assert execute(m, sp4, Call("Itr.next", 2)).e == "NoSuchElementException"


def test_hashset_duplicate_add_keeps_iterators_sync():
    m = HashSetModel()
    sp, _ = run(m, Call("HashSet.new"), Call("HashSet.add", 1, (), (3,)), Call("HashSet.iterator", 1))
    inv = execute(m, sp, Call("HashSet.add", 1, (), (3,)))
    assert inv.ret is False and inv.label == "HashSet.add=false"
    vals, _ = evaluate(m.predicates, inv.sp_d)
    assert dict(vals[2])["sync"]
    inv = execute(m, sp, Call("HashSet.add", 1, (), (4,)))
    assert inv.label == "HashSet.add=true"
    assert not dict(evaluate(m.predicates, inv.sp_d)[0][2])["sync"]


def test_hashset_plain_add_label():
    m = HashSetModel(distinguish_add_return=False)
    _, inv = run(m, Call("HashSet.new"), Call("HashSet.add", 1, (), (0,)))
    assert inv.label == "HashSet.add"


def test_get_model_errors():
    with pytest.raises(InputError):
        get_model("nope")
    with pytest.raises(InputError):
        get_model("jdbc", bogus=True)


def test_class_spec_rejects_overlap():
    m = MethodSpec("C", "x", "creator")
    with pytest.raises(InputError):
        ClassSpec("C", creators=(m,), modifiers=(MethodSpec("C", "x", "modifier"),))


def test_replay_empty_and_divergent():
    assert replay(JdbcModel(), []) == EMPTY
    with pytest.raises(InternalError):
        replay(JdbcModel(), [Call("Connection.close", 1)])


# --- properties ----------------------------------------------------------------


@pytest.mark.parametrize("name", MODELS)
@given(data=st.data())
def test_replay_is_predicate_identical(name, data):
    model, calls, sp = data.draw(traces(name))
    again = replay(model, calls)
    assert valuation(model, again) == valuation(model, sp)
    assert again.trace == sp.trace


@pytest.mark.parametrize("name", MODELS)
@given(data=st.data())
def test_exceptions_leave_valuations_unchanged(name, data):
    model, _, sp = data.draw(traces(name))
    for c in candidate_calls(model, sp):
        inv = execute(model, sp, c)
        if inv.e is not None:
            assert valuation(model, inv.sp_d) == valuation(model, sp)
            assert not any(r == "new" for _, r in inv.roles)


@pytest.mark.parametrize("name", MODELS)
@given(data=st.data())
def test_candidate_calls_never_repeat_a_method_on_an_object(name, data):
    model, _, sp = data.draw(traces(name))
    for c in candidate_calls(model, sp):
        if c.callee is not None:
            assert not sp.called_on(c.method, c.callee)


@given(seed=st.integers(0, 10_000), data=st.data())
def test_list_calls_skip_is_seed_deterministic(seed, data):
    model, _, sp = data.draw(traces("jdbc"))
    a = list_calls(model, sp, random.Random(seed))
    b = list_calls(model, sp, random.Random(seed))
    assert a == b
    assert set(a) <= set(candidate_calls(model, sp))
