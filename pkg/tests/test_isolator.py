from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynpi.isolator import (
    UNKNOWN,
    core_of,
    isolate_all,
    join_preds,
    overlaps,
    preds_match,
    tri_join,
    wildcard_match,
)

from .pools import pool

tri = st.sampled_from([True, False, UNKNOWN])
NAMES = ("p", "q", "r")
preds = st.tuples(tri, tri, tri).map(lambda vs: tuple(zip(NAMES, vs)))


@given(tri, tri, tri)
def test_tri_join_is_a_semilattice(a, b, c):
    assert tri_join(a, a) == a
    assert tri_join(a, b) == tri_join(b, a)
    assert tri_join(tri_join(a, b), c) == tri_join(a, tri_join(b, c))
    assert tri_join(a, UNKNOWN) is UNKNOWN


@given(preds, preds)
def test_join_preds_matches_both_inputs(p1, p2):
    j = join_preds(p1, p2)
    assert [n for n, _ in j] == list(NAMES)
    known = lambda p: all(v is not UNKNOWN for _, v in p)
    if known(p1) and known(p2):
        assert preds_match(j, p1) and preds_match(j, p2)


def test_preds_match_reads_unknown_as_wildcard():
    assert preds_match((("p", UNKNOWN), ("q", True)), (("p", False), ("q", True)))
    assert not preds_match((("p", UNKNOWN), ("q", True)), (("p", False), ("q", False)))


@pytest.mark.parametrize("name", ["arraylist", "hashset", "jdbc"])
@given(data=st.data())
def test_isolated_rules_wildcard_match_their_sources(name, data):
    merged = pool(name, "merged")
    final = [r for r in pool(name, "isolated") if r.e is not None]
    r = data.draw(st.sampled_from([r for r in merged if r.e is not None]))
    assert any(f.key == r.key and wildcard_match(f.rng, core_of(r.rng)) is not None for f in final)


@pytest.mark.parametrize("name", ["arraylist", "hashset", "jdbc"])
def test_isolation_never_shadows_a_normal_rule(name):
    final = pool(name, "isolated")
    assert not overlaps([r for r in final if r.e is not None], [r for r in final if r.e is None])


@pytest.mark.parametrize("name", ["arraylist", "hashset", "jdbc"])
def test_isolation_keeps_normal_rules_and_shrinks_exceptions(name):
    merged = pool(name, "merged")
    out = isolate_all(merged)
    normal = lambda rs: sorted(r.id for r in rs if r.e is None)
    assert normal(out) == normal(merged)
    n_exc = lambda rs: sum(1 for r in rs if r.e is not None)
    assert n_exc(out) <= n_exc(merged)
    for r in out:
        if r.e is not None:
            assert len(r.ng) == 0 and all(m.src == m.dst for m in r.q)


def test_jdbc_next_exception_has_unknown_predicates():
    rs = [r for r in pool("jdbc", "isolated") if r.method == "ResultSet.next" and r.e is not None]
    assert rs
    vals = {v for r in rs for p in r.rng.graph.nodes.values() for _, v in p.ao.preds}
    assert UNKNOWN in vals


def test_callee_mode_changes_only_exception_rules():
    merged = pool("jdbc", "merged")
    strict = isolate_all(merged, True)
    loose = isolate_all(merged, False)
    normal = lambda rs: sorted(r.id for r in rs if r.e is None)
    assert normal(strict) == normal(loose)
    assert len(loose) <= len(strict)
