from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynpi.errors import InputError
from dynpi.explorer import ExploreConfig, RuleIndex, default_config, explore, prune_redundant
from dynpi.models import get_model
from dynpi.rules import check_rule, rule_covers
from dynpi.serialize import export_json

from .pools import pool


def test_config_validation():
    with pytest.raises(InputError):
        ExploreConfig(repeat_creation_n=0)
    with pytest.raises(InputError):
        ExploreConfig(max_redundant=-1)
    cfg = default_config(get_model("jdbc"), seed=3, max_redundant=None)
    assert cfg.seed == 3 and cfg.max_redundant == get_model("jdbc").max_redundant


def test_same_seed_gives_identical_bytes():
    m = get_model("arraylist")
    cfg = default_config(m, seed=7, max_redundant=200)
    a, _ = explore(m, cfg)
    b, _ = explore(m, cfg)
    assert export_json(a) == export_json(b)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_small_explorations_are_sound(seed):
    m = get_model("hashset")
    dpi, sps = explore(m, default_config(m, seed=seed, max_redundant=30), complete=False)
    assert dpi.rules and sps
    assert all(not check_rule(r) for r in dpi.rules)


@pytest.mark.parametrize("name", ["arraylist", "hashset", "jdbc"])
def test_raw_pool_is_pruned(name):
    rules = pool(name)
    for r in rules:
        assert not any(r2 is not r and r2.key == r.key and rule_covers(r, r2) for r2 in rules)


@given(st.data())
def test_prune_redundant_keeps_a_cover_for_everything(data):
    rules = pool("arraylist", "extrapolated") + pool("arraylist")
    sample = data.draw(st.lists(st.sampled_from(rules), min_size=1, max_size=12, unique_by=id))
    kept = prune_redundant(sample)
    assert all(any(k is r for r in sample) for k in kept)
    for r in sample:
        assert any(rule_covers(r, k) for k in kept if k.key == r.key)
    assert [k.id for k in prune_redundant(kept)] == [k.id for k in kept]


def test_rule_index():
    rules = pool("arraylist")
    idx = RuleIndex(rules[:3])
    assert all(idx.covered(r) for r in rules[:3])
    assert idx.next_id() == max(r.id for r in rules[:3]) + 1
    assert RuleIndex().next_id() == 0 and not RuleIndex().covered(rules[0])
