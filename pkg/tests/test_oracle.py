import math

import pytest
from hypothesis import given, settings

from sssj.core import Params, StreamItem, decayed_similarity
from sssj.io import GeneratorConfig, generate_stream
from sssj.oracle import brute_force_decayed_max, brute_force_join

from conftest import item, streams_st


def test_empty_and_single():
    p = Params(0.5, 0.1)
    assert brute_force_join([], p) == []
    assert brute_force_join([item(0, 0.0, [(1, 1)])], p) == []


def test_identical_at_horizon():
    p = Params(0.8, 0.5)
    pairs = brute_force_join([item(0, 0.0, [(1, 1)]), item(1, p.tau, [(1, 1)])], p)
    assert len(pairs) == 1
    assert pairs[0].score == pytest.approx(0.8, abs=1e-12)


def test_pinned_regression():
    items = list(generate_stream(GeneratorConfig(count=50, dims=20, avg_nnz=3, seed=2024)))
    assert len(brute_force_join(items, Params(0.5, 0.01))) == 42
    assert len(brute_force_join(items, Params(0.7, 0.1))) == 1


def test_decayed_max_empty():
    assert brute_force_decayed_max([], 1, 5.0, 0.1) == 0.0


def test_decayed_max_half_life():
    assert brute_force_decayed_max([(1, 0.8, 0.0)], 1, 1.0, math.log(2)) == pytest.approx(0.4)


def test_decayed_max_other_dim():
    assert brute_force_decayed_max([(2, 0.8, 0.0)], 1, 1.0, 0.1) == 0.0


@settings(max_examples=60, deadline=None)
@given(streams_st())
def test_relabeling_permutes_ids_only(items):
    p = Params(0.6, 0.3)
    n = len(items)
    relabeled = [StreamItem.create(n - 1 - x.id, x.timestamp, x.vector) for x in items]
    a = brute_force_join(items, p)
    b = brute_force_join(relabeled, p)
    key = lambda i, j: frozenset((i, j))
    want = {key(q.older_id, q.newer_id): q.score for q in a}
    got = {key(n - 1 - q.older_id, n - 1 - q.newer_id): q.score for q in b}
    assert want.keys() == got.keys()
    for k in want:
        assert got[k] == pytest.approx(want[k], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(streams_st())
def test_pairs_are_within_horizon_and_ordered(items):
    p = Params(0.5, 0.2)
    by_id = {x.id: x for x in items}
    for q in brute_force_join(items, p):
        x, y = by_id[q.older_id], by_id[q.newer_id]
        assert x.timestamp <= y.timestamp
        assert y.timestamp - x.timestamp <= p.tau
        assert q.score >= p.theta
        assert q.score == decayed_similarity(x, y, p.lam)
