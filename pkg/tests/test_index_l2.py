import math

import pytest
from hypothesis import given, settings

from sssj.core import Params, decayed_similarity
from sssj.errors import InternalInconsistency
from sssj.index_inv import InvIndex
from sssj.index_l2 import L2Index
from sssj.indexing import Mode, Trace

from conftest import item, streams_st

HALVES = [(1, 0.5), (2, 0.5), (3, 0.5), (4, 0.5)]


class TestConstruction:
    def test_boundary_four_halves(self):
        idx = L2Index(Params(0.8, 0.1))
        idx.insert(item(0, 0.0, HALVES))
        assert sorted(idx.lists) == [3, 4]
        r = idx.residuals[0]
        assert r.dims == (1, 2)
        assert r.q == pytest.approx(0.707107, abs=1e-6)

    def test_entries_carry_inclusive_prefix_norm(self):
        idx = L2Index(Params(0.8, 0.1))
        idx.insert(item(0, 0.0, HALVES))
        assert idx.lists[3][0].prefix_norm == pytest.approx(math.sqrt(0.75))
        assert idx.lists[4][0].prefix_norm == pytest.approx(1.0)

    def test_theta_one_indexes_last(self):
        idx = L2Index(Params(1.0, 0.1))
        idx.insert(item(0, 0.0, [(1, 1), (2, 2), (7, 3)]))
        assert list(idx.lists) == [7]
        assert idx.residuals[0].dims == (1, 2)

    def test_single_coordinate(self):
        for theta in (0.1, 0.5, 1.0):
            idx = L2Index(Params(theta, 0.1))
            idx.insert(item(0, 0.0, [(4, 1)]))
            assert list(idx.lists) == [4]
            r = idx.residuals[0]
            assert r.dims == () and r.q == 0.0


class TestCandidates:
    def test_empty(self):
        idx = L2Index(Params(0.5, 0.1))
        assert idx.candidates(item(0, 0.0, [(1, 1)])) == {}

    def test_identical_pair(self):
        # two coords, first one residual: C holds only the indexed suffix
        idx = L2Index(Params(0.9, 0.1))
        y = item(0, 0.0, [(1, 0.6), (2, 0.8)])
        idx.insert(y)
        assert idx.residuals[0].dims == (1,)
        x = item(1, 0.0, [(1, 0.6), (2, 0.8)])
        acc = idx.candidates(x)
        assert acc == {0: pytest.approx(0.64)}
        (p,) = idx.verify(x, acc)
        assert p.score == pytest.approx(1.0)

    def test_l2bound_zeroes_orthogonal_suffix(self):
        # y indexes dims 3 and 9 with norm 0.6 up to dim 3; x meets it only
        # on dim 3, where its own prefix norm is about 0.56
        idx = L2Index(Params(0.5, 0.1))
        idx.insert(item(0, 0.0, [(3, 0.6), (9, 0.8)]))
        assert sorted(idx.lists) == [3, 9]
        x = item(1, 0.0, [(2, 0.55), (3, 0.1), (5, math.sqrt(1 - 0.3125))])
        acc = idx.candidates(x)
        # 0.06 + 0.559 * 0.6 < 0.5
        assert acc.get(0, 0.0) == 0.0
        assert idx.verify(x, acc) == []
        assert idx.full_similarities == 0

    def test_expired(self):
        p = Params(0.5, 1.0)
        idx = L2Index(p)
        idx.insert(item(0, 0.0, [(1, 1)]))
        x = item(1, p.tau * 1.01, [(1, 1)])
        idx.prepare(x)
        assert idx.candidates(x) == {}
        assert len(idx.residuals) == 0


class TestVerify:
    def test_single_coord_identical(self):
        idx = L2Index(Params(0.7, 0.1))
        idx.insert(item(0, 3.0, [(2, 1)]))
        x = item(1, 3.0, [(2, 1)])
        (p,) = idx.query(x)
        assert (p.older_id, p.newer_id, p.score) == (0, 1, 1.0)

    def test_ps1_prunes_before_full_dot(self):
        idx = L2Index(Params(0.5, 0.1), trace=Trace())
        y = item(0, 0.0, HALVES)
        idx.insert(y)
        idx.residuals[0].q = 0.1
        x = item(1, 0.0, [(3, 1), (5, 1)])
        assert idx.verify(x, {0: 0.35}) == []
        assert idx.full_similarities == 0
        (_, _, ps1, _, _), = idx.trace.bounds
        assert ps1 == pytest.approx(0.45)

    def test_missing_residual(self):
        idx = L2Index(Params(0.5, 0.1))
        with pytest.raises(InternalInconsistency):
            idx.verify(item(1, 0.0, [(1, 1)]), {42: 0.9})


@settings(max_examples=80, deadline=None)
@given(streams_st())
def test_fewer_entries_than_inv(items):
    p = Params(0.7, 0.2)
    l2, inv = L2Index(p), InvIndex(p)
    for x in items:
        l2.process(x)
        inv.process(x)
        assert l2.posting_entries() <= inv.posting_entries()
    assert l2.entries_traversed <= inv.entries_traversed


@settings(max_examples=80, deadline=None)
@given(streams_st())
def test_bounds_dominate_true_similarity(items):
    p = Params(0.6, 0.3)
    trace = Trace()
    idx = L2Index(p, trace=trace)
    for x in items:
        idx.process(x)
    by_id = {x.id: x for x in items}
    for q, y, ps1, ds1, sz2 in trace.bounds:
        s = decayed_similarity(by_id[q], by_id[y], p.lam)
        assert min(ps1, ds1, sz2) >= s - 1e-12


def test_batch_mode_ignores_time():
    idx = L2Index(Params(0.9, 10.0), Mode.BATCH)
    idx.insert(item(0, 0.0, [(1, 1)]))
    (p,) = idx.query(item(1, 100.0, [(1, 1)]))
    assert p.score == 1.0
