import math
import random

import pytest
from hypothesis import strategies as st

from sssj.core import StreamItem, normalize
from sssj.io import GeneratorConfig, generate_stream


def item(id, ts, coords):
    return StreamItem.create(id, ts, normalize(coords))


def random_stream(seed, n_max=500, dims_max=50, nnz_max=10):
    """Small seeded stream in the shape the equivalence suites use."""
    r = random.Random(seed)
    avg = r.randint(1, (nnz_max + 1) // 2)
    cfg = GeneratorConfig(
        count=r.randint(2, n_max),
        dims=r.randint(1, dims_max),
        avg_nnz=avg,
        timestamps=r.choice(["sequential", "poisson"]),
        rate=r.choice([0.2, 1.0, 5.0, 50.0]),
        step=r.choice([0.05, 1.0, 3.0]),
        seed=seed,
    )
    return list(generate_stream(cfg))


def pair_map(pairs):
    return {(p.older_id, p.newer_id): p.score for p in pairs}


def assert_same_pairs(got, want, tol=1e-9):
    g, w = pair_map(got), pair_map(want)
    assert g.keys() == w.keys(), (sorted(g.keys() - w.keys())[:5], sorted(w.keys() - g.keys())[:5])
    for k in w:
        assert math.isclose(g[k], w[k], abs_tol=tol, rel_tol=0), (k, g[k], w[k])


coords_st = st.dictionaries(
    st.integers(0, 30),
    st.floats(1e-3, 1.0, allow_nan=False),
    min_size=1,
    max_size=8,
).map(lambda d: sorted(d.items()))


@st.composite
def streams_st(draw, max_items=25):
    n = draw(st.integers(0, max_items))
    gaps = draw(st.lists(st.sampled_from([0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0]), min_size=n, max_size=n))
    ts, out = 0.0, []
    for i, gap in enumerate(gaps):
        ts += gap
        out.append(item(i, ts, draw(coords_st)))
    return out


@pytest.fixture
def unit_pair():
    h = 1 / math.sqrt(2)
    return item(0, 0.0, [(1, h), (2, h)]), item(1, 0.5, [(1, h), (3, h)])


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])
