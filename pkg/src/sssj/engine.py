"""Streaming (STR) and MiniBatch (MB) join frameworks over a pluggable index."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .core import Params, SimilarPair, StreamItem
from .errors import InternalInconsistency, OutOfOrderStream
from .indexing import Index, Mode, Trace, make_index

ALGORITHMS = ("str", "mb")
INDEX_KINDS = ("inv", "l2", "l2ap")

CSV_HEADER = (
    "algorithm,index,theta,lambda,tau,items,entries,candidates,verified,"
    "pairs,reindexes,ic_ms,cg_ms,cv_ms,total_ms"
)


@dataclass
class Metrics:
    algorithm: str = ""
    index: str = ""
    theta: float = 0.0
    lam: float = 0.0
    tau: float = 0.0
    items: int = 0
    entries: int = 0
    candidates: int = 0
    verified: int = 0
    pairs: int = 0
    reindexes: int = 0
    ic_s: float = 0.0
    cg_s: float = 0.0
    cv_s: float = 0.0
    total_s: float = 0.0

    def absorb(self, index: Index) -> None:
        self.entries += index.entries_traversed
        self.candidates += index.candidates_generated
        self.verified += index.full_similarities
        self.reindexes += index.reindex_operations

    def chain_holds(self) -> bool:
        return self.pairs <= self.verified <= self.candidates <= self.entries

    def csv_row(self) -> str:
        return ",".join(
            [
                self.algorithm,
                self.index,
                repr(self.theta),
                repr(self.lam),
                repr(self.tau),
                str(self.items),
                str(self.entries),
                str(self.candidates),
                str(self.verified),
                str(self.pairs),
                str(self.reindexes),
                f"{self.ic_s * 1e3:.3f}",
                f"{self.cg_s * 1e3:.3f}",
                f"{self.cv_s * 1e3:.3f}",
                f"{self.total_s * 1e3:.3f}",
            ]
        )


@dataclass
class JoinResult:
    pairs: list[SimilarPair] = field(default_factory=list)
    metrics: Metrics = field(default_factory=Metrics)


def _step(index: Index, item: StreamItem, m: Metrics, insert: bool) -> list[SimilarPair]:
    clock = time.perf_counter
    t0 = clock()
    index.prepare(item)
    t1 = clock()
    acc = index.candidates(item)
    t2 = clock()
    pairs = index.verify(item, acc)
    t3 = clock()
    if insert:
        index.insert(item)
    t4 = clock()
    m.ic_s += (t1 - t0) + (t4 - t3)
    m.cg_s += t2 - t1
    m.cv_s += t3 - t2
    return pairs


def run_str(
    stream: Iterable[StreamItem],
    params: Params,
    index_kind: str = "l2",
    *,
    trace: Trace | None = None,
    on_pair: Callable[[SimilarPair], None] | None = None,
) -> JoinResult:
    """Query-then-insert every item into one continuously pruned index."""
    index = make_index(index_kind, params, Mode.STREAMING, trace=trace)
    m = Metrics("str", index_kind, params.theta, params.lam, params.tau)
    out: list[SimilarPair] = []
    start = time.perf_counter()
    for item in stream:
        pairs = _step(index, item, m, insert=True)
        m.items += 1
        if pairs:
            out.extend(pairs)
            if on_pair is not None:
                for p in pairs:
                    on_pair(p)
    m.total_s = time.perf_counter() - start
    m.absorb(index)
    m.pairs = len(out)
    return JoinResult(out, m)


def apply_decay(
    raw_pairs: Iterable[tuple[int, int, float]],
    items: Mapping[int, StreamItem],
    params: Params,
) -> list[SimilarPair]:
    """Turn raw dot products into decayed scores, dropping those under theta."""
    theta, lam, tau = params.theta, params.lam, params.tau
    out = []
    for a, b, raw in raw_pairs:
        try:
            x, y = items[a], items[b]
        except KeyError as exc:
            raise InternalInconsistency(f"pair refers to unknown item {exc.args[0]}") from None
        if (x.timestamp, x.id) > (y.timestamp, y.id):
            x, y = y, x
        dt = y.timestamp - x.timestamp
        if dt > tau:
            continue
        score = raw * math.exp(-lam * dt)
        if score >= theta:
            out.append(SimilarPair(x.id, y.id, score))
    return out


def run_mb(
    stream: Iterable[StreamItem],
    params: Params,
    index_kind: str = "l2",
    *,
    trace: Trace | None = None,
    on_pair: Callable[[SimilarPair], None] | None = None,
) -> JoinResult:
    """Join tau-length windows pairwise with batch indexes, decaying afterwards.

    At each window boundary an index is built over the previous window
    (reporting its internal pairs) and probed with every item of the current
    one; then the previous window is dropped. Windows are anchored at the
    first timestamp. A finite stream is flushed by one more such step plus a
    build over the last window alone.
    """
    if index_kind not in INDEX_KINDS:
        raise ValueError(f"unknown index kind {index_kind!r}")
    tau = params.tau
    need_max = index_kind == "l2ap"
    m = Metrics("mb", index_kind, params.theta, params.lam, tau)
    out: list[SimilarPair] = []

    prev: list[StreamItem] = []
    prev_max: dict[int, float] = {}
    cur: list[StreamItem] = []
    cur_max: dict[int, float] = {}

    def close() -> None:
        nonlocal prev, prev_max, cur, cur_max
        if prev:
            max_vector = None
            if need_max:
                max_vector = dict(prev_max)
                for d, v in cur_max.items():
                    if v > max_vector.get(d, 0.0):
                        max_vector[d] = v
            kwargs = {"max_vector": max_vector} if need_max else {}
            index = make_index(index_kind, params, Mode.BATCH, trace=trace, **kwargs)
            raw: list[SimilarPair] = []
            for y in prev:
                raw.extend(_step(index, y, m, insert=True))
            for x in cur:
                raw.extend(_step(index, x, m, insert=False))
            m.absorb(index)
            if raw:
                lookup = {it.id: it for it in prev}
                lookup.update((it.id, it) for it in cur)
                decayed = apply_decay(((p.older_id, p.newer_id, p.score) for p in raw), lookup, params)
                out.extend(decayed)
                if on_pair is not None:
                    for p in decayed:
                        on_pair(p)
        prev, prev_max = cur, cur_max
        cur, cur_max = [], {}

    start = time.perf_counter()
    t0 = None
    cur_idx = 0
    last_ts = -math.inf
    for item in stream:
        ts = item.timestamp
        if ts < last_ts:
            raise OutOfOrderStream(item.id, ts, last_ts)
        if t0 is None:
            t0 = ts
        if tau > 0:
            widx = math.floor((ts - t0) / tau)
        else:
            # zero horizon: only simultaneous items can pair
            widx = cur_idx + 2 if ts > last_ts and cur else cur_idx
        if widx > cur_idx:
            close()
            if widx - cur_idx > 1:
                close()
            cur_idx = widx
        last_ts = ts
        cur.append(item)
        m.items += 1
        if need_max:
            for d, v in zip(item.vector.dims, item.vector.values):
                if v > cur_max.get(d, 0.0):
                    cur_max[d] = v
    close()
    close()
    m.total_s = time.perf_counter() - start
    m.pairs = len(out)
    return JoinResult(out, m)


def run(
    algorithm: str,
    stream: Iterable[StreamItem],
    params: Params,
    index_kind: str = "l2",
    **kwargs,
) -> JoinResult:
    if algorithm == "str":
        return run_str(stream, params, index_kind, **kwargs)
    if algorithm == "mb":
        return run_mb(stream, params, index_kind, **kwargs)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def sorted_pairs(pairs: Iterable[SimilarPair]) -> list[SimilarPair]:
    """Stable sort on (older, newer) so outputs diff cleanly across algorithms."""
    return sorted(pairs, key=lambda p: (p.older_id, p.newer_id))


def format_pairs(pairs: Iterable[SimilarPair]) -> str:
    return "".join(p.format() + "\n" for p in pairs)
