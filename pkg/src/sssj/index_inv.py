"""Plain inverted index: every coordinate indexed, only time filtering prunes."""

from __future__ import annotations

import math
from collections import OrderedDict

from .core import SimilarPair, StreamItem
from .indexing import Index, Mode, Trace
from .storage import PostingEntry, PostingList


class InvIndex(Index):
    kind = "inv"

    def __init__(self, params, mode: Mode = Mode.STREAMING, trace: Trace | None = None):
        super().__init__(params, mode, trace)
        self.lists: dict[int, PostingList] = {}
        self.direct: OrderedDict[int, StreamItem] = OrderedDict()

    def prepare(self, item: StreamItem) -> None:
        super().prepare(item)
        if self.streaming:
            now, tau, direct = item.timestamp, self.params.tau, self.direct
            while direct:
                ref, old = next(iter(direct.items()))
                if now - old.timestamp <= tau:
                    break
                direct.popitem(last=False)

    def insert(self, item: StreamItem) -> None:
        self._check_order(item)
        ref, ts = item.id, item.timestamp
        lists = self.lists
        for dim, value, pn in zip(item.vector.dims, item.vector.values, item.stats.prefix_norms):
            pl = lists.get(dim)
            if pl is None:
                pl = lists[dim] = PostingList()
            pl.append(PostingEntry(ref, value, pn, ts))
        self.direct[ref] = item

    def candidates(self, query: StreamItem) -> dict[int, float]:
        acc: dict[int, float] = {}
        now, tau = query.timestamp, self.params.tau
        lists = self.lists
        traversed = 0
        dims, vals = query.vector.dims, query.vector.values
        for i in range(len(dims) - 1, -1, -1):
            pl = lists.get(dims[i])
            if pl is None:
                continue
            if self.streaming:
                entries = pl.scan_backward(now, tau)[0]
                if not len(pl):
                    del lists[dims[i]]
            else:
                entries = pl.to_list()
            xj = vals[i]
            traversed += len(entries)
            for ref, yj, _pn, _ts in entries:
                acc[ref] = acc.get(ref, 0.0) + xj * yj
        self.entries_traversed += traversed
        self.candidates_generated += len(acc)
        if self.trace is not None:
            self._trace_candidates(query, acc)
        return acc

    def verify(self, query: StreamItem, acc: dict[int, float]) -> list[SimilarPair]:
        theta, lam = self.params.theta, self.params.lam
        now, qid = query.timestamp, query.id
        direct = self.direct
        out = []
        for ref, c in acc.items():
            self.full_similarities += 1
            if self.streaming:
                score = c * math.exp(-lam * (now - direct[ref].timestamp))
            else:
                score = c
            if score >= theta:
                out.append(SimilarPair(ref, qid, score))
        return out
