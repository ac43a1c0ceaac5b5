"""Prefix-filtering index driven only by Cauchy-Schwarz (l2) bounds.

Coordinates are scanned in ascending dim order at insertion; the prefix
whose norm stays below the threshold goes to the residual store and the
rest is indexed. Queries scan their own dims in descending order, so the
unscanned part of the query is always a prefix and its norm bounds what is
left to accumulate.
"""

from __future__ import annotations

import math

from .core import SimilarPair, StreamItem
from .errors import InternalInconsistency
from .indexing import Index, Mode, Trace
from .storage import PostingEntry, PostingList, ResidualEntry, ResidualStore


class L2Index(Index):
    kind = "l2"

    def __init__(self, params, mode: Mode = Mode.STREAMING, trace: Trace | None = None):
        super().__init__(params, mode, trace)
        self.lists: dict[int, PostingList] = {}
        self.residuals = ResidualStore()
        # |y| * vm_y per indexed id, for the batch-mode size filter
        self._size_bound: dict[int, float] = {}

    # -- index construction -------------------------------------------------

    def boundary(self, item: StreamItem) -> tuple[int, float]:
        """Index of the first indexed coordinate and the pscore stored as Q.

        A coordinate qualifies once the prefix norm including it reaches
        theta; Q is the bound just before it. The last coordinate always
        qualifies since the full norm is one.
        """
        theta = self.params.theta
        norms = item.stats.prefix_norms
        last = len(norms) - 1
        for k, b2 in enumerate(norms):
            if b2 >= theta or k == last:
                return k, (norms[k - 1] if k else 0.0)
        raise AssertionError("unreachable")

    def insert(self, item: StreamItem) -> None:
        self._check_order(item)
        k, q = self.boundary(item)
        self._store(item, k, q)

    def _store(self, item: StreamItem, k: int, q: float) -> None:
        ref = item.id
        self.residuals.add(ref, ResidualEntry.from_prefix(item, k, q))
        if not self.streaming:
            self._size_bound[ref] = item.stats.nnz * item.stats.max_coord
        self._append_range(item, k, len(item.vector))

    def _append_range(self, item: StreamItem, start: int, stop: int) -> None:
        ref, ts = item.id, item.timestamp
        dims, vals = item.vector.dims, item.vector.values
        norms = item.stats.prefix_norms
        lists = self.lists
        for i in range(start, stop):
            pl = lists.get(dims[i])
            if pl is None:
                pl = lists[dims[i]] = PostingList()
            pl.append(PostingEntry(ref, vals[i], norms[i], ts))

    def prepare(self, item: StreamItem) -> None:
        super().prepare(item)
        if self.streaming:
            self._evict(item.timestamp)

    def _evict(self, now: float) -> list[int]:
        return self.residuals.evict_expired(now, self.params.tau, self._on_evict)

    def _on_evict(self, ref: int, entry: ResidualEntry) -> None:
        pass

    # -- candidate generation -----------------------------------------------

    def remaining_bounds(self, query: StreamItem) -> list[float] | None:
        """Per-coordinate upper bound for the unscanned query part, or None."""
        return None

    def candidates(self, query: StreamItem) -> dict[int, float]:
        theta, lam, tau = self.params.theta, self.params.lam, self.params.tau
        streaming = self.streaming
        now = query.timestamp
        dims, vals = query.vector.dims, query.vector.values
        norms = query.stats.prefix_norms
        rs1 = self.remaining_bounds(query)
        size_bound = self._size_bound
        sz1 = theta / query.stats.max_coord
        lists = self.lists
        acc: dict[int, float] = {}
        traversed = 0
        exp = math.exp

        for i in range(len(dims) - 1, -1, -1):
            pl = lists.get(dims[i])
            if pl is None:
                continue
            if streaming:
                if pl.time_ordered:
                    entries = pl.scan_backward(now, tau)[0]
                else:
                    entries = pl.scan_forward(now, tau)[0]
                if not len(pl):
                    del lists[dims[i]]
            else:
                entries = pl.to_list()
            traversed += len(entries)
            xj = vals[i]
            rs2 = norms[i]  # norm of the query coords not yet scanned, this one included
            r1 = rs1[i] if rs1 is not None else math.inf
            for ref, yj, pny, ts in entries:
                if streaming:
                    decay = exp(-lam * (now - ts))
                else:
                    if size_bound[ref] < sz1:
                        continue
                    decay = 1.0
                c = acc.get(ref, 0.0)
                if c > 0.0 or min(r1, rs2 * decay) >= theta:
                    c += xj * yj
                    if c + rs2 * pny * decay < theta:
                        c = 0.0
                    acc[ref] = c

        self.entries_traversed += traversed
        self.candidates_generated += sum(1 for c in acc.values() if c > 0.0)
        if self.trace is not None:
            self._trace_candidates(query, acc)
        return acc

    # -- candidate verification ---------------------------------------------

    def verify(self, query: StreamItem, acc: dict[int, float]) -> list[SimilarPair]:
        theta, lam = self.params.theta, self.params.lam
        now, qid = query.timestamp, query.id
        stats = query.stats
        vm_x, sum_x, nnz_x = stats.max_coord, stats.coord_sum, stats.nnz
        xdict = query.vector.as_dict
        residuals = self.residuals
        trace = self.trace
        out = []
        for ref, c in acc.items():
            if c <= 0.0:
                continue
            r = residuals.get(ref)
            if r is None:
                raise InternalInconsistency(f"candidate {ref} has no residual entry")
            decay = math.exp(-lam * (now - r.timestamp)) if self.streaming else 1.0
            ps1 = (c + r.q) * decay
            ds1 = (c + min(vm_x * r.coord_sum, r.max_coord * sum_x)) * decay
            sz2 = (c + min(nnz_x, r.nnz) * vm_x * r.max_coord) * decay
            if trace is not None:
                trace.bounds.append((qid, ref, ps1, ds1, sz2))
            if ps1 < theta or ds1 < theta or sz2 < theta:
                continue
            self.full_similarities += 1
            s = c
            for d, v in zip(r.dims, r.values):
                w = xdict.get(d)
                if w is not None:
                    s += w * v
            score = s * decay
            if score >= theta:
                out.append(SimilarPair(ref, qid, score))
        return out
