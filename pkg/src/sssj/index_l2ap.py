"""L2 bounds plus the max-vector (AP) bounds, with re-indexing on max growth."""

from __future__ import annotations

import math

from .core import StreamItem
from .indexing import Mode, Trace
from .index_l2 import L2Index
from .storage import ResidualEntry


class DecayedMaxVector:
    """Per-dim maximum of ``x_j * exp(-lam * (t - t(x)))`` over all items seen.

    Decay multiplies every stored candidate by the same factor, so the argmax
    does not depend on the query time and one (value, ts) pair per dim is
    enough.
    """

    def __init__(self, lam: float) -> None:
        self.lam = lam
        self._entries: dict[int, tuple[float, float]] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def update(self, dim: int, value: float, ts: float) -> None:
        cur = self._entries.get(dim)
        if cur is None or value >= cur[0] * math.exp(-self.lam * (ts - cur[1])):
            self._entries[dim] = (value, ts)

    def get(self, dim: int, t: float) -> float:
        cur = self._entries.get(dim)
        if cur is None:
            return 0.0
        return cur[0] * math.exp(-self.lam * (t - cur[1]))

    def raw(self, dim: int) -> tuple[float, float] | None:
        return self._entries.get(dim)


class L2APIndex(L2Index):
    """L2 index tightened with the running per-dim maximum.

    ``max_vector`` must be supplied in batch mode: it has to cover every
    vector that will ever query the index (both windows, in the minibatch
    framework). In streaming mode it grows online and every growth triggers
    re-indexing of the residuals it affects.
    """

    kind = "l2ap"

    def __init__(
        self,
        params,
        mode: Mode = Mode.STREAMING,
        trace: Trace | None = None,
        max_vector: dict[int, float] | None = None,
    ):
        super().__init__(params, mode, trace)
        if self.streaming:
            self.max_vector: dict[int, float] = dict(max_vector or {})
            self.decayed_max = DecayedMaxVector(params.lam)
        else:
            if max_vector is None:
                raise ValueError("batch-mode L2AP needs the max vector of all data it will see")
            self.max_vector = max_vector
            self.indexed_max: dict[int, float] = {}
        self.residual_inverted: dict[int, set[int]] = {}

    # -- index construction -------------------------------------------------

    def boundary(self, item: StreamItem) -> tuple[int, float]:
        theta = self.params.theta
        norms = item.stats.prefix_norms
        mvec = self.max_vector
        last = len(norms) - 1
        b1 = 0.0
        pscore = 0.0
        for k, (dim, value) in enumerate(zip(item.vector.dims, item.vector.values)):
            b1 += value * mvec.get(dim, value)
            bound = min(b1, norms[k])
            if bound >= theta or k == last:
                return k, pscore
            pscore = bound
        raise AssertionError("unreachable")

    def _store(self, item: StreamItem, k: int, q: float) -> None:
        super()._store(item, k, q)
        inv = self.residual_inverted
        for dim in item.vector.dims[:k]:
            s = inv.get(dim)
            if s is None:
                s = inv[dim] = set()
            s.add(item.id)

    def insert(self, item: StreamItem) -> None:
        super().insert(item)
        if self.streaming:
            dmv = self.decayed_max
            for dim, value in zip(item.vector.dims, item.vector.values):
                dmv.update(dim, value, item.timestamp)
        else:
            imax = self.indexed_max
            for dim, value in zip(item.vector.dims, item.vector.values):
                if value > imax.get(dim, 0.0):
                    imax[dim] = value

    def prepare(self, item: StreamItem) -> None:
        super().prepare(item)
        if self.streaming:
            self.update_max_and_reindex(item)

    def _on_evict(self, ref: int, entry: ResidualEntry) -> None:
        inv = self.residual_inverted
        for dim in entry.dims:
            s = inv[dim]
            s.discard(ref)
            if not s:
                del inv[dim]

    def update_max_and_reindex(self, item: StreamItem) -> int:
        """Raise the max vector with ``item`` and restore prefix filtering.

        Returns the number of residual vectors whose boundary moved.
        """
        mvec = self.max_vector
        grown = []
        for dim, value in zip(item.vector.dims, item.vector.values):
            if value > mvec.get(dim, 0.0):
                mvec[dim] = value
                grown.append(dim)
        if not grown:
            return 0
        inv = self.residual_inverted
        affected: set[int] = set()
        for dim in grown:
            s = inv.get(dim)
            if s:
                affected |= s
        moved = 0
        residuals = self.residuals
        for ref in sorted(affected):
            r = residuals[ref]
            k, q = self.boundary(r.item)
            if k < r.boundary:
                self._append_range(r.item, k, r.boundary)
                for dim in r.dims[k:]:
                    s = inv[dim]
                    s.discard(ref)
                    if not s:
                        del inv[dim]
                residuals.add(ref, ResidualEntry.from_prefix(r.item, k, q))
                moved += 1
            else:
                r.q = q
        self.reindex_operations += moved
        return moved

    # -- candidate generation -----------------------------------------------

    def remaining_bounds(self, query: StreamItem) -> list[float]:
        """Prefix sums of ``x_j * m_j`` over the query coords, ascending dims."""
        out = []
        acc = 0.0
        dims, vals = query.vector.dims, query.vector.values
        if self.streaming:
            dmv, now = self.decayed_max, query.timestamp
            for dim, value in zip(dims, vals):
                acc += value * dmv.get(dim, now)
                out.append(acc)
        else:
            imax = self.indexed_max
            for dim, value in zip(dims, vals):
                acc += value * imax.get(dim, 0.0)
                out.append(acc)
        return out
