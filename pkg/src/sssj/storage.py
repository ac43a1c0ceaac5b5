"""Posting lists on growable circular buffers, and the residual direct index."""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .core import StreamItem
from .errors import WrongOrderMode

MIN_CAPACITY = 8

# Candidate id -> partial dot product. Pruned candidates are zeroed, not deleted.
CandidateAccumulator = dict


class PostingEntry(NamedTuple):
    ref: int
    value: float
    prefix_norm: float
    timestamp: float


class PostingList:
    """Ring buffer of entries for one dimension.

    Capacity is a power of two, never below ``MIN_CAPACITY``; it doubles when
    full and halves while occupancy is under a quarter of it.
    """

    __slots__ = ("_slots", "_head", "_size", "time_ordered")

    def __init__(self, capacity: int = MIN_CAPACITY) -> None:
        cap = MIN_CAPACITY
        while cap < capacity:
            cap *= 2
        self._slots: list = [None] * cap
        self._head = 0
        self._size = 0
        self.time_ordered = True

    def __len__(self) -> int:
        return self._size

    @property
    def capacity(self) -> int:
        return len(self._slots)

    def __iter__(self) -> Iterator[PostingEntry]:
        slots, mask, head = self._slots, len(self._slots) - 1, self._head
        for i in range(self._size):
            yield slots[(head + i) & mask]

    def __getitem__(self, i: int) -> PostingEntry:
        if i < 0:
            i += self._size
        if not 0 <= i < self._size:
            raise IndexError(i)
        return self._slots[(self._head + i) & (len(self._slots) - 1)]

    def to_list(self) -> list[PostingEntry]:
        return list(self)

    def append(self, entry: PostingEntry) -> None:
        size = self._size
        if size and self.time_ordered and entry[3] < self[size - 1][3]:
            # re-indexed coordinates of older vectors land here
            self.time_ordered = False
        if size == len(self._slots):
            self._resize(2 * size)
        slots = self._slots
        slots[(self._head + size) & (len(slots) - 1)] = entry
        self._size = size + 1

    def drop_oldest(self, count: int) -> None:
        """Discard ``count`` entries from the head by moving the head pointer."""
        if count <= 0:
            return
        if count > self._size:
            raise ValueError("cannot drop more entries than stored")
        slots, mask = self._slots, len(self._slots) - 1
        for i in range(count):
            slots[(self._head + i) & mask] = None
        self._head = (self._head + count) & mask
        self._size -= count
        self._maybe_shrink()

    def truncate_expired_backward(self, now: float, tau: float) -> int:
        if not self.time_ordered:
            raise WrongOrderMode("backward truncation needs a time-ordered list")
        return self.scan_backward(now, tau)[1]

    def scan_backward(self, now: float, tau: float) -> tuple[list[PostingEntry], int]:
        """Live entries newest first; the first expired one and all older are cut."""
        slots, mask, head = self._slots, len(self._slots) - 1, self._head
        live = []
        i = self._size - 1
        while i >= 0:
            e = slots[(head + i) & mask]
            if now - e[3] > tau:
                break
            live.append(e)
            i -= 1
        dropped = i + 1
        if dropped:
            self.drop_oldest(dropped)
        return live, dropped

    def prune_expired_forward(self, now: float, tau: float) -> int:
        return self.scan_forward(now, tau)[1]

    def scan_forward(self, now: float, tau: float) -> tuple[list[PostingEntry], int]:
        """Live entries head to tail; every expired entry is removed."""
        live = [e for e in self if now - e[3] <= tau]
        dropped = self._size - len(live)
        if dropped:
            self._rebuild(live)
        return live, dropped

    def _rebuild(self, entries: list) -> None:
        cap = len(self._slots)
        while cap > MIN_CAPACITY and 4 * len(entries) < cap:
            cap //= 2
        self._slots = entries + [None] * (cap - len(entries))
        self._head = 0
        self._size = len(entries)

    def _maybe_shrink(self) -> None:
        cap = len(self._slots)
        if cap > MIN_CAPACITY and 4 * self._size < cap:
            while cap > MIN_CAPACITY and 4 * self._size < cap:
                cap //= 2
            self._resize(cap)

    def _resize(self, capacity: int) -> None:
        entries = list(self)
        self._slots = entries + [None] * (capacity - len(entries))
        self._head = 0


@dataclass(slots=True)
class ResidualEntry:
    """Un-indexed prefix of a vector plus what verification needs about it."""

    item: StreamItem
    boundary: int  # number of leading coordinates kept out of the index
    dims: tuple[int, ...]
    values: tuple[float, ...]
    max_coord: float
    coord_sum: float
    nnz: int
    q: float
    timestamp: float

    @classmethod
    def from_prefix(cls, item: StreamItem, boundary: int, q: float) -> ResidualEntry:
        dims = item.vector.dims[:boundary]
        values = item.vector.values[:boundary]
        return cls(
            item,
            boundary,
            dims,
            values,
            max(values, default=0.0),
            sum(values),
            boundary,
            q,
            item.timestamp,
        )


class ResidualStore:
    """Insertion-ordered map id -> ResidualEntry; insertion order is time order."""

    def __init__(self) -> None:
        self._entries: OrderedDict[int, ResidualEntry] = OrderedDict()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, ref: int) -> bool:
        return ref in self._entries

    def __getitem__(self, ref: int) -> ResidualEntry:
        return self._entries[ref]

    def __iter__(self) -> Iterator[int]:
        return iter(self._entries)

    def get(self, ref: int) -> ResidualEntry | None:
        return self._entries.get(ref)

    def add(self, ref: int, entry: ResidualEntry) -> None:
        self._entries[ref] = entry

    def values(self):
        return self._entries.values()

    def evict_expired(self, now: float, tau: float, on_evict=None) -> list[int]:
        """Pop expired entries oldest first, stopping at the first live one."""
        entries = self._entries
        evicted = []
        while entries:
            ref, entry = next(iter(entries.items()))
            if now - entry.timestamp <= tau:
                break
            entries.popitem(last=False)
            evicted.append(ref)
            if on_evict is not None:
                on_evict(ref, entry)
        return evicted
