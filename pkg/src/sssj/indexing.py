"""Common machinery for the three filtering indexes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import Params, SimilarPair, StreamItem
from .errors import OutOfOrderStream


class Mode(enum.Enum):
    STREAMING = "streaming"
    BATCH = "batch"


@dataclass
class Trace:
    """Optional instrumentation: what survived candidate generation, and the
    verification bounds computed for each surviving candidate."""

    candidates: list[tuple[int, int]] = field(default_factory=list)
    bounds: list[tuple[int, int, float, float, float]] = field(default_factory=list)


class Index:
    """Base for every scheme.

    Per query item the engine calls ``prepare`` (streaming upkeep), then
    ``candidates`` and ``verify``, then ``insert``. In batch mode there is no
    time filtering and the decay factor is fixed at one, so verification
    reports raw dot products.
    """

    kind = ""

    def __init__(self, params: Params, mode: Mode = Mode.STREAMING, trace: Trace | None = None):
        self.params = params
        self.mode = mode
        self.streaming = mode is Mode.STREAMING
        self.trace = trace
        self.entries_traversed = 0
        self.candidates_generated = 0
        self.full_similarities = 0
        self.reindex_operations = 0
        self._last_ts = float("-inf")

    def _check_order(self, item: StreamItem) -> None:
        if self.streaming:
            if item.timestamp < self._last_ts:
                raise OutOfOrderStream(item.id, item.timestamp, self._last_ts)
            self._last_ts = item.timestamp

    def prepare(self, item: StreamItem) -> None:
        self._check_order(item)

    def candidates(self, query: StreamItem) -> dict[int, float]:
        raise NotImplementedError

    def verify(self, query: StreamItem, acc: dict[int, float]) -> list[SimilarPair]:
        raise NotImplementedError

    def insert(self, item: StreamItem) -> None:
        raise NotImplementedError

    def query(self, item: StreamItem) -> list[SimilarPair]:
        self.prepare(item)
        return self.verify(item, self.candidates(item))

    def process(self, item: StreamItem) -> list[SimilarPair]:
        """Query with ``item`` and then index it."""
        pairs = self.query(item)
        self.insert(item)
        return pairs

    def _trace_candidates(self, query: StreamItem, acc: dict[int, float]) -> None:
        qid = query.id
        self.trace.candidates.extend((qid, ref) for ref, c in acc.items() if c > 0)

    def posting_entries(self) -> int:
        return sum(len(pl) for pl in self.lists.values())


def make_index(kind: str, params: Params, mode: Mode = Mode.STREAMING, **kwargs) -> Index:
    from .index_inv import InvIndex
    from .index_l2 import L2Index
    from .index_l2ap import L2APIndex

    classes = {"inv": InvIndex, "l2": L2Index, "l2ap": L2APIndex}
    try:
        cls = classes[kind]
    except KeyError:
        raise ValueError(f"unknown index kind {kind!r}; expected one of {sorted(classes)}") from None
    return cls(params, mode, **kwargs)
