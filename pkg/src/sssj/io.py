"""Stream file formats and synthetic stream generation.

Text: one item per line, ``<timestamp> <dim>:<value> ...`` with ascending
dims. Binary: the magic ``SSSJ1`` followed by little-endian records
``f64 timestamp, u32 nnz, nnz * (u32 dim, f64 value)``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, TextIO

import numpy as np

from .core import StreamItem, normalize
from .errors import EmptyVector, FormatError, ParseError, TruncatedFile

MAGIC = b"SSSJ1"
_HEAD = struct.Struct("<dI")
_COORD = struct.Struct("<Id")


def parse_text_line(line: str, item_id: int = 0, lineno: int = 0) -> StreamItem:
    tokens = line.split()
    if not tokens:
        raise ParseError(lineno, "empty line")
    try:
        ts = float(tokens[0])
    except ValueError:
        raise ParseError(lineno, f"bad timestamp {tokens[0]!r}") from None
    if not math.isfinite(ts) or ts < 0:
        raise ParseError(lineno, f"timestamp must be finite and non-negative, got {tokens[0]!r}")
    coords = []
    prev = -1
    for tok in tokens[1:]:
        dim_s, sep, val_s = tok.partition(":")
        if not sep:
            raise ParseError(lineno, f"malformed coordinate {tok!r}")
        try:
            dim, value = int(dim_s), float(val_s)
        except ValueError:
            raise ParseError(lineno, f"malformed coordinate {tok!r}") from None
        if not math.isfinite(value):
            raise ParseError(lineno, f"non-finite value in {tok!r}")
        if dim <= prev:
            raise ParseError(lineno, f"dims must ascend ({dim} after {prev})")
        prev = dim
        coords.append((dim, value))
    try:
        vector = normalize(coords)
    except EmptyVector:
        raise
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None
    return StreamItem.create(item_id, ts, vector)


def format_text_line(item: StreamItem) -> str:
    coords = " ".join(f"{d}:{v!r}" for d, v in zip(item.vector.dims, item.vector.values))
    return f"{item.timestamp!r} {coords}"


def iter_text(handle: TextIO, first_id: int = 0) -> Iterator[StreamItem]:
    next_id = first_id
    for lineno, line in enumerate(handle, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield parse_text_line(line, next_id, lineno)
        next_id += 1


def read_text(path: str | Path) -> list[StreamItem]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_text(fh))


def write_text(path: str | Path, items: Iterable[StreamItem]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(format_text_line(item) + "\n")


def iter_binary(handle: BinaryIO, first_id: int = 0) -> Iterator[StreamItem]:
    if handle.read(len(MAGIC)) != MAGIC:
        raise FormatError("missing SSSJ1 magic")
    next_id = first_id
    while True:
        head = handle.read(_HEAD.size)
        if not head:
            return
        if len(head) < _HEAD.size:
            raise TruncatedFile(f"record {next_id}: header cut short")
        ts, nnz = _HEAD.unpack(head)
        body = handle.read(nnz * _COORD.size)
        if len(body) < nnz * _COORD.size:
            raise TruncatedFile(f"record {next_id}: coordinates cut short")
        coords = [_COORD.unpack_from(body, k * _COORD.size) for k in range(nnz)]
        dims = [d for d, _ in coords]
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise FormatError(f"record {next_id}: dims not ascending")
        yield StreamItem.create(next_id, ts, normalize(coords))
        next_id += 1


def read_binary(path: str | Path) -> list[StreamItem]:
    with open(path, "rb") as fh:
        return list(iter_binary(fh))


def write_binary(path: str | Path, items: Iterable[StreamItem]) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        for item in items:
            vec = item.vector
            fh.write(_HEAD.pack(item.timestamp, len(vec)))
            fh.write(b"".join(_COORD.pack(d, v) for d, v in zip(vec.dims, vec.values)))


def sniff_format(path: str | Path) -> str:
    with open(path, "rb") as fh:
        return "bin" if fh.read(len(MAGIC)) == MAGIC else "text"


def read_stream(path: str | Path, fmt: str | None = None) -> list[StreamItem]:
    fmt = fmt or sniff_format(path)
    if fmt == "text":
        return read_text(path)
    if fmt == "bin":
        return read_binary(path)
    raise ValueError(f"unknown format {fmt!r}")


def write_stream(path: str | Path, items: Iterable[StreamItem], fmt: str) -> None:
    if fmt == "text":
        write_text(path, items)
    elif fmt == "bin":
        write_binary(path, items)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def convert(src: str | Path, dst: str | Path, to: str | None = None) -> int:
    """Convert between formats; by default flips whatever ``src`` is."""
    src_fmt = sniff_format(src)
    to = to or ("text" if src_fmt == "bin" else "bin")
    items = read_stream(src, src_fmt)
    write_stream(dst, items, to)
    return len(items)


@dataclass(frozen=True)
class GeneratorConfig:
    count: int
    dims: int
    avg_nnz: int
    timestamps: str = "sequential"  # or "poisson"
    rate: float = 1.0
    step: float = 1.0
    dim_distribution: str = "uniform"  # or "zipf"
    zipf_exponent: float = 1.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.count <= 0 or self.dims <= 0 or self.avg_nnz <= 0:
            raise ValueError("count, dims and avg_nnz must be positive")
        if self.timestamps not in ("sequential", "poisson"):
            raise ValueError(f"unknown timestamp model {self.timestamps!r}")
        if self.dim_distribution not in ("uniform", "zipf"):
            raise ValueError(f"unknown dim distribution {self.dim_distribution!r}")
        if self.rate <= 0 or self.step <= 0:
            raise ValueError("rate and step must be positive")


def generate_stream(config: GeneratorConfig) -> Iterator[StreamItem]:
    """Deterministic synthetic stream for a given seed.

    nnz is uniform on [1, 2*avg_nnz - 1] (capped at ``dims``); values are
    uniform on (0, 1] before normalization; poisson timestamps have
    exponential gaps of mean 1/rate.
    """
    rng = np.random.default_rng(config.seed)
    if config.dim_distribution == "zipf":
        weights = 1.0 / np.arange(1, config.dims + 1) ** config.zipf_exponent
        probs = weights / weights.sum()
    else:
        probs = None
    hi = min(2 * config.avg_nnz - 1, config.dims)
    ts = 0.0
    for i in range(config.count):
        if i:
            if config.timestamps == "sequential":
                ts = i * config.step
            else:
                ts += float(rng.exponential(1.0 / config.rate))
        nnz = int(rng.integers(1, hi + 1))
        dims = rng.choice(config.dims, size=nnz, replace=False, p=probs)
        values = 1.0 - rng.random(nnz)
        vector = normalize(zip(dims.tolist(), values.tolist()))
        yield StreamItem.create(i, ts, vector)
