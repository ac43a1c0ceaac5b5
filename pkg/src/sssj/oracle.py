"""Brute-force references. They share only the core math with the engine."""

from __future__ import annotations

import math
from typing import Iterable

from .core import Params, SimilarPair, StreamItem, decayed_similarity


def brute_force_join(items: Iterable[StreamItem], params: Params) -> list[SimilarPair]:
    """Every pair within the horizon whose decayed similarity reaches theta."""
    ordered = sorted(items, key=lambda it: (it.timestamp, it.id))
    theta, lam, tau = params.theta, params.lam, params.tau
    out = []
    for j, y in enumerate(ordered):
        for i in range(j - 1, -1, -1):
            x = ordered[i]
            if abs(y.timestamp - x.timestamp) > tau:
                break
            score = decayed_similarity(x, y, lam)
            if score >= theta:
                out.append(SimilarPair(x.id, y.id, score))
    out.sort(key=lambda p: (p.older_id, p.newer_id))
    return out


def brute_force_decayed_max(
    history: Iterable[tuple[int, float, float]], dim: int, t: float, lam: float
) -> float:
    best = 0.0
    for d, value, ts in history:
        if d == dim:
            best = max(best, value * math.exp(-lam * (t - ts)))
    return best
