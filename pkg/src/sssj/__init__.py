"""Streaming similarity self-join over sparse unit vectors with time decay."""

from .core import (
    Params,
    SimilarPair,
    SparseVector,
    StreamItem,
    compute_horizon,
    decay_factor,
    decayed_similarity,
    dot,
    normalize,
    prefix_norms,
)
from .engine import JoinResult, Metrics, run, run_mb, run_str, sorted_pairs
from .errors import *  # noqa: F401,F403
from .index_inv import InvIndex
from .index_l2 import L2Index
from .index_l2ap import DecayedMaxVector, L2APIndex
from .indexing import Mode, Trace, make_index
from .io import GeneratorConfig, generate_stream, read_binary, read_text, write_binary, write_text
from .oracle import brute_force_decayed_max, brute_force_join
from .storage import PostingEntry, PostingList, ResidualStore

__version__ = "0.1.0"
