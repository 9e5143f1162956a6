"""Chunked parallel LCP scans and their work/span/I-O accounting.

A parallel LCP oracle compares one window of two keys in a single round.
A comparison that needs a character scan feeds the oracle successive
windows until one of them contains a mismatch.  Two window schedules are
provided:

FIXED
    every window is ``ceil(K / f)`` words, K being the search key's length
    in words and f the expected number of comparisons per operation.
ADAPTIVE
    windows double while they come back equal; each new comparison starts
    at half the size the previous one finished with (1 word at first).

Windows are aligned to words.  Parallel execution is simulated: each
oracle round is charged one span unit and as many work units as words it
covers; ``workers > 1`` additionally splits the window across threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bookend import BookendState, CompareOutcome, k_compare
from .ledger import CostLedger
from .packed_key import PackedKey, first_diff


class Policy(Enum):
    NONE = "none"
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


_pool: ThreadPoolExecutor | None = None


def _executor(workers: int) -> ThreadPoolExecutor:
    global _pool
    if _pool is None or _pool._max_workers < workers:
        _pool = ThreadPoolExecutor(max_workers=workers)
    return _pool


def _scan_window(a, b, start, stop_word, workers):
    if workers <= 1:
        return first_diff(a, b, start, stop_word)
    alpha = a.alphabet.alpha
    s = start // alpha
    span = stop_word - s
    step = -(-span // workers)
    parts = []
    for lo in range(s, stop_word, step):
        parts.append((max(start, lo * alpha), min(stop_word, lo + step)))
    hits = _executor(workers).map(lambda p: first_diff(a, b, p[0], p[1]), parts)
    # min-reduction: parts are in word order, so the first hit is the earliest
    for hit in hits:
        if hit is not None:
            return hit
    return None


def parallel_lcp_oracle(a: PackedKey, b: PackedKey, start: int, limit: int,
                        ledger: CostLedger | None = None, workers: int = 1):
    """One oracle round over characters ``[start, limit)``.

    Returns ``(lcp, all_equal)``.  ``all_equal`` means the whole window
    matched and the LCP may continue past ``limit``; otherwise ``lcp`` is
    the exact LCP (a mismatch was found, or a key ended inside the window).
    """
    n = a.char_len if a.char_len < b.char_len else b.char_len
    if start > n or start < 0:
        raise ValueError(f"start {start} outside common range [0, {n}]")
    end = limit if limit < n else n
    alpha = a.alphabet.alpha
    s = start // alpha
    if end <= start:
        if ledger is not None:
            ledger.charge_window(s, 0)
        return (n, False) if end == n else (start, True)
    stop_word = (end - 1) // alpha + 1
    if ledger is not None:
        ledger.charge_window(s, stop_word - s)
    hit = _scan_window(a, b, start, stop_word, workers)
    if hit is not None:
        lcp = hit[0] * alpha + hit[1] // a.alphabet.bits_per_char
        if lcp < end:
            return lcp, False
    if end < n:
        return end, True
    return n, False


@dataclass
class ChunkSchedule:
    """Window sizing state owned by one search (sizes in words)."""

    policy: Policy
    f: int = 32
    chunk_words: int = 1
    delta: int = 1

    @classmethod
    def fixed(cls, key: PackedKey, f: int) -> "ChunkSchedule":
        return cls(Policy.FIXED, f, chunk_words=max(1, -(-key.n_words // f)))

    @classmethod
    def adaptive(cls, f: int = 32) -> "ChunkSchedule":
        return cls(Policy.ADAPTIVE, f, delta=1)

    @classmethod
    def for_policy(cls, policy: Policy, key: PackedKey, f: int) -> "ChunkSchedule":
        if policy is Policy.FIXED:
            return cls.fixed(key, f)
        if policy is Policy.ADAPTIVE:
            return cls.adaptive(f)
        raise ValueError("sequential policy has no chunk schedule")


class ChunkedLcp:
    """An ``lcp_fn`` that runs the oracle over the windows of ``schedule``."""

    __slots__ = ("schedule", "ledger", "workers")

    def __init__(self, schedule: ChunkSchedule, ledger: CostLedger | None = None, workers: int = 1):
        self.schedule = schedule
        self.ledger = ledger
        self.workers = workers

    def __call__(self, a: PackedKey, b: PackedKey, start: int) -> int:
        sched = self.schedule
        alpha = a.alphabet.alpha
        adaptive = sched.policy is Policy.ADAPTIVE
        width = sched.delta if adaptive else sched.chunk_words
        w0 = start // alpha
        pos = start
        while True:
            limit = (w0 + width) * alpha
            lcp, equal = parallel_lcp_oracle(a, b, pos, limit, self.ledger, self.workers)
            if not equal:
                break
            pos = limit
            w0 += width
            if adaptive:
                width <<= 1
        if adaptive:
            sched.delta = max(1, width >> 1)
        return lcp


def k_compare_chunked(x, v, v_lcp, state: BookendState, schedule: ChunkSchedule,
                      ledger: CostLedger | None = None, codec=None, workers: int = 1) -> CompareOutcome:
    return k_compare(x, v, v_lcp, state, ChunkedLcp(schedule, ledger, workers), codec)


def _msw_all_pairs(flags: np.ndarray) -> int:
    """First set flag by pairwise elimination: every set flag clears all later ones."""
    m = len(flags)
    if m == 0:
        return 0
    earlier = np.triu(np.broadcast_to(flags[:, None], (m, m)), 1)
    survivors = flags & ~earlier.any(axis=0)
    hit = np.flatnonzero(survivors)
    return int(hit[0]) if len(hit) else m


def msw_sqrt(words, ledger: CostLedger | None = None) -> int:
    """Index of the first nonzero word via a two-level sqrt(M) decomposition.

    Constant span (3 rounds: group flags, MSW of flags, MSW inside the
    winning group) and O(M) work.
    """
    m = len(words)
    if ledger is not None:
        ledger.span_units += 3
    if m == 0:
        return 0
    g = math.isqrt(m - 1) + 1
    nz = np.zeros(g * g, dtype=bool)
    nz[:m] = np.fromiter((w != 0 for w in words), dtype=bool, count=m)
    groups = nz.reshape(g, g)
    flags = groups.any(axis=1)
    if ledger is not None:
        ledger.work_units += m + 2 * g * g
    top = _msw_all_pairs(flags)
    if top == g:
        return m
    return top * g + _msw_all_pairs(groups[top])


def pem_lcp(a: PackedKey, b: PackedKey, start: int, block_words: int,
            ledger: CostLedger | None = None) -> int:
    """LCP with O(1) I/O span: flag each block holding a difference, pick the
    first flagged block, fetch it once more and take the MSB inside it."""
    n = a.char_len if a.char_len < b.char_len else b.char_len
    if start > n or start < 0:
        raise ValueError(f"start {start} outside common range [0, {n}]")
    al = a.alphabet
    alpha = al.alpha
    nw = min(a.n_words, b.n_words)
    s = start // alpha
    flags = []
    first_block = s // block_words
    for blk in range(first_block, -(-nw // block_words) if nw > s else first_block):
        lo = max(s, blk * block_words)
        hi = min(nw, (blk + 1) * block_words)
        flags.append(first_diff(a, b, max(start, lo * alpha), hi) is not None)
    if ledger is not None:
        ledger.io_work += len(flags) + 1
        ledger.io_span += 2
    j = msw_sqrt(flags)
    if j == len(flags):
        return n
    blk = first_block + j
    hit = first_diff(a, b, max(start, blk * block_words * alpha), min(nw, (blk + 1) * block_words))
    lcp = hit[0] * alpha + hit[1] // al.bits_per_char
    return lcp if lcp < n else n
