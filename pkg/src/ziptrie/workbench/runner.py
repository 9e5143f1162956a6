"""Workload execution with per-operation cost counters and CSV output."""

from __future__ import annotations

import csv
import random
import time
from collections import defaultdict
from dataclasses import dataclass, field

from ..lcp_codec import APPROX, EXACT, CodecConfig, LcpMode
from ..ledger import CostLedger
from ..oracle import OracleDict
from ..packed_key import PackedKey, lcp_from, pack, unpack
from ..parallel_lcp import Policy
from ..string_btree import StringBTree
from ..zip_trie import TrieConfig, ZipTrie
from .corpus import Corpus

CSV_COLUMNS = ("structure", "op", "lcp", "n", "wall_ns", "words_examined", "comparisons",
               "span_units", "work_units", "io_work", "io_span")
COUNTER_COLUMNS = CSV_COLUMNS[5:]
OPS = ("search", "insert", "delete", "prefix", "range")
READ_OPS = ("search", "prefix", "range")


@dataclass
class WorkloadSpec:
    mix: dict = field(default_factory=lambda: {"search": 1.0})
    structure: str = "zt"          # zt | sbt
    mode: LcpMode = APPROX
    policy: Policy = Policy.NONE
    B: int = 16
    fanout: int | None = None
    f: int | None = None
    seed: int = 0
    ops: int = 1000
    repetitions: int = 1
    oracle_check: bool = False

    def __post_init__(self):
        for op, p in self.mix.items():
            if op not in OPS:
                raise ValueError(f"unknown operation {op!r}")
            if p < 0:
                raise ValueError(f"negative proportion for {op}")
        if self.mix and abs(sum(self.mix.values()) - 1.0) > 1e-9:
            raise ValueError("operation proportions must sum to 1")
        if self.structure not in ("zt", "sbt"):
            raise ValueError(f"unknown structure {self.structure!r}")
        if self.structure == "sbt":
            bad = [op for op, p in self.mix.items() if p > 0 and op not in READ_OPS]
            if bad:
                raise ValueError(f"the string B-tree is static; cannot run {', '.join(bad)}")

    @property
    def label(self) -> str:
        if self.structure == "sbt":
            base = "SBT"
        else:
            base = "MI-ZT" if self.mode is EXACT else "ZT"
        if self.policy is not Policy.NONE:
            base += "+" + self.policy.name
        return base


def parse_mix(text: str) -> dict:
    """``"search=0.6,insert=0.2,delete=0.2"`` to a dict."""
    mix = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        op, _, p = part.partition("=")
        mix[op.strip()] = float(p)
    return mix


def lcp_bucket(l: int) -> int:
    """Largest power of two not above ``l`` (0 stays 0)."""
    return 1 << (l.bit_length() - 1) if l > 0 else 0


@dataclass
class RunResult:
    rows: list
    divergences: int = 0


class _Workload:
    def __init__(self, corpus: Corpus, spec: WorkloadSpec, rng: random.Random):
        self.corpus = corpus
        self.spec = spec
        self.rng = rng
        self.alphabet = corpus.alphabet
        self.keys = corpus.keys
        sym = corpus.alphabet.symbols
        self.symbols = sym if sym is not None else "abcdefghijklmnopqrstuvwxyz"

    def mutate(self, key: PackedKey) -> PackedKey:
        """A nearby key: a prefix of ``key`` plus a random tail."""
        rng = self.rng
        text = unpack(key)
        cut = rng.randint(0, len(text))
        tail = "".join(rng.choice(self.symbols) for _ in range(rng.randint(0, 4)))
        return pack(text[:cut] + tail, self.alphabet)

    def pick(self) -> PackedKey:
        k = self.rng.choice(self.keys)
        return k if self.rng.random() < 0.5 else self.mutate(k)


def _max_lcp(x: PackedKey, pred, succ) -> int:
    l = 0
    for k in (pred, succ):
        if k is not None:
            l = max(l, lcp_from(x, k))
    return l


def _build(corpus: Corpus, spec: WorkloadSpec):
    keys = corpus.keys
    if spec.structure == "sbt":
        uniq = sorted(set(keys))
        return StringBTree(uniq, B=spec.B, fanout=spec.fanout)
    codec = CodecConfig(spec.f) if spec.f else CodecConfig.for_capacity()
    trie = ZipTrie(TrieConfig(mode=spec.mode, codec=codec, seed=spec.seed, policy=spec.policy),
                   corpus.alphabet)
    for k in keys:
        trie.insert(k)
    return trie


def _search(struct, x, spec, ledger):
    if isinstance(struct, StringBTree):
        r = struct.search(x, spec.policy, ledger)
    else:
        r = struct.search(x, ledger, spec.policy)
    return r.found, r.pred, r.succ


def run(corpus: Corpus, spec: WorkloadSpec) -> RunResult:
    """Execute ``spec.ops`` operations ``spec.repetitions`` times; one row per operation."""
    rows = []
    divergences = 0
    ops = [op for op, p in spec.mix.items() if p > 0]
    weights = [spec.mix[op] for op in ops]
    if not corpus.records or not ops or spec.ops <= 0:
        return RunResult(rows)
    for rep in range(spec.repetitions):
        rng = random.Random(spec.seed * 1000003 + rep)
        wl = _Workload(corpus, spec, rng)
        struct = _build(corpus, spec)
        oracle = OracleDict(unpack(k) for k in corpus.keys) if spec.oracle_check else None
        block = spec.B if spec.structure == "sbt" else None
        for _ in range(spec.ops):
            op = rng.choices(ops, weights)[0]
            ledger = CostLedger(block_words=block)
            x = wl.pick()
            if op == "search":
                t0 = time.perf_counter_ns()
                found, pred, succ = _search(struct, x, spec, ledger)
                wall = time.perf_counter_ns() - t0
                l = _max_lcp(x, pred, succ)
                if oracle is not None:
                    s = unpack(x)
                    want = (oracle.search(s), oracle.pred(s), oracle.succ(s))
                    got = (found, None if pred is None else unpack(pred),
                           None if succ is None else unpack(succ))
                    divergences += want != got
            elif op == "insert":
                t0 = time.perf_counter_ns()
                ok = struct.insert(x, ledger=ledger, policy=spec.policy)
                wall = time.perf_counter_ns() - t0
                r = struct.search(x)
                l = _max_lcp(x, r.pred, r.succ)
                if oracle is not None:
                    divergences += ok != oracle.insert(unpack(x))
                wl.keys.append(x)
            elif op == "delete":
                x = rng.choice(wl.keys)
                r = struct.search(x)
                l = _max_lcp(x, r.pred, r.succ)
                t0 = time.perf_counter_ns()
                ok = struct.delete(x, ledger=ledger, policy=spec.policy)
                wall = time.perf_counter_ns() - t0
                if oracle is not None:
                    divergences += ok != oracle.delete(unpack(x))
            else:
                if op == "prefix":
                    p = pack(unpack(x)[:rng.randint(0, x.char_len)], wl.alphabet)
                    args = (p,)
                else:
                    y = wl.pick()
                    args = (x, y) if x < y else (y, x)
                fn = struct.prefix_search if op == "prefix" else struct.range_query
                t0 = time.perf_counter_ns()
                if isinstance(struct, StringBTree):
                    out = fn(*args, policy=spec.policy, ledger=ledger)
                else:
                    out = fn(*args, ledger=ledger, policy=spec.policy)
                wall = time.perf_counter_ns() - t0
                l = args[0].char_len
                if oracle is not None:
                    got = [unpack(k) for k in out]
                    if op == "prefix":
                        want = oracle.prefix(unpack(args[0]))
                    else:
                        want = oracle.range(unpack(args[0]), unpack(args[1]))
                    divergences += got != want
            rows.append((spec.label, op, l, len(struct), wall, ledger.words_examined,
                         ledger.comparisons, ledger.span_units, ledger.work_units,
                         ledger.io_work, ledger.io_span))
    return RunResult(rows, divergences)


def aggregate(rows) -> list:
    """Mean of every numeric column per (structure, op, lcp bucket); ``lcp`` becomes the bucket."""
    groups = defaultdict(list)
    for r in rows:
        groups[(r[0], r[1], lcp_bucket(r[2]))].append(r)
    out = []
    for (label, op, bucket), rs in sorted(groups.items()):
        m = len(rs)
        means = [sum(r[i] for r in rs) / m for i in range(3, len(CSV_COLUMNS))]
        out.append((label, op, bucket, *(round(v, 3) for v in means)))
    return out


def write_csv(fp, rows) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
