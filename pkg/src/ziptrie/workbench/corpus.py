"""Key corpora: ingestion from LINES / FASTA files and synthetic generation."""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field

from ..packed_key import BYTES, Alphabet, EncodingError, PackedKey, key_compare, lcp_from, pack, unpack


class CorpusError(ValueError):
    pass


@dataclass
class CorpusStats:
    count: int = 0
    median_length: float = 0.0
    max_length: int = 0
    median_max_lcp: float = 0.0
    max_lcp: int = 0


@dataclass
class Corpus:
    records: list = field(default_factory=list)   # (id, PackedKey)
    alphabet: Alphabet = BYTES
    # planted LCP of each record with ``anchor`` (synthetic corpora only)
    planted: list | None = None
    anchor: PackedKey | None = None

    def __len__(self):
        return len(self.records)

    @property
    def keys(self) -> list[PackedKey]:
        return [k for _, k in self.records]

    def max_lcps(self) -> list[int]:
        """Per record, the longest LCP it shares with any other record."""
        n = len(self.records)
        if n < 2:
            return [0] * n
        order = sorted(range(n), key=lambda i: _SortKey(self.records[i][1]))
        out = [0] * n
        for a, b in zip(order, order[1:]):
            l = lcp_from(self.records[a][1], self.records[b][1])
            out[a] = max(out[a], l)
            out[b] = max(out[b], l)
        return out

    def stats(self) -> CorpusStats:
        if not self.records:
            return CorpusStats()
        lengths = [k.char_len for _, k in self.records]
        lcps = self.max_lcps()
        return CorpusStats(len(lengths), statistics.median(lengths), max(lengths),
                           statistics.median(lcps), max(lcps))


class _SortKey:
    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return key_compare(self.k, other.k) < 0


def _pack_line(text: str, alphabet: Alphabet, lineno: int) -> PackedKey:
    try:
        return pack(text, alphabet)
    except EncodingError as exc:
        raise CorpusError(f"line {lineno}: {exc}") from None


def read_lines(fp, alphabet: Alphabet = BYTES) -> Corpus:
    """One key per non-blank line; the id is the line number."""
    corpus = Corpus(alphabet=alphabet)
    for lineno, line in enumerate(fp, 1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        corpus.records.append((str(lineno), _pack_line(line, alphabet, lineno)))
    return corpus


def read_fasta(fp, alphabet: Alphabet = BYTES) -> Corpus:
    """``>``-prefixed headers (first word is the id), sequence lines concatenated."""
    corpus = Corpus(alphabet=alphabet)
    seen = set()
    rid = None
    start = 0
    parts: list[str] = []

    def flush():
        if rid is not None:
            corpus.records.append((rid, _pack_line("".join(parts), alphabet, start)))

    for lineno, line in enumerate(fp, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            flush()
            fields = line[1:].split()
            if not fields:
                raise CorpusError(f"line {lineno}: empty FASTA header")
            rid = fields[0]
            if rid in seen:
                raise CorpusError(f"line {lineno}: duplicate record id {rid!r}")
            seen.add(rid)
            start = lineno
            parts = []
        elif rid is None:
            raise CorpusError(f"line {lineno}: sequence data before the first header")
        else:
            if alphabet.symbols is not None:
                line = line.upper()
            parts.append(line)
    flush()
    return corpus


def ingest(path, fmt: str = "lines", alphabet: Alphabet = BYTES) -> Corpus:
    fmt = fmt.lower()
    with open(path, encoding="latin-1") as fp:
        if fmt == "lines":
            return read_lines(fp, alphabet)
        if fmt == "fasta":
            return read_fasta(fp, alphabet)
    raise CorpusError(f"unknown format {fmt!r}")


def _symbols(alphabet: Alphabet) -> str:
    if alphabet.symbols is not None:
        return alphabet.symbols
    if alphabet.bits_per_char >= 7:
        return "abcdefghijklmnopqrstuvwxyz"
    return "".join(chr(i) for i in range(1 << alphabet.bits_per_char))


def synth(n: int, min_len: int, max_len: int, lcp_buckets, seed: int = 0,
          alphabet: Alphabet = BYTES) -> Corpus:
    """``n`` distinct keys, each sharing a planted LCP with a hidden anchor key.

    Each key draws a bucket ``(lo, hi)`` from ``lcp_buckets`` and an LCP
    ``l`` uniformly in it, copies the anchor's first ``l`` characters, then
    a different character, then a random tail up to a length drawn from
    ``[min_len, max_len]`` (raised to ``l + 1`` if shorter).  Two keys with
    planted LCPs ``l1 <= l2`` share exactly ``l1`` characters when
    ``l1 < l2``.
    """
    if n < 0:
        raise CorpusError("n must be non-negative")
    if n == 0:
        return Corpus(alphabet=alphabet, planted=[], anchor=pack("", alphabet))
    buckets = list(lcp_buckets)
    if not buckets:
        raise CorpusError("at least one LCP bucket is required")
    if not 0 <= min_len <= max_len:
        raise CorpusError("need 0 <= min_len <= max_len")
    sym = _symbols(alphabet)
    if len(sym) < 2:
        raise CorpusError("alphabet needs at least two symbols")
    for lo, hi in buckets:
        if not 0 <= lo <= hi:
            raise CorpusError(f"bad LCP bucket ({lo}, {hi})")
        if hi + 1 > max_len:
            raise CorpusError(f"LCP bucket ({lo}, {hi}) does not fit keys of length <= {max_len}")
    rng = random.Random(seed)
    top = max(hi for _, hi in buckets)
    anchor = "".join(rng.choice(sym) for _ in range(top + 1))
    records, planted, seen = [], [], set()
    attempts = 0
    while len(records) < n:
        attempts += 1
        if attempts > 50 * n + 1000:
            raise CorpusError("could not draw enough distinct keys; widen the buckets or lengths")
        lo, hi = buckets[rng.randrange(len(buckets))]
        l = rng.randint(lo, hi)
        length = max(l + 1, rng.randint(min_len, max_len))
        c = rng.choice([s for s in sym if s != anchor[l]])
        text = anchor[:l] + c + "".join(rng.choice(sym) for _ in range(length - l - 1))
        if text in seen:
            continue
        seen.add(text)
        records.append((f"s{len(records)}", pack(text, alphabet)))
        planted.append(l)
    return Corpus(records, alphabet, planted, pack(anchor, alphabet))


def write_lines(corpus: Corpus, fp) -> None:
    for _, k in corpus.records:
        fp.write(unpack(k) + "\n")
