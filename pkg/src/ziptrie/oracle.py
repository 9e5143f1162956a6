"""Brute-force ground truth for the dictionaries and their metadata.

Nothing here touches packed words: keys are handled as Python ``str`` /
``bytes`` (or unpacked code lists) and compared with the language's own
sequence ordering, so a bug in the word-level primitives cannot hide in
the oracle as well.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

from .packed_key import PackedKey, unpack_codes


def naive_lcp(a, b) -> int:
    """Character-by-character common prefix length of two sequences."""
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def fast_lcp(a, b) -> int:
    """Same as :func:`naive_lcp` by bisection on slice equality (faster on long keys)."""
    lo, hi = 0, min(len(a), len(b))
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a[:mid] == b[:mid]:
            lo = mid
        else:
            hi = mid - 1
    return lo


def raw(key):
    """Plain comparable form of a key: PackedKeys become code tuples."""
    if isinstance(key, PackedKey):
        return tuple(unpack_codes(key))
    return key


class OracleDict:
    """Sorted list with bisect; textbook semantics for every query."""

    __slots__ = ("keys",)

    def __init__(self, keys=()):
        self.keys = sorted(set(keys))

    def __len__(self):
        return len(self.keys)

    def insert(self, x) -> bool:
        i = bisect.bisect_left(self.keys, x)
        if i < len(self.keys) and self.keys[i] == x:
            return False
        self.keys.insert(i, x)
        return True

    def delete(self, x) -> bool:
        i = bisect.bisect_left(self.keys, x)
        if i < len(self.keys) and self.keys[i] == x:
            del self.keys[i]
            return True
        return False

    def search(self, x) -> bool:
        i = bisect.bisect_left(self.keys, x)
        return i < len(self.keys) and self.keys[i] == x

    def pred(self, x):
        i = bisect.bisect_left(self.keys, x)
        return self.keys[i - 1] if i > 0 else None

    def succ(self, x):
        i = bisect.bisect_right(self.keys, x)
        return self.keys[i] if i < len(self.keys) else None

    def prefix(self, p) -> list:
        i = bisect.bisect_left(self.keys, p)
        out = []
        n = len(p)
        while i < len(self.keys) and self.keys[i][:n] == p:
            out.append(self.keys[i])
            i += 1
        return out

    def range(self, lo, hi) -> list:
        if lo > hi:
            return []
        return self.keys[bisect.bisect_left(self.keys, lo):bisect.bisect_right(self.keys, hi)]


class LinearOracle:
    """Unsorted set answering queries by full scans; cross-checks OracleDict."""

    __slots__ = ("items",)

    def __init__(self, keys=()):
        self.items = set(keys)

    def insert(self, x) -> bool:
        if x in self.items:
            return False
        self.items.add(x)
        return True

    def delete(self, x) -> bool:
        if x not in self.items:
            return False
        self.items.remove(x)
        return True

    def search(self, x) -> bool:
        return x in self.items

    def pred(self, x):
        below = [k for k in self.items if k < x]
        return max(below) if below else None

    def succ(self, x):
        above = [k for k in self.items if k > x]
        return min(above) if above else None

    def prefix(self, p) -> list:
        return sorted(k for k in self.items if naive_lcp(k, p) == len(p))

    def range(self, lo, hi) -> list:
        return sorted(k for k in self.items if lo <= k <= hi)


@dataclass
class AuditReport:
    nodes: int = 0
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def fail(self, key, fld, msg):
        self.errors.append((key, fld, msg))

    def __str__(self):
        if self.ok:
            return f"audit ok ({self.nodes} nodes)"
        head = "; ".join(f"{raw_key!r}.{fld}: {msg}" for raw_key, fld, msg in self.errors[:5])
        return f"audit failed at {len(self.errors)} field(s): {head}"


def ancestor_audit(trie, max_errors: int = 100) -> AuditReport:
    """Check every node of a ZipTrie against naive recomputation.

    For each node the nearest ancestors on either side are found by walking
    its root path; the stored metadata must equal the naive LCP (EXACT),
    or be a lower bound within ``lcp / f`` that sits on the quantization
    grid (APPROX).  BST order and the rank heap order are checked too.
    """
    from .lcp_codec import EXACT, quantize

    exact_mode = trie.config.mode is EXACT
    f = trie.config.codec.f
    rep = AuditReport()
    if trie.root is None:
        return rep
    # (node, pred ancestor text, succ ancestor text)
    stack = [(trie.root, None, None)]
    texts = {}

    def text(v):
        t = texts.get(id(v))
        if t is None:
            t = texts[id(v)] = raw(v.key)
        return t

    while stack and len(rep.errors) < max_errors:
        v, lo, hi = stack.pop()
        rep.nodes += 1
        t = text(v)
        for fld, anc, stored in (("lcp_pred", lo, v.lcp_pred), ("lcp_succ", hi, v.lcp_succ)):
            true = 0 if anc is None else naive_lcp(t, anc)
            if exact_mode:
                if stored != true:
                    rep.fail(t, fld, f"stored {stored}, naive {true}")
            else:
                if stored > true:
                    rep.fail(t, fld, f"stored {stored} exceeds naive {true}")
                elif true - stored > true // f:
                    rep.fail(t, fld, f"stored {stored} too far below naive {true}")
                elif stored != quantize(true, f):
                    rep.fail(t, fld, f"stored {stored} is not the quantization of {true}")
        if lo is not None and not lo < t:
            rep.fail(t, "key", "not above its predecessor ancestor")
        if hi is not None and not t < hi:
            rep.fail(t, "key", "not below its successor ancestor")
        for child, is_left in ((v.left, True), (v.right, False)):
            if child is None:
                continue
            cr = (child.r1, child.r2)
            vr = (v.r1, v.r2)
            # equal ranks: the smaller key must be the ancestor, so only a right child may tie
            if cr > vr or (cr == vr and is_left):
                rep.fail(raw(child.key), "rank", f"heap order broken under {t!r}")
            if is_left:
                stack.append((child, lo, t))
            else:
                stack.append((child, t, hi))
    return rep
