"""Static string B-tree with constant-span node branching.

Every node keeps its keys k_i with three helper arrays:

* ``lcp[i]``  LCP of k_i with k_{i-1} (0 for i = 0)
* ``chars[i]`` k_i at offset lcp[i], the character where it leaves k_{i-1}
* ``nxt[i]``  smallest j > i with lcp[j] <= lcp[i], else the node size

Branching finds the key w sharing the longest prefix with the search key
without scanning any key: keys whose branching character is above the
search key's character at that depth are ruled out together with the
keys hanging below them, using a range tree.  One k_compare against k_w
then fixes the slot.  Leaves hold up to B keys; internal nodes hold the
first and last key of each child.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import partial

from .bookend import PRED, SUCC, k_compare_raw
from .ledger import CostLedger
from .packed_key import EQ, GT, LT, PackedKey, char_at, key_compare, lcp_from
from .parallel_lcp import ChunkedLcp, ChunkSchedule, Policy


class BuildError(ValueError):
    pass


class RangeTree:
    """Perfect binary tree of marks over ``size`` leaf slots, heap-indexed."""

    __slots__ = ("leaves", "marks", "depth")

    def __init__(self, size: int):
        leaves = 1
        depth = 0
        while leaves < size:
            leaves <<= 1
            depth += 1
        self.leaves = leaves
        self.depth = depth
        self.marks = bytearray(2 * leaves)

    def mark(self, lo: int, hi: int) -> int:
        """Cover leaves ``[lo, hi]``; returns the number of marks written."""
        marks = self.marks
        l = self.leaves + lo
        r = self.leaves + hi
        marks[l] = 1
        if l == r:
            return 1
        marks[r] = 1
        n = 2
        while (l >> 1) != (r >> 1):
            if not l & 1:
                marks[l ^ 1] = 1
                n += 1
            if r & 1:
                marks[r ^ 1] = 1
                n += 1
            l >>= 1
            r >>= 1
        return n

    def eliminated(self, i: int) -> tuple[bool, int]:
        """Whether leaf ``i`` lies under a mark, and how many nodes were read."""
        v = self.leaves + i
        marks = self.marks
        reads = 0
        while v:
            reads += 1
            if marks[v]:
                return True, reads
            v >>= 1
        return False, reads


def range_tree_eliminate(ranges, size: int, ledger: CostLedger | None = None) -> list[bool]:
    """Mask of slots in ``[0, size)`` covered by the inclusive ``ranges``."""
    tree = RangeTree(size)
    work = 0
    for lo, hi in ranges:
        if not 0 <= lo <= hi < size:
            raise ValueError(f"range ({lo}, {hi}) outside [0, {size})")
        work += tree.mark(lo, hi)
    out = []
    for i in range(size):
        hit, reads = tree.eliminated(i)
        work += reads
        out.append(hit)
    if ledger is not None:
        ledger.work_units += work
        ledger.span_units += 2
    return out


class SbtNode:
    __slots__ = ("keys", "lcp", "chars", "nxt", "lcp_first", "lcp_last",
                 "gidx", "children", "owner")

    def __init__(self, keys, gidx, children=None, owner=None):
        s = len(keys)
        self.keys = keys
        self.gidx = gidx
        self.children = children
        # owner[i]: child holding key i (internal nodes only)
        self.owner = owner
        lcp = [0] * s
        for i in range(1, s):
            lcp[i] = lcp_from(keys[i - 1], keys[i], 0)
        self.lcp = lcp
        self.chars = [char_at(keys[i], lcp[i]) for i in range(s)]
        nxt = [s] * s
        stack = []
        # nearest later index with lcp <= lcp[i]
        for j in range(s):
            while stack and lcp[j] <= lcp[stack[-1]]:
                nxt[stack.pop()] = j
            stack.append(j)
        self.nxt = nxt
        # LCP of each key with the node's first and last key
        first = [0] * s
        last = [0] * s
        if s:
            first[0] = keys[0].char_len
            for i in range(1, s):
                first[i] = lcp[i] if i == 1 or lcp[i] < first[i - 1] else first[i - 1]
            last[s - 1] = keys[s - 1].char_len
            for i in range(s - 2, -1, -1):
                nl = lcp[i + 1]
                last[i] = nl if i == s - 2 or nl < last[i + 1] else last[i + 1]
        self.lcp_first = first
        self.lcp_last = last

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    def __len__(self):
        return len(self.keys)


@dataclass
class BranchResult:
    slot: int
    found: bool
    w: int
    order: int
    lcp_w: int
    # LCP of x with keys[slot - 1] and keys[slot] (-1 where the slot is at an end)
    lcp_below: int
    lcp_above: int


def branch(node: SbtNode, x: PackedKey, lcp_first: int | None = None, lcp_last: int | None = None,
           ledger: CostLedger | None = None, lcp_fn=None) -> BranchResult:
    """Slot of ``x`` among ``node.keys``.

    Below the root, x lies strictly between the node's first and last key
    and ``lcp_first`` / ``lcp_last`` are its LCPs with them.  ``None``
    means the bookends are the infinite sentinels (the root).
    """
    keys = node.keys
    lcp = node.lcp
    chars = node.chars
    s = len(keys)
    tree = RangeTree(s)
    work = 0
    # step 1: candidates and elimination
    cand = [True] * s
    for i in range(1, s):
        if chars[i] > char_at(x, lcp[i]):
            cand[i] = False
    work += s
    nxt = node.nxt
    for u in range(1, s):
        if not cand[u]:
            work += tree.mark(u, nxt[u] - 1)
    w = 0
    for i in range(s - 1, -1, -1):
        if cand[i]:
            hit, reads = tree.eliminated(i)
            work += reads
            if not hit:
                w = i
                break
    work += s
    # step 2: one bookend comparison against k_w
    if lcp_first is None:
        side, known, v_lcp = SUCC, 0, 0
    elif lcp_first >= lcp_last:
        side, known, v_lcp = PRED, lcp_first, node.lcp_first[w]
    else:
        side, known, v_lcp = SUCC, lcp_last, node.lcp_last[w]
    order, l, _, chars_seen = k_compare_raw(x, keys[w], v_lcp, side, known, known,
                                            lcp_fn or lcp_from, 0)
    # step 3: slot from the lcp array
    if order == EQ:
        y = w
        below = above = l
    elif order == LT:
        y = 0
        for i in range(w, 0, -1):
            if lcp[i] < l:
                y = i
                break
        above = l
        below = lcp[y] if y > 0 else -1
    else:
        y = s
        for i in range(w + 1, s):
            if lcp[i] <= l:
                y = i
                break
        below = l
        above = lcp[y] if y < s else -1
    work += s
    if ledger is not None:
        ledger.work_units += work
        # flags, marking, elimination, last-survivor scan, slot selection
        ledger.span_units += 5
        ledger.comparisons += 1
        ledger.chars_examined += chars_seen
    return BranchResult(y, order == EQ, w, order, l, below, above)


def naive_branch(node: SbtNode, x: PackedKey) -> tuple[int, bool]:
    """Slot by linear scan: number of node keys below x, and whether x is present."""
    y = 0
    for k in node.keys:
        c = key_compare(k, x)
        if c == EQ:
            return y, True
        if c == GT:
            break
        y += 1
    return y, False


@dataclass
class BTreeSearch:
    found: bool
    position: int
    pred: PackedKey | None
    succ: PackedKey | None
    ledger: CostLedger
    nodes: int = 0


class StringBTree:
    """Bulk-loaded static string B-tree.

    ``B`` is the block capacity: leaves hold up to B keys and stored keys
    are read in blocks of B words.  ``fanout`` is the number of children
    per internal node (default B // 2, so each node's 2 * fanout boundary
    keys fit a block of references).
    """

    def __init__(self, keys, B: int = 16, fanout: int | None = None):
        if B < 2:
            raise BuildError("B must be at least 2")
        self.B = B
        self.fanout = fanout if fanout is not None else max(2, B // 2)
        if self.fanout < 2:
            raise BuildError("fanout must be at least 2")
        keys = list(keys)
        for i in range(1, len(keys)):
            if key_compare(keys[i - 1], keys[i]) >= 0:
                raise BuildError(f"keys not sorted and distinct at index {i}")
        self.keys = keys
        self.levels: list[list[SbtNode]] = []
        self.root: SbtNode | None = None
        if keys:
            self._build()

    def _build(self):
        B = self.B
        keys = self.keys
        level = []
        for lo in range(0, len(keys), B):
            level.append(SbtNode(keys[lo:lo + B], list(range(lo, min(lo + B, len(keys))))))
        self.levels.append(level)
        while len(level) > 1:
            up = []
            for lo in range(0, len(level), self.fanout):
                group = level[lo:lo + self.fanout]
                ks, gs, owner = [], [], []
                for j, child in enumerate(group):
                    ks.append(child.keys[0])
                    gs.append(child.gidx[0])
                    owner.append(j)
                    if len(child) > 1:
                        ks.append(child.keys[-1])
                        gs.append(child.gidx[-1])
                        owner.append(j)
                up.append(SbtNode(ks, gs, group, owner))
            self.levels.append(up)
            level = up
        self.root = level[0]

    def __len__(self):
        return len(self.keys)

    @property
    def height(self) -> int:
        return len(self.levels)

    def nodes(self):
        for level in self.levels:
            yield from level

    def _lcp_fn(self, x, ledger, policy):
        if policy is None or policy is Policy.NONE:
            return partial(lcp_from, ledger=ledger)
        f = max(1, self.height)
        return ChunkedLcp(ChunkSchedule.for_policy(policy, x, f), ledger)

    def search(self, x: PackedKey, policy: Policy | None = None,
               ledger: CostLedger | None = None, naive: bool = False) -> BTreeSearch:
        if ledger is None:
            ledger = CostLedger(block_words=self.B)
        elif ledger.block_words is None:
            ledger.block_words = self.B
        keys = self.keys
        node = self.root
        if node is None:
            return BTreeSearch(False, 0, None, None, ledger)
        lcp_fn = self._lcp_fn(x, ledger, policy)
        lf = ll = None
        visited = 0
        while True:
            visited += 1
            ledger.io_work += 1
            ledger.io_span += 1
            ledger.nodes_visited += 1
            if naive:
                y, found = naive_branch(node, x)
                res = None
            else:
                res = branch(node, x, lf, ll, ledger, lcp_fn)
                y, found = res.slot, res.found
            if found:
                pos = node.gidx[y]
                break
            s = len(node)
            if node.is_leaf or y == 0 or y == s or node.owner[y - 1] != node.owner[y]:
                pos = node.gidx[y] if y < s else node.gidx[s - 1] + 1
                break
            child = node.children[node.owner[y]]
            if naive:
                lf = lcp_from(x, node.keys[y - 1])
                ll = lcp_from(x, node.keys[y])
            else:
                lf, ll = res.lcp_below, res.lcp_above
            node = child
        pred = keys[pos - 1] if pos > 0 else None
        nxt = pos + 1 if found else pos
        succ = keys[nxt] if nxt < len(keys) else None
        return BTreeSearch(found, pos, pred, succ, ledger, visited)

    def _enumerate(self, lo: int, hi: int, ledger: CostLedger) -> list[PackedKey]:
        if hi <= lo:
            return []
        ledger.io_work += -(-(hi - lo) // self.B) + 1
        ledger.io_span += 1
        return self.keys[lo:hi]

    def prefix_search(self, p: PackedKey, policy=None, ledger: CostLedger | None = None):
        ledger = ledger if ledger is not None else CostLedger(block_words=self.B)
        start = self.search(p, policy, ledger).position
        n = p.char_len
        end = start
        keys = self.keys
        while end < len(keys) and keys[end].char_len >= n and lcp_from(keys[end], p) >= n:
            end += 1
        return self._enumerate(start, end, ledger)

    def range_query(self, lo: PackedKey, hi: PackedKey, policy=None, ledger: CostLedger | None = None):
        ledger = ledger if ledger is not None else CostLedger(block_words=self.B)
        if key_compare(lo, hi) > 0:
            return []
        a = self.search(lo, policy, ledger).position
        r = self.search(hi, policy, ledger)
        b = r.position + 1 if r.found else r.position
        return self._enumerate(a, b, ledger)

    def stats(self) -> dict:
        nodes = list(self.nodes())
        leaves = self.levels[0] if self.levels else []
        return {
            "n": len(self.keys),
            "B": self.B,
            "fanout": self.fanout,
            "height": self.height,
            "nodes": len(nodes),
            "leaves": len(leaves),
            "leaf_fill": (len(self.keys) / (len(leaves) * self.B)) if leaves else 0.0,
        }

    def write_stats_csv(self, fp) -> None:
        st = self.stats()
        writer = csv.writer(fp)
        writer.writerow(list(st))
        writer.writerow(list(st.values()))
