"""Zip-trie: a zip-zip tree over packed keys with bookend LCP metadata.

Each node stores its LCP with its nearest ancestor on either side (its
predecessor ancestor and successor ancestor).  Searches carry a bookend
state and decide most comparisons from that metadata alone.  Updates use
unzip (insert) and zip (delete) instead of rotations; both only touch the
nodes on the split or merged spines.

Metadata is held as plain ints.  In EXACT mode they are LCP lengths; in
APPROX mode they are decoded grid values of ``lcp_codec.encode`` (always
the exact quantization of the true LCP), so ``(a, b)`` can be recovered
losslessly with :func:`ZipTrie.node_lcp`.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import partial

from . import lcp_codec
from .bookend import PRED, SUCC, BookendState, Side, k_compare_raw
from .lcp_codec import APPROX, EXACT, CodecConfig, LcpMode, LcpValue
from .ledger import CostLedger
from .packed_key import BYTES, EQ, GT, LT, Alphabet, PackedKey, key_compare, lcp_from, pack
from .parallel_lcp import ChunkedLcp, ChunkSchedule, Policy

_MASK64 = (1 << 64) - 1


class ZipNode:
    __slots__ = ("key", "r1", "r2", "left", "right", "lcp_pred", "lcp_succ")

    def __init__(self, key: PackedKey, r1: int, r2: int):
        self.key = key
        self.r1 = r1
        self.r2 = r2
        self.left = None
        self.right = None
        self.lcp_pred = 0
        self.lcp_succ = 0

    @property
    def rank(self) -> tuple[int, int]:
        return self.r1, self.r2

    def __repr__(self):
        return f"ZipNode({self.key!r}, rank=({self.r1}, {self.r2}))"


@dataclass(frozen=True)
class TrieConfig:
    mode: LcpMode = APPROX
    codec: CodecConfig = lcp_codec.DEFAULT_CODEC
    seed: int = 0
    r2_range: int = 1 << 32
    # derive ranks from a keyed hash of the key instead of the generator stream
    hash_ranks: bool = False
    policy: Policy = Policy.NONE
    workers: int = 1


@dataclass
class SearchResult:
    found: bool
    state: BookendState
    pred: PackedKey | None
    succ: PackedKey | None
    ledger: CostLedger
    depth: int = 0


@dataclass
class UpdateRecord:
    """Nodes an update was allowed to touch: x, the spines P and Q, and x's parent."""

    op: str
    node: ZipNode
    P: list
    Q: list
    parent: ZipNode | None


def _rightmost(v):
    while v.right is not None:
        v = v.right
    return v


def _leftmost(v):
    while v.left is not None:
        v = v.left
    return v


class ZipTrie:
    def __init__(self, config: TrieConfig | None = None, alphabet: Alphabet = BYTES):
        self.config = config or TrieConfig()
        self.alphabet = alphabet
        self.root: ZipNode | None = None
        self.size = 0
        self.last_update: UpdateRecord | None = None
        self._f = self.config.codec.f if self.config.mode is APPROX else 0
        self._rng = random.Random(self.config.seed)
        self._hash_key = self.config.seed.to_bytes(16, "big", signed=True)

    def __len__(self):
        return self.size

    def __iter__(self):
        stack = []
        v = self.root
        while stack or v is not None:
            while v is not None:
                stack.append(v)
                v = v.left
            v = stack.pop()
            yield v.key
            v = v.right

    def __contains__(self, key):
        return self.search(self._key(key)).found

    def _key(self, key) -> PackedKey:
        return key if isinstance(key, PackedKey) else pack(key, self.alphabet)

    # ranks

    def draw_rank(self, key: PackedKey) -> tuple[int, int]:
        if self.config.hash_ranks:
            h = hashlib.blake2b(key.buf + key.char_len.to_bytes(8, "big"),
                                digest_size=16, key=self._hash_key).digest()
            u = int.from_bytes(h, "big")
        else:
            u = self._rng.getrandbits(128)
        low = u & _MASK64
        # trailing zeros of 64 fair bits: geometric(1/2) on {0, 1, ...}
        r1 = (low & -low).bit_length() - 1 if low else 64
        return r1, (u >> 64) % self.config.r2_range

    # metadata helpers

    def _lcp_fn(self, x: PackedKey, ledger: CostLedger, policy: Policy | None):
        policy = policy or self.config.policy
        if policy is Policy.NONE:
            return partial(lcp_from, ledger=ledger)
        sched = ChunkSchedule.for_policy(policy, x, self.config.codec.f)
        return ChunkedLcp(sched, ledger, self.config.workers)

    def _grid(self, length: int) -> int:
        f = self._f
        if not f:
            return length
        a = (length // f).bit_length() - 1
        return (length >> a) << a if a > 0 else length

    def node_lcp(self, node: ZipNode, side: Side) -> LcpValue:
        v = node.lcp_succ if side == SUCC else node.lcp_pred
        if self.config.mode is EXACT:
            return lcp_codec.exact(v)
        a = lcp_codec.exponent(v, self.config.codec.f)
        return LcpValue(APPROX, a=a, b=v >> a)

    def _state(self, side, lcp_exact, lcp_stored) -> BookendState:
        if self.config.mode is EXACT:
            stored = lcp_codec.exact(lcp_stored)
        else:
            a = lcp_codec.exponent(lcp_stored, self.config.codec.f)
            stored = LcpValue(APPROX, a=a, b=lcp_stored >> a)
        return BookendState(Side(side), lcp_exact, stored)

    # descent

    def _descend(self, x: PackedKey, ledger: CostLedger, policy):
        """Bookend descent from the root until EQ or an empty link.

        Returns the path, the ordering of x against each path node and the
        grid LCP k_compare produced for it, plus the final state.
        """
        lcp_fn = self._lcp_fn(x, ledger, policy)
        f = self._f
        node = self.root
        side = SUCC
        lcp_exact = 0
        lcp_stored = 0
        path = []
        orders = []
        grids = []
        chars = 0
        while node is not None:
            v_lcp = node.lcp_succ if side else node.lcp_pred
            order, known, grid, c = k_compare_raw(x, node.key, v_lcp, side, lcp_exact,
                                                  lcp_stored, lcp_fn, f)
            chars += c
            path.append(node)
            orders.append(order)
            grids.append(grid)
            if order == EQ:
                break
            if grid >= lcp_stored:
                side = PRED if order == GT else SUCC
                lcp_exact = known
                lcp_stored = grid
            node = node.right if order == GT else node.left
        ledger.chars_examined += chars
        ledger.comparisons += len(path)
        ledger.nodes_visited += len(path)
        return path, orders, grids, (side, lcp_exact, lcp_stored)

    # queries

    def search(self, x, ledger: CostLedger | None = None, policy: Policy | None = None) -> SearchResult:
        x = self._key(x)
        ledger = ledger if ledger is not None else CostLedger()
        path, orders, _, st = self._descend(x, ledger, policy)
        pred = succ = None
        for v, o in zip(path, orders):
            if o == GT:
                pred = v
            elif o == LT:
                succ = v
        found = bool(path) and orders[-1] == EQ
        if found:
            v = path[-1]
            if v.left is not None:
                pred = _rightmost(v.left)
            if v.right is not None:
                succ = _leftmost(v.right)
        return SearchResult(found, self._state(*st), pred.key if pred else None,
                            succ.key if succ else None, ledger, len(path))

    def predecessor(self, x, ledger=None, policy=None):
        """Largest key strictly below x."""
        return self.search(x, ledger, policy).pred

    def successor(self, x, ledger=None, policy=None):
        """Smallest key strictly above x."""
        return self.search(x, ledger, policy).succ

    def _lower_stack(self, x, ledger, policy):
        path, orders, _, _ = self._descend(x, ledger, policy)
        return [v for v, o in zip(path, orders) if o != GT]

    @staticmethod
    def _walk(stack):
        while stack:
            v = stack.pop()
            yield v
            c = v.right
            while c is not None:
                stack.append(c)
                c = c.left

    def prefix_search(self, p, ledger: CostLedger | None = None, policy=None) -> list[PackedKey]:
        p = self._key(p)
        ledger = ledger if ledger is not None else CostLedger()
        n = p.char_len
        out = []
        for v in self._walk(self._lower_stack(p, ledger, policy)):
            if v.key.char_len < n or lcp_from(v.key, p, 0, ledger) < n:
                break
            out.append(v.key)
        return out

    def range_query(self, lo, hi, ledger: CostLedger | None = None, policy=None) -> list[PackedKey]:
        lo = self._key(lo)
        hi = self._key(hi)
        ledger = ledger if ledger is not None else CostLedger()
        if key_compare(lo, hi) > 0:
            return []
        stack = self._lower_stack(lo, ledger, policy)
        path, orders, _, _ = self._descend(hi, ledger, policy)
        upper = None
        if path and orders[-1] == EQ:
            upper = path[-1]
        else:
            for v, o in zip(path, orders):
                if o == GT:
                    upper = v
        if upper is None or not stack:
            return []
        out = []
        for i, v in enumerate(self._walk(stack)):
            if i == 0:
                ledger.comparisons += 1
                if key_compare(v.key, hi) > 0:
                    return []
            out.append(v.key)
            if v is upper:
                break
        return out

    # updates

    def insert(self, x, rank: tuple[int, int] | None = None, ledger: CostLedger | None = None,
               policy: Policy | None = None) -> bool:
        x = self._key(x)
        ledger = ledger if ledger is not None else CostLedger()
        path, orders, grids, _ = self._descend(x, ledger, policy)
        if path and orders[-1] == EQ:
            return False
        r1, r2 = rank if rank is not None else self.draw_rank(x)
        node = ZipNode(x, r1, r2)
        n = len(path)
        i = 0
        while i < n:
            v = path[i]
            if r1 > v.r1 or (r1 == v.r1 and (r2 > v.r2 or (r2 == v.r2 and orders[i] == LT))):
                break
            i += 1
        # x's bookends are the last nodes above it that it went right / left of
        for j in range(i - 1, -1, -1):
            if orders[j] == GT:
                node.lcp_pred = grids[j]
                break
        for j in range(i - 1, -1, -1):
            if orders[j] == LT:
                node.lcp_succ = grids[j]
                break
        P = []
        Q = []
        for j in range(i, n):
            v = path[j]
            if orders[j] == GT:
                v.lcp_succ = grids[j]
                if P:
                    P[-1].right = v
                else:
                    node.left = v
                P.append(v)
            else:
                v.lcp_pred = grids[j]
                if Q:
                    Q[-1].left = v
                else:
                    node.right = v
                Q.append(v)
        if P:
            P[-1].right = None
        if Q:
            Q[-1].left = None
        parent = path[i - 1] if i > 0 else None
        if parent is None:
            self.root = node
        elif orders[i - 1] == GT:
            parent.right = node
        else:
            parent.left = node
        self.size += 1
        self.last_update = UpdateRecord("insert", node, P, Q, parent)
        return True

    def delete(self, x, ledger: CostLedger | None = None, policy: Policy | None = None) -> bool:
        x = self._key(x)
        ledger = ledger if ledger is not None else CostLedger()
        path, orders, _, _ = self._descend(x, ledger, policy)
        if not path or orders[-1] != EQ:
            return False
        node = path[-1]
        parent = path[-2] if len(path) > 1 else None
        P = []
        v = node.left
        while v is not None:
            P.append(v)
            v = v.right
        Q = []
        v = node.right
        while v is not None:
            Q.append(v)
            v = v.left
        # zip the spines top-down by rank; on equal ranks the smaller key (P) wins
        merged = []
        i = j = 0
        while i < len(P) and j < len(Q):
            p, q = P[i], Q[j]
            if (p.r1, p.r2) >= (q.r1, q.r2):
                merged.append(p)
                i += 1
            else:
                merged.append(q)
                j += 1
        merged.extend(P[i:])
        merged.extend(Q[j:])
        # new bookend on the far side: nearest opposite-spine node above, else x's own
        q_pred = None   # old lcp_pred of the last Q node seen (its LCP with x)
        p_succ = None   # old lcp_succ of the last P node seen
        is_p = {id(p) for p in P}
        for v in merged:
            if id(v) in is_p:
                old = v.lcp_succ
                ref = q_pred if q_pred is not None else node.lcp_succ
                v.lcp_succ = old if old < ref else ref
                p_succ = old
            else:
                old = v.lcp_pred
                ref = p_succ if p_succ is not None else node.lcp_pred
                v.lcp_pred = old if old < ref else ref
                q_pred = old
        for a, b in zip(merged, merged[1:]):
            if id(a) in is_p:
                a.right = b
            else:
                a.left = b
        if merged:
            last = merged[-1]
            if id(last) in is_p:
                last.right = None
            else:
                last.left = None
        top = merged[0] if merged else None
        if parent is None:
            self.root = top
        elif parent.left is node:
            parent.left = top
        else:
            parent.right = top
        self.size -= 1
        self.last_update = UpdateRecord("delete", node, P, Q, parent)
        return True

    # inspection

    def nodes(self):
        """Nodes in preorder."""
        stack = [self.root] if self.root is not None else []
        while stack:
            v = stack.pop()
            yield v
            if v.right is not None:
                stack.append(v.right)
            if v.left is not None:
                stack.append(v.left)

    def snapshot(self) -> tuple:
        """Preorder tuple of every field, with child presence bits; equal
        snapshots mean identical shape, keys, ranks and metadata."""
        return tuple((v.key.buf, v.key.char_len, v.r1, v.r2, v.lcp_pred, v.lcp_succ,
                      v.left is not None, v.right is not None) for v in self.nodes())

    def depths(self) -> list[int]:
        """Depth of every node, the root counting as 1."""
        out = []
        stack = [(self.root, 1)] if self.root is not None else []
        while stack:
            v, d = stack.pop()
            out.append(d)
            if v.left is not None:
                stack.append((v.left, d + 1))
            if v.right is not None:
                stack.append((v.right, d + 1))
        return out

    def mean_depth(self) -> float:
        d = self.depths()
        return sum(d) / len(d) if d else 0.0

    def height(self) -> int:
        return max(self.depths(), default=0)

    def metadata_report(self) -> dict:
        """Bits per node for ranks and LCP metadata at minimal field widths."""
        r2_bits = (self.config.r2_range - 1).bit_length()
        rank_bits = []
        lcp_bits = []
        for v in self.nodes():
            rank_bits.append(v.r1.bit_length() + r2_bits)
            for side in (PRED, SUCC):
                lcp_bits.append(lcp_codec.packed_width(self.node_lcp(v, side)))
        n = len(rank_bits)
        return {
            "nodes": n,
            "max_rank_bits": max(rank_bits, default=0),
            "mean_rank_bits": sum(rank_bits) / n if n else 0.0,
            "max_lcp_bits": max(lcp_bits, default=0),
            "mean_lcp_bits": sum(lcp_bits) / len(lcp_bits) if lcp_bits else 0.0,
        }

    # replay format: one "r1<TAB>r2<TAB>length<TAB>hex words" line per node

    def dump_ranks(self, fp) -> None:
        for v in self.nodes():
            codes = bytes(v.key.buf).hex()
            fp.write(f"{v.r1}\t{v.r2}\t{v.key.char_len}\t{codes}\n")

    @staticmethod
    def read_ranks(fp, alphabet: Alphabet = BYTES):
        out = []
        for lineno, line in enumerate(fp, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                r1, r2, n, hexbuf = line.split("\t")
                key = PackedKey(bytes.fromhex(hexbuf), int(n), alphabet)
                out.append((key, (int(r1), int(r2))))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return out

    @classmethod
    def load_ranks(cls, fp, config: TrieConfig | None = None, alphabet: Alphabet = BYTES) -> "ZipTrie":
        trie = cls(config, alphabet)
        for key, rank in cls.read_ranks(fp, alphabet):
            trie.insert(key, rank=rank)
        return trie
