import io
import math
import random

import pytest

from ziptrie.ledger import CostLedger
from ziptrie.oracle import OracleDict, naive_lcp
from ziptrie.packed_key import char_at, lcp_from, pack, unpack
from ziptrie.parallel_lcp import Policy
from ziptrie.string_btree import (
    BuildError, RangeTree, SbtNode, StringBTree, branch, naive_branch, range_tree_eliminate,
)


def node_of(words):
    keys = [pack(w) for w in sorted(words)]
    return SbtNode(keys, list(range(len(keys))))


def rand_key(rng):
    return rng.choice(["", "AB" * 20, "ABA" * 5]) + "".join(rng.choice("ABC") for _ in range(rng.randint(0, 8)))


def test_fruit_node_example():
    node = node_of(["APE", "APPLE", "APPLY", "ASK", "LIME"])
    r = branch(node, pack("APPLICATION"))
    # the comparison key shares the longest possible prefix, "APPL"
    assert r.lcp_w == 4 == max(naive_lcp("APPLICATION", w) for w in ["APE", "APPLE", "APPLY", "ASK", "LIME"])
    assert r.w == 1
    assert (r.slot, r.found) == (2, False) == naive_branch(node, pack("APPLICATION"))


def test_single_key_node():
    node = node_of(["m"])
    for x, want in (("a", 0), ("m", 0), ("z", 1)):
        r = branch(node, pack(x))
        assert r.w == 0
        assert (r.slot, r.found) == naive_branch(node, pack(x))
        assert r.slot == want


def test_node_arrays_match_naive():
    rng = random.Random(1)
    for _ in range(1000):
        words = sorted({rand_key(rng) for _ in range(rng.randint(1, 16))})
        node = node_of(words)
        s = len(words)
        for i in range(s):
            l = naive_lcp(words[i - 1], words[i]) if i else 0
            assert node.lcp[i] == l
            assert node.chars[i] == char_at(pack(words[i]), l)
            later = [j for j in range(i + 1, s) if node.lcp[j] <= node.lcp[i]]
            assert node.nxt[i] == (later[0] if later else s)
            assert node.lcp_first[i] == naive_lcp(words[0], words[i])
            assert node.lcp_last[i] == naive_lcp(words[-1], words[i])


def test_branch_matches_naive_scan():
    rng = random.Random(2)
    for _ in range(20_000):
        node = node_of({rand_key(rng) for _ in range(rng.randint(1, 16))})
        x = pack(rand_key(rng))
        r = branch(node, x)
        assert (r.slot, r.found) == naive_branch(node, x)
        assert r.lcp_w == max(lcp_from(x, k) for k in node.keys)
        if not r.found:
            if r.slot > 0:
                assert r.lcp_below == lcp_from(x, node.keys[r.slot - 1])
            if r.slot < len(node):
                assert r.lcp_above == lcp_from(x, node.keys[r.slot])


def test_range_tree_single_range():
    words = ["APE", "APPLE", "APPLY", "ASK", "LIME", "MANGO", "PEAR", "PLUM"]
    mask = range_tree_eliminate([(3, 4)], len(words))
    assert [w for w, m in zip(words, mask) if m] == ["ASK", "LIME"]
    assert range_tree_eliminate([], 8) == [False] * 8


def test_range_tree_matches_union():
    rng = random.Random(3)
    for _ in range(10_000):
        size = rng.randint(1, 64)
        ranges = []
        for _ in range(rng.randint(0, 5)):
            lo = rng.randrange(size)
            ranges.append((lo, rng.randint(lo, size - 1)))
        want = [any(lo <= i <= hi for lo, hi in ranges) for i in range(size)]
        assert range_tree_eliminate(ranges, size) == want


def test_range_tree_mark_cost():
    t = RangeTree(64)
    assert t.mark(0, 63) <= 2 * 6
    assert t.mark(5, 5) == 1
    with pytest.raises(ValueError):
        range_tree_eliminate([(3, 9)], 8)


def test_build_small_and_errors():
    t = StringBTree([pack(w) for w in ["a", "b", "c"]], B=4)
    assert t.height == 1 and t.root.is_leaf
    with pytest.raises(BuildError):
        StringBTree([pack("b"), pack("a")])
    with pytest.raises(BuildError):
        StringBTree([pack("a"), pack("a")])
    e = StringBTree([])
    r = e.search(pack("x"))
    assert not r.found and r.pred is None and r.succ is None
    assert e.range_query(pack("a"), pack("b")) == []


@pytest.mark.parametrize("B,fanout", [(4, None), (8, 3), (16, None), (32, 16)])
def test_height_bound_and_arrays(B, fanout):
    rng = random.Random(B)
    keys = sorted({pack(rand_key(rng)) for _ in range(3000)})
    t = StringBTree(keys, B=B, fanout=fanout)
    assert t.height <= math.ceil(math.log(len(keys), t.fanout)) + 1
    for node in t.nodes():
        assert len(node) <= B
        ks = [unpack(k) for k in node.keys]
        assert ks == sorted(set(ks))


@pytest.mark.parametrize("policy", list(Policy))
def test_search_matches_oracle(policy):
    rng = random.Random(7)
    words = sorted({rand_key(rng) for _ in range(2000)})
    t = StringBTree([pack(w) for w in words], B=8)
    o = OracleDict(words)
    for _ in range(4000):
        x = rand_key(rng)
        r = t.search(pack(x), policy)
        got = (r.found, None if r.pred is None else unpack(r.pred), None if r.succ is None else unpack(r.succ))
        assert got == (o.search(x), o.pred(x), o.succ(x))
        n = t.search(pack(x), naive=True)
        assert (r.found, r.position) == (n.found, n.position)


def test_prefix_and_range_queries():
    rng = random.Random(8)
    words = sorted({rand_key(rng) for _ in range(1500)})
    t = StringBTree([pack(w) for w in words], B=16)
    o = OracleDict(words)
    for _ in range(2000):
        x, y = sorted((rand_key(rng), rand_key(rng)))
        assert [unpack(k) for k in t.range_query(pack(x), pack(y))] == o.range(x, y)
        p = x[:rng.randint(0, len(x))]
        assert [unpack(k) for k in t.prefix_search(pack(p))] == o.prefix(p)
    assert t.range_query(pack("B"), pack("A")) == []
    assert [unpack(k) for k in t.prefix_search(pack(""))] == words


def test_enumeration_io():
    keys = [pack(f"{i:05d}") for i in range(1000)]
    t = StringBTree(keys, B=8)
    led = CostLedger(block_words=8)
    out = t.range_query(pack("00100"), pack("00299"), ledger=led)
    assert len(out) == 200
    searches = CostLedger(block_words=8)
    t.search(pack("00100"), ledger=searches)
    t.search(pack("00299"), ledger=searches)
    assert led.io_work - searches.io_work <= 200 / 8 + 1


def test_stats_csv():
    t = StringBTree([pack(f"k{i:03d}") for i in range(100)], B=8)
    buf = io.StringIO()
    t.write_stats_csv(buf)
    head, row = buf.getvalue().splitlines()
    assert head.split(",")[:4] == ["n", "B", "fanout", "height"]
    assert row.split(",")[0] == "100"
