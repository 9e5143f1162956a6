import random

from ziptrie import lcp_codec
from ziptrie.bookend import BookendState, CompareOutcome, Side, advance_state, k_compare
from ziptrie.lcp_codec import APPROX, EXACT, CodecConfig
from ziptrie.oracle import naive_lcp
from ziptrie.packed_key import EQ, GT, LT, Ordering, lcp_from, pack

X = lcp_codec.exact


def state(side, l):
    return BookendState(side, l, X(l))


def test_case_a_returns_node_value():
    out = k_compare(pack("zzzzzzzz"), pack("zzzzzzzz"), X(3), state(Side.SUCC, 7))
    assert (out.ordering, lcp_codec.decode(out.lcp_xv), out.chars_examined) == (GT, 3, 0)


def test_case_b_returns_state_value():
    out = k_compare(pack("zzzzzzzz"), pack("zzzzzzzz"), X(7), state(Side.SUCC, 3))
    assert (out.ordering, lcp_codec.decode(out.lcp_xv), out.chars_examined) == (LT, 3, 0)


def test_case_c_scans_from_shared_prefix():
    out = k_compare(pack("APPLET"), pack("APPLES"), X(4), state(Side.SUCC, 4))
    assert out.ordering == GT
    assert lcp_codec.decode(out.lcp_xv) == 5
    assert out.chars_examined <= 2


def test_pred_side_mirrors():
    out = k_compare(pack("a"), pack("b"), X(3), state(Side.PRED, 7))
    assert out.ordering == LT
    out = k_compare(pack("a"), pack("b"), X(7), state(Side.PRED, 3))
    assert out.ordering == GT


def test_advance_state_examples():
    s0 = BookendState.start(EXACT)
    s1 = advance_state(s0, CompareOutcome(Ordering.GT, X(5), 6, 5))
    assert (s1.side, s1.lcp_exact) == (Side.PRED, 5)
    s = state(Side.SUCC, 7)
    assert advance_state(s, CompareOutcome(Ordering.GT, X(3), 0, 3)) == s


def _replay(keys, x, mode, f):
    """Walk a random BST over ``keys`` the way a search would and check every step."""
    codec = CodecConfig(f)
    enc = (lambda l: lcp_codec.encode(l, codec)) if mode is APPROX else X
    st = BookendState.start(mode)
    lo = hi = None
    nodes = list(keys)
    best = 0
    while nodes:
        v = nodes[len(nodes) // 2]
        anc = hi if st.side == Side.SUCC else lo
        v_lcp = enc(0 if anc is None else naive_lcp(v, anc))
        out = k_compare(pack(x), pack(v), v_lcp, st, lcp_from, codec)
        want = LT if x < v else GT if x > v else EQ
        assert out.ordering == want
        true = naive_lcp(x, v)
        assert lcp_codec.decode(out.lcp_xv) <= true
        if mode is EXACT:
            assert lcp_codec.decode(out.lcp_xv) == true
        best = max(best, true)
        if want == EQ:
            return
        new = advance_state(st, out)
        if new is not st:
            if new.side == Side.PRED:
                lo = v
            else:
                hi = v
        st = new
        if mode is EXACT:
            assert st.lcp_exact == best
        # the bookend is the node that last moved the state; it brackets every remaining key
        nodes = [k for k in nodes if (k < v if want == LT else k > v)]


def test_replayed_paths_match_naive_order():
    rng = random.Random(7)
    for trial in range(400):
        pool = sorted({"ab" * rng.randint(0, 6) + "".join(rng.choice("ab") for _ in range(rng.randint(0, 6)))
                       for _ in range(40)})
        x = "ab" * rng.randint(0, 6) + "".join(rng.choice("ab") for _ in range(rng.randint(0, 6)))
        _replay(pool, x, EXACT, 4)
        _replay(pool, x, APPROX, 2)
