"""Bookend comparison: order a search key against a node key reusing LCP metadata.

The search carries its LCP with the closer of its two bookends (the
nearest traversed keys below and above it).  A node stores its own LCP
with the same bookend, so when the two differ the order and the new LCP
follow without reading a character; only a tie needs a character scan,
and that scan resumes at the shared prefix.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from . import lcp_codec
from .lcp_codec import APPROX, EXACT, LcpValue
from .packed_key import EQ, GT, LT, Ordering, compare_at, lcp_from


class Side(IntEnum):
    PRED = 0
    SUCC = 1


PRED, SUCC = 0, 1


@dataclass(frozen=True)
class BookendState:
    side: Side = Side.SUCC
    lcp_exact: int = 0
    lcp_stored: LcpValue = LcpValue(EXACT, 0)

    @classmethod
    def start(cls, mode=EXACT) -> "BookendState":
        stored = lcp_codec.exact(0) if mode is EXACT else LcpValue(APPROX, a=0, b=0)
        return cls(Side.SUCC, 0, stored)


@dataclass(frozen=True)
class CompareOutcome:
    ordering: Ordering
    lcp_xv: LcpValue
    chars_examined: int
    # best known lower bound on the LCP; exact whenever lcp_exact_known
    lcp_known: int = 0
    lcp_exact_known: bool = True


def k_compare_raw(x, v, v_lcp: int, side: int, lcp_exact: int, lcp_stored: int,
                  lcp_fn=lcp_from, f: int = 0):
    """Integer form of :func:`k_compare` used on hot paths.

    ``v_lcp`` and ``lcp_stored`` are grid values (plain lengths when
    ``f == 0``, i.e. exact metadata).  Returns
    ``(ordering, lcp_known, lcp_grid, chars_examined)``.
    """
    if lcp_stored > v_lcp:
        # v leaves the bookend before x does, so v sits on the bookend's far side of x
        return (GT if side else LT), v_lcp, v_lcp, 0
    if lcp_stored < v_lcp:
        return (LT if side else GT), lcp_exact, lcp_stored, 0
    start = v_lcp if f else lcp_exact
    lcp = lcp_fn(x, v, start)
    order = compare_at(x, v, lcp)
    if f:
        a = (lcp // f).bit_length() - 1
        grid = (lcp >> a) << a if a > 0 else lcp
    else:
        grid = lcp
    return order, lcp, grid, lcp - start + 1


def k_compare(x, v, v_lcp: LcpValue, state: BookendState, lcp_fn=lcp_from,
              codec: lcp_codec.CodecConfig | None = None) -> CompareOutcome:
    """Compare ``x`` against ``v`` given v's LCP with the bookend named by ``state.side``."""
    mode = v_lcp.mode
    if mode is not state.lcp_stored.mode:
        raise TypeError("state and node metadata use different LCP modes")
    f = 0
    if mode is APPROX:
        f = (codec or lcp_codec.DEFAULT_CODEC).f
    order, known, grid, chars = k_compare_raw(
        x, v, lcp_codec.decode(v_lcp), int(state.side), state.lcp_exact,
        lcp_codec.decode(state.lcp_stored), lcp_fn, f)
    if mode is EXACT:
        stored = lcp_codec.exact(grid)
        exact_known = True
    else:
        a = lcp_codec.exponent(grid, f)
        stored = LcpValue(APPROX, a=a, b=grid >> a)
        # only the no-scan case that returns v's own metadata yields a grid value
        exact_known = lcp_codec.decode(state.lcp_stored) <= lcp_codec.decode(v_lcp)
    return CompareOutcome(Ordering(order), stored, chars, known, exact_known)


def advance_state(state: BookendState, outcome: CompareOutcome) -> BookendState:
    """Make the node just compared the bookend if it shares at least as long a prefix.

    The test runs on the metadata grid so that in approximate mode the
    bookend always stays one of the next node's immediate bookends.
    """
    if lcp_codec.decode(outcome.lcp_xv) < lcp_codec.decode(state.lcp_stored):
        return state
    side = Side.PRED if outcome.ordering == GT else Side.SUCC
    return BookendState(side, outcome.lcp_known, outcome.lcp_xv)
