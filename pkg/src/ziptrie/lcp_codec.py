"""Approximate LCP lengths of the form ``2**a * b``.

A length ``l`` is rounded down to the largest grid value not above it,
with ``a = max(0, floor(log2(l / f)))`` and ``b = floor(l / 2**a)``.  The
rounding error is below ``l / f`` and the pair needs about
``log log l + log 2f`` bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .packed_key import EQ, GT, LT


class LcpMode(Enum):
    EXACT = "exact"
    APPROX = "approx"


EXACT = LcpMode.EXACT
APPROX = LcpMode.APPROX


@dataclass(frozen=True)
class CodecConfig:
    f: int
    l_max: int = 1 << 40

    def __post_init__(self):
        if self.f < 1:
            raise ValueError("f must be >= 1")

    @classmethod
    def for_capacity(cls, n_max: int = 1 << 32, l_max: int = 1 << 40) -> "CodecConfig":
        return cls(max(1, math.ceil(math.log2(max(n_max, 2)))), l_max)

    @property
    def a_bits(self) -> int:
        return max(1, self.l_max.bit_length().bit_length())

    @property
    def b_bits(self) -> int:
        return (2 * self.f - 1).bit_length()


DEFAULT_CODEC = CodecConfig.for_capacity()


@dataclass(frozen=True)
class LcpValue:
    mode: LcpMode
    exact: int = 0
    a: int = 0
    b: int = 0

    @property
    def value(self) -> int:
        return decode(self)


def quantize(length: int, f: int) -> int:
    """Decoded value of ``encode(length)``; the hot-path form used by the trie."""
    a = (length // f).bit_length() - 1
    if a <= 0:
        return length
    return (length >> a) << a


def exponent(length: int, f: int) -> int:
    a = (length // f).bit_length() - 1
    return a if a > 0 else 0


def encode(length: int, cfg: CodecConfig = DEFAULT_CODEC) -> LcpValue:
    if length < 0:
        raise ValueError("negative LCP length")
    if length > cfg.l_max:
        raise OverflowError(f"LCP length {length} exceeds l_max={cfg.l_max}")
    a = exponent(length, cfg.f)
    return LcpValue(APPROX, a=a, b=length >> a)


def exact(length: int) -> LcpValue:
    return LcpValue(EXACT, exact=length)


def decode(v: LcpValue) -> int:
    if v.mode is EXACT:
        return v.exact
    return v.b << v.a


def compare(u: LcpValue, v: LcpValue) -> int:
    if u.mode is not v.mode:
        raise TypeError("cannot compare EXACT and APPROX LCP values")
    x, y = decode(u), decode(v)
    return LT if x < y else GT if x > y else EQ


def packed_width(v: LcpValue) -> int:
    """Bits needed for the (a, b) pair of ``v`` at minimal field widths."""
    if v.mode is EXACT:
        return v.exact.bit_length()
    return v.a.bit_length() + v.b.bit_length()


def width_bound(length: int, f: int) -> int:
    return math.ceil(math.log2(math.log2(max(length, 2)))) + math.ceil(math.log2(2 * f))


def pack_bits(v: LcpValue, cfg: CodecConfig = DEFAULT_CODEC) -> int:
    """Fixed layout: ``a`` in the high ``cfg.a_bits`` bits, ``b`` in the low ``cfg.b_bits``."""
    if v.mode is EXACT:
        raise TypeError("only APPROX values have a packed layout")
    return (v.a << cfg.b_bits) | v.b


def unpack_bits(word: int, cfg: CodecConfig = DEFAULT_CODEC) -> LcpValue:
    return LcpValue(APPROX, a=word >> cfg.b_bits, b=word & ((1 << cfg.b_bits) - 1))
