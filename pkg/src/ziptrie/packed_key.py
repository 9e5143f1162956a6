"""Packed string keys and word-level LCP / comparison primitives.

Characters are packed ``alpha`` to a machine word, first character in the
highest-order bits, so comparing words as unsigned integers agrees with
lexicographic order and the first differing character of two keys is found
from the most significant set bit of the XOR of their words.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from enum import IntEnum

LT, EQ, GT = -1, 0, 1
# code returned by char_at for a position past the end of a key
END = -1


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Character width and word size used to pack keys.

    ``symbols`` optionally maps characters to codes by position (``"ACGT"``
    gives A=0, C=1, G=2, T=3).  Without it a character's code is its ordinal.
    """

    bits_per_char: int
    word_bits: int = 64
    symbols: str | None = None
    alpha: int = field(init=False)

    def __post_init__(self):
        if not 1 <= self.bits_per_char <= self.word_bits:
            raise ValueError("bits_per_char must be in [1, word_bits]")
        if self.word_bits % 8:
            raise ValueError("word_bits must be a multiple of 8")
        if self.symbols is not None and len(self.symbols) > (1 << self.bits_per_char):
            raise ValueError("too many symbols for bits_per_char")
        object.__setattr__(self, "alpha", self.word_bits // self.bits_per_char)

    @property
    def word_bytes(self) -> int:
        return self.word_bits // 8

    @property
    def char_mask(self) -> int:
        return (1 << self.bits_per_char) - 1

    def encode(self, text) -> list[int]:
        """Map a str / bytes / int sequence to character codes."""
        if self.symbols is not None:
            table = {c: i for i, c in enumerate(self.symbols)}
            try:
                return [table[c] for c in text]
            except KeyError as exc:
                raise EncodingError(f"character {exc.args[0]!r} not in alphabet") from None
        if isinstance(text, str):
            codes = [ord(c) for c in text]
        else:
            codes = list(text)
        limit = 1 << self.bits_per_char
        for c in codes:
            if not 0 <= c < limit:
                raise EncodingError(f"character code {c} does not fit in {self.bits_per_char} bits")
        return codes

    def decode(self, codes) -> str:
        if self.symbols is not None:
            return "".join(self.symbols[c] for c in codes)
        return "".join(chr(c) for c in codes)


BYTES = Alphabet(8)
DNA = Alphabet(2, symbols="ACGT")
_DNA_DIGITS = str.maketrans("ACGT", "0123")


class PackedKey:
    """An immutable packed string.

    ``buf`` holds the words back to back, big-endian, ``word_bytes`` each;
    unused trailing character slots are zero.
    """

    __slots__ = ("buf", "char_len", "alphabet", "_hash")

    def __init__(self, buf: bytes, char_len: int, alphabet: Alphabet):
        self.buf = buf
        self.char_len = char_len
        self.alphabet = alphabet
        self._hash = None

    @property
    def n_words(self) -> int:
        return len(self.buf) // self.alphabet.word_bytes

    @property
    def words(self) -> tuple[int, ...]:
        wb = self.alphabet.word_bytes
        b = self.buf
        return tuple(int.from_bytes(b[i:i + wb], "big") for i in range(0, len(b), wb))

    def __len__(self):
        return self.char_len

    def __eq__(self, other):
        if not isinstance(other, PackedKey):
            return NotImplemented
        return (self.char_len == other.char_len and self.buf == other.buf
                and self.alphabet == other.alphabet)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.buf, self.char_len))
        return self._hash

    def __lt__(self, other):
        return key_compare(self, other) < 0

    def __repr__(self):
        text = unpack(self)
        if len(text) > 24:
            text = text[:21] + "..."
        return f"PackedKey({text!r}, len={self.char_len})"

    def char_at(self, i: int) -> int:
        return char_at(self, i)


def pack(text, alphabet: Alphabet = BYTES) -> PackedKey:
    """Pack ``text`` (str, bytes or code sequence) into words of ``alphabet``."""
    bpc = alphabet.bits_per_char
    w = alphabet.word_bits
    alpha = alphabet.alpha
    wb = alphabet.word_bytes
    n = len(text)
    n_words = -(-n // alpha)
    if n == 0:
        return PackedKey(b"", 0, alphabet)

    if alpha * bpc == w:
        # no padding bits inside words: the key is one big-endian bit string
        pad = n_words * w - n * bpc
        if bpc == 8 and alphabet.symbols is None:
            if isinstance(text, str):
                try:
                    raw = text.encode("latin-1")
                except UnicodeEncodeError:
                    raise EncodingError("character code does not fit in 8 bits") from None
            else:
                raw = bytes(text)
            return PackedKey(raw + bytes(pad // 8), n, alphabet)
        if alphabet.symbols == "ACGT" and bpc == 2 and isinstance(text, str):
            digits = text.translate(_DNA_DIGITS)
            if not set(digits) <= set("0123"):
                bad = next(c for c in text if c not in "ACGT")
                raise EncodingError(f"character {bad!r} not in alphabet")
            value = int(digits, 4) << pad
            return PackedKey(value.to_bytes(n_words * wb, "big"), n, alphabet)
        codes = alphabet.encode(text)
        value = 0
        for c in codes:
            value = (value << bpc) | c
        return PackedKey((value << pad).to_bytes(n_words * wb, "big"), n, alphabet)

    codes = alphabet.encode(text)
    out = bytearray()
    for start in range(0, n, alpha):
        word = 0
        chunk = codes[start:start + alpha]
        for c in chunk:
            word = (word << bpc) | c
        word <<= w - len(chunk) * bpc
        out += word.to_bytes(wb, "big")
    return PackedKey(bytes(out), n, alphabet)


def unpack_codes(key: PackedKey) -> list[int]:
    return [char_at(key, i) for i in range(key.char_len)]


@functools.lru_cache(maxsize=None)
def _byte_table(alphabet: Alphabet) -> tuple[str, ...]:
    """Decoded text of every byte value, for widths that tile a byte."""
    bpc = alphabet.bits_per_char
    per = 8 // bpc
    mask = alphabet.char_mask
    return tuple(alphabet.decode((b >> (8 - (i + 1) * bpc)) & mask for i in range(per))
                 for b in range(256))


def unpack(key: PackedKey):
    """Inverse of :func:`pack`; returns a str."""
    a = key.alphabet
    bpc = a.bits_per_char
    if a.alpha * bpc != a.word_bits or 8 % bpc:
        return a.decode(unpack_codes(key))
    if bpc == 8 and a.symbols is None:
        return key.buf[:key.char_len].decode("latin-1")
    n = key.char_len
    nbytes = -(-n * bpc // 8)
    text = "".join(map(_byte_table(a).__getitem__, key.buf[:nbytes]))
    return text[:n]


def char_at(key: PackedKey, i: int) -> int:
    """Code of character ``i``, or END when ``i`` is past the end."""
    if i >= key.char_len:
        return END
    a = key.alphabet
    bpc = a.bits_per_char
    if bpc == 8 and a.alpha * 8 == a.word_bits:
        return key.buf[i]
    if a.alpha * bpc == a.word_bits and 8 % bpc == 0:
        bit = i * bpc
        return (key.buf[bit >> 3] >> (8 - (bit & 7) - bpc)) & a.char_mask
    wi, ci = divmod(i, a.alpha)
    wb = a.word_bytes
    word = int.from_bytes(key.buf[wi * wb:(wi + 1) * wb], "big")
    return (word >> (a.word_bits - (ci + 1) * bpc)) & a.char_mask


def msb(word: int, word_bits: int = 64) -> int:
    """Index of the most significant set bit counted from the top (CLZ).

    The zero word gives ``word_bits``.
    """
    return word_bits - word.bit_length()


def msw_linear(words) -> int:
    """Index of the first nonzero word, or ``len(words)``."""
    for i, w in enumerate(words):
        if w:
            return i
    return len(words)


def first_diff(a: PackedKey, b: PackedKey, start: int, stop_word: int):
    """Locate the first differing bit of ``a`` and ``b`` at or after character ``start``.

    Only words ``[start // alpha, stop_word)`` are examined; the characters
    of the first word before ``start`` are masked off.  Returns
    ``(word_index, bit_from_top)`` or ``None`` if the range is equal.
    The scan XORs whole runs of words at a time, doubling the run length,
    so real time stays proportional to the distance scanned.
    """
    al = a.alphabet
    alpha = al.alpha
    w = al.word_bits
    wb = al.word_bytes
    s = start // alpha
    if s >= stop_word:
        return None
    A = a.buf
    B = b.buf
    lo = s * wb
    x = int.from_bytes(A[lo:lo + wb], "big") ^ int.from_bytes(B[lo:lo + wb], "big")
    x &= (1 << (w - (start - s * alpha) * al.bits_per_char)) - 1
    if x:
        return s, w - x.bit_length()
    i = s + 1
    run = 1
    while i < stop_word:
        hi = min(stop_word, i + run)
        x = (int.from_bytes(A[i * wb:hi * wb], "big")
             ^ int.from_bytes(B[i * wb:hi * wb], "big"))
        if x:
            bit = (hi - i) * w - x.bit_length()
            return i + bit // w, bit % w
        i = hi
        run <<= 1
    return None


def lcp_from(a: PackedKey, b: PackedKey, start: int = 0, ledger=None) -> int:
    """Absolute LCP length of ``a`` and ``b``, given that they agree on ``[0, start)``.

    Words are XORed from the one containing ``start``; the first nonzero
    XOR word's MSB locates the mismatch.  ``ledger`` (a CostLedger) is
    charged with the number of words that scan touches.
    """
    n = a.char_len if a.char_len < b.char_len else b.char_len
    if start > n or start < 0:
        raise ValueError(f"start {start} outside common range [0, {n}]")
    al = a.alphabet
    alpha = al.alpha
    nw = len(a.buf) if len(a.buf) < len(b.buf) else len(b.buf)
    nw //= al.word_bytes
    s = start // alpha
    hit = first_diff(a, b, start, nw)
    if hit is None:
        lcp = n
        words = nw - s if nw > s else 0
    else:
        wi, bit = hit
        lcp = wi * alpha + bit // al.bits_per_char
        if lcp > n:
            lcp = n
        words = wi - s + 1
    if ledger is not None:
        ledger.charge_scan(s, words)
    return lcp


def compare_at(a: PackedKey, b: PackedKey, pos: int) -> int:
    """Order of ``a`` versus ``b`` decided by the characters at ``pos`` (END sorts first)."""
    ca = char_at(a, pos)
    cb = char_at(b, pos)
    if ca < cb:
        return LT
    if ca > cb:
        return GT
    return EQ


def key_compare(a: PackedKey, b: PackedKey) -> int:
    """Full lexicographic comparison by word order."""
    return compare_at(a, b, lcp_from(a, b, 0))
