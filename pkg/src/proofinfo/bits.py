"""Bitstring helpers shared by the machine, the proof encodings and the Kt engine.

Bitstrings are plain ``str`` objects over the alphabet ``{"0", "1"}``.
"""

from __future__ import annotations

from itertools import product
from typing import Iterator


class DecodeError(ValueError):
    """Raised when a bitstring does not decode under a prefix code."""


def ceil_log2(t: int) -> int:
    """Smallest k with 2**k >= t, for t >= 1."""
    if t < 1:
        raise ValueError("ceil_log2 needs t >= 1")
    return (t - 1).bit_length()


def is_bits(s: str) -> bool:
    return all(c in "01" for c in s)


def gamma(n: int) -> str:
    """Elias gamma code of n >= 1: (bitlen-1) zeros followed by n in binary."""
    if n < 1:
        raise ValueError("gamma code needs n >= 1")
    b = format(n, "b")
    return "0" * (len(b) - 1) + b


def read_gamma(bits: str, pos: int, end: int | None = None) -> tuple[int, int]:
    """Decode a gamma code starting at ``pos``; returns (value, new position)."""
    if end is None:
        end = len(bits)
    zeros = 0
    while pos + zeros < end and bits[pos + zeros] == "0":
        zeros += 1
    stop = pos + 2 * zeros + 1
    if stop > end:
        raise DecodeError("truncated gamma code")
    return int(bits[pos + zeros:stop], 2), stop


def unary(n: int) -> str:
    """n ones followed by a zero."""
    return "1" * n + "0"


def read_unary(bits: str, pos: int) -> tuple[int, int]:
    n = 0
    while pos < len(bits) and bits[pos] == "1":
        n += 1
        pos += 1
    if pos >= len(bits):
        raise DecodeError("truncated unary code")
    return n, pos + 1


def fixed(value: int, width: int) -> str:
    if width == 0:
        if value != 0:
            raise ValueError("value does not fit in zero bits")
        return ""
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b")


def read_fixed(bits: str, pos: int, width: int) -> tuple[int, int]:
    if pos + width > len(bits):
        raise DecodeError("truncated fixed-width field")
    if width == 0:
        return 0, pos
    return int(bits[pos:pos + width], 2), pos + width


def to_hex(bits: str) -> str:
    """Hex of the bits, right-padded with zeros to a multiple of 8."""
    if not bits:
        return ""
    padded = bits + "0" * (-len(bits) % 8)
    return bytes(int(padded[i:i + 8], 2) for i in range(0, len(padded), 8)).hex()


def from_hex(text: str, bitlen: int) -> str:
    raw = bytes.fromhex(text)
    bits = "".join(format(b, "08b") for b in raw)
    if bitlen > len(bits) or len(bits) - bitlen >= 8:
        raise DecodeError("bit length does not match hex payload")
    if "1" in bits[bitlen:]:
        raise DecodeError("nonzero padding after declared bit length")
    return bits[:bitlen]


def strings_of_length(n: int) -> Iterator[str]:
    """All bitstrings of length n in lexicographic order."""
    if n == 0:
        yield ""
        return
    for tup in product("01", repeat=n):
        yield "".join(tup)


def length_lex(max_len: int) -> Iterator[str]:
    """All bitstrings of length <= max_len, shortest first, lexicographic within a length."""
    for n in range(max_len + 1):
        yield from strings_of_length(n)


def length_lex_index(s: str) -> int:
    """Position of s in the length-lex order (epsilon is 0)."""
    return (1 << len(s)) - 1 + (int(s, 2) if s else 0)


def length_lex_at(index: int) -> str:
    """Inverse of :func:`length_lex_index`."""
    n = (index + 1).bit_length() - 1
    offset = index - ((1 << n) - 1)
    return format(offset, f"0{n}b") if n else ""
