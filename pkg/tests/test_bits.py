import pytest
from hypothesis import given, strategies as st

from proofinfo import bits as B
from strategies import bitstrings


@given(st.integers(1, 10**6))
def test_gamma_round_trip(n):
    code = B.gamma(n)
    assert B.read_gamma(code + "1", 0) == (n, len(code))


@given(bitstrings)
def test_hex_round_trip(bits):
    assert B.from_hex(B.to_hex(bits), len(bits)) == bits


def test_hex_rejects_bad_padding():
    with pytest.raises(B.DecodeError):
        B.from_hex("ff", 4)
    with pytest.raises(B.DecodeError):
        B.from_hex("f0", 20)


@given(st.integers(0, 5000))
def test_length_lex_index_inverse(i):
    assert B.length_lex_index(B.length_lex_at(i)) == i


def test_length_lex_order():
    assert list(B.length_lex(2)) == ["", "0", "1", "00", "01", "10", "11"]


@pytest.mark.parametrize("t,expected", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (1024, 10), (1025, 11)])
def test_ceil_log2(t, expected):
    assert B.ceil_log2(t) == expected


def test_fixed_width():
    assert B.fixed(5, 4) == "0101"
    assert B.read_fixed("0101", 0, 4) == (5, 4)
    assert B.fixed(0, 0) == ""
    with pytest.raises(ValueError):
        B.fixed(16, 4)
    with pytest.raises(B.DecodeError):
        B.read_fixed("01", 0, 3)
