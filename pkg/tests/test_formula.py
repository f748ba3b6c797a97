import itertools

import pytest
from hypothesis import given, settings

from proofinfo.formula import (
    FALSE, TRUE, And, DecodeError, FormulaError, Not, Or, ParseError, Var, decode, decode_prefix, encode,
    evaluate, is_tautology_bruteforce, negation_normal_form, parse, render, size,
    substitute_constants, truth_mask,
)
from oracles import evaluate as ref_evaluate, is_tautology as ref_is_tautology
from strategies import formulas


def test_parse_and_render():
    f = parse("(x1 | ~x1)")
    assert f == Or((Var(1), Not(Var(1))))
    assert render(f) == "(x1 | ~x1)"
    assert parse("(x1 -> x2)") == Or((Not(Var(1)), Var(2)))


@pytest.mark.parametrize("text", ["(x1 | ", "x0", "x1 x2", "(x1 &)", "y"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_requires_contiguous_variables():
    with pytest.raises(FormulaError):
        parse("(x1 & x3)")
    assert parse("(x1 & x3)", contiguous=False) == And((Var(1), Var(3)))


def test_known_codes():
    assert encode(Var(1)) == "00"
    assert encode(Var(2)) == "010"
    assert encode(TRUE) == "11111"
    assert encode(FALSE) == "11110"
    assert encode(parse("(x1 | ~x1)")) == "110" + "0" + "00" + "10" + "00"
    assert size(parse("(x1 & x1 & x1)")) == 6 + 3 * 2


@given(formulas())
def test_text_and_bit_round_trip(f):
    assert parse(render(f)) == f
    assert decode(encode(f)) == f


@given(formulas())
def test_code_is_prefix_free(f):
    code = encode(f)
    g, end = decode_prefix(code + "0101", 0)
    assert (g, end) == (f, len(code))


def test_decode_rejects_trailing_and_gaps():
    with pytest.raises(DecodeError):
        decode("000")
    with pytest.raises(DecodeError):
        decode(encode(And((Var(1), Var(3)))))


@given(formulas(4))
@settings(max_examples=200)
def test_truth_mask_matches_recursive_evaluation(f):
    from oracles import max_var

    n = max_var(f)
    mask = truth_mask(f, n)
    for k, a in enumerate(itertools.product((0, 1), repeat=n)):
        a = tuple(reversed(a))  # bit i of k is variable i+1
        idx = sum(bit << i for i, bit in enumerate(a))
        assert (mask >> idx) & 1 == ref_evaluate(f, a) == evaluate(f, a)


@given(formulas(4))
def test_tautology_check_agrees_with_oracle(f):
    ok, a = is_tautology_bruteforce(f)
    assert bool(ok) == ref_is_tautology(f)
    if not ok:
        assert ref_evaluate(f, a) == 0


def test_tautology_examples():
    assert is_tautology_bruteforce(parse("(x1 | ~x1)")) == (1, None)
    assert is_tautology_bruteforce(parse("x1")) == (0, (0,))


@given(formulas(4))
def test_nnf_preserves_semantics(f):
    from oracles import max_var

    n = max_var(f)
    g = negation_normal_form(f, negate=True)
    for a in itertools.product((0, 1), repeat=n):
        assert ref_evaluate(g, a) == 1 - ref_evaluate(f, a)


def test_substitute_constants_renumbers():
    f = parse("(x1 | (x2 & x3))")
    g, mapping = substitute_constants(f, {2: 1})
    assert g == Or((Var(1), Var(2)))
    assert mapping == {1: 1, 3: 2}
