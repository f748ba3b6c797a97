import itertools

import pytest
from hypothesis import given

from proofinfo.cnf import (
    Cnf, CnfError, cnf_to_tautology, from_dimacs, make_clause, negate_to_cnf, restrict_cnf,
    satisfiable_bruteforce, to_dimacs,
)
from proofinfo.formula import parse
from proofinfo.generators import gen_php
from oracles import cnf_satisfiable, is_tautology
from strategies import clauses, formulas


def test_make_clause_canonical():
    assert make_clause([3, -1, 3]) == (-1, 3)
    with pytest.raises(CnfError):
        make_clause([1, -1])
    with pytest.raises(CnfError):
        make_clause([0])


def test_dimacs_unit():
    assert to_dimacs(Cnf(1, ((1,),))) == "p cnf 1 1\n1 0\n"


def test_dimacs_round_trip_php3():
    c = gen_php(3)
    assert from_dimacs(to_dimacs(c, ["pigeonhole 3"])) == c


@given(clauses)
def test_dimacs_round_trip(cs):
    c = Cnf(4, tuple(tuple(x) for x in cs))
    assert from_dimacs(to_dimacs(c)) == c


@pytest.mark.parametrize("text", [
    "1 0\n",
    "p cnf 1 1\n2 0\n",
    "p cnf 1 2\n1 0\n",
    "p cnf x 1\n1 0\n",
    "p cnf 1 1\n1\n",
])
def test_dimacs_errors(text):
    with pytest.raises(CnfError):
        from_dimacs(text)


def test_negation_examples():
    assert negate_to_cnf(parse("(x1 | ~x1)")) == Cnf(1, ((-1,), (1,)))
    assert negate_to_cnf(parse("T")) == Cnf(0, ((),))
    assert negate_to_cnf(parse("F")) == Cnf(0, ())


@given(formulas(3))
def test_negation_is_equisatisfiable(f):
    c = negate_to_cnf(f)
    assert cnf_satisfiable(c.var_count, c.clauses) == (not is_tautology(f))


@given(formulas(3))
def test_negation_agrees_on_original_variables(f):
    # auxiliaries are fully defined, so every assignment of the original
    # variables that falsifies f extends to a model of the clauses
    from oracles import evaluate, max_var

    n = max_var(f)
    c = negate_to_cnf(f)
    for a in itertools.product((0, 1), repeat=n):
        restricted, _ = restrict_cnf(c, {i + 1: a[i] for i in range(n)})
        sat = satisfiable_bruteforce(restricted)[0]
        assert sat == (evaluate(f, a) == 0)


def test_php_tautology_round_trip():
    for n in (1, 2, 3):
        c = gen_php(n)
        assert negate_to_cnf(cnf_to_tautology(c)) == c


def test_restrict():
    c = Cnf(2, ((1, 2), (-1,), (2,)))
    r, origin = restrict_cnf(c, {2: 0})
    assert r.clauses == ((1,), (-1,), ())
    assert origin == [0, 1, 2]
