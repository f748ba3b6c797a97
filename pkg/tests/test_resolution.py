import itertools

import pytest
from hypothesis import given, settings, strategies as st

from proofinfo import resolution as R
from proofinfo.cnf import Cnf, cnf_to_tautology, make_clause
from proofinfo.formula import encode
from proofinfo.generators import er_refutation_php, gen_php
from proofinfo.systems import RES, check
from oracles import cnf_satisfiable
from strategies import clauses


def test_resolve_examples():
    assert R.resolve((1, 2), (-1, 3), 1) == (2, 3)
    assert R.resolve((1,), (-1,), 1) == ()
    with pytest.raises(R.ProofError) as exc:
        R.resolve_any((1, 2), (-1, -2), 1)
    assert exc.value.reason == "tautological-resolvent"
    with pytest.raises(R.ProofError) as exc:
        R.resolve_any((1,), (2,), 1)
    assert exc.value.reason == "bad-pivot"


def test_extension_clauses():
    assert R.extension_clauses(3, 1, -2) == (
        make_clause([-3, 1]), make_clause([-3, -2]), make_clause([-1, 2, 3]))


def _entailed(cnf, clause):
    # every model of cnf satisfies clause
    n = max([cnf.var_count] + [abs(l) for l in clause])
    for a in itertools.product((0, 1), repeat=n):
        if all(any((a[abs(l) - 1] == 1) == (l > 0) for l in c) for c in cnf.clauses):
            if not any((a[abs(l) - 1] == 1) == (l > 0) for l in clause):
                return False
    return True


@given(clauses)
@settings(max_examples=60, deadline=None)
def test_decision_tree_refutations_are_sound(cs):
    cnf = Cnf(4, tuple(make_clause(c) for c in cs))
    if cnf_satisfiable(cnf.var_count, cnf.clauses):
        return
    proof = R.refute_by_decision_tree(cnf)
    slots = R.check_refutation(cnf, proof)
    assert () in slots
    for c in slots:
        assert _entailed(cnf, c)


@given(clauses)
@settings(max_examples=60, deadline=None)
def test_body_codec_round_trip(cs):
    cnf = Cnf(4, tuple(make_clause(c) for c in cs))
    if cnf_satisfiable(cnf.var_count, cnf.clauses):
        return
    proof = R.refute_by_decision_tree(cnf)
    bits = R.encode_body(cnf, proof)
    assert R.decode_body(cnf, bits) == proof


def test_text_round_trip():
    cnf = gen_php(2)
    proof = R.refute_by_decision_tree(cnf)
    assert R.from_text(R.to_text(cnf, proof)) == proof
    er = er_refutation_php(2)
    assert R.from_text(R.to_text(gen_php(2), er)) == er


@pytest.mark.parametrize("lines,reason", [
    ((R.Input(0), R.Input(1), R.Resolve(0, 5, 1)), "bad-reference"),
    ((R.Input(0), R.Input(1), R.Resolve(0, 1, 2)), "bad-pivot"),
    ((R.Input(0), R.Input(1)), "no-empty-clause"),
    ((R.Input(7),), "bad-input"),
    ((R.Input(0), R.Input(1), R.Extend(2, 1, -1)), "extension-not-allowed"),
])
def test_rejections(lines, reason):
    cnf = Cnf(1, ((1,), (-1,)))
    with pytest.raises(R.ProofError) as exc:
        R.check_refutation(cnf, R.ResolutionProof(lines))
    assert exc.value.reason == reason


@pytest.mark.parametrize("ext,reason", [
    (R.Extend(5, 1, 1), "extension-not-fresh"),
    (R.Extend(2, 1, 3), "extension-undefined-literal"),
    (R.Extend(2, 1, -1), "extension-degenerate"),
])
def test_extension_rejections(ext, reason):
    cnf = Cnf(1, ((1,), (-1,)))
    lines = (R.Input(0), R.Input(1), ext, R.Resolve(0, 1, 1))
    with pytest.raises(R.ProofError) as exc:
        R.check_refutation(cnf, R.ResolutionProof(lines), allow_extension=True)
    assert exc.value.reason == reason


def test_cook_refutations_check():
    for n in range(1, 5):
        proof = er_refutation_php(n)
        assert proof.uses_extension == (n > 1)
        R.check_refutation(gen_php(n), proof, allow_extension=True)


def test_restriction_never_grows():
    cnf = gen_php(2)
    proof = R.refute_by_decision_tree(cnf)
    for var in range(1, cnf.var_count + 1):
        for value in (0, 1):
            rcnf, rproof = R.restrict_proof(cnf, proof, {var: value})
            R.check_refutation(rcnf, rproof)
            assert rproof.derivation_lines() <= proof.derivation_lines()


@given(clauses, st.dictionaries(st.integers(1, 4), st.integers(0, 1), max_size=3))
@settings(max_examples=60, deadline=None)
def test_restriction_property(cs, rho):
    cnf = Cnf(4, tuple(make_clause(c) for c in cs))
    if cnf_satisfiable(cnf.var_count, cnf.clauses):
        return
    proof = R.refute_by_decision_tree(cnf)
    rcnf, rproof = R.restrict_proof(cnf, proof, rho)
    R.check_refutation(rcnf, rproof)
    assert rproof.derivation_lines() <= proof.derivation_lines()


def test_minimal_php1_matches_enumeration():
    cnf = gen_php(1)
    bits, proof = R.minimal_refutation(cnf)
    assert bits == 10 == len(R.encode_body(cnf, proof))
    f = cnf_to_tautology(cnf)
    head = encode(f)
    assert check(RES, head + R.encode_body(cnf, proof))[0] is not None
    found = __import__("oracles").shortest_accepted(
        lambda w: check(RES, w)[0] is not None, head, 10)
    assert found == len(head) + 10


def test_minimal_on_small_sets():
    assert R.minimal_refutation(Cnf(1, ((1,), (-1,))))[0] == 3
    assert R.minimal_refutation(Cnf(1, ((),)))[0] == 0
    assert R.minimal_refutation(Cnf(1, ((1,),)), cap_bits=40) is None


def test_body_bits_for_lines():
    assert R.body_bits_for_lines(3, 2) == 10
    assert R.body_bits_for_lines(2, 1) == 3
