import pytest

from proofinfo import machine as M
from proofinfo.formula import encode, parse
from proofinfo.kt import kt_table
from proofinfo.search import (
    BruteForceDecider, DpllDecider, certificate_levels, decider_from_search, i_p,
    info_search_bp, level_searcher, levin_search_ap, program_searcher, search_report,
    system_from_decider, totalize,
)
from proofinfo.systems import PS, RES, TT, check
from oracles import is_tautology

TAUT = parse("(x1 | ~x1)")
FORMULAS = ["(x1 | ~x1)", "T", "(T | x1)", "~F", "(~x1 | x1 | x2)"]


def _oracle_level(system, f, budget):
    table = kt_table(encode(f), budget)
    levels = [c.level for w, c in table.items() if check(system, w)[0] == f]
    return min(levels, default=None)


@pytest.mark.parametrize("system", [TT, RES, PS], ids=lambda s: s.name)
@pytest.mark.parametrize("text", FORMULAS)
def test_level_search_matches_exhaustive_table(system, text):
    f = parse(text)
    r = info_search_bp(system, f, 14)
    expected = _oracle_level(system, f, 14)
    assert r.level == expected
    if r.exact:
        assert check(system, r.proof)[0] == f
        assert r.level == len(r.program) + (max(r.time, 1) - 1).bit_length()


def test_known_levels():
    assert i_p(TT, TAUT).value == 11
    assert i_p(RES, TAUT).value == 13
    assert i_p(PS, TAUT).value == 17


def test_exhausted_level_search_reports_bound():
    r = info_search_bp(RES, TAUT, 5)
    assert not r.exact and r.lower_bound == 6
    assert i_p(RES, TAUT, 5).exact is False


def test_levin_search_finds_planted_program():
    planted = M.assemble("cpy\nlit 11")
    a = levin_search_ap(TT, TAUT, 10_000, planted=[planted])
    assert a.index == 1 and a.program == planted
    assert check(TT, a.proof)[0] == TAUT


def test_levin_search_unplanted():
    a = levin_search_ap(TT, TAUT, 2_000_000)
    assert a.index == 181
    assert check(TT, a.proof)[0] == TAUT


def test_levin_search_gives_up():
    a = levin_search_ap(RES, parse("(x1 | ~x1 | x2)"), 1000)
    assert a.proof is None and a.host_steps > 1000


def test_report_json():
    rep = search_report(TT, TAUT, 14, step_cap=2_000_000, s_p=12).to_json()
    assert rep["iP"] == {"value": 11, "exact": True}
    assert rep["sP"] == 12 and rep["stepsA"] > 0


def test_totalize_outcomes():
    total = totalize(program_searcher(M.assemble("cpy\nlit 11")))
    r = total(TAUT)
    assert r.kind == "proof" and check(TT, r.proof)[0] == TAUT
    r = total(parse("x1"))
    assert r.kind == "falsified" and r.assignment == (0,)
    r = totalize(program_searcher("", 10))(TAUT)
    assert r.kind == "proof" and r.proof == ""


def test_decider_from_level_search():
    decide = decider_from_search(level_searcher(TT, 12), TT)
    for text in ["(x1 | ~x1)", "x1", "(x1 & ~x1)", "T"]:
        f = parse(text)
        assert decide(f).answer == int(is_tautology(f))


@pytest.mark.parametrize("decider", [BruteForceDecider(), DpllDecider()], ids=lambda d: d.name)
def test_record_systems(decider):
    system, searcher = system_from_decider(decider)
    for text in ["(x1 | ~x1)", "((x1 & x2) | ~x1 | ~x2)", "x1", "(x1 & x2)"]:
        f = parse(text)
        r = totalize(searcher)(f)
        if is_tautology(f):
            assert r.kind == "proof"
            assert system.check(r.proof) == f
            assert system.check(r.proof + "0") is None
        else:
            assert r.kind in ("falsified", "gave-up")
    assert system.check("") is None


def test_certificate_levels_bound_information():
    f = TAUT
    levels = certificate_levels([M.assemble("cpy\nlit 11")], TT, [f])
    (_, _, level), = levels
    assert level is not None and level >= i_p(TT, f).value
    assert certificate_levels(["000"], TT, [f])[0][2] is None
