import pytest
from hypothesis import given, settings, strategies as st

from proofinfo import machine as M
from strategies import bitstrings


def test_constants():
    assert M.MACHINE.c_print == 3
    assert M.MACHINE.c_comp == 4
    assert M.MACHINE.c_pair == 6
    assert M.VERSION == "toyvm-1"


def test_basic_instructions():
    assert M.run("", "", 5).output == ""
    assert M.run("000", "", 5).steps == 1
    r = M.run("001" + "1011", "", 10)
    assert (r.output, r.steps) == ("1011", 5)
    r = M.run("011", "0110", 10)
    assert (r.output, r.steps) == ("0110", 5)
    r = M.run("111111", "01", 10)
    assert r.output == "01"
    assert M.run(M.rep_program(6), "", 100).output == "111111"


def test_timeout_is_not_output():
    r = M.run(M.print_program_for("1111"), "", 3)
    assert r.status == M.Status.TIMED_OUT
    assert not r.halted
    assert r.steps == 3


@given(bitstrings, bitstrings)
def test_print_program_bound(w, u):
    e = M.print_program_for(w)
    r = M.run(e, u, len(w) + 1)
    assert r.halted and r.output == w
    assert len(e) <= len(w) + 2 * M.B.ceil_log2(len(w) + 1) + M.MACHINE.c_print


@given(st.text(alphabet="01", max_size=14), bitstrings)
@settings(max_examples=300)
def test_halting_is_monotone_in_time(e, u):
    r = M.run(e, u, 1 << 12)
    if r.halted:
        assert r.steps >= len(r.output)
        again = M.run(e, u, max(r.steps, 1))
        assert again.halted and again.output == r.output
        if r.steps > 1:
            assert not M.run(e, u, r.steps - 1).halted


@given(st.text(alphabet="01", max_size=12), bitstrings, bitstrings)
def test_programs_without_reads_ignore_input(e, u1, u2):
    if "011" in e or "111" in e:
        return  # may contain a read instruction
    assert M.run(e, u1, 500) == M.run(e, u2, 500)


def test_composition():
    e1 = M.print_program_for("101")
    e2 = M.assemble("cpy\nlit 00")
    r = M.run(M.compose_programs(e1, e2), "", 100)
    assert r.output == "10100"


def test_loop():
    e = M.assemble("loop 3\nout 1\nout 0\nend\nout 1")
    assert M.run(e, "", 100).output == "1010101"


def test_assemble_round_trip():
    src = "cmp\n  rdb\n  rdb\nend\nloop 2\n  cpy\nend\nlit 01"
    e = M.assemble(src)
    assert M.assemble(M.disassemble(e)) == e


@pytest.mark.parametrize("src", ["jump 3", "out 2", "lit 0\nout 1", "end", "loop 0\nend"])
def test_assembly_errors(src):
    with pytest.raises(M.AssemblyError):
        M.assemble(src)


def test_program_json():
    e = "0011011"
    assert M.program_from_json(M.program_to_json(e)) == e


def test_enumeration_order():
    progs = list(M.enumerate_programs(3))
    assert len(progs) == 15
    assert progs[:3] == ["", "0", "1"]
