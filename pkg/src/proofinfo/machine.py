"""A small deterministic universal machine U(e, u, 1^t) with exact step accounting.

Every bitstring is a program. Instructions are a 3-bit opcode followed by
operands; a block (the whole program, a loop body, or the first stage of a
composition) is executed left to right until it ends. A truncated opcode or
operand halts the current machine at no cost.

====  =====  ==============================================================
code  name   effect (step cost)
====  =====  ==============================================================
000   HALT   halt the current machine (1)
001   LIT    emit the remaining bits of the block, then halt (1 + bits)
010   REP    remaining bits r of the block give k = int("1"+r, 2) - 1;
             emit k ones, then halt (1 + k)
011   CPY    emit the unread rest of the input (1 + bits copied)
100   OUT b  emit the single operand bit b (1)
101   LOOP   gamma(k) gamma(L+1) body[L]: run the L-bit body k times
             (1, plus 1 per iteration, plus the body's own steps)
110   CMP    gamma(m+1) first[m]: run ``first`` as a fresh machine on the
             current input, then continue this block with its output as
             the new input, read head reset (1 plus the stage's steps)
111   RDB    emit the next input bit, or halt if the input is exhausted (1)
====  =====  ==============================================================

HALT inside a loop body halts the whole machine that owns the loop; a halt
inside the first stage of CMP only ends that stage. Every emitted bit costs
at least one step, so ``steps >= len(output)`` on every halting run.
Timeouts are reported as their own status; they never count as output.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Iterator

from . import bits as B

VERSION = "toyvm-1"

HALT, LIT, REP, CPY, OUT, LOOP, CMP, RDB = range(8)
MNEMONICS = ["halt", "lit", "rep", "cpy", "out", "loop", "cmp", "rdb"]


class Status(str, Enum):
    HALTED = "Halted"
    TIMED_OUT = "TimedOut"


@dataclass(frozen=True)
class ExecOutcome:
    status: Status
    output: str
    steps: int

    @property
    def halted(self) -> bool:
        return self.status is Status.HALTED


class _Halt(Exception):
    pass


class _Timeout(Exception):
    pass


class _Run:
    __slots__ = ("code", "limit", "steps")

    def __init__(self, code: str, limit: int):
        self.code = code
        self.limit = limit
        self.steps = 0

    def charge(self, cost: int) -> None:
        self.steps += cost
        if self.steps > self.limit:
            self.steps = self.limit
            raise _Timeout

    def machine(self, lo: int, hi: int, inp: str, out: list) -> None:
        """Run the block [lo, hi) as a machine; halts end only this machine."""
        state = [inp, 0]
        try:
            self.block(lo, hi, state, out)
        except _Halt:
            pass

    def block(self, lo: int, hi: int, state: list, out: list) -> None:
        code = self.code
        pc = lo
        while pc < hi:
            if pc + 3 > hi:
                raise _Halt
            op = int(code[pc:pc + 3], 2)
            pc += 3
            if op == OUT:
                if pc >= hi:
                    raise _Halt
                self.charge(1)
                out.append(code[pc])
                pc += 1
            elif op == RDB:
                inp, head = state
                self.charge(1)
                if head >= len(inp):
                    raise _Halt
                out.append(inp[head])
                state[1] = head + 1
            elif op == CPY:
                inp, head = state
                rest = inp[head:]
                self.charge(1 + len(rest))
                out.append(rest)
                state[1] = len(inp)
            elif op == LIT:
                payload = code[pc:hi]
                self.charge(1 + len(payload))
                out.append(payload)
                raise _Halt
            elif op == REP:
                k = int("1" + code[pc:hi], 2) - 1
                self.charge(1 + k)
                out.append("1" * k)
                raise _Halt
            elif op == HALT:
                self.charge(1)
                raise _Halt
            elif op == LOOP:
                try:
                    k, pc = B.read_gamma(code, pc, hi)
                    body_len, pc = B.read_gamma(code, pc, hi)
                except B.DecodeError:
                    raise _Halt from None
                body_len -= 1
                if pc + body_len > hi:
                    raise _Halt
                self.charge(1)
                body_lo, body_hi = pc, pc + body_len
                pc = body_hi
                for _ in range(k):
                    self.charge(1)
                    if body_len:
                        self.block(body_lo, body_hi, state, out)
            else:  # CMP
                try:
                    m, pc = B.read_gamma(code, pc, hi)
                except B.DecodeError:
                    raise _Halt from None
                m -= 1
                if pc + m > hi:
                    raise _Halt
                self.charge(1)
                stage: list = []
                self.machine(pc, pc + m, state[0], stage)
                pc += m
                state[0] = "".join(stage)
                state[1] = 0


def run(e: str, u: str, t: int) -> ExecOutcome:
    """Simulate program e on input u for at most t steps."""
    if t < 1:
        raise ValueError("time bound must be >= 1")
    r = _Run(e, t)
    out: list[str] = []
    try:
        r.machine(0, len(e), u, out)
    except _Timeout:
        return ExecOutcome(Status.TIMED_OUT, "".join(out), t)
    return ExecOutcome(Status.HALTED, "".join(out), r.steps)


# -- constructions ----------------------------------------------------------------

def op(code: int) -> str:
    return format(code, "03b")


def print_program_for(w: str) -> str:
    """An input-ignoring program that emits exactly w in |w|+1 steps."""
    return op(LIT) + w


def rep_program(k: int) -> str:
    """An input-ignoring program that emits 1^k in k+1 steps; length 3 + floor(log2(k+1))."""
    return op(REP) + format(k + 1, "b")[1:]


def compose_programs(e1: str, e2: str) -> str:
    """Program that runs e1 on the input, then e2 on e1's output."""
    return op(CMP) + B.gamma(len(e1) + 1) + e1 + e2


def copy_program() -> str:
    return op(CPY)


def enumerate_programs(max_len: int) -> Iterator[str]:
    """Every program of length <= max_len, in length-lexicographic order."""
    return B.length_lex(max_len)


# -- machine constants ----------------------------------------------------------

@dataclass(frozen=True)
class MachineSpec:
    version_tag: str
    c_print: int
    c_ignore: int
    c_comp: int
    c_pair: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def measure_constants() -> MachineSpec:
    """Derive the machine constants from the constructions themselves.

    c_print: |print_program_for("")|.
    c_comp: |compose_programs("", "")| - 2*ceil(log2(1)), the additive term in
        |compose(e1,e2)| <= |e1| + |e2| + 2*ceil(log2(|e1|+1)) + c_comp.
    c_pair: c_comp + 2, the additive term for composed certificate levels;
        the extra 2 covers ceil(log2(1 + t1 + t2)) <= ceil(log2 t1) + ceil(log2 t2) + 2.
    c_ignore: bound on |Kt(w|"") - Kt(w|"0")|; prefixing a program with a
        composition whose first stage is empty turns any input into "", which
        costs |compose("", e)| - |e| bits plus one step.
    """
    c_print = len(print_program_for(""))
    c_comp = len(compose_programs("", ""))
    c_ignore = c_comp + 1
    return MachineSpec(VERSION, c_print, c_ignore, c_comp, c_comp + 2)


MACHINE = measure_constants()


# -- program serialization -------------------------------------------------------

def program_to_json(e: str) -> dict:
    return {"hex": B.to_hex(e), "bitlen": len(e)}


def program_from_json(obj: dict) -> str:
    return B.from_hex(obj["hex"], int(obj["bitlen"]))


# -- assembler --------------------------------------------------------------------

class AssemblyError(ValueError):
    pass


_BITS = re.compile(r"^[01]*$")


def assemble(source: str) -> str:
    """Assemble the mnemonic form into a program.

    One instruction per line; ``;`` or ``#`` start comments::

        halt | cpy | rdb
        out 0|1
        lit <bits>           (must end its block)
        rep <k>              (must end its block)
        bits <bits>          raw bits, copied verbatim
        loop <k> ... end
        cmp ... end          first stage; the rest of the block is stage two
    """
    lines = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = re.split(r"[;#]", raw, maxsplit=1)[0].strip()
        if line:
            lines.append((lineno, line.split()))
    code, pos = _assemble_block(lines, 0, top=True)
    return code


def _assemble_block(lines, i, top):
    out = []
    terminal = False
    while i < len(lines):
        lineno, parts = lines[i]
        name, args = parts[0].lower(), parts[1:]
        if name == "end":
            if top:
                raise AssemblyError(f"line {lineno}: unmatched 'end'")
            return "".join(out), i + 1
        if terminal:
            raise AssemblyError(f"line {lineno}: instruction after a block-ending lit/rep")
        i += 1
        if name in ("halt", "cpy", "rdb"):
            _arity(lineno, name, args, 0)
            out.append(op(MNEMONICS.index(name)))
        elif name == "out":
            _arity(lineno, name, args, 1)
            if args[0] not in ("0", "1"):
                raise AssemblyError(f"line {lineno}: out operand must be 0 or 1")
            out.append(op(OUT) + args[0])
        elif name == "lit":
            payload = args[0] if args else ""
            if len(args) > 1 or not _BITS.match(payload):
                raise AssemblyError(f"line {lineno}: lit takes one bitstring")
            out.append(op(LIT) + payload)
            terminal = True
        elif name == "bits":
            payload = "".join(args)
            if not _BITS.match(payload):
                raise AssemblyError(f"line {lineno}: bits takes a bitstring")
            out.append(payload)
        elif name == "rep":
            _arity(lineno, name, args, 1)
            k = _int(lineno, args[0])
            if k < 0:
                raise AssemblyError(f"line {lineno}: rep count out of range")
            out.append(rep_program(k))
            terminal = True
        elif name == "loop":
            _arity(lineno, name, args, 1)
            k = _int(lineno, args[0])
            if k < 1:
                raise AssemblyError(f"line {lineno}: loop count must be >= 1")
            body, i = _assemble_block(lines, i, top=False)
            out.append(op(LOOP) + B.gamma(k) + B.gamma(len(body) + 1) + body)
        elif name == "cmp":
            _arity(lineno, name, args, 0)
            first, i = _assemble_block(lines, i, top=False)
            out.append(op(CMP) + B.gamma(len(first) + 1) + first)
        else:
            raise AssemblyError(f"line {lineno}: unknown mnemonic {name!r}")
    if not top:
        raise AssemblyError("missing 'end'")
    return "".join(out), i


def _arity(lineno, name, args, n):
    if len(args) != n:
        raise AssemblyError(f"line {lineno}: {name} takes {n} operand(s)")


def _int(lineno, text):
    try:
        return int(text)
    except ValueError:
        raise AssemblyError(f"line {lineno}: expected an integer, got {text!r}") from None


def disassemble(e: str) -> str:
    """Best-effort listing of a program (truncated tails are shown as raw bits)."""
    lines: list[str] = []
    _disasm(e, 0, len(e), 0, lines)
    return "\n".join(lines)


def _disasm(e, lo, hi, depth, lines):
    pad = "  " * depth
    pc = lo
    while pc < hi:
        if pc + 3 > hi:
            lines.append(f"{pad}bits {e[pc:hi]}")
            return
        code = int(e[pc:pc + 3], 2)
        pc += 3
        name = MNEMONICS[code]
        if code in (HALT, CPY, RDB):
            lines.append(pad + name)
        elif code == OUT:
            if pc >= hi:
                lines.append(f"{pad}bits {e[pc - 3:hi]}")
                return
            lines.append(f"{pad}out {e[pc]}")
            pc += 1
        elif code == LIT:
            lines.append(f"{pad}lit {e[pc:hi]}")
            return
        elif code == REP:
            lines.append(f"{pad}rep {int('1' + e[pc:hi], 2) - 1}")
            return
        else:
            start = pc - 3
            try:
                if code == LOOP:
                    k, pc = B.read_gamma(e, pc, hi)
                    n, pc = B.read_gamma(e, pc, hi)
                else:
                    n, pc = B.read_gamma(e, pc, hi)
            except B.DecodeError:
                lines.append(f"{pad}bits {e[start:hi]}")
                return
            n -= 1
            if pc + n > hi:
                lines.append(f"{pad}bits {e[start:hi]}")
                return
            lines.append(f"{pad}loop {k}" if code == LOOP else f"{pad}cmp")
            _disasm(e, pc, pc + n, depth + 1, lines)
            lines.append(f"{pad}end")
            pc += n
