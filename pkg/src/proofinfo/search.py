"""Universal proof search over machine programs, and related transforms.

The input handed to every program is the formula code of the target, and
the same string is the condition in Kt(w | target).

Step accounting: program searchers count machine steps. The level search
additionally charges ``len(candidate) + 1`` host steps for every distinct
candidate it verifies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Generator, Iterable, Iterator, Sequence

from . import bits as B
from . import machine as M
from .formula import Formula, encode, render, truth_mask, var_count, assignment_from_index
from .kt import KtSearcher, level_of
from .systems import ENCODING_VERSION, ProofSystemId, Reject, check


def _verifier(system) -> Callable[[str], Formula | None]:
    if isinstance(system, ProofSystemId):
        return lambda w: check(system, w)[0]
    return system.check


class _VerifyCache:
    def __init__(self, system, target: Formula):
        self.check = _verifier(system)
        self.target = target
        self.seen: dict[str, bool] = {}
        self.cost = 0

    def accepts(self, w: str) -> bool:
        hit = self.seen.get(w)
        if hit is None:
            self.cost += len(w) + 1
            hit = self.check(w) == self.target
            self.seen[w] = hit
        return hit


# -- level search -------------------------------------------------------------------

@dataclass(frozen=True)
class LevelSearchResult:
    proof: str | None
    level: int | None  # i_P when found
    lower_bound: int  # i_P >= lower_bound (equals level when found)
    program: str | None
    time: int | None  # least t for the found program
    host_steps: int
    level_cap: int

    @property
    def exact(self) -> bool:
        return self.proof is not None


def info_search_bp(system, target: Formula, level_cap: int = 16) -> LevelSearchResult:
    """Try every (e, t = 2^(i-|e|)) at level i = 0, 1, ..., level_cap.

    The first proof found is returned with its level, which is then the
    least Kt(w | target) over all proofs w. On exhaustion the result carries
    the lower bound level_cap + 1.
    """
    if level_cap < 0:
        raise ValueError("level_cap must be >= 0")
    u = encode(target)
    runner = KtSearcher(u)
    verifier = _VerifyCache(system, target)
    for i in range(level_cap + 1):
        for length in range(i + 1):
            t = 1 << (i - length)
            for e in B.strings_of_length(length):
                ok, s, out = runner.outcome(e, t)
                if ok and verifier.accepts(out):
                    t_min = max(s, 1)
                    return LevelSearchResult(out, i, i, e, t_min,
                                             runner.vm_steps + verifier.cost, level_cap)
    return LevelSearchResult(None, None, level_cap + 1, None, None,
                             runner.vm_steps + verifier.cost, level_cap)


@dataclass(frozen=True)
class IpValue:
    value: int  # exact value, or a proven lower bound when not exact
    exact: bool


def i_p(system, target: Formula, level_cap: int = 16) -> IpValue:
    r = info_search_bp(system, target, level_cap)
    return IpValue(r.lower_bound, r.exact)


# -- dovetailing search -------------------------------------------------------------

@dataclass(frozen=True)
class LevinResult:
    proof: str | None
    program: str | None
    index: int | None  # 1-based position of the program in the enumeration
    round: int | None
    host_steps: int


def program_sequence(planted: Sequence[str] = ()) -> Iterator[str]:
    """Planted programs first, then every bitstring in length-lex order."""
    yield from planted
    yield from B.length_lex(1 << 30)


def levin_search_ap(system, target: Formula, step_cap: int = 10_000_000,
                    planted: Sequence[str] = ()) -> LevinResult:
    """Round i runs the first i programs for i steps each; stops at the first
    output that the verifier accepts as a proof of ``target``."""
    u = encode(target)
    verifier = _VerifyCache(system, target)
    programs: list[str] = []
    source = program_sequence(planted)
    halted: dict[int, tuple[int, str]] = {}  # index -> (steps, output)
    steps = 0
    for i in itertools.count(1):
        programs.append(next(source))
        for idx in range(i):
            known = halted.get(idx)
            if known is not None:
                s, out = known
                if s > i:
                    continue
            else:
                res = M.run(programs[idx], u, i)
                steps += res.steps
                if not res.halted:
                    if steps > step_cap:
                        return LevinResult(None, None, None, None, steps)
                    continue
                halted[idx] = (res.steps, res.output)
                out = res.output
            if verifier.accepts(out):
                return LevinResult(out, programs[idx], idx + 1, i, steps + verifier.cost)
            if steps > step_cap:
                return LevinResult(None, None, None, None, steps)
        if steps > step_cap:
            return LevinResult(None, None, None, None, steps)
    raise AssertionError("unreachable")


# -- reports -----------------------------------------------------------------------------

REPORT_VERSION = "search-report-1"


@dataclass(frozen=True)
class SearchReport:
    formula: Formula
    system: str
    proof: str | None
    level: int
    exact: bool
    s_p: int | None
    steps_a: int | None
    steps_b: int
    level_cap: int
    step_cap: int | None
    machine_version: str = M.VERSION

    def to_json(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "formula": render(self.formula),
            "system": self.system,
            "proof": None if self.proof is None else {"hex": B.to_hex(self.proof), "bitlen": len(self.proof)},
            "iP": {"value": self.level, "exact": self.exact},
            "sP": self.s_p,
            "stepsA": self.steps_a,
            "stepsB": self.steps_b,
            "levelCap": self.level_cap,
            "stepCap": self.step_cap,
            "machineVersion": self.machine_version,
            "encodingVersion": ENCODING_VERSION,
        }


def search_report(system: ProofSystemId, target: Formula, level_cap: int = 16,
                  step_cap: int | None = None, s_p: int | None = None) -> SearchReport:
    b = info_search_bp(system, target, level_cap)
    steps_a = None
    if step_cap is not None:
        a = levin_search_ap(system, target, step_cap)
        steps_a = a.host_steps if a.proof is not None else None
    return SearchReport(target, system.name, b.proof, b.lower_bound, b.exact, s_p,
                        steps_a, b.host_steps, level_cap, step_cap)


# -- searchers as step-counted procedures -----------------------------------------------------
#
# A searcher maps a formula to a generator that yields once per unit of
# work and returns its output string (or None when it gives up).

Searcher = Callable[[Formula], Generator[None, None, "str | None"]]


def program_searcher(e: str, max_steps: int = 1 << 20) -> Searcher:
    """The machine program e used as a searcher; one tick per machine step."""

    def search(f: Formula):
        res = M.run(e, encode(f), max_steps)
        for _ in range(res.steps):
            yield
        return res.output if res.halted else None

    return search


def level_searcher(system, level_cap: int = 16) -> Searcher:
    """The level search as a searcher; ticks are its host steps."""

    def search(f: Formula):
        r = info_search_bp(system, f, level_cap)
        for _ in range(r.host_steps):
            yield
        return r.proof

    return search


@dataclass(frozen=True)
class TotalResult:
    kind: str  # "proof" | "falsified" | "gave-up"
    proof: str | None
    assignment: tuple[int, ...] | None
    steps: int
    inner_steps: int


def totalize(searcher: Searcher) -> Callable[[Formula], TotalResult]:
    """Interleave the searcher with a scan for a falsifying assignment.

    Odd steps check one assignment (in index order), even steps advance the
    searcher. Stops at whichever finishes first; once the scan has found no
    falsifying assignment only the searcher keeps running.
    """

    def run(f: Formula) -> TotalResult:
        n = var_count(f)
        mask = truth_mask(f, n)
        inner = searcher(f)
        k = 0
        steps = inner_steps = 0
        scanning = True
        while True:
            if scanning:
                steps += 1
                if not (mask >> k) & 1:
                    return TotalResult("falsified", None, assignment_from_index(k, n), steps, inner_steps)
                k += 1
                scanning = k < (1 << n)
            steps += 1
            try:
                next(inner)
                inner_steps += 1
            except StopIteration as stop:
                out = stop.value
                kind = "proof" if out is not None else "gave-up"
                return TotalResult(kind, out, None, steps, inner_steps)

    return run


@dataclass(frozen=True)
class DeciderRun:
    answer: int
    steps: int
    record: str = ""


def decider_from_search(searcher: Searcher, system) -> Callable[[Formula], DeciderRun]:
    """Decide tautologyhood: run the totalized searcher and check its output."""
    total = totalize(searcher)
    checker = _verifier(system)

    def decide(f: Formula) -> DeciderRun:
        r = total(f)
        if r.kind != "proof":
            return DeciderRun(0, r.steps)
        ok = checker(r.proof) == f
        return DeciderRun(1 if ok else 0, r.steps + len(r.proof) + 1)

    return decide


# -- proof systems from deciders ---------------------------------------------------------

class Decider:
    """A deterministic decider that also emits a replayable record of its run."""

    name = "decider"

    def run(self, f: Formula) -> DeciderRun:
        raise NotImplementedError


class BruteForceDecider(Decider):
    """Evaluates every assignment in index order; the record has one bit per
    evaluation and the run stops at the first falsifying assignment."""

    name = "bruteforce"

    def run(self, f: Formula) -> DeciderRun:
        n = var_count(f)
        mask = truth_mask(f, n)
        record = []
        for k in range(1 << n):
            bit = (mask >> k) & 1
            record.append(str(bit))
            if not bit:
                return DeciderRun(0, k + 1, "".join(record))
        return DeciderRun(1, 1 << n, "".join(record))


class DpllDecider(Decider):
    """The frozen DPLL on the negated formula; the record is its encoded trace."""

    name = "dpll"

    def run(self, f: Formula) -> DeciderRun:
        from .cnf import negate_to_cnf
        from .dpll import dpll_solve, encode_trace

        cnf = negate_to_cnf(f)
        res = dpll_solve(cnf)
        return DeciderRun(0 if res.sat else 1, len(res.trace), encode_trace(cnf, res.trace))


@dataclass
class RecordSystem:
    """Proofs are accepting records of a decider: w = code(f) + record."""

    decider: Decider
    calls: int = field(default=0, compare=False)

    @property
    def name(self) -> str:
        return f"Records({self.decider.name})"

    def verify(self, w: str) -> Formula:
        from .formula import decode_prefix

        self.calls += 1
        try:
            f, pos = decode_prefix(w, 0)
        except (B.DecodeError, ValueError) as exc:
            raise Reject("bad-formula", str(exc)) from None
        r = self.decider.run(f)
        if r.answer != 1:
            raise Reject("not-accepting")
        if r.record != w[pos:]:
            raise Reject("record-divergence")
        return f

    def check(self, w: str) -> Formula | None:
        try:
            return self.verify(w)
        except Reject:
            return None


def system_from_decider(decider: Decider) -> tuple[RecordSystem, Searcher]:
    """The record proof system of a decider and the searcher that emits records."""
    system = RecordSystem(decider)

    def search(f: Formula):
        r = decider.run(f)
        for _ in range(r.steps):
            yield
        return encode(f) + r.record if r.answer == 1 else None

    return system, search


def certificate_levels(searchers: Iterable[str], system, formulas: Iterable[Formula],
                       max_steps: int = 1 << 16) -> list[tuple[str, Formula, int | None]]:
    """For each (program, formula): the level |e| + ceil(log2 t) of a successful
    run that prints a valid proof, or None when the run fails."""
    out = []
    checker = _verifier(system)
    for f in formulas:
        for e in searchers:
            res = M.run(e, encode(f), max_steps)
            ok = res.halted and checker(res.output) == f
            out.append((e, f, level_of(e, max(res.steps, 1)) if ok else None))
    return out
