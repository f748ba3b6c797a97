"""A frozen, deterministic DPLL whose failing runs serve as proofs.

Each round scans the clauses in index order. The first clause that is
falsified raises a conflict, otherwise the first unit clause propagates its
open literal, and the scan restarts. When neither exists and every clause is
satisfied the formula is satisfiable. Otherwise the smallest unassigned
variable is decided false. A conflict flips the most recent decision that
has not been flipped yet to true (undoing everything after it); with no such
decision left the clause set is unsatisfiable.

Trace bit encoding, m = number of clauses::

    decide     00
    propagate  01 <clause index in ceil(log2 m) bits>
    conflict   10 <clause index in ceil(log2 m) bits>
    backtrack  11

Decided and flipped variables are implied by the replay, so they are not
written.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import bits as B
from .cnf import Cnf

DPLL_VERSION = "dpll-v1"


@dataclass(frozen=True)
class Event:
    kind: str  # "decide" | "prop" | "conflict" | "backtrack"
    var: int = 0  # variable decided, propagated or flipped
    clause: int = -1  # reason clause for prop and conflict


@dataclass(frozen=True)
class DpllResult:
    sat: bool
    model: tuple[int, ...] | None
    trace: tuple[Event, ...]


class EventLimit(Exception):
    pass


def dpll_solve(cnf: Cnf, max_events: int | None = None) -> DpllResult:
    """Run the solver; raises EventLimit once more than max_events events occur."""
    n = cnf.var_count
    value: dict[int, int] = {}
    trail: list[tuple[int, str]] = []  # (var, "decision" | "flipped" | "implied")
    events: list[Event] = []
    clauses = cnf.clauses
    while True:
        if max_events is not None and len(events) > max_events:
            raise EventLimit
        hit = None
        all_sat = True
        for idx, c in enumerate(clauses):
            open_lit = None
            n_open = 0
            sat = False
            for l in c:
                v = value.get(abs(l))
                if v is None:
                    n_open += 1
                    open_lit = l
                elif (v == 1) == (l > 0):
                    sat = True
                    break
            if sat:
                continue
            all_sat = False
            if n_open == 0:
                hit = ("conflict", idx, 0)
                break
            if n_open == 1:
                hit = ("prop", idx, open_lit)
                break
        if hit is None:
            if all_sat:
                model = tuple(value.get(v, 0) for v in range(1, n + 1))
                return DpllResult(True, model, tuple(events))
            v = min(x for x in range(1, n + 1) if x not in value)
            value[v] = 0
            trail.append((v, "decision"))
            events.append(Event("decide", v))
            continue
        kind, idx, l = hit
        if kind == "prop":
            value[abs(l)] = 1 if l > 0 else 0
            trail.append((abs(l), "implied"))
            events.append(Event("prop", abs(l), idx))
            continue
        events.append(Event("conflict", 0, idx))
        while trail and trail[-1][1] != "decision":
            value.pop(trail.pop()[0])
        if not trail:
            return DpllResult(False, None, tuple(events))
        v, _ = trail.pop()
        value[v] = 1
        trail.append((v, "flipped"))
        events.append(Event("backtrack", v))


def encode_trace(cnf: Cnf, trace: Sequence[Event]) -> str:
    w = B.ceil_log2(len(cnf.clauses))
    out = []
    for e in trace:
        if e.kind == "decide":
            out.append("00")
        elif e.kind == "prop":
            out.append("01" + B.fixed(e.clause, w))
        elif e.kind == "conflict":
            out.append("10" + B.fixed(e.clause, w))
        elif e.kind == "backtrack":
            out.append("11")
        else:
            raise ValueError(f"unknown event {e.kind!r}")
    return "".join(out)


def trace_to_text(trace: Sequence[Event]) -> str:
    lines = []
    for e in trace:
        if e.kind == "decide":
            lines.append(f"decide {e.var}=0")
        elif e.kind == "prop":
            lines.append(f"prop {e.var} by {e.clause}")
        elif e.kind == "conflict":
            lines.append(f"conflict {e.clause}")
        else:
            lines.append(f"backtrack {e.var}=1")
    lines.append("unsat" if trace and trace[-1].kind == "conflict" else "open")
    return "\n".join(lines) + "\n"


def refutation_trace(cnf: Cnf) -> tuple[Event, ...] | None:
    """The UNSAT trace, or None when the clauses are satisfiable."""
    res = dpll_solve(cnf)
    return None if res.sat else res.trace
