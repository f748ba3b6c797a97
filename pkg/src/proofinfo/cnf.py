"""Clause sets, DIMACS I/O and the definitional clausal form of a negated formula."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import (
    And, Const, Formula, FormulaError, Not, Or, Var,
    negation_normal_form, simplify_constants, var_count,
)

Clause = tuple[int, ...]


class CnfError(ValueError):
    pass


def make_clause(literals: Iterable[int]) -> Clause:
    """Canonical clause: duplicate literals merged, sorted by variable then sign."""
    lits = set(literals)
    if 0 in lits:
        raise CnfError("literal 0 is not allowed")
    for l in lits:
        if -l in lits:
            raise CnfError(f"tautological clause contains {l} and {-l}")
    return tuple(sorted(lits, key=lambda l: (abs(l), l > 0)))


def is_tautological(literals: Iterable[int]) -> bool:
    s = set(literals)
    return any(-l in s for l in s)


@dataclass(frozen=True)
class Cnf:
    var_count: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.var_count < 0:
            raise CnfError("var_count must be nonnegative")
        fixed = []
        for c in self.clauses:
            c = make_clause(c)
            for l in c:
                if abs(l) > self.var_count:
                    raise CnfError(f"literal {l} exceeds var_count {self.var_count}")
            fixed.append(c)
        object.__setattr__(self, "clauses", tuple(fixed))

    def satisfied_by(self, a: Sequence[int]) -> bool:
        return all(any((a[abs(l) - 1] == 1) == (l > 0) for l in c) for c in self.clauses)


def satisfiable_bruteforce(cnf: Cnf) -> tuple[bool, tuple[int, ...] | None]:
    """Exhaustive satisfiability check; returns (sat, witness)."""
    n = cnf.var_count
    for k in range(1 << n):
        a = tuple((k >> i) & 1 for i in range(n))
        if cnf.satisfied_by(a):
            return True, a
    return False, None


# -- DIMACS -----------------------------------------------------------------

def to_dimacs(cnf: Cnf, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {cnf.var_count} {len(cnf.clauses)}")
    for c in cnf.clauses:
        lines.append(" ".join(str(l) for l in c) + (" 0" if c else "0"))
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Cnf:
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"malformed header on line {lineno}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise CnfError(f"malformed header on line {lineno}") from None
            continue
        if header is None:
            raise CnfError("clause before header")
        for tok in line.split():
            try:
                l = int(tok)
            except ValueError:
                raise CnfError(f"bad literal {tok!r} on line {lineno}") from None
            if l == 0:
                clauses.append(current)
                current = []
            else:
                if abs(l) > header[0]:
                    raise CnfError(f"literal {l} out of range on line {lineno}")
                current.append(l)
    if header is None:
        raise CnfError("missing header")
    if current:
        raise CnfError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise CnfError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return Cnf(header[0], tuple(tuple(c) for c in clauses))


# -- negation to clauses ------------------------------------------------------

def negate_to_cnf(f: Formula) -> Cnf:
    """Equisatisfiable clauses for ~f.

    ~f is put in negation normal form with constant absorption. Top-level
    conjuncts that are literals or disjunctions of literals become clauses
    directly; every other subformula gets an auxiliary variable with full
    (two-sided) definitional clauses, so auxiliary values are forced by the
    original variables. Auxiliaries are numbered from var_count(f)+1 in the
    order their definitions are completed (children before parents, left to
    right), and structurally equal subformulas share one auxiliary.
    Tautological clauses are dropped, duplicate clauses are kept once.
    """
    n = var_count(f)
    g = negation_normal_form(simplify_constants(negation_normal_form(f, negate=True)))
    if isinstance(g, Const):
        return Cnf(n, () if g.value else ((),))

    clauses: list[Clause] = []
    seen: set[Clause] = set()
    aux: dict[Formula, int] = {}
    counter = [n]

    def emit(lits):
        if is_tautological(lits):
            return
        c = make_clause(lits)
        if c not in seen:
            seen.add(c)
            clauses.append(c)

    def literal_of(h: Formula) -> int | None:
        if isinstance(h, Var):
            return h.index
        if isinstance(h, Not) and isinstance(h.child, Var):
            return -h.child.index
        return None

    def define(h: Formula) -> int:
        l = literal_of(h)
        if l is not None:
            return l
        if h in aux:
            return aux[h]
        kids = [define(c) for c in h.children]
        counter[0] += 1
        a = counter[0]
        aux[h] = a
        if isinstance(h, And):
            for k in kids:
                emit([-a, k])
            emit([a] + [-k for k in kids])
        else:
            emit([-a] + kids)
            for k in kids:
                emit([a, -k])
        return a

    top = g.children if isinstance(g, And) else (g,)
    for conjunct in top:
        l = literal_of(conjunct)
        if l is not None:
            emit([l])
        elif isinstance(conjunct, Or):
            emit([define(c) for c in conjunct.children])
        else:
            raise FormulaError(f"unexpected node in NNF: {conjunct!r}")
    return Cnf(counter[0], tuple(clauses))


def cnf_to_tautology(cnf: Cnf) -> Formula:
    """The tautology ~(C1 & ... & Cm) for an unsatisfiable clause set.

    Unit clauses render as bare literals, longer clauses as disjunctions.
    """
    from .formula import conj, disj, lit

    parts = [disj([lit(l) for l in c]) for c in cnf.clauses]
    return Not(conj(parts))


def restrict_cnf(cnf: Cnf, rho: dict[int, int]) -> tuple[Cnf, list[int]]:
    """Apply a partial assignment; returns the restricted clauses and, for each
    surviving clause, the index of the original clause it came from."""
    kept: list[Clause] = []
    origin: list[int] = []
    for i, c in enumerate(cnf.clauses):
        if any(abs(l) in rho and (rho[abs(l)] == 1) == (l > 0) for l in c):
            continue
        kept.append(tuple(l for l in c if abs(l) not in rho))
        origin.append(i)
    return Cnf(cnf.var_count, tuple(kept)), origin
