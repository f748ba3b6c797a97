"""Resolution and extended-resolution refutations of clause sets.

A refutation is a list of lines. Every line contributes clause *slots* that
later lines cite by index:

* ``Input(i)``: one slot, clause i of the target.
* ``Resolve(j, k, pivot)``: one slot, the resolvent of slots j and k on pivot.
* ``Extend(v, l1, l2)``: three slots, the definition clauses of v == l1 & l2:
  ``(-v | l1)``, ``(-v | l2)``, ``(v | -l1 | -l2)``. v must be the next
  fresh variable and l1, l2 must be literals over distinct existing variables.

A refutation is accepted when its last slot is the empty clause (or, with
no derivation lines at all, when one of the inputs is empty).

Bit encoding (inputs are implicit: the first m slots are the m target
clauses in order; ``S`` is the number of slots so far, ``V`` the number of
variables so far)::

    resolve   0 j k        j, k in ceil(log2 S) bits each; pivot inferred
    extend    1 s1 a1 s2 a2   sign bit (1 = negative) and |l|-1 in ceil(log2 V) bits

Text format, one line per step, ``i`` is the first slot of the line::

    i: <lits> <- input <k>
    i: <lits> <- <j> <k> <pivot>
    i: ext <v> := <l1> & <l2>
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from . import bits as B
from .cnf import Clause, Cnf, is_tautological, make_clause, restrict_cnf, satisfiable_bruteforce


class ProofError(ValueError):
    """A rejected proof; ``reason`` is a short machine-readable code."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


@dataclass(frozen=True)
class Input:
    index: int


@dataclass(frozen=True)
class Resolve:
    left: int
    right: int
    pivot: int


@dataclass(frozen=True)
class Extend:
    var: int
    l1: int
    l2: int


Line = Union[Input, Resolve, Extend]


@dataclass(frozen=True)
class ResolutionProof:
    lines: tuple[Line, ...]

    @property
    def uses_extension(self) -> bool:
        return any(isinstance(l, Extend) for l in self.lines)

    def derivation_lines(self) -> int:
        return sum(1 for l in self.lines if not isinstance(l, Input))


def resolve(c1: Sequence[int], c2: Sequence[int], pivot: int) -> Clause:
    """Resolvent of c1 (containing pivot) and c2 (containing -pivot)."""
    if pivot <= 0 or pivot not in c1 or -pivot not in c2:
        raise ProofError("bad-pivot", f"pivot {pivot} not positive in {c1} and negative in {c2}")
    lits = [l for l in c1 if l != pivot] + [l for l in c2 if l != -pivot]
    if is_tautological(lits):
        raise ProofError("tautological-resolvent", f"{c1} and {c2} on {pivot}")
    return make_clause(lits)


def clash_variables(c1: Iterable[int], c2: Iterable[int]) -> list[int]:
    s2 = set(c2)
    return sorted(abs(l) for l in c1 if -l in s2)


def resolve_any(c1: Sequence[int], c2: Sequence[int], pivot: int) -> Clause:
    """Resolve in whichever orientation the pivot appears."""
    if pivot in c1:
        return resolve(c1, c2, pivot)
    return resolve(c2, c1, pivot)


def extension_clauses(v: int, l1: int, l2: int) -> tuple[Clause, Clause, Clause]:
    return make_clause([-v, l1]), make_clause([-v, l2]), make_clause([v, -l1, -l2])


def check_refutation(cnf: Cnf, proof: ResolutionProof, allow_extension: bool = False) -> list[Clause]:
    """Check every line; returns the clause of every slot or raises ProofError."""
    slots: list[Clause] = []
    nvars = cnf.var_count
    for n, line in enumerate(proof.lines):
        if isinstance(line, Input):
            if not 0 <= line.index < len(cnf.clauses):
                raise ProofError("bad-input", f"line {n} cites clause {line.index}")
            slots.append(cnf.clauses[line.index])
        elif isinstance(line, Resolve):
            if not (0 <= line.left < len(slots) and 0 <= line.right < len(slots)):
                raise ProofError("bad-reference", f"line {n}")
            slots.append(resolve_any(slots[line.left], slots[line.right], line.pivot))
        elif isinstance(line, Extend):
            if not allow_extension:
                raise ProofError("extension-not-allowed", f"line {n}")
            if line.var != nvars + 1:
                raise ProofError("extension-not-fresh", f"line {n} introduces {line.var}")
            for l in (line.l1, line.l2):
                if l == 0 or abs(l) > nvars:
                    raise ProofError("extension-undefined-literal", f"line {n}")
            if abs(line.l1) == abs(line.l2):
                raise ProofError("extension-degenerate", f"line {n}")
            nvars += 1
            slots.extend(extension_clauses(line.var, line.l1, line.l2))
        else:
            raise ProofError("bad-line", repr(line))
    if not slots:
        raise ProofError("no-empty-clause", "empty proof")
    if slots[-1] != ():
        if proof.derivation_lines() == 0 and () in slots:
            return slots
        raise ProofError("no-empty-clause", "last slot is not the empty clause")
    return slots


# -- bit encoding --------------------------------------------------------------

def encode_body(cnf: Cnf, proof: ResolutionProof) -> str:
    m = len(cnf.clauses)
    lines = proof.lines
    if tuple(lines[:m]) != tuple(Input(i) for i in range(m)):
        raise ValueError("bit encoding needs the inputs as the first m lines, in order")
    out = []
    slots = m
    nvars = cnf.var_count
    for line in lines[m:]:
        if isinstance(line, Input):
            raise ValueError("inputs after the prefix cannot be bit-encoded")
        if isinstance(line, Resolve):
            w = B.ceil_log2(slots)
            out.append("0" + B.fixed(line.left, w) + B.fixed(line.right, w))
            slots += 1
        else:
            w = B.ceil_log2(nvars)
            for l in (line.l1, line.l2):
                out.append(("1" if l < 0 else "0") + B.fixed(abs(l) - 1, w))
            out[-2] = "1" + out[-2]
            slots += 3
            nvars += 1
    return "".join(out)


def decode_body(cnf: Cnf, bits: str, pos: int = 0, allow_extension: bool = True) -> ResolutionProof:
    """Decode lines from bits[pos:]; pivots are recovered from the clauses.

    The decoded lines are structurally well-formed but not yet checked.
    """
    m = len(cnf.clauses)
    lines: list[Line] = [Input(i) for i in range(m)]
    slots: list[Clause] = list(cnf.clauses)
    nvars = cnf.var_count
    n = len(bits)
    while pos < n:
        tag = bits[pos]
        pos += 1
        if tag == "0":
            if not slots:
                raise ProofError("bad-reference", "no clauses to cite")
            w = B.ceil_log2(len(slots))
            try:
                j, pos = B.read_fixed(bits, pos, w)
                k, pos = B.read_fixed(bits, pos, w)
            except B.DecodeError:
                raise ProofError("truncated", "resolve line") from None
            if j >= len(slots) or k >= len(slots):
                raise ProofError("bad-reference", f"slot {max(j, k)} of {len(slots)}")
            clash = clash_variables(slots[j], slots[k])
            if len(clash) != 1:
                raise ProofError("bad-pivot", f"{len(clash)} clashing variables")
            line = Resolve(j, k, clash[0])
            slots.append(resolve_any(slots[j], slots[k], clash[0]))
        else:
            if not allow_extension:
                raise ProofError("extension-not-allowed")
            w = B.ceil_log2(nvars) if nvars else 0
            lits = []
            for _ in range(2):
                try:
                    sign, pos = B.read_fixed(bits, pos, 1)
                    a, pos = B.read_fixed(bits, pos, w)
                except B.DecodeError:
                    raise ProofError("truncated", "extend line") from None
                if a + 1 > nvars:
                    raise ProofError("extension-undefined-literal")
                lits.append(-(a + 1) if sign else a + 1)
            if abs(lits[0]) == abs(lits[1]):
                raise ProofError("extension-degenerate")
            nvars += 1
            line = Extend(nvars, lits[0], lits[1])
            slots.extend(extension_clauses(nvars, lits[0], lits[1]))
        lines.append(line)
    return ResolutionProof(tuple(lines))


def line_cost(slots: int, nvars: int, extend: bool) -> int:
    if extend:
        return 1 + 2 * (1 + B.ceil_log2(nvars))
    return 1 + 2 * B.ceil_log2(slots)


# -- text format ---------------------------------------------------------------

def _lits(c: Clause) -> str:
    return " ".join(str(l) for l in c) if c else "[]"


def to_text(cnf: Cnf, proof: ResolutionProof, allow_extension: bool = True) -> str:
    slots = check_refutation(cnf, proof, allow_extension)
    out = []
    i = 0
    for line in proof.lines:
        if isinstance(line, Input):
            out.append(f"{i}: {_lits(slots[i])} <- input {line.index}")
            i += 1
        elif isinstance(line, Resolve):
            out.append(f"{i}: {_lits(slots[i])} <- {line.left} {line.right} {line.pivot}")
            i += 1
        else:
            out.append(f"{i}: ext {line.var} := {line.l1} & {line.l2}")
            i += 3
    return "\n".join(out) + "\n"


def from_text(text: str) -> ResolutionProof:
    """Parse the text format. Clause literals in the text are informational;
    the checker recomputes them."""
    lines: list[Line] = []
    expected = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.strip()
        if not raw or raw.startswith("c"):
            continue
        head, _, rest = raw.partition(":")
        try:
            idx = int(head)
        except ValueError:
            raise ProofError("syntax", f"line {lineno}: missing slot number") from None
        if idx != expected:
            raise ProofError("syntax", f"line {lineno}: slot {idx}, expected {expected}")
        rest = rest.strip()
        try:
            if rest.startswith("ext"):
                left, _, right = rest[3:].partition(":=")
                l1, _, l2 = right.partition("&")
                lines.append(Extend(int(left), int(l1), int(l2)))
                expected += 3
                continue
            _, _, source = rest.partition("<-")
            parts = source.split()
            if parts and parts[0] == "input":
                lines.append(Input(int(parts[1])))
            else:
                j, k, p = (int(x) for x in parts)
                lines.append(Resolve(j, k, p))
        except (ValueError, IndexError):
            raise ProofError("syntax", f"line {lineno}: {raw!r}") from None
        expected += 1
    return ResolutionProof(tuple(lines))


# -- construction helpers -------------------------------------------------------

class ProofBuilder:
    """Incrementally builds a refutation of ``cnf`` with deduplicated clauses."""

    def __init__(self, cnf: Cnf):
        self.cnf = cnf
        self.lines: list[Line] = [Input(i) for i in range(len(cnf.clauses))]
        self.slots: list[Clause] = list(cnf.clauses)
        self.index: dict[Clause, int] = {}
        for i, c in enumerate(self.slots):
            self.index.setdefault(c, i)
        self.nvars = cnf.var_count

    def resolve(self, j: int, k: int) -> int:
        clash = clash_variables(self.slots[j], self.slots[k])
        if len(clash) != 1:
            raise ProofError("bad-pivot", f"slots {j}, {k}")
        c = resolve_any(self.slots[j], self.slots[k], clash[0])
        if c in self.index:
            return self.index[c]
        self.lines.append(Resolve(j, k, clash[0]))
        self.slots.append(c)
        self.index[c] = len(self.slots) - 1
        return len(self.slots) - 1

    def extend(self, l1: int, l2: int) -> tuple[int, int]:
        """Introduce v == l1 & l2; returns (v, first slot of its three clauses)."""
        self.nvars += 1
        v = self.nvars
        self.lines.append(Extend(v, l1, l2))
        first = len(self.slots)
        for c in extension_clauses(v, l1, l2):
            self.slots.append(c)
            self.index.setdefault(c, len(self.slots) - 1)
        return v, first

    def derive(self, target: Iterable[int], support: Sequence[int]) -> int:
        """Derive a subclause of ``target`` from the clauses in ``support``.

        Builds a decision tree for support restricted by the assignment that
        falsifies target, and turns it into tree-like resolution. The support
        must be unsatisfiable under that assignment.
        """
        assign = {abs(l): 0 if l > 0 else 1 for l in target}
        clauses = [(s, self.slots[s]) for s in support]
        return self._refute(assign, clauses)

    def _refute(self, assign: dict[int, int], clauses) -> int:
        unit = None
        free: set[int] = set()
        for slot, c in clauses:
            open_lits = []
            satisfied = False
            for l in c:
                v = abs(l)
                if v in assign:
                    if (assign[v] == 1) == (l > 0):
                        satisfied = True
                        break
                else:
                    open_lits.append(l)
            if satisfied:
                continue
            if not open_lits:
                return slot
            if len(open_lits) == 1 and unit is None:
                unit = open_lits[0]
            free.update(abs(l) for l in open_lits)
        if unit is not None:
            v = abs(unit)
            first = 0 if unit > 0 else 1
        elif free:
            v = min(free)
            first = 0
        else:
            raise ProofError("satisfiable", "support is satisfiable under the restriction")
        falsified_first = v if first == 0 else -v
        a = self._refute({**assign, v: first}, clauses)
        if falsified_first not in self.slots[a]:
            return a
        b = self._refute({**assign, v: 1 - first}, clauses)
        if -falsified_first not in self.slots[b]:
            return b
        return self.resolve(a, b)

    def finish(self, final: int | None = None) -> ResolutionProof:
        """Proof ending at ``final`` (default: the empty clause), unused lines dropped."""
        if final is None:
            if () not in self.index:
                raise ProofError("no-empty-clause", "nothing derived the empty clause")
            final = self.index[()]
        return compact(self.cnf, ResolutionProof(tuple(self.lines)), final)


def _slot_owner(proof: ResolutionProof) -> list[tuple[int, int]]:
    owner = []
    for n, line in enumerate(proof.lines):
        for part in range(3 if isinstance(line, Extend) else 1):
            owner.append((n, part))
    return owner


def compact(cnf: Cnf, proof: ResolutionProof, final: int) -> ResolutionProof:
    """Keep the inputs plus the lines the ``final`` slot depends on, renumbered,
    with ``final`` as the last slot. Extension lines are kept whenever a later
    kept line mentions their variable."""
    owner = _slot_owner(proof)
    m = len(cnf.clauses)
    needed_lines: set[int] = set()
    stack = [final]
    seen: set[int] = set()
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        n, _ = owner[s]
        needed_lines.add(n)
        line = proof.lines[n]
        if isinstance(line, Resolve):
            stack.extend((line.left, line.right))
    # extension variables must be introduced in order, and their defining
    # literals must exist: keep every extension at or below the highest one used
    ext_lines = [n for n, l in enumerate(proof.lines) if isinstance(l, Extend)]
    if any(n in needed_lines for n in ext_lines):
        top = max(n for n in ext_lines if n in needed_lines)
        needed_lines.update(n for n in ext_lines if n <= top)
    final_line = owner[final][0]
    if final < m or isinstance(proof.lines[final_line], Extend):
        return ResolutionProof(tuple(Input(i) for i in range(m)))
    keep = sorted(set(range(m)) | {n for n in needed_lines if n >= m and n != final_line}) + [final_line]
    new_slot: dict[int, int] = {}
    out: list[Line] = []
    slot = 0
    old_first_slot = {}
    s = 0
    for n, line in enumerate(proof.lines):
        old_first_slot[n] = s
        s += 3 if isinstance(line, Extend) else 1
    for n in keep:
        line = proof.lines[n]
        width = 3 if isinstance(line, Extend) else 1
        for part in range(width):
            new_slot[old_first_slot[n] + part] = slot + part
        if isinstance(line, Resolve):
            line = Resolve(new_slot[line.left], new_slot[line.right], line.pivot)
        out.append(line)
        slot += width
    return ResolutionProof(tuple(out))


def refute_by_decision_tree(cnf: Cnf, allow_extension: bool = False) -> ResolutionProof:
    """A tree-like refutation of an unsatisfiable clause set (toy scale)."""
    b = ProofBuilder(cnf)
    if () in b.index:
        return b.finish(b.index[()])
    final = b.derive((), list(range(len(cnf.clauses))))
    return b.finish(final)


# -- restriction -----------------------------------------------------------------

def restrict_proof(cnf: Cnf, proof: ResolutionProof, rho: dict[int, int]) -> tuple[Cnf, ResolutionProof]:
    """Restrict a resolution refutation of ``cnf`` by the partial assignment rho.

    Returns the restricted clause set (satisfied clauses dropped, falsified
    literals removed) and a refutation of it with no more lines than the
    original. Each slot maps either to "satisfied" or to a slot whose clause
    is contained in the restricted original clause.
    """
    if proof.uses_extension:
        raise ValueError("restriction is defined for resolution proofs without extensions")
    slots = check_refutation(cnf, proof)
    rcnf, origin = restrict_cnf(cnf, rho)
    b = ProofBuilder(rcnf)
    input_slot = {orig: i for i, orig in enumerate(origin)}
    mapped: list[int | None] = []
    for n, line in enumerate(proof.lines):
        if isinstance(line, Input):
            mapped.append(input_slot.get(line.index))
            continue
        j, k, p = line.left, line.right, line.pivot
        if p in slots[k]:
            j, k = k, j
        dj, dk = mapped[j], mapped[k]
        if dj is None and dk is None:
            mapped.append(None)
        elif dj is None:
            mapped.append(None if -p in b.slots[dk] else dk)
        elif dk is None:
            mapped.append(None if p in b.slots[dj] else dj)
        elif p not in b.slots[dj]:
            mapped.append(dj)
        elif -p not in b.slots[dk]:
            mapped.append(dk)
        else:
            mapped.append(b.resolve(dj, dk))
    # the refuted clause is the last slot, or an empty input clause
    final = mapped[slots.index(())]
    if final is None or b.slots[final] != ():
        raise ProofError("restriction-failed", "final line did not map to the empty clause")
    return rcnf, b.finish(final)


# -- exact minimal proof size ---------------------------------------------------------

class SearchLimit(Exception):
    pass


def body_bits_for_lines(m: int, k: int) -> int:
    """Body size of a resolution-only refutation with k derivation lines over m inputs."""
    return sum(1 + 2 * B.ceil_log2(m + j) for j in range(k))


def minimal_refutation(cnf: Cnf, allow_extension: bool = False, cap_bits: int = 256,
                       node_limit: int = 5_000_000) -> tuple[int, ResolutionProof] | None:
    """Smallest body size in bits of a refutation of ``cnf`` and one proof achieving it.

    Iterative-deepening A* over bit cost. Pruning, all exactness-preserving:

    * heuristic: one cheapest line per literal of the narrowest clause, since
      a resolvent is at most one literal narrower than either premise;
    * a resolvent already present, or subsumed by a present clause, is skipped
      (a subclause can replace it in any continuation at no extra cost);
    * in a minimal proof every resolvent is used later, and so is every input
      clause whose removal makes the set satisfiable; the number of such
      outstanding clauses may not exceed the remaining resolve lines plus one;
    * two consecutive independent resolve steps must appear in increasing
      order of their premise clauses (every proof can be reordered this way
      by swapping adjacent independent steps);
    * a transposition table on (clause set, last step) cuts repeated states.

    Returns None if no refutation fits in ``cap_bits``; raises SearchLimit
    after ``node_limit`` expansions.
    """
    base = list(cnf.clauses)
    m = len(base)
    if () in base:
        return 0, ResolutionProof(tuple(Input(i) for i in range(m)))
    if m == 0:
        return None
    nodes = [0]
    necessary: frozenset[int] = frozenset()
    if cnf.var_count <= 16:
        necessary = frozenset(
            i for i in range(m)
            if satisfiable_bruteforce(Cnf(cnf.var_count, tuple(base[:i] + base[i + 1:])))[0]
        )

    def lines_cost(nslots, r):
        return sum(1 + 2 * B.ceil_log2(nslots + j) for j in range(r))

    def remaining_resolves(nslots, budget):
        r = 0
        while True:
            c = 1 + 2 * B.ceil_log2(nslots + r)
            if c > budget:
                return r
            budget -= c
            r += 1

    def subsumed(c, clauses):
        cs = set(c)
        return any(len(d) <= len(c) and set(d) <= cs for d in clauses)

    def dfs(clauses, lines, unused, last, nvars, g, bound, table):
        nodes[0] += 1
        if nodes[0] > node_limit:
            raise SearchLimit
        nslots = len(clauses)
        width = min(len(c) for c in clauses)
        f = g + lines_cost(nslots, max(width, len(unused) - 1))
        if f > bound:
            return f, None
        if len(unused) > remaining_resolves(nslots, bound - g) + 1:
            return 1 << 60, None
        key = (frozenset(clauses), nvars, last)
        if table.get(key, 1 << 60) <= g:
            return 1 << 60, None
        table[key] = g
        best_over = 1 << 60
        cost = 1 + 2 * B.ceil_log2(nslots)
        present = set(clauses)
        prev = clauses[-1] if last is not None else None
        moves = []
        for j in range(nslots):
            cj = clauses[j]
            for k in range(j + 1, nslots):
                ck = clauses[k]
                clash = clash_variables(cj, ck)
                if len(clash) != 1:
                    continue
                if last is not None and cj != prev and ck != prev:
                    if tuple(sorted((cj, ck))) <= last:
                        continue
                r = resolve_any(cj, ck, clash[0])
                if r in present or subsumed(r, clauses):
                    continue
                moves.append((len(r), j, k, clash[0], r))
        moves.sort(key=lambda mv: mv[0])
        for _, j, k, p, r in moves:
            line = Resolve(j, k, p)
            if r == ():
                # the final line must consume every outstanding resolvent
                if g + cost <= bound and unused <= {j, k}:
                    return g + cost, lines + [line]
                best_over = min(best_over, g + cost)
                continue
            step_key = tuple(sorted((clauses[j], clauses[k])))
            res, found = dfs(clauses + [r], lines + [line], (unused - {j, k}) | {nslots},
                             step_key, nvars, g + cost, bound, table)
            if found is not None:
                return res, found
            best_over = min(best_over, res)
        if allow_extension and nvars >= 2:
            ecost = line_cost(nslots, nvars, True)
            for a in range(1, nvars + 1):
                for bvar in range(a + 1, nvars + 1):
                    for sa in (a, -a):
                        for sb in (bvar, -bvar):
                            v = nvars + 1
                            new = list(extension_clauses(v, sa, sb))
                            res, found = dfs(clauses + new, lines + [Extend(v, sa, sb)], unused,
                                             None, v, g + ecost, bound, table)
                            if found is not None:
                                return res, found
                            best_over = min(best_over, res)
        return best_over, None

    bound = lines_cost(m, max(min(len(c) for c in base), len(necessary) - 1))
    while bound <= cap_bits:
        res, found = dfs(base, [], necessary, None, cnf.var_count, 0, bound, {})
        if found is not None:
            proof = ResolutionProof(tuple(Input(i) for i in range(m)) + tuple(found))
            return res, proof
        if res >= 1 << 60:
            return None
        bound = res
    return None
