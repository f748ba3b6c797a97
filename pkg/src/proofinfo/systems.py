"""Proof systems as verifiers from bitstrings to tautologies.

Every proof of the base systems starts with the formula it proves, written
in the prefix-free formula code; the rest of the string is system specific:

* ``TT``: exactly 2^n one-bits, n the number of variables. The verifier
  evaluates every assignment, which is polynomial in the proof length.
* ``Res`` / ``ER``: a refutation body (see :mod:`proofinfo.resolution`) of
  the clauses of the negated formula. Res rejects extension lines.
* ``PS``: the encoded trace of the fixed DPLL on the negated formula; the
  verifier replays the solver and compares bit for bit.
* ``QPrime(base, family)``: the unary string 1^n (n >= 1) proves the n-th
  member of a registered formula family; every other string is handed to
  the base system.
"""

from __future__ import annotations

import importlib
from dataclasses import dataclass
from typing import Callable, Union

from . import bits as B
from . import dpll as D
from . import resolution as R
from .cnf import Cnf, negate_to_cnf
from .formula import Formula, decode_prefix, encode, is_tautology_bruteforce, size, var_count

ENCODING_VERSION = "proofbits-1"
TT_VAR_CAP = 24


class Reject(ValueError):
    """Verifier rejection with a machine-readable ``reason``."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


@dataclass(frozen=True)
class ProofSystemId:
    kind: str  # "TT" | "Res" | "ER" | "PS" | "QPrime"
    base: "ProofSystemId | None" = None
    family: str | None = None
    solver: str | None = None

    def __post_init__(self):
        if self.kind not in ("TT", "Res", "ER", "PS", "QPrime"):
            raise ValueError(f"unknown proof system {self.kind!r}")
        if self.kind == "PS" and self.solver != D.DPLL_VERSION:
            raise ValueError(f"unsupported solver configuration {self.solver!r}")
        if self.kind == "QPrime" and (self.base is None or self.family is None):
            raise ValueError("QPrime needs a base system and a family tag")

    @property
    def name(self) -> str:
        if self.kind == "QPrime":
            return f"QPrime({self.base.name},{self.family})"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> "ProofSystemId":
        text = text.strip()
        if text.startswith("QPrime(") and text.endswith(")"):
            inner = text[len("QPrime("):-1]
            base, _, fam = inner.rpartition(",")
            return qprime(cls.parse(base), fam.strip())
        if text == "PS":
            return PS
        return cls(text)


TT = ProofSystemId("TT")
RES = ProofSystemId("Res")
ER = ProofSystemId("ER")
PS = ProofSystemId("PS", solver=D.DPLL_VERSION)


def qprime(base: ProofSystemId, family: str) -> ProofSystemId:
    return ProofSystemId("QPrime", base=base, family=family)


# -- designated families ------------------------------------------------------

@dataclass(frozen=True)
class Family:
    tag: str
    make: Callable[[int], Formula]
    limit: int  # members 1..limit exist


FAMILIES: dict[str, Family] = {}


def register_family(tag: str, make: Callable[[int], Formula], limit: int) -> None:
    FAMILIES[tag] = Family(tag, make, limit)


def family(tag: str) -> Family:
    if tag not in FAMILIES:
        importlib.import_module(".generators", __package__)  # registers the built-in families
    try:
        return FAMILIES[tag]
    except KeyError:
        raise ValueError(f"unknown formula family {tag!r}") from None


# -- proof objects -------------------------------------------------------------

View = Union[int, R.ResolutionProof, tuple, None]


@dataclass(frozen=True)
class ProofObject:
    """A proof string together with what it decodes to."""

    system: ProofSystemId
    bits: str
    formula: Formula
    view: View  # TT: padding length; Res/ER: refutation; PS: trace; QPrime member: n

    def __len__(self) -> int:
        return len(self.bits)


def _split_formula(w: str) -> tuple[Formula, int]:
    try:
        return decode_prefix(w, 0)
    except (B.DecodeError, ValueError) as exc:
        raise Reject("bad-formula", str(exc)) from None


def decode_proof(system: ProofSystemId, w: str) -> ProofObject:
    """Decode and check ``w``; raises Reject when w is not a proof."""
    if not B.is_bits(w):
        raise Reject("not-bits")
    kind = system.kind
    if kind == "QPrime":
        if w and set(w) == {"1"}:
            fam = family(system.family)
            if len(w) <= fam.limit:
                return ProofObject(system, w, fam.make(len(w)), len(w))
        inner = decode_proof(system.base, w)
        return ProofObject(system, w, inner.formula, inner.view)
    f, pos = _split_formula(w)
    rest = w[pos:]
    if kind == "TT":
        n = var_count(f)
        if n > TT_VAR_CAP or len(rest) != 1 << n or "0" in rest:
            raise Reject("bad-padding", f"expected {2 ** n if n <= 64 else 'huge'} ones")
        ok, _ = is_tautology_bruteforce(f, cap=TT_VAR_CAP)
        if not ok:
            raise Reject("not-a-tautology")
        return ProofObject(system, w, f, len(rest))
    cnf = negate_to_cnf(f)
    if kind in ("Res", "ER"):
        try:
            proof = R.decode_body(cnf, w, pos, allow_extension=kind == "ER")
            R.check_refutation(cnf, proof, allow_extension=kind == "ER")
        except R.ProofError as exc:
            raise Reject(exc.reason, str(exc)) from None
        return ProofObject(system, w, f, proof)
    # PS: every event costs at least two bits, which bounds the replay
    try:
        res = D.dpll_solve(cnf, max_events=len(rest) // 2)
    except D.EventLimit:
        raise Reject("trace-divergence", "solver runs longer than the trace") from None
    if res.sat:
        raise Reject("satisfiable", "the negation is satisfiable")
    if D.encode_trace(cnf, res.trace) != rest:
        raise Reject("trace-divergence")
    return ProofObject(system, w, f, res.trace)


def verify(system: ProofSystemId, w: str | ProofObject) -> Formula:
    """The tautology proven by w; raises Reject otherwise."""
    if isinstance(w, ProofObject):
        w = w.bits
    return decode_proof(system, w).formula


def check(system: ProofSystemId, w: str) -> tuple[Formula | None, str]:
    """Non-raising verify: (formula, "ok") or (None, reason)."""
    try:
        return verify(system, w), "ok"
    except Reject as exc:
        return None, exc.reason


# -- constructing proofs ------------------------------------------------------------

class NotATautology(ValueError):
    pass


def _require_tautology(f: Formula) -> None:
    ok, a = is_tautology_bruteforce(f)
    if not ok:
        raise NotATautology(f"falsified by {a}")


def make_proof(system: ProofSystemId, f: Formula) -> str:
    """A proof of f in the given system, built at toy scale."""
    _require_tautology(f)
    kind = system.kind
    if kind == "QPrime":
        fam = family(system.family)
        for n in range(1, fam.limit + 1):
            if fam.make(n) == f:
                return "1" * n
        return make_proof(system.base, f)
    head = encode(f)
    if kind == "TT":
        return head + "1" * (1 << var_count(f))
    cnf = negate_to_cnf(f)
    if kind in ("Res", "ER"):
        return head + R.encode_body(cnf, R.refute_by_decision_tree(cnf))
    return head + D.encode_trace(cnf, D.refutation_trace(cnf))


def proof_from_refutation(f: Formula, proof: R.ResolutionProof) -> str:
    return encode(f) + R.encode_body(negate_to_cnf(f), proof)


def embed_r_in_er(w: str) -> str:
    """Resolution proofs are extended-resolution proofs verbatim.

    Both systems share one encoding, so the translation is the identity and
    the size overhead is zero.
    """
    verify(RES, w)
    return w


EMBED_CONSTANT = 0


def with_leading_extension(cnf: Cnf, proof: R.ResolutionProof, l1: int, l2: int) -> R.ResolutionProof:
    """Insert one extension line right after the inputs, renumbering later references."""
    m = len(cnf.clauses)
    if proof.uses_extension:
        raise ValueError("proof already has extension lines")
    shifted: list[R.Line] = list(proof.lines[:m]) + [R.Extend(cnf.var_count + 1, l1, l2)]
    for line in proof.lines[m:]:
        if isinstance(line, R.Resolve):
            line = R.Resolve(*(x + 3 if x >= m else x for x in (line.left, line.right)), line.pivot)
        shifted.append(line)
    return R.ResolutionProof(tuple(shifted))


# -- exact proof size ------------------------------------------------------------------

CAP_GUARD = 4096


class CapGuard(ValueError):
    pass


def s_p_exact(system: ProofSystemId, f: Formula, cap_bits: int,
              node_limit: int = 5_000_000) -> int | None:
    """Minimal proof length in bits, or None when it exceeds cap_bits or the
    search gives up. Raises NotATautology when f has no proofs at all."""
    if not 0 <= cap_bits <= CAP_GUARD:
        raise CapGuard(f"cap_bits must be in [0, {CAP_GUARD}]")
    _require_tautology(f)
    kind = system.kind
    if kind == "QPrime":
        fam = family(system.family)
        base = s_p_exact(system.base, f, cap_bits, node_limit)
        unary = next((n for n in range(1, min(fam.limit, cap_bits) + 1) if fam.make(n) == f), None)
        if unary is not None and (base is None or unary <= base):
            return unary
        if base is not None:
            # a base proof made only of ones would be read as a family index instead
            return None if base <= fam.limit and _all_ones_minimum(system.base, f, base) else base
        return None
    head = size(f)
    if kind == "TT":
        n = var_count(f)
        total = head + (1 << n)
        return total if total <= cap_bits else None
    cnf = negate_to_cnf(f)
    if kind == "PS":
        total = head + len(D.encode_trace(cnf, D.refutation_trace(cnf)))
        return total if total <= cap_bits else None
    if head > cap_bits:
        return None
    try:
        found = R.minimal_refutation(cnf, allow_extension=kind == "ER",
                                     cap_bits=cap_bits - head, node_limit=node_limit)
    except R.SearchLimit:
        return None
    return None if found is None else head + found[0]


def _all_ones_minimum(base: ProofSystemId, f: Formula, length: int) -> bool:
    return check(base, "1" * length)[0] == f


def minimal_proof(system: ProofSystemId, f: Formula, node_limit: int = 5_000_000) -> str | None:
    """One proof of minimal length for Res/ER, or the canonical proof for TT/PS."""
    _require_tautology(f)
    if system.kind in ("TT", "PS"):
        return make_proof(system, f)
    if system.kind not in ("Res", "ER"):
        raise ValueError("minimal proofs are built for TT, Res, ER and PS")
    cnf = negate_to_cnf(f)
    try:
        found = R.minimal_refutation(cnf, allow_extension=system.kind == "ER", node_limit=node_limit)
    except R.SearchLimit:
        return None
    return None if found is None else encode(f) + R.encode_body(cnf, found[1])
