"""Formula families, constructed proofs and the Kt uniformity filter."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import machine as M
from .bits import ceil_log2
from . import resolution as R
from . import systems as S
from .circuits import ToyFunctionSpec, CircuitError, definitions, equals_bits, is_bijective, not_all
from .cnf import Cnf, cnf_to_tautology
from .formula import (
    Formula, Or, TRUE, disj, encode, is_tautology_bruteforce, parse, var_count,
)
from .kt import KtCertificate, certificate_from_program, kt, verify_certificate

# -- pigeonhole -------------------------------------------------------------------


def php_var(n: int, pigeon: int, hole: int) -> int:
    return (pigeon - 1) * n + hole


def gen_php(n: int) -> Cnf:
    """n+1 pigeons in n holes: pigeon clauses first, then hole clauses by hole."""
    if n < 1:
        raise ValueError("n must be >= 1")
    clauses = [tuple(php_var(n, i, j) for j in range(1, n + 1)) for i in range(1, n + 2)]
    for j in range(1, n + 1):
        for i in range(1, n + 2):
            for k in range(i + 1, n + 2):
                clauses.append((-php_var(n, i, j), -php_var(n, k, j)))
    return Cnf(n * (n + 1), tuple(clauses))


def php_tautology(n: int) -> Formula:
    return cnf_to_tautology(gen_php(n))


def er_refutation_php(n: int) -> R.ResolutionProof:
    """Extended-resolution refutation of gen_php(n) by repeated hole elimination.

    At each stage the current instance is a matrix of literals L[i][j] for
    pigeons 1..k+1 and holes 1..k. Removing hole k introduces
    y_ij == L[i][k] & L[k+1][j] and z_ij == ~L[i][j] & ~y_ij, and the new
    literal for pigeon i in hole j is ~z_ij, i.e. "i sits in j, or i sits in
    k and pigeon k+1 sits in j". Each clause of the smaller instance is
    derived from the handful of clauses it depends on.
    """
    cnf = gen_php(n)
    b = R.ProofBuilder(cnf)
    lit = [[0] * (n + 1) for _ in range(n + 2)]
    for i in range(1, n + 2):
        for j in range(1, n + 1):
            lit[i][j] = php_var(n, i, j)
    pigeon = {i: b.index[R.make_clause(lit[i][1:n + 1])] for i in range(1, n + 2)}
    hole = {}
    for j in range(1, n + 1):
        for i in range(1, n + 2):
            for k in range(i + 1, n + 2):
                hole[(i, k, j)] = b.index[R.make_clause([-lit[i][j], -lit[k][j]])]
    for k in range(n, 1, -1):
        y, z, ydefs, zdefs = {}, {}, {}, {}
        for i in range(1, k + 1):
            for j in range(1, k):
                y[i, j], first = b.extend(lit[i][k], lit[k + 1][j])
                ydefs[i, j] = [first, first + 1, first + 2]
                z[i, j], first = b.extend(-lit[i][j], -y[i, j])
                zdefs[i, j] = [first, first + 1, first + 2]
        new_pigeon, new_hole = {}, {}
        for i in range(1, k + 1):
            support = [pigeon[i], pigeon[k + 1], hole[(i, k + 1, k)]]
            for j in range(1, k):
                support += ydefs[i, j] + zdefs[i, j]
            new_pigeon[i] = b.derive([-z[i, j] for j in range(1, k)], support)
        for j in range(1, k):
            for i in range(1, k + 1):
                for i2 in range(i + 1, k + 1):
                    support = (ydefs[i, j] + zdefs[i, j] + ydefs[i2, j] + zdefs[i2, j]
                               + [hole[(i, i2, j)], hole[(i, i2, k)],
                                  hole[(i, k + 1, j)], hole[(i2, k + 1, j)]])
                    new_hole[(i, i2, j)] = b.derive([z[i, j], z[i2, j]], support)
        for i in range(1, k + 1):
            for j in range(1, k):
                lit[i][j] = -z[i, j]
        pigeon, hole = new_pigeon, new_hole
    final = b.derive([], [pigeon[1], pigeon[2], hole[(1, 2, 1)]])
    return b.finish(final)


def er_proof_php(n: int) -> S.ProofObject:
    f = php_tautology(n)
    proof = er_refutation_php(n)
    w = encode(f) + R.encode_body(gen_php(n), proof)
    return S.decode_proof(S.ER, w)


# -- toy suite --------------------------------------------------------------------

TOY_SUITE_TEXT = (
    "T", "~F", "~~T", "(T | F)", "(F | T)", "(x1 | T)", "(T | x1)", "(x1 | ~x1)",
    "(~x1 | x1)", "~(x1 & ~x1)", "~(~x1 & x1)", "(~x1 | T)", "(T | ~x1)", "~(x1 & F)",
    "~(F & x1)", "(x1 | ~x1 | x1)", "(x1 | x1 | ~x1)", "(~x1 | x1 | x1)", "(~F | x1)",
    "(x1 | ~F)", "~~~F", "(T | T)", "(T & T)",
)


def toy_suite() -> list[Formula]:
    return [parse(s) for s in TOY_SUITE_TEXT]


# -- formula families --------------------------------------------------------------

def tchain(length: int) -> Formula:
    """A disjunction of ``length`` copies of the constant true."""
    if length < 2:
        raise ValueError("length must be >= 2")
    return Or((TRUE,) * length)


def tchain_program(length: int) -> str:
    """A short program printing the code of tchain(length): the disjunction
    header, then 5*length ones (the constant true is coded 11111)."""
    src = ["out 1", "out 1", "out 0"]
    if length > 2:
        src += [f"loop {length - 2}", "out 1", "end"]
    src += ["out 0", f"rep {5 * length}"]
    return M.assemble("\n".join(src))


@dataclass(frozen=True)
class FamilySpec:
    tag: str
    seed: str  # how instance n is computed, for reports
    limit: int
    toy_cap: int  # instances up to here are checked exhaustively at registration

    def make(self, n: int) -> Formula:
        return _FAMILY_MAKERS[self.tag](n)


_FAMILY_MAKERS = {
    "php": php_tautology,
    "tchain": lambda n: tchain(n + 1),
    "toy": lambda n: toy_suite()[n - 1],
}

FAMILY_SPECS = {
    "php": FamilySpec("php", "pigeonhole n+1 -> n, negated clause set", 32, 3),
    "tchain": FamilySpec("tchain", "disjunction of n+1 copies of T", 4096, 16),
    "toy": FamilySpec("toy", "fixed toy suite, in order", len(TOY_SUITE_TEXT), len(TOY_SUITE_TEXT)),
}


def gen_designated_family(base: S.ProofSystemId, spec: FamilySpec) -> S.ProofSystemId:
    """Register ``spec`` and return the designated-axiom system over ``base``.

    Every instance up to the spec's toy cap must be a tautology.
    """
    for n in range(1, min(spec.toy_cap, spec.limit) + 1):
        ok, a = is_tautology_bruteforce(spec.make(n))
        if not ok:
            raise ValueError(f"instance {n} of {spec.tag} is not a tautology (falsified by {a})")
    S.register_family(spec.tag, spec.make, spec.limit)
    return S.qprime(base, spec.tag)


for _spec in FAMILY_SPECS.values():
    S.register_family(_spec.tag, _spec.make, _spec.limit)


UNARY_CONSTANT = len(M.op(M.REP)) + 2


def unary_certificate(n: int, condition: str = "") -> KtCertificate:
    """Certificate for the unary proof 1^n.

    The repeat program has length 3 + floor(log2(n+1)) and runs n+1 steps,
    so its level is at most UNARY_CONSTANT + 2*ceil(log2 n). It ignores its
    input, so the same program works for every condition.
    """
    return certificate_from_program("1" * n, condition, M.rep_program(n))


def unary_bound(n: int) -> int:
    return UNARY_CONSTANT + 2 * ceil_log2(n)


# -- range-avoidance formulas --------------------------------------------------------

class InRange(ValueError):
    def __init__(self, b: str, preimage: str):
        super().__init__(f"{b} has preimage {preimage}")
        self.preimage = preimage


def gen_tau_g(spec: ToyFunctionSpec, b: str) -> Formula:
    """The formula "the circuit does not output b", with one auxiliary per gate.

    A tautology exactly when b is outside the image; b in the image is
    rejected with its least preimage.
    """
    if len(b) != spec.out_len or set(b) - {"0", "1"}:
        raise ValueError(f"b must be a bitstring of length {spec.out_len}")
    if len(spec.used_inputs()) != spec.inputs:
        raise CircuitError("every input must be read by the circuit")
    pre = spec.image().get(b)
    if pre is not None:
        raise InRange(b, pre)
    defs, outs, _ = definitions(spec, spec.inputs + 1)
    return not_all(defs + equals_bits(outs, b))


def gen_mu_eta(h: ToyFunctionSpec, hard_bit: ToyFunctionSpec, b: str,
               phi: Formula | None = None) -> Formula:
    """[h(x) = b -> B(x) = B(h^-1(b))], or [h(x) = b -> phi(x)] when phi is given."""
    n = h.inputs
    if not is_bijective(h):
        raise CircuitError("h is not a bijection on its inputs")
    if len(b) != n:
        raise ValueError(f"b must have length {n}")
    defs, h_out, nxt = definitions(h, n + 1)
    premise = defs + equals_bits(h_out, b)
    if phi is None:
        if hard_bit.inputs != n or hard_bit.out_len != 1:
            raise CircuitError("the hard bit must map n bits to one bit")
        x = next(x for x, y in h.table().items() if y == b)
        target = hard_bit.evaluate(x)
        bdefs, b_out, _ = definitions(hard_bit, nxt)
        premise += bdefs
        conclusion = equals_bits(b_out, target)[0]
    else:
        if var_count(phi) > n:
            raise ValueError("phi may only use the first n variables")
        conclusion = phi
    return disj([not_all(premise), conclusion])


# -- uniformity filter -----------------------------------------------------------------

def filter_threshold(size_bits: int) -> int:
    """ceil((log2 size)^2), computed without floating point error."""
    if size_bits <= 1:
        return 0
    # smallest T with T >= log2(size)^2, i.e. 2^sqrt(T) >= size
    t = math.ceil(math.log2(size_bits) ** 2)
    while t > 0 and _pow2_sqrt_ge(t - 1, size_bits):
        t -= 1
    while not _pow2_sqrt_ge(t, size_bits):
        t += 1
    return t


def _pow2_sqrt_ge(t: int, size: int) -> bool:
    # 2^sqrt(t) >= size  <=>  sqrt(t) >= log2(size)  <=>  t >= log2(size)^2
    r = math.isqrt(t)
    if r * r == t:
        return (1 << r) >= size
    return math.sqrt(t) >= math.log2(size)


@dataclass(frozen=True)
class FilterVerdict:
    verdict: str  # "pass" | "fail" | "pass-unconfirmed"
    size: int
    threshold: int
    kt_level: int | None  # exact Kt, or the best upper bound on a fail
    lower_bound: int  # proven Kt >= lower_bound
    certificate: KtCertificate | None

    @property
    def exact(self) -> bool:
        return self.verdict != "pass-unconfirmed"


def uniformity_filter(f: Formula, budget: int = 12,
                      witnesses: Sequence[KtCertificate] = ()) -> FilterVerdict:
    """Accept f only if Kt(code(f)) >= ceil((log2 |code(f)|)^2).

    Fails with a certificate when some program below the threshold prints
    the code; passes when exhaustive search rules that out; otherwise the
    pass is labeled unconfirmed.
    """
    w = encode(f)
    th = filter_threshold(len(w))
    cert = kt(w, "", min(budget, max(th - 1, 0)), witnesses)
    if cert.exact:
        if cert.level < th:
            return FilterVerdict("fail", len(w), th, cert.level, cert.level, cert)
        return FilterVerdict("pass", len(w), th, cert.level, cert.level, None)
    searched = min(budget, max(th - 1, 0))
    if cert.level < th and verify_certificate(cert)[0]:
        return FilterVerdict("fail", len(w), th, cert.level, searched + 1, cert)
    if searched + 1 >= th:
        return FilterVerdict("pass", len(w), th, None, searched + 1, None)
    return FilterVerdict("pass-unconfirmed", len(w), th, None, searched + 1, None)


def tchain_certificate(length: int) -> KtCertificate:
    return certificate_from_program(encode(tchain(length)), "", tchain_program(length))
