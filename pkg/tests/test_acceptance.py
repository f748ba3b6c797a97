"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
repeated in the terminal report under "acceptance criteria".
"""

import itertools
import json
import random
import zlib

import numpy as np
import pytest

from proofinfo import bench
from proofinfo import bits as B
from proofinfo import machine as M
from proofinfo.formula import decode, encode, parse, render
from proofinfo.generators import (
    er_proof_php, gen_php, php_tautology, tchain, tchain_certificate, toy_suite,
    unary_bound, unary_certificate, uniformity_filter,
)
from proofinfo.kt import (
    compose_certificates, composition_bound, kt, verify_certificate,
)
from proofinfo.search import certificate_levels, i_p, info_search_bp
from proofinfo.systems import (
    EMBED_CONSTANT, ER, PS, RES, TT, check, family, make_proof, qprime, s_p_exact, verify,
)
from acceptance_log import record
from oracles import (
    cnf_satisfiable_wide, is_tautology, max_var, naive_kt_table,
)

pytestmark = pytest.mark.acceptance


def _strings(max_len, min_len=0):
    for n in range(min_len, max_len + 1):
        for bits in itertools.product("01", repeat=n):
            yield "".join(bits)


def test_c01_kt_matches_naive_oracle():
    mismatches = []
    checked = 0
    empty_table = naive_kt_table("", 14)
    for w in _strings(6):
        for u in ("", w):
            table = empty_table if u == "" else naive_kt_table(u, 14)
            expected = table.get(w)
            got = kt(w, u, 14)
            checked += 1
            if expected is None:
                ok = not got.exact
            else:
                ok = got.exact and got.level == expected[0]
            if not ok:
                mismatches.append((w, u, got.level, expected))
    record(1, not mismatches, f"{checked} (w, u) pairs, {len(mismatches)} mismatches")
    assert not mismatches


def test_c02_sandwich():
    bad = []
    for w in _strings(8, 1):
        n = len(w)
        lo = B.ceil_log2(n)
        hi = n + 2 * B.ceil_log2(n + 1) + M.MACHINE.c_print
        for u in ("", w, "01"):
            c = kt(w, u, 12)
            # when the search is exhausted, budget + 1 is a proven lower bound
            lower = c.level if c.exact else 13
            if not (lo <= lower and c.level <= hi):
                bad.append((w, u, c.level))
    record(2, not bad, f"all 1 <= |w| <= 8 with three conditions, {len(bad)} violations")
    assert not bad


def test_c03_compositions():
    rng = random.Random(2024)
    bad = []
    for _ in range(100):
        x, u, w = ("".join(rng.choice("01") for _ in range(rng.randint(0, 6))) for _ in range(3))
        if rng.random() < 0.3:
            x = ""
        first, second = kt(u, x, 10), kt(w, u, 10)
        c = compose_certificates(first, second)
        res = M.run(c.program, x, c.time)
        ok = (res.halted and res.output == w and verify_certificate(c)[0]
              and c.level <= composition_bound(first.level, second.level))
        if not ok:
            bad.append((x, u, w))
    record(3, not bad, f"100 compositions, {len(bad)} violations")
    assert not bad


def _valid_proofs(system, max_len):
    valid = {}
    for w in _strings(max_len):
        f, _ = check(system, w)
        if f is not None:
            valid.setdefault(f, set()).add(w)
    return valid


def test_c04_level_search_is_exact():
    formulas = toy_suite()
    assert len(formulas) >= 20 and all(max_var(f) <= 4 for f in formulas)
    bad = []
    rows = 0
    for system in (TT, RES):
        valid = _valid_proofs(system, 16)
        for f in formulas:
            table = naive_kt_table(encode(f), 16)
            levels = [table[w][0] for w in valid.get(f, ()) if w in table]
            expected = min(levels, default=None)
            got = info_search_bp(system, f, 16)
            rows += 1
            if got.level != expected:
                bad.append((system.name, render(f), got.level, expected))
    record(4, not bad, f"{rows} (formula, system) rows, {len(bad)} mismatches")
    assert not bad


SEARCHERS = [
    ("cpy\nlit 11", TT),
    ("cpy", RES),
    ("cpy\nlit 001", RES),
]


def test_c05_time_law():
    bad = []
    summary = []
    for src, system in SEARCHERS:
        e = M.assemble(src)
        runs = [r for r in certificate_levels([e], system, toy_suite()) if r[2] is not None]
        summary.append(len(runs))
        for _, f, level in runs[:5]:
            if i_p(system, f).value > level:
                bad.append((src, render(f)))
        if len(runs) < 5:
            bad.append((src, "fewer than 5 successful runs"))
    record(5, not bad, f"successful runs per searcher {summary}, {len(bad)} violations")
    assert not bad


def _cost_samples():
    samples = []
    for system in (TT, RES, ER, PS):
        for f in toy_suite():
            r = info_search_bp(system, f, 16)
            if r.exact:
                samples.append((r.host_steps, r.level, len(encode(f))))
    return samples


def test_c06_cost_bound():
    s1, s2 = _cost_samples(), _cost_samples()
    fit1, fit2 = bench.fit_cost_bound(s1), bench.fit_cost_bound(s2)
    holds = all(st <= fit1.bound(l, z) * (1 + 1e-9) for st, l, z in s1)
    stable = (abs(fit1.constant - fit2.constant) <= 0.2 * fit1.constant
              and abs(fit1.exponent - fit2.exponent) <= 0.2 * max(fit1.exponent, 1.0))
    ok = holds and stable
    record(6, ok, f"C={fit1.constant:.6g} k={fit1.exponent:.4f} over {fit1.points} rows; "
                  f"second run C={fit2.constant:.6g} k={fit2.exponent:.4f}")
    assert ok


def test_c07_er_never_worse_than_res():
    bad = []
    for f in toy_suite():
        r, e = i_p(RES, f), i_p(ER, f)
        if not (r.exact and e.exact and e.value <= r.value + EMBED_CONSTANT):
            bad.append((render(f), r, e))
    record(7, not bad, f"{len(toy_suite())} rows with embedding constant {EMBED_CONSTANT}, "
                       f"{len(bad)} violations")
    assert not bad


# sizes in bits of the constructed extended-resolution proofs, n = 1..5
ER_PHP_SIZES = [36, 455, 2327, 7672, 19620]


def test_c08_php_pipeline():
    unsat = all(not cnf_satisfiable_wide(gen_php(n).var_count, gen_php(n).clauses)
                for n in range(1, 5))
    sizes = []
    accepted = True
    for n in range(1, 6):
        p = er_proof_php(n)
        accepted &= verify(ER, p.bits) == php_tautology(n)
        sizes.append(len(p.bits))
    ns = np.arange(2, 6, dtype=float)
    degree, _ = np.polyfit(np.log2(ns), np.log2(sizes[1:]), 1)
    s1 = s_p_exact(RES, php_tautology(1), 400)
    s2 = s_p_exact(RES, php_tautology(2), 400)
    ok = (unsat and accepted and sizes == ER_PHP_SIZES and degree < 6
          and s1 is not None and s2 is not None and s2 > s1)
    record(8, ok, f"unsat n<=4: {unsat}; ER sizes {sizes} (log-log slope {degree:.2f}); "
                  f"s_Res(PHP_1)={s1} s_Res(PHP_2)={s2}")
    assert ok


def test_c09_unary_certificates():
    bad = []
    checked = 0
    for tag in ("php", "tchain"):
        fam = family(tag)
        system = qprime(RES, tag)
        for n in range(1, 17):
            member = fam.make(n)
            c = unary_certificate(n, encode(member))
            checked += 1
            ok = (verify_certificate(c)[0] and check(system, c.target)[0] == member
                  and c.level <= unary_bound(n))
            if not ok:
                bad.append((tag, n, c.level))
    record(9, not bad, f"{checked} instances, level <= 5 + 2*ceil(log2 n), {len(bad)} violations")
    assert not bad


def _mutate(rng, w, pool):
    w = list(w)
    kind = rng.randrange(5)
    if kind == 0:
        for _ in range(rng.randint(1, 3)):
            if w:
                i = rng.randrange(len(w))
                w[i] = "1" if w[i] == "0" else "0"
    elif kind == 1:
        for _ in range(rng.randint(1, 3)):
            w.insert(rng.randrange(len(w) + 1), rng.choice("01"))
    elif kind == 2:
        for _ in range(rng.randint(1, 3)):
            if w:
                del w[rng.randrange(len(w))]
    elif kind == 3:
        w = w[:rng.randrange(len(w) + 1)]
    else:
        other = rng.choice(pool)
        cut = rng.randrange(len(w) + 1)
        w = w[:cut] + list(other[rng.randrange(len(other) + 1):])
    return "".join(w)


FUZZ_BASES = [
    "(x1 | ~x1)", "((x1 & x2) | ~x1 | ~x2)", "(~(x1 & x2) | x1)", "(x1 | ~x1 | x2)",
    "((x1 | x2) | (~x1 & ~x2))", "T", "(T | x1)",
]


@pytest.mark.parametrize("system", [TT, RES, ER, PS], ids=lambda s: s.name)
def test_c10_soundness_fuzzing(system):
    rng = random.Random(zlib.crc32(system.name.encode()))
    pool = [make_proof(system, parse(t)) for t in FUZZ_BASES]
    if system == ER:
        pool.append(er_proof_php(2).bits)
    accepted = unsound = 0
    for _ in range(10_000):
        w = _mutate(rng, rng.choice(pool), pool)
        f, _ = check(system, w)
        if f is not None:
            accepted += 1
            # too many variables to check exhaustively counts against the system
            if max_var(f) > 20 or not is_tautology(f):
                unsound += 1
    prior = _c10_results.setdefault("done", [])
    prior.append((system.name, accepted, unsound))
    if len(prior) == 4:
        total = sum(u for _, _, u in prior)
        record(10, total == 0, "10000 mutations per system; accepted/unsound: "
               + ", ".join(f"{n} {a}/{u}" for n, a, u in prior))
    assert unsound == 0


_c10_results: dict = {}


def _eight_bit_formulas():
    out = []
    for w in _strings(8, 8):
        try:
            out.append(decode(w))
        except ValueError:
            continue
    return out


def test_c11_uniformity_filter():
    bad = []
    long_fail = 0
    for length in (200, 300, 500):
        f = tchain(length)
        assert len(encode(f)) >= 1024
        v = uniformity_filter(f, budget=8, witnesses=[tchain_certificate(length)])
        ok = (v.verdict == "fail" and v.certificate is not None
              and verify_certificate(v.certificate)[0] and v.certificate.level < v.threshold)
        long_fail += ok
        if not ok:
            bad.append(("tchain", length, v.verdict))
    table = naive_kt_table("", 12)
    incompressible = [f for f in _eight_bit_formulas() if encode(f) not in table]
    for f in incompressible:
        v = uniformity_filter(f, budget=12)
        if v.verdict != "pass" or not v.exact:
            bad.append((render(f), v.verdict))
    ok = not bad and incompressible
    record(11, bool(ok), f"{long_fail}/3 long seeded formulas fail by certificate; "
                         f"{len(incompressible)} incompressible 8-bit formulas pass")
    assert ok


def _run_pipeline(root):
    corpus = root / "corpus"
    bench.cmd_gen("toy", 1, 23, corpus)
    cfg = {
        "corpus": [{"manifest": "corpus/toy-1-23.manifest.json"}],
        "systems": ["TT", "Res", "ER", "PS"],
        "budgets": {"levelCap": 16, "stepCap": 200000, "capBits": 128, "ktBudget": 12},
        "output": {"dir": "out", "cache": "cache/kt.jsonl"},
    }
    path = root / "config.json"
    path.write_text(json.dumps(cfg))
    rows, _ = bench.cmd_measure(bench.BenchConfig.load(path))
    results, code = bench.cmd_verify(root / "out" / "report.json")
    files = sorted(p for p in root.rglob("*") if p.is_file() and "cache" not in p.parts)
    return {p.relative_to(root): p.read_bytes() for p in files}, rows, results, code


def test_c12_end_to_end(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    files_a, rows, results, code = _run_pipeline(a)
    files_b, _, _, _ = _run_pipeline(b)
    identical = files_a == files_b
    verified = sum(r.ok for r in results)
    ok = identical and code == 0 and verified == len(results) > 0
    record(12, ok, f"{len(rows)} rows, {len(files_a)} files byte-identical: {identical}; "
                   f"{verified}/{len(results)} certificates verified")
    assert ok
