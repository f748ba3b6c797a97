"""Corpus generation, measurement tables and report verification."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import bits as B
from . import machine as M
from . import generators as G
from .cnf import negate_to_cnf, to_dimacs
from .formula import Formula, decode, encode, render
from .kt import JsonlCache, KtCertificate, cache_key, cached_kt, verify_certificate
from .search import info_search_bp, levin_search_ap
from .systems import ENCODING_VERSION, ProofSystemId, check, minimal_proof, s_p_exact

REPORT_SCHEMA = "bench-report-1"
MANIFEST_SCHEMA = "corpus-manifest-1"

CSV_COLUMNS = [
    "id", "size", "system", "sP", "sPStatus", "iP", "iPStatus",
    "stepsAP", "stepsBP", "ktLevel", "ktExact", "filter",
]


class ConfigError(ValueError):
    pass


class VersionMismatch(ConfigError):
    pass


@dataclass(frozen=True)
class Budgets:
    level_cap: int = 16
    step_cap: int = 200_000
    cap_bits: int = 128
    kt_budget: int = 12

    def check(self) -> None:
        for name, value in asdict(self).items():
            if not isinstance(value, int) or value <= 0:
                raise ConfigError(f"budget {name} must be a positive integer")


@dataclass(frozen=True)
class CorpusEntry:
    family: str | None = None
    lo: int = 1
    hi: int = 1
    manifest: str | None = None


@dataclass(frozen=True)
class BenchConfig:
    corpus: tuple[CorpusEntry, ...]
    systems: tuple[str, ...] = ("TT", "Res", "ER")
    budgets: Budgets = field(default_factory=Budgets)
    filter: bool = True
    out_dir: str = "out"
    cache: str | None = None
    machine_version: str = M.VERSION

    @classmethod
    def from_json(cls, obj: dict, base_dir: str | os.PathLike = ".") -> "BenchConfig":
        try:
            corpus = []
            for item in obj["corpus"]:
                if "manifest" in item:
                    corpus.append(CorpusEntry(manifest=str(Path(base_dir) / item["manifest"])))
                else:
                    lo, hi = item["range"]
                    corpus.append(CorpusEntry(item["family"], int(lo), int(hi)))
            b = obj.get("budgets", {})
            budgets = Budgets(
                level_cap=b.get("levelCap", 16), step_cap=b.get("stepCap", 200_000),
                cap_bits=b.get("capBits", 128), kt_budget=b.get("ktBudget", 12),
            )
            out = obj.get("output", {})
            cache = out.get("cache")
            cfg = cls(
                corpus=tuple(corpus),
                systems=tuple(obj.get("systems", ("TT", "Res", "ER"))),
                budgets=budgets,
                filter=bool(obj.get("filter", True)),
                out_dir=str(Path(base_dir) / out.get("dir", "out")),
                cache=None if cache is None else str(Path(base_dir) / cache),
                machine_version=obj.get("machineVersion", M.VERSION),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path: str | os.PathLike) -> "BenchConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh), Path(path).parent)

    def check(self) -> None:
        self.budgets.check()
        if self.machine_version != M.VERSION:
            raise VersionMismatch(f"config pins {self.machine_version}, machine is {M.VERSION}")
        for s in self.systems:
            try:
                ProofSystemId.parse(s)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        for e in self.corpus:
            if e.manifest is None and e.family not in G.FAMILY_SPECS:
                raise ConfigError(f"unknown family {e.family!r}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- gen --------------------------------------------------------------------------

def instance_metadata(family: str, n: int) -> dict:
    spec = G.FAMILY_SPECS[family]
    f = spec.make(n)
    code = encode(f)
    meta = {
        "id": f"{family}-{n}",
        "family": family,
        "n": n,
        "seed": spec.seed,
        "formula": {"hex": B.to_hex(code), "bitlen": len(code)},
        "unaryCertificate": G.unary_certificate(n).to_json(),
    }
    if family == "tchain":
        meta["codeCertificate"] = G.tchain_certificate(n + 1).to_json()
    return meta


def cmd_gen(family: str, lo: int, hi: int, out_dir: str | os.PathLike) -> list[Path]:
    """Write one DIMACS file per instance (clauses of the negated formula, with
    the rendering and metadata as comments) and a manifest."""
    if family not in G.FAMILY_SPECS:
        raise ConfigError(f"unknown family {family!r}")
    spec = G.FAMILY_SPECS[family]
    if not 1 <= lo <= hi <= spec.limit:
        raise ConfigError(f"range must satisfy 1 <= lo <= hi <= {spec.limit}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    instances = []
    for n in range(lo, hi + 1):
        f = spec.make(n)
        meta = instance_metadata(family, n)
        comments = [
            f"id {meta['id']}",
            f"family {family} n {n}",
            f"seed {spec.seed}",
            f"formula {render(f)}",
            f"code {meta['formula']['hex']} {meta['formula']['bitlen']}",
        ]
        path = out / f"{family}-{n}.cnf"
        path.write_text(to_dimacs(negate_to_cnf(f), comments))
        written.append(path)
        meta["file"] = path.name
        instances.append(meta)
    manifest = out / f"{family}-{lo}-{hi}.manifest.json"
    manifest.write_text(_dump({
        "schema": MANIFEST_SCHEMA,
        "machineVersion": M.VERSION,
        "encodingVersion": ENCODING_VERSION,
        "family": family,
        "range": [lo, hi],
        "instances": instances,
    }))
    written.append(manifest)
    return written


def load_corpus(cfg: BenchConfig) -> list[tuple[str, Formula, list[KtCertificate]]]:
    items = []
    for entry in cfg.corpus:
        if entry.manifest is not None:
            with open(entry.manifest) as fh:
                man = json.load(fh)
            if man.get("machineVersion") != M.VERSION:
                raise VersionMismatch(f"manifest {entry.manifest} was built for {man.get('machineVersion')}")
            for inst in man["instances"]:
                f = decode(B.from_hex(inst["formula"]["hex"], inst["formula"]["bitlen"]))
                wit = [KtCertificate.from_json(inst["codeCertificate"])] if "codeCertificate" in inst else []
                items.append((inst["id"], f, wit))
        else:
            for n in range(entry.lo, entry.hi + 1):
                meta = instance_metadata(entry.family, n)
                f = G.FAMILY_SPECS[entry.family].make(n)
                wit = [KtCertificate.from_json(meta["codeCertificate"])] if "codeCertificate" in meta else []
                items.append((meta["id"], f, wit))
    return items


# -- measure ------------------------------------------------------------------------

def _measure_row(system: ProofSystemId, fid: str, f: Formula, b: Budgets) -> dict:
    code = encode(f)
    row: dict = {"id": fid, "size": len(code), "system": system.name}
    sp = s_p_exact(system, f, b.cap_bits) if len(code) <= b.cap_bits else None
    row["sP"] = sp
    row["sPStatus"] = "exact" if sp is not None else "unknown"
    row["sPProof"] = None
    if sp is not None:
        w = minimal_proof(system, f)
        if w is not None and len(w) == sp:
            row["sPProof"] = {"hex": B.to_hex(w), "bitlen": len(w)}
    r = info_search_bp(system, f, b.level_cap)
    row["iP"] = r.lower_bound
    row["iPStatus"] = "exact" if r.exact else "lower-bound"
    row["stepsBP"] = r.host_steps
    row["iPCertificate"] = None
    if r.exact:
        cert = KtCertificate(r.proof, code, r.program, r.time, r.level, True)
        row["iPCertificate"] = cert.to_json()
    a = levin_search_ap(system, f, b.step_cap)
    row["stepsAP"] = a.host_steps if a.proof is not None else None
    return row


def cmd_measure(cfg: BenchConfig) -> tuple[list[dict], int]:
    """Measure every (formula, system) pair, write report.json and report.csv.

    Returns the rows and the exit code: 2 when some value is only a bound.
    """
    cfg.check()
    cache = JsonlCache(cfg.cache)
    rows = []
    b = cfg.budgets
    for fid, f, witnesses in load_corpus(cfg):
        code = encode(f)
        kt_cert = cached_kt(cache, code, "", b.kt_budget, witnesses)
        verdict = None
        if cfg.filter:
            verdict = G.uniformity_filter(f, b.kt_budget, witnesses).verdict
        for name in cfg.systems:
            system = ProofSystemId.parse(name)
            key = cache_key("row", system.name, code, str(b.level_cap), str(b.step_cap), str(b.cap_bits))
            row = cache.get(key)
            if row is None:
                row = _measure_row(system, fid, f, b)
                cache.put(key, row)
            row = dict(row, id=fid)
            row["formula"] = {"hex": B.to_hex(code), "bitlen": len(code)}
            row["ktLevel"] = kt_cert.level
            row["ktExact"] = kt_cert.exact
            row["ktCertificate"] = kt_cert.to_json()
            row["filter"] = verdict
            rows.append(row)
    write_report(cfg, rows)
    bounded = any(r["iPStatus"] != "exact" or r["sPStatus"] != "exact" or r["stepsAP"] is None
                  for r in rows)
    return rows, 2 if bounded else 0


def write_report(cfg: BenchConfig, rows: list[dict]) -> tuple[Path, Path]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = {
        "schema": REPORT_SCHEMA,
        "machineVersion": M.VERSION,
        "encodingVersion": ENCODING_VERSION,
        "machine": json.loads(M.MACHINE.to_json()),
        "budgets": asdict(cfg.budgets),
        "rows": rows,
    }
    jpath = out / "report.json"
    jpath.write_text(_dump(report))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["# " + REPORT_SCHEMA, M.VERSION, ENCODING_VERSION])
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(["" if r.get(c) is None else _csv_value(c, r) for c in CSV_COLUMNS])
    cpath = out / "report.csv"
    cpath.write_text(buf.getvalue())
    return jpath, cpath


def _csv_value(col: str, r: dict) -> str:
    v = r[col]
    if col == "iP" and r["iPStatus"] != "exact":
        return f">={v}"
    return str(v).lower() if isinstance(v, bool) else str(v)


# -- verify -------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    row: int
    ref: str
    ok: bool
    reason: str


def _check_kt(cert_json: dict, expect_target: str | None, expect_condition: str) -> tuple[bool, str]:
    try:
        cert = KtCertificate.from_json(cert_json)
    except (KeyError, ValueError, TypeError) as exc:
        return False, f"malformed: {exc}"
    ok, reason = verify_certificate(cert)
    if not ok:
        return False, reason
    if expect_target is not None and cert.target != expect_target:
        return False, "target"
    if cert.condition != expect_condition:
        return False, "condition"
    return True, "ok"


def cmd_verify(report_path: str | os.PathLike) -> tuple[list[CheckResult], int]:
    """Re-check every certificate and proof in a report; exit code 3 on any failure."""
    with open(report_path) as fh:
        report = json.load(fh)
    results: list[CheckResult] = []
    version_ok = report.get("machineVersion") == M.VERSION
    for i, row in enumerate(report["rows"]):
        refs = []
        if row.get("iPCertificate") is not None:
            refs.append("iP")
        if row.get("ktCertificate") is not None:
            refs.append("kt")
        if row.get("sPProof") is not None:
            refs.append("sP")
        for ref in refs:
            if not version_ok:
                results.append(CheckResult(i, ref, False, "version"))
                continue
            try:
                ok, reason = _verify_ref(row, ref)
            except (KeyError, ValueError, TypeError) as exc:
                ok, reason = False, f"malformed: {exc}"
            results.append(CheckResult(i, ref, ok, reason))
    return results, 0 if all(r.ok for r in results) else 3


def _verify_ref(row: dict, ref: str) -> tuple[bool, str]:
    system = ProofSystemId.parse(row["system"])
    if ref == "kt":
        cert = row["ktCertificate"]
        code = B.from_hex(row["formula"]["hex"], row["formula"]["bitlen"])
        ok, reason = _check_kt(cert, code, "")
        if ok and cert["level"] != row["ktLevel"]:
            return False, "mismatch"
        return ok, reason
    if ref == "iP":
        cert = row["iPCertificate"]
        cond = B.from_hex(cert["condition"]["hex"], cert["condition"]["bitlen"])
        ok, reason = _check_kt(cert, None, cond)
        if ok and cond != B.from_hex(row["formula"]["hex"], row["formula"]["bitlen"]):
            ok, reason = False, "condition"
        if not ok:
            return ok, reason
        f = decode(cond)
        proof = B.from_hex(cert["target"]["hex"], cert["target"]["bitlen"])
        if check(system, proof)[0] != f:
            return False, "not-a-proof"
        if cert["level"] != row["iP"]:
            return False, "mismatch"
        return True, "ok"
    proof = B.from_hex(row["sPProof"]["hex"], row["sPProof"]["bitlen"])
    got, reason = check(system, proof)
    if got is None:
        return False, reason
    if len(proof) != row["sP"]:
        return False, "mismatch"
    return True, "ok"


def sandwich_holds(row: dict) -> bool | None:
    """log2 s_P <= i_P, or None when either side is not exact."""
    if row["sPStatus"] != "exact" or row["iPStatus"] != "exact":
        return None
    return math.log2(row["sP"]) <= row["iP"]


@dataclass(frozen=True)
class CostFit:
    constant: float
    exponent: float
    points: int

    def bound(self, level: int, size: int) -> float:
        return self.constant * 4.0 ** level * size ** self.exponent


def fit_cost_bound(samples: list[tuple[int, int, int]]) -> CostFit:
    """Fit steps <= C * 4^level * size^k over (steps, level, size) samples.

    k comes from least squares on log2(steps) - 2*level against log2(size);
    C is then the smallest constant that makes the bound hold on every sample.
    """
    if not samples:
        raise ValueError("no samples to fit")
    steps = np.array([s for s, _, _ in samples], dtype=float)
    level = np.array([l for _, l, _ in samples], dtype=float)
    size = np.array([z for _, _, z in samples], dtype=float)
    y = np.log2(np.maximum(steps, 1.0)) - 2.0 * level
    x = np.log2(size)
    if np.ptp(x) == 0:
        k = 0.0
    else:
        design = np.column_stack([x, np.ones_like(x)])
        (k, _), *_ = np.linalg.lstsq(design, y, rcond=None)
        k = max(float(k), 0.0)
    c = float(np.max(steps / (4.0 ** level * size ** k)))
    return CostFit(c, k, len(samples))
