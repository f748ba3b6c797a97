"""Time-bounded Kolmogorov complexity Kt(w|u) = min |e| + ceil(log2 t) over U(e,u,1^t) = w.

Exact values come from exhaustive enumeration by level. Only ceil(log2 t)
enters a level, so a program e is tested at level i with the single time
bound 2^(i-|e|); a run that halts in s steps witnesses level |e| + ceil(log2 s)
and every larger level. Certificates record the least such t, i.e. max(s, 1).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from . import bits as B
from . import machine as M


@dataclass(frozen=True)
class KtCertificate:
    target: str
    condition: str
    program: str
    time: int
    level: int
    exact: bool
    machine_version: str = M.VERSION

    def to_json(self) -> dict:
        return {
            "target": {"hex": B.to_hex(self.target), "bitlen": len(self.target)},
            "condition": {"hex": B.to_hex(self.condition), "bitlen": len(self.condition)},
            "program": M.program_to_json(self.program),
            "time": self.time,
            "level": self.level,
            "exact": self.exact,
            "machineVersion": self.machine_version,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "KtCertificate":
        return cls(
            target=B.from_hex(obj["target"]["hex"], obj["target"]["bitlen"]),
            condition=B.from_hex(obj["condition"]["hex"], obj["condition"]["bitlen"]),
            program=M.program_from_json(obj["program"]),
            time=int(obj["time"]),
            level=int(obj["level"]),
            exact=bool(obj["exact"]),
            machine_version=obj["machineVersion"],
        )


def level_of(program: str, t: int) -> int:
    return len(program) + B.ceil_log2(t)


def _key(level: int, program: str, t: int):
    return (level, len(program), program, t)


def certificate_from_program(w: str, u: str, e: str, t: int | None = None, exact: bool = False) -> KtCertificate:
    """Build a certificate by running e; t defaults to the exact halting time."""
    out = M.run(e, u, t if t is not None else 1 << 40)
    if not out.halted or out.output != w:
        raise ValueError("program does not produce the target within the time bound")
    t_used = max(out.steps, 1) if t is None else t
    return KtCertificate(w, u, e, t_used, level_of(e, t_used), exact)


class KtSearcher:
    """Level-by-level exhaustive search for one condition u, memoizing runs."""

    def __init__(self, u: str):
        self.u = u
        # program -> (halting steps, output) or (-t, None) when timed out at t
        self.memo: dict[str, tuple[int, str | None]] = {}
        self.runs = 0
        self.vm_steps = 0

    def outcome(self, e: str, t: int) -> tuple[bool, int, str | None]:
        known = self.memo.get(e)
        if known is not None:
            s, out = known
            if out is not None:
                return s <= t, s, out
            if -s >= t:
                return False, t, None
        res = M.run(e, self.u, t)
        self.runs += 1
        self.vm_steps += res.steps
        if res.halted:
            self.memo[e] = (res.steps, res.output)
            return True, res.steps, res.output
        self.memo[e] = (-t, None)
        return False, t, None

    def search(self, w: str, budget: int) -> KtCertificate | None:
        for i in range(budget + 1):
            for length in range(i + 1):
                t = 1 << (i - length)
                for e in B.strings_of_length(length):
                    ok, s, out = self.outcome(e, t)
                    if ok and out == w and length + B.ceil_log2(max(s, 1)) == i:
                        t_min = max(s, 1)
                        return KtCertificate(w, self.u, e, t_min, i, True)
        return None


@lru_cache(maxsize=16)
def _searcher(u: str) -> KtSearcher:
    return KtSearcher(u)


def kt(w: str, u: str = "", budget: int = 12, witnesses: Iterable[KtCertificate] = ()) -> KtCertificate:
    """Kt(w|u): exact when some witness has level <= budget, otherwise the best
    known upper bound (print program or a valid caller-provided witness)."""
    if budget < 0:
        raise ValueError("budget must be >= 0")
    found = _searcher(u).search(w, budget)
    if found is not None:
        return found
    best = certificate_from_program(w, u, M.print_program_for(w))
    for c in witnesses:
        if c.target == w and c.condition == u and verify_certificate(c)[0]:
            c = KtCertificate(w, u, c.program, c.time, c.level, False, c.machine_version)
            if _key(c.level, c.program, c.time) < _key(best.level, best.program, best.time):
                best = c
    return best


def kt_lower_bound(w: str, u: str, budget: int) -> int:
    """A proven lower bound: budget+1 when no witness exists up to budget."""
    found = _searcher(u).search(w, budget)
    return found.level if found is not None else budget + 1


def kt_table(u: str, budget: int) -> dict[str, KtCertificate]:
    """Exact Kt(w|u) for every w with Kt(w|u) <= budget, from one pass over all programs."""
    best: dict[str, tuple] = {}
    for e in M.enumerate_programs(budget):
        res = M.run(e, u, 1 << (budget - len(e)))
        if not res.halted:
            continue
        t = max(res.steps, 1)
        key = _key(level_of(e, t), e, t)
        cur = best.get(res.output)
        if cur is None or key < cur:
            best[res.output] = key
    return {w: KtCertificate(w, u, k[2], k[3], k[0], True) for w, k in best.items()}


# -- information and composition ------------------------------------------------

@dataclass(frozen=True)
class ItValue:
    value: int
    kt_plain: int
    kt_conditional: int
    exact: bool


def it_info(u: str, w: str, budget: int = 12) -> ItValue:
    """It(u:w) = Kt(w) - Kt(w|u), with Kt(w) taken as Kt(w|"")."""
    plain = kt(w, "", budget)
    cond = kt(w, u, budget)
    return ItValue(plain.level - cond.level, plain.level, cond.level, plain.exact and cond.exact)


class CompositionError(ValueError):
    pass


def compose_certificates(first: KtCertificate, second: KtCertificate) -> KtCertificate:
    """From certificates for u given x and for w given u, a certificate for w given x.

    The composed program is compose(first.program, second.program); its level
    is at most first.level + second.level + 2*ceil(log2(first.level+1)) + c_pair.
    """
    if first.target != second.condition:
        raise CompositionError("first certificate does not produce the second's condition")
    for c in (first, second):
        ok, reason = verify_certificate(c)
        if not ok:
            raise CompositionError(f"input certificate invalid: {reason}")
    e = M.compose_programs(first.program, second.program)
    budget = 1 + first.time + second.time
    res = M.run(e, first.condition, budget)
    if not res.halted or res.output != second.target:
        raise CompositionError("composed program did not reproduce the target")
    t = max(res.steps, 1)
    return KtCertificate(second.target, first.condition, e, t, level_of(e, t), False)


def composition_bound(first_level: int, second_level: int) -> int:
    return first_level + second_level + 2 * B.ceil_log2(first_level + 1) + M.MACHINE.c_pair


def verify_certificate(c: KtCertificate, machine_version: str = M.VERSION) -> tuple[bool, str]:
    """Re-run the certificate; returns (ok, reason) with reason in
    {"ok", "version", "time", "level", "timeout", "output"}."""
    if c.machine_version != machine_version:
        return False, "version"
    if c.time < 1:
        return False, "time"
    if c.level != level_of(c.program, c.time):
        return False, "level"
    res = M.run(c.program, c.condition, c.time)
    if not res.halted:
        return False, "timeout"
    if res.output != c.target:
        return False, "output"
    return True, "ok"


# -- persistent cache ------------------------------------------------------------

def cache_key(kind: str, *parts: str, machine_version: str = M.VERSION) -> str:
    h = hashlib.sha256()
    for p in (kind, machine_version, *parts):
        h.update(p.encode())
        h.update(b"\x00")
    return h.hexdigest()


class JsonlCache:
    """Append-only JSON-lines map; the last record for a key wins on load."""

    def __init__(self, path: str | os.PathLike | None):
        self.path = path
        self.data: dict[str, dict] = {}
        self.hits = 0
        self.misses = 0
        if path is not None and os.path.exists(path):
            with open(path) as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = json.loads(line)
                        self.data[rec["key"]] = rec["value"]

    def get(self, key: str):
        if key in self.data:
            self.hits += 1
            return self.data[key]
        self.misses += 1
        return None

    def put(self, key: str, value: dict) -> None:
        if self.data.get(key) == value:
            return
        self.data[key] = value
        if self.path is not None:
            parent = os.path.dirname(os.fspath(self.path))
            if parent:
                os.makedirs(parent, exist_ok=True)
            with open(self.path, "a") as fh:
                fh.write(json.dumps({"key": key, "value": value}, sort_keys=True) + "\n")


def cached_kt(cache: JsonlCache, w: str, u: str, budget: int,
              witnesses: Sequence[KtCertificate] = ()) -> KtCertificate:
    key = cache_key("kt", w, u, str(budget))
    hit = cache.get(key)
    if hit is not None:
        return KtCertificate.from_json(hit)
    c = kt(w, u, budget, witnesses)
    cache.put(key, c.to_json())
    return c
