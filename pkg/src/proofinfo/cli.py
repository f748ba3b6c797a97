"""Command line entry point.

Exit codes: 0 ok, 1 usage or configuration error, 2 budget exhausted (the
output then carries bounds), 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bits as B
from . import bench
from .formula import FormulaError, encode, parse
from .kt import kt
from .search import info_search_bp, levin_search_ap
from .systems import ProofSystemId

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bits(text: str) -> str:
    if not B.is_bits(text):
        raise argparse.ArgumentTypeError(f"not a bitstring: {text!r}")
    return text


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="proofinfo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a corpus of family instances as DIMACS files")
    g.add_argument("family", help="family tag: php, tchain or toy")
    g.add_argument("lo", type=int)
    g.add_argument("hi", type=int)
    g.add_argument("--out", default="corpus", help="output directory (default: corpus)")

    m = sub.add_parser("measure", help="measure a corpus as configured in a JSON file")
    m.add_argument("config")

    v = sub.add_parser("verify", help="re-check every certificate in a report")
    v.add_argument("report")

    k = sub.add_parser("kt", help="Kt(target | condition) with a certificate")
    k.add_argument("target", type=_bits)
    k.add_argument("--cond", type=_bits, default="", help="condition bits (default: empty)")
    k.add_argument("--budget", type=int, default=12, help="exhaustive search level (default: 12)")

    for name, helptext in (("ip", "information efficiency of a formula"),
                           ("search", "run a universal proof search")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("formula", help='formula text, e.g. "(x1 | ~x1)"')
        s.add_argument("--system", default="TT", help="TT, Res, ER, PS or QPrime(<base>,<family>)")
        s.add_argument("--level-cap", type=int, default=16, help="level search cap (default: 16)")
        if name == "search":
            s.add_argument("--algo", choices=("bp", "ap"), default="bp",
                           help="level search (bp) or dovetailing (ap)")
            s.add_argument("--step-cap", type=int, default=1_000_000,
                           help="host step cap for ap (default: 1000000)")
    return p


def _print(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (bench.ConfigError, FormulaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    if args.command == "gen":
        for path in bench.cmd_gen(args.family, args.lo, args.hi, args.out):
            print(path)
        return EXIT_OK
    if args.command == "measure":
        cfg = bench.BenchConfig.load(args.config)
        rows, code = bench.cmd_measure(cfg)
        print(f"{len(rows)} rows written to {cfg.out_dir}")
        return code
    if args.command == "verify":
        results, code = bench.cmd_verify(args.report)
        for r in results:
            print(f"row {r.row} {r.ref}: {'ok' if r.ok else 'FAIL ' + r.reason}")
        return code
    if args.command == "kt":
        if args.budget < 0:
            raise ValueError("budget must be >= 0")
        cert = kt(args.target, args.cond, args.budget)
        _print(cert.to_json())
        return EXIT_OK if cert.exact else EXIT_BUDGET
    system = ProofSystemId.parse(args.system)
    f = parse(args.formula)
    if args.command == "ip" or args.algo == "bp":
        r = info_search_bp(system, f, args.level_cap)
        out = {
            "formula": args.formula,
            "system": system.name,
            "iP": r.lower_bound,
            "exact": r.exact,
            "hostSteps": r.host_steps,
        }
        if r.exact:
            out["proof"] = {"hex": B.to_hex(r.proof), "bitlen": len(r.proof)}
            out["program"] = {"hex": B.to_hex(r.program), "bitlen": len(r.program)}
            out["time"] = r.time
        _print(out)
        return EXIT_OK if r.exact else EXIT_BUDGET
    a = levin_search_ap(system, f, args.step_cap)
    out = {"formula": args.formula, "system": system.name, "hostSteps": a.host_steps,
           "found": a.proof is not None, "input": {"hex": B.to_hex(encode(f)), "bitlen": len(encode(f))}}
    if a.proof is not None:
        out.update(proof={"hex": B.to_hex(a.proof), "bitlen": len(a.proof)},
                   programIndex=a.index, round=a.round)
    _print(out)
    return EXIT_OK if a.proof is not None else EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
