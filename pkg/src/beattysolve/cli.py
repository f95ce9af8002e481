"""Command-line driver.

Exit status carries the verdict: 0 sat (or success), 1 unsat (or nothing
found / a failing suite), 2 feasible without a witness (or budget
exhausted), 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from .alg import find_progression, solve, solve_congruence_pair
from .alpha import DEFAULT_PRECISION_CAP, AlphaProvider, PrecisionCapExceeded
from .beatty import BeattyCtx, UnboundVariable, eval_term
from .checks import SUITES, run_suite
from .nonalg import DEFAULT_BUDGET, kronecker_search
from .normalize import DEFAULT_CASE_LIMIT, CaseExplosion
from .oracle import BoxTooLarge, SearchBox, brute_solve
from .outcome import NO_WITNESS, SAT, UNSAT
from .syntax import FormulaSyntaxError, parse_formula, parse_term

EXIT = {SAT: 0, UNSAT: 1, NO_WITNESS: 2}
EXIT_ERROR = 3


class UsageError(ValueError):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", default=os.environ.get("BEATTY_ALPHA", "pi"),
                        help="pi, e, ln2 or digits:<path> (default: $BEATTY_ALPHA or pi)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    common.add_argument("--precision-cap", type=_positive, default=DEFAULT_PRECISION_CAP)
    common.add_argument("--case-limit", type=_positive, default=DEFAULT_CASE_LIMIT)
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0")

    p = argparse.ArgumentParser(prog="beattysolve", description="Decide systems over Z with f(x) = floor(alpha*x).")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[common], help="decide a system")
    s.add_argument("file", help="formula file, or - for stdin")
    s = sub.add_parser("eval", parents=[common], help="evaluate a term")
    s.add_argument("term")
    s.add_argument("--env", default="", help="x=10,y=-3")
    s = sub.add_parser("oracle", parents=[common], help="brute-force all solutions in a box")
    s.add_argument("file")
    s.add_argument("--box", default=None, help="x=-100..100,y=0..5")
    s.add_argument("--bound", type=_positive, default=100, help="|v| <= bound for variables missing from --box")
    s = sub.add_parser("kronecker", parents=[common], help="first x with fractional parts in target boxes")
    s.add_argument("--targets", required=True, help='"0:(1/2,3/5);1:(0,1/4)"')
    s = sub.add_parser("congpair", parents=[common], help="least x > 0 with x = i mod m, f(x) = j mod n")
    for name in ("m", "i", "n", "j"):
        s.add_argument(name, type=int)
    s = sub.add_parser("progression", parents=[common], help="arithmetic progression in the range of a term")
    s.add_argument("term")
    s.add_argument("n", type=_positive)
    s = sub.add_parser("check-axioms", parents=[common], help="run invariant suites")
    s.add_argument("--suite", choices=SUITES, action="append")
    s.add_argument("--samples", type=_positive, default=200)
    s.add_argument("--seed", type=int, default=0)
    return p


def parse_env(text: str) -> dict[str, int]:
    env = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise UsageError(f"bad binding {part!r}; expected name=value")
        k, v = part.split("=", 1)
        env[k.strip()] = int(v)
    return env


def parse_targets(text: str) -> dict[int, tuple[Fraction, Fraction]]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        try:
            level, rng = part.split(":", 1)
            lo, hi = rng.strip().strip("()").split(",")
            lo, hi = Fraction(lo.strip()), Fraction(hi.strip())
        except ValueError as exc:
            raise UsageError(f"bad target {part!r}; expected level:(lo,hi)") from exc
        if not (0 <= lo < hi <= 1):
            raise UsageError(f"target {part!r} must satisfy 0 <= lo < hi <= 1")
        out[int(level)] = (lo, hi)
    if not out:
        raise UsageError("no targets given")
    return out


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()


def _report(status: str, **fields) -> dict:
    rep = {"status": status, "witness": None, "cases_explored": 0, "precision_bits": 0,
           "certificate": [], "elapsed_ms": 0}
    rep.update(fields)
    return rep


def _strs(env: dict[str, int] | None):
    return None if env is None else {k: str(v) for k, v in env.items()}


def _text(rep: dict) -> str:
    cmd = rep.get("command")
    lines = []
    if cmd in ("solve", None):
        lines.append(rep["status"])
        if rep["witness"]:
            lines += [f"{k} = {v}" for k, v in rep["witness"].items()]
    elif cmd == "eval":
        lines.append(rep["value"])
    elif cmd == "oracle":
        lines.append(f"{len(rep['solutions'])} solution(s)")
        lines += [", ".join(f"{k} = {v}" for k, v in s.items()) for s in rep["solutions"]]
    elif cmd in ("kronecker", "congpair"):
        lines.append(f"x = {rep['witness']['x']}" if rep["witness"] else "none within budget")
    elif cmd == "progression":
        if rep["witness"]:
            w, pr = rep["witness"], rep["progression"]
            lines.append(f"x = {w['x']}, y = {w['y']}: h(x + l*y) = {pr['start']} + {pr['step']}*l "
                         f"for l = 0..{pr['length']}")
        else:
            lines.append("none within budget")
    elif cmd == "check-axioms":
        for s in rep["suites"]:
            verdict = "pass" if s["failed"] == 0 else "FAIL"
            tail = f" (first failure: {s['first_failure']})" if s.get("first_failure") else ""
            lines.append(f"{s['suite']}: {verdict} {s['passed']} passed, {s['failed']} failed{tail}")
    return "\n".join(lines)


def execute(args) -> tuple[dict, int]:
    ctx = BeattyCtx(AlphaProvider.from_spec(args.alpha, cap=args.precision_cap))
    rep, code = dispatch(args, ctx)
    rep["precision_bits"] = ctx.precision_bits
    return rep, code


def dispatch(args, ctx: BeattyCtx) -> tuple[dict, int]:
    cmd = args.command
    if cmd == "solve":
        out = solve(ctx, _read(args.file), args.budget, args.case_limit, args.workers)
        rep = _report(out.status, witness=_strs(out.witness), cases_explored=out.cases_explored,
                      certificate=out.certificate)
        return rep, EXIT[out.status]
    if cmd == "eval":
        val = eval_term(ctx, parse_term(args.term), parse_env(args.env))
        return _report("ok", value=str(val)), 0
    if cmd == "oracle":
        s = parse_formula(_read(args.file))
        given = SearchBox.parse(args.box) if args.box else SearchBox(())
        names = {r[0] for r in given.ranges}
        box = SearchBox(given.ranges + tuple((v, -args.bound, args.bound) for v in s.variables if v not in names))
        sols = brute_solve(ctx, s, box, workers=args.workers)
        return _report("sat" if sols else "unsat", solutions=[_strs(e) for e in sols],
                       witness=_strs(sols[0]) if sols else None), 0 if sols else 1
    if cmd == "kronecker":
        x = kronecker_search(ctx, "x", parse_targets(args.targets), args.budget, args.workers)
        if x is None:
            return _report("none"), 2
        return _report("ok", witness={"x": str(x)}), 0
    if cmd == "congpair":
        try:
            x = solve_congruence_pair(ctx, args.m, args.i, args.n, args.j, args.budget)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if x is None:
            return _report("none"), 2
        return _report("ok", witness={"x": str(x)}), 0
    if cmd == "progression":
        pr = find_progression(ctx, parse_term(args.term), args.n, args.budget, args.workers)
        if pr is None:
            return _report("none"), 2
        return _report("ok", witness={"x": str(pr.x), "y": str(pr.y)},
                       progression={"start": str(pr.start), "step": str(pr.step), "length": args.n}), 0
    if cmd == "check-axioms":
        reports = [run_suite(ctx, s, args.samples, args.seed, args.workers) for s in (args.suite or SUITES)]
        bad = any(r.failed for r in reports)
        suites = [{"suite": r.suite, "passed": r.passed, "failed": r.failed, "first_failure": r.first_failure}
                  for r in reports]
        return _report("fail" if bad else "pass", suites=suites), 1 if bad else 0
    raise UsageError(f"unknown command {cmd}")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    start = time.perf_counter()
    try:
        rep, code = execute(args)
    except FormulaSyntaxError as exc:
        rep, code = _report("error", error=str(exc)), EXIT_ERROR
    except (UsageError, UnboundVariable, BoxTooLarge, CaseExplosion, PrecisionCapExceeded,
            OSError, ValueError) as exc:
        rep, code = _report("error", error=str(exc)), EXIT_ERROR
    rep["command"] = args.command
    if not args.no_timing:
        rep["elapsed_ms"] = int((time.perf_counter() - start) * 1000)
    if args.format == "json":
        stdout.write(json.dumps(rep, sort_keys=True) + "\n")
    elif code != EXIT_ERROR:
        stdout.write(_text(rep) + "\n")
    if code == EXIT_ERROR:
        stderr.write(f"error: {rep['error']}\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
