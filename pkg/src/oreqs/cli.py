"""Command-line front end.

Exit codes::

    0  success
    1  rank mismatch or failed verification
    2  parse error, unreadable file or bad arguments
    3  input matrix is not idempotent
    4  internal invariant violation
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from .idemgen import GenSpec, generate_idempotent
from .qs import (
    InvariantError,
    NonTerminationError,
    NotIdempotentError,
    diagonalize_idempotent,
    entry_relations,
    verify_result,
)
from .textio import (
    ParseError,
    ProblemFile,
    parse_problem,
    parse_result,
    parse_ring,
    print_result,
    render_problem,
    result_to_json,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_NOT_IDEMPOTENT = 3
EXIT_INTERNAL = 4

RING_PRESETS = {
    "commutative": "ring { field = Q; sigma = id; delta = zero }",
    "conj": "ring { field = Qi; sigma = conj; delta = zero }",
    "ddt": "ring { field = Qt; sigma = id; delta = ddt }",
    "shift": "ring { field = Qt; sigma = shift(1); delta = zero }",
    "qdiff": "ring { field = Qqt; sigma = scale(q); delta = qdiff }",
}

# Ranks stated for the four worked examples.
FIXTURE_RANKS = {"ex31": 3, "ex32": 2, "ex33": 2, "ex34": 2}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _err(msg: str) -> None:
    print(f"oreqs: {msg}", file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_USAGE) from None


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def load_problem(path: str) -> ProblemFile:
    try:
        return parse_problem(_read(path))
    except ParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_USAGE) from None


def fixture_problems() -> dict[str, ProblemFile]:
    data = resources.files("oreqs") / "data"
    out = {}
    for name in sorted(FIXTURE_RANKS):
        out[name] = parse_problem((data / f"{name}.oreq").read_text(encoding="utf-8"))
    return out


def _solve(problem: ProblemFile, *, check: bool, snapshots: bool = False):
    try:
        result = diagonalize_idempotent(problem.matrix, snapshots=snapshots)
    except NotIdempotentError as exc:
        raise CliError(str(exc), EXIT_NOT_IDEMPOTENT) from None
    except (NonTerminationError, InvariantError) as exc:
        raise CliError(f"internal error: {exc}", EXIT_INTERNAL) from None
    if check:
        report = verify_result(problem.matrix, result)
        if not report.ok:
            raise CliError("result failed verification: " + ", ".join(report.failed()), EXIT_INTERNAL)
    return result


def cmd_solve(args) -> int:
    problem = load_problem(args.file)
    verbosity = 2 if args.trace_full else 1 if args.trace else 0
    result = _solve(problem, check=args.check, snapshots=verbosity >= 2)
    if args.json:
        text = json.dumps(result_to_json(result), indent=2) + "\n"
    else:
        text = print_result(result, verbosity)
    _write(text, args.output)
    if problem.expected_rank is not None and problem.expected_rank != result.r:
        _err(f"rank {result.r} differs from expected_rank {problem.expected_rank}")
        return EXIT_MISMATCH
    return EXIT_OK


def _ring_from_arg(arg: str):
    if arg in RING_PRESETS:
        return parse_ring(RING_PRESETS[arg])
    text = arg
    if not arg.lstrip().startswith("ring"):
        text = _read(arg)
        start = text.find("ring")
        end = text.find("}", start)
        if start < 0 or end < 0:
            raise CliError(f"{arg}: no ring block found", EXIT_USAGE)
        text = text[start : end + 1]
    try:
        return parse_ring(text)
    except ParseError as exc:
        raise CliError(f"ring: {exc}", EXIT_USAGE) from None


def cmd_gen(args) -> int:
    try:
        spec = GenSpec(args.size, args.rank, args.transvections, args.degree, args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    ring = _ring_from_arg(args.ring)
    F, _ = generate_idempotent(spec, ring)
    name = f"gen-s{spec.size}-r{spec.rank}-seed{spec.seed}"
    _write(render_problem(ProblemFile(ring, F, name, spec.rank)), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = load_problem(args.problem)
    try:
        parsed = parse_result(_read(args.result))
    except (ParseError, ValueError) as exc:
        raise CliError(f"{args.result}: {exc}", EXIT_USAGE) from None
    if parsed.ring != problem.ring:
        _err("result ring differs from problem ring")
        return EXIT_MISMATCH
    if parsed.U.shape != problem.matrix.shape:
        _err("result size differs from problem size")
        return EXIT_MISMATCH
    report = verify_result(problem.matrix, parsed)
    print("\n".join(report.lines()))
    if not report.ok:
        return EXIT_MISMATCH
    if problem.expected_rank is not None and problem.expected_rank != parsed.r:
        _err(f"rank {parsed.r} differs from expected_rank {problem.expected_rank}")
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_fixtures(args) -> int:
    failures = 0
    for name, problem in fixture_problems().items():
        expected = FIXTURE_RANKS[name]
        t0 = time.perf_counter()
        rel = entry_relations(problem.matrix)
        try:
            result = _solve(problem, check=False)
        except CliError as exc:
            print(f"FAIL  {name}: {exc}")
            failures += 1
            continue
        report = verify_result(problem.matrix, result)
        elapsed = time.perf_counter() - t0
        good = result.r == expected and report.ok and all(rel)
        failures += not good
        print(f"{'PASS' if good else 'FAIL'}  {name}  rank {result.r} (expected {expected})  {len(result.trace)} steps  {elapsed:.2f}s")
        if not good:
            if result.r != expected:
                print(f"  - rank {expected}\n  + rank {result.r}")
            for check in report.failed():
                print(f"  - {check}")
            if not all(rel):
                print("  - first-row entry relations")
        if args.trace:
            for n, step in enumerate(result.trace, start=1):
                print(f"    {n}. {step.text()}")
    print(f"{len(FIXTURE_RANKS) - failures}/{len(FIXTURE_RANKS)} fixtures pass")
    return EXIT_MISMATCH if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oreqs", description="Free bases of projective modules over Ore extensions K[x; sigma, delta].")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="diagonalize the idempotent matrix in a problem file")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--trace", action="store_true", help="print the numbered step list")
    g.add_argument("--trace-full", action="store_true", help="also print the matrix after every step")
    s.add_argument("--check", action=argparse.BooleanOptionalAction, default=True, help="re-verify the result before exiting (default on)")
    s.add_argument("--json", action="store_true", help="emit a JSON document instead of text")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("gen", help="write a random idempotent of known rank")
    s.add_argument("--size", type=int, required=True)
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--degree", type=int, default=2, help="maximal x-degree of each transvection entry")
    s.add_argument("--transvections", type=int, default=3)
    s.add_argument("--ring", default="conj", help=f"preset ({', '.join(RING_PRESETS)}), inline 'ring {{...}}' or a file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("verify", help="check a result file against its problem")
    s.add_argument("result")
    s.add_argument("problem")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("fixtures", help="run the four built-in worked examples")
    s.add_argument("--trace", action="store_true")
    s.set_defaults(func=cmd_fixtures)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        _err(str(exc))
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
