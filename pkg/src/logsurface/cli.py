"""Command line interface.

Exit codes: 0 success, 1 domain error, 2 verification mismatch, 3 parse error.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .bounds import semigroup_decompose, semigroup_table, verify_certificate
from .documents import (
    SCHEMA_VERSION,
    dumps,
    parse_case,
    parse_certificate,
    write_atomic,
)
from .errors import DomainError, LogSurfaceError, ParseError, ResourceError, VerificationError
from .generators import random_klt_pair
from .reports import classify_report, mmp_report, pipeline_report, terminalize_report
from .singularity import brute_force_min_discrepancy, min_discrepancy_snc

EXIT_OK, EXIT_DOMAIN, EXIT_MISMATCH, EXIT_PARSE = 0, 1, 2, 3


def _exit_code(err: BaseException) -> int:
    if isinstance(err, ParseError):
        return EXIT_PARSE
    if isinstance(err, VerificationError):
        return EXIT_MISMATCH
    return EXIT_DOMAIN


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as err:
        raise ParseError(f"cannot read input: {err.strerror}", str(path)) from None


def _emit(text: str, output: str | None) -> None:
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def _parse_sweep(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        a, b = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if a < 1 or b < a:
        raise argparse.ArgumentTypeError("sweep range must satisfy 1 <= A <= B")
    return a, b


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> int:
    doc = parse_case(_read(args.input))
    _emit(dumps(classify_report(doc)), args.output)
    return EXIT_OK


def cmd_terminalize(args) -> int:
    doc = parse_case(_read(args.input))
    _emit(dumps(terminalize_report(doc, args.order)), args.output)
    return EXIT_OK


def cmd_mmp(args) -> int:
    doc = parse_case(_read(args.input))
    _emit(dumps(mmp_report(doc, args.assume_big)), args.output)
    return EXIT_OK


def cmd_semigroup(args) -> int:
    N = args.n
    if N is None or N < 1:
        raise DomainError("--n must be a positive integer")
    if args.sweep is not None:
        lo, hi = args.sweep
        ms = range(lo, hi + 1)
    elif args.m is not None:
        ms = [args.m]
    else:
        raise DomainError("give --m or --sweep")
    rows = []
    for m in ms:
        qs = semigroup_decompose(N, m)
        rows.append({"m": m, "decomposition": "not-representable" if qs is None else qs})
    out = {"schema_version": SCHEMA_VERSION, "command": "semigroup", "N": N, "bound": N * N + 1, "results": rows}
    _emit(dumps(out), args.output)
    if args.figures:
        from .plotting import render_semigroup_figure

        top = max(max(ms), N * N + 2 * N + 2)
        render_semigroup_figure(N, top, Path(args.figures) / f"semigroup_N{N}.png")
    return EXIT_OK


def _pipeline_one(path: str, timing: bool) -> tuple[str, int, str | None, str | None]:
    """Worker: returns ``(case name, exit code, report text, error message)``."""
    started = time.perf_counter()
    try:
        doc = parse_case(_read(path))
        report, _ = pipeline_report(doc)
    except (LogSurfaceError, AssertionError) as err:
        code = EXIT_DOMAIN if isinstance(err, AssertionError) else _exit_code(err)
        return _case_stem(Path(path)), code, None, str(err)
    if timing:
        report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    return doc.name, EXIT_OK, dumps(report), None


def _case_stem(path: Path) -> str:
    return path.name.removesuffix(".json").removesuffix(".case")


def _figure_for(report_text: str, target: Path, name: str) -> None:
    from .plotting import render_pipeline_figure

    render_pipeline_figure(parse_certificate(report_text), target, name)


def cmd_pipeline(args) -> int:
    src = Path(args.input)
    if src.is_dir():
        return _pipeline_batch(args, src)
    name, code, text, error = _pipeline_one(str(src), args.timing)
    if code:
        print(f"error: {error}", file=sys.stderr)
        return code
    _emit(text, args.output)
    if args.figures:
        _figure_for(text, Path(args.figures) / f"{_case_stem(src)}.dual_graphs.png", name)
    return EXIT_OK


def _pipeline_batch(args, src: Path) -> int:
    if not args.output:
        raise DomainError("batch mode needs --output DIR")
    out_dir = Path(args.output)
    cases = sorted(p for p in src.glob("*.json") if not p.name.endswith(".report.json"))
    jobs = max(1, args.jobs or 1)
    if jobs == 1:
        results = [_pipeline_one(str(p), args.timing) for p in cases]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_pipeline_one, [str(p) for p in cases], [args.timing] * len(cases)))
    index = []
    worst = EXIT_OK
    for path, (name, code, text, error) in zip(cases, results):
        entry = {"case_file": path.name, "name": name, "exit_code": code}
        if code == EXIT_OK:
            report_name = f"{_case_stem(path)}.report.json"
            write_atomic(out_dir / report_name, text)
            entry["report"] = report_name
            if args.figures:
                _figure_for(text, Path(args.figures) / f"{_case_stem(path)}.dual_graphs.png", name)
        else:
            entry["error"] = error
            worst = max(worst, code)
        index.append(entry)
    write_atomic(out_dir / "index.json", dumps({"schema_version": SCHEMA_VERSION, "cases": index}))
    return worst


def cmd_verify(args) -> int:
    cert = parse_certificate(_read(args.input))
    problems = verify_certificate(cert)
    if problems:
        for p in problems:
            print(f"mismatch: {p}", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"certificate verified: N = {cert.N}, m0 = {cert.m0}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    rng = random.Random(args.seed)
    mismatches = []
    discrepancy_cases = 0
    for n in range(args.cases):
        k = rng.randint(2, 6)
        pair = random_klt_pair(rng, k)
        closed, _ = min_discrepancy_snc(pair)
        brute = brute_force_min_discrepancy(pair, args.depth)
        discrepancy_cases += 1
        if closed != brute:
            mismatches.append(f"discrepancy case {n}: closed form {closed} vs oracle {brute}")
    semigroup_checks = 0
    for N in range(1, args.max_n + 1):
        top = N * N + args.span
        table = semigroup_table(N, top)
        for m in range(1, top + 1):
            qs = semigroup_decompose(N, m)
            member = table[m] != 0
            semigroup_checks += 1
            if (qs is not None) != member or (qs is not None and sum(q * N + 1 for q in qs) != m):
                mismatches.append(f"semigroup N={N} m={m}: decomposition {qs}, oracle {member}")
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": "oracle",
        "seed": args.seed,
        "depth": args.depth,
        "discrepancy_cases": discrepancy_cases,
        "semigroup_checks": semigroup_checks,
        "mismatches": mismatches,
    }
    _emit(dumps(out), args.output)
    return EXIT_MISMATCH if mismatches else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logsurface", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def io(p, output_help="report path (default: stdout)"):
        p.add_argument("--input", required=True, help="case document (JSON)")
        p.add_argument("--output", help=output_help)

    p = sub.add_parser("classify", help="singularity class and minimal discrepancy of a case")
    io(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("terminalize", help="crepant terminal model of a klt case")
    io(p)
    p.add_argument("--order", choices=("lex", "reverse"), default="lex")
    p.set_defaults(func=cmd_terminalize)

    p = sub.add_parser("mmp", help="run the numerical MMP on a case")
    io(p)
    p.add_argument("--assume-big", action="store_true", help="run without a bigness certificate")
    p.set_defaults(func=cmd_mmp)

    p = sub.add_parser("semigroup", help="write m as a sum of numbers qN + 1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--sweep", type=_parse_sweep, help="range A..B of m values")
    p.add_argument("--output")
    p.add_argument("--figures", help="directory for a membership plot")
    p.set_defaults(func=cmd_semigroup)

    p = sub.add_parser("pipeline", help="full reduction pipeline and birationality threshold")
    p.add_argument("--input", required=True, help="case document or directory of case documents")
    p.add_argument("--output", help="report path, or directory in batch mode")
    p.add_argument("--jobs", type=int, default=1, help="worker processes in batch mode")
    p.add_argument("--timing", action="store_true", help="add a timing section to reports")
    p.add_argument("--figures", help="directory for dual-graph figures")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("verify", help="replay a bound certificate (or a pipeline report)")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force suites against the closed forms")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=50, help="random discrepancy cases")
    p.add_argument("--max-n", type=int, default=10, help="largest N in the semigroup sweep")
    p.add_argument("--span", type=int, default=100, help="values of m checked past N^2 + 1")
    p.add_argument("--output")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LogSurfaceError, ResourceError) as err:
        print(f"error: {err}", file=sys.stderr)
        return _exit_code(err)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
