"""Command-line driver.

Usage:
    spinframe run <suite> [--m M] [--grid N[,N,N[,N]]] [--order 2|4]
                  [--seed S] [--A0 V] [--tol T] [--seeds K]
                  [--mode analytic|stencil] [--format json|csv] [--out PATH]
                  [--include-runtime]

Exit code is 0 iff every report passes.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigInvalid, SpinframeError, UnknownSuite
from .reports import emit, render
from .suites import SUITES, SuiteConfig, run_suite


def _parse_grid(text: str):
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 1:
        return parts[0]
    if len(parts) in (3, 4):
        return tuple(parts)
    raise ConfigInvalid("grid must be N or N,N,N or N,N,N,N")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spinframe",
                                 description="numerical verification suites")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a verification suite")
    run.add_argument("suite", choices=SUITES)
    run.add_argument("--m", type=float, default=1.0, help="mass parameter")
    run.add_argument("--grid", type=_parse_grid, default=32,
                     help="grid extent(s), e.g. 32 or 24,24,24")
    run.add_argument("--order", type=int, choices=(2, 4), default=2,
                     help="stencil order")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--A0", dest="a0", type=float, default=0.25,
                     help="constant electric potential")
    run.add_argument("--tol", type=float, default=None,
                     help="override the per-suite tolerance")
    run.add_argument("--seeds", type=int, default=None,
                     help="sample count for property suites")
    run.add_argument("--mode", choices=("analytic", "stencil"), default="analytic")
    run.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    run.add_argument("--out", default=None, help="write the report to a file")
    run.add_argument("--include-runtime", action="store_true",
                     help="include wall-clock timings (breaks byte determinism)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = SuiteConfig(m=args.m, grid=args.grid, order=args.order,
                          seed=args.seed, a0=args.a0, tol=args.tol,
                          mode=args.mode, seeds=args.seeds)
        reports = run_suite(args.suite, cfg)
    except (UnknownSuite, ConfigInvalid) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SpinframeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    text = render(reports, args.fmt, include_runtime=args.include_runtime)
    if args.out:
        emit(reports, args.fmt, args.out, include_runtime=args.include_runtime)
    else:
        sys.stdout.write(text)
    for r in sorted(reports, key=lambda r: r.check_name):
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.check_name} max={r.max_abs_residual:.3e} tol={r.tolerance:.3e}",
              file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
