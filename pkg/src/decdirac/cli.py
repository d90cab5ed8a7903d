"""``decdirac run`` / ``decdirac check-mesh``.

Exit codes: 0 success, 1 usage, 2 validation failure, 3 solver failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .convergence import CSV_HEADER, TESTS, RunConfig, check_mesh
from .errors import DecError, MeshError, SolverFailure

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for validation failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="decdirac", description="DEC Hodge-Dirac convergence harness")
    p.add_argument("-v", "--verbose", action="store_true", help="log per-level progress")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="convergence study on a built-in manufactured solution")
    run.add_argument("--test", required=True, choices=TESTS)
    run.add_argument("--levels", type=int, help="number of regular refinements (default 4, perturbed 5)")
    run.add_argument("--quad", type=int, default=10, help="quadrature degree")
    run.add_argument("--seed", type=int, default=1, help="perturbation seed")
    run.add_argument("--amplitude", type=float, default=0.05, help="perturbation amplitude")
    run.add_argument("--out", type=Path, required=True, help="CSV output")
    run.add_argument("--plot", type=Path, metavar="FILE.svg")
    run.add_argument("--dump-matrix", type=Path, metavar="FILE")
    run.add_argument("--dump-dual", type=Path, metavar="FILE")
    run.add_argument("--dump-cochain", type=Path, metavar="FILE", help="solution on the finest level")

    chk = sub.add_parser("check-mesh", help="validate a mesh file")
    chk.add_argument("path", type=Path)
    return p


def _run(args) -> int:
    if args.levels is not None and args.levels < 2:
        print("error: --levels must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    if args.quad < 0 or args.amplitude < 0:
        print("error: --quad and --amplitude must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig(
        test=args.test,
        levels=args.levels,
        quad_degree=args.quad,
        seed=args.seed,
        amplitude=args.amplitude,
        out=args.out,
        plot=args.plot,
        dump_matrix=args.dump_matrix,
        dump_dual=args.dump_dual,
        dump_cochain=args.dump_cochain,
    )
    records = cfg.run()
    print(",".join(CSV_HEADER))
    for r in records:
        print(",".join(r.row()))
    return EXIT_OK


def _check(args) -> int:
    report = check_mesh(args.path)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_INVALID


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return _run(args) if args.command == "run" else _check(args)
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (MeshError, DecError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
