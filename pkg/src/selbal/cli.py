"""Command-line driver: generate, solve, verify, bounds.

Reports are canonical JSON (sorted keys, no timestamps) embedding the full
configuration, seed, budget, and artifact version, so re-running a report's
configuration reproduces it byte for byte.  Exit codes are a stable
contract: 0 for any definitive outcome, 2 for inconclusive, 1 for usage,
parse, or precondition errors.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .bounds import DEFAULT_THRESHOLD_CAP, sigma_bracket
from .construction import (ConstructionParams, build_instance, figure_example,
                           params_from_plan, plan_parameters)
from .errors import SelbalError, PreconditionFailure
from .geometry import find_shell
from .solver import (DEFAULT_BUDGET, INCONCLUSIVE, Verdict, sample_random,
                     solve_branch_bound, solve_exhaustive, solve_mitm,
                     structural_verify)
from .vectorspace import (UnitVectorFamily, dumps_canonical, family_to_dict,
                          load_instance, save_instance)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

REPORT_FORMAT = "selbal-report-v1"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, per the contract
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_ERROR)


def _report(command: str, config: dict, body: dict) -> dict:
    return {"format": REPORT_FORMAT, "version": __version__,
            "command": command, "config": config, **body}


def _emit(doc: dict, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        text = dumps_canonical(doc)
    else:
        lines = []

        def walk(prefix: str, value):
            if isinstance(value, dict):
                for key in sorted(value):
                    walk(f"{prefix}{key}.", value[key])
            else:
                lines.append(f"{prefix[:-1]:<34} {value}")

        walk("", doc)
        text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ratio(m: int, n: int) -> float | None:
    return m / (n * math.log2(n)) if n > 1 else None


def cmd_generate(args) -> int:
    if args.example_figure2:
        family = figure_example()
    elif args.plan:
        if args.lam is None or args.d is None:
            raise SelbalError("--plan needs --lambda and -d")
        plan = plan_parameters(args.lam, args.d, args.budget)
        family = build_instance(params_from_plan(plan, args.budget))
    else:
        if None in (args.d, args.p, args.k, args.L):
            raise SelbalError("generation needs -d, -p, -k and -L"
                              " (or --example-figure2 / --plan)")
        shell = find_shell(args.d, args.box_radius, args.budget)
        params = ConstructionParams.from_shell(args.d, args.p, args.k,
                                               args.L, shell)
        family = build_instance(params)
    save_instance(family, args.output)
    ratio = _ratio(family.m, family.n)
    print(f"m={family.m} n={family.n} "
          f"ratio={'n/a' if ratio is None else f'{ratio:.6f}'} -> {args.output}")
    return EXIT_OK


def _run_engine(family: UnitVectorFamily, args) -> Verdict:
    if args.engine == "exhaustive":
        return solve_exhaustive(family, args.budget)
    if args.engine == "bb":
        return solve_branch_bound(family, args.budget)
    if args.engine == "mitm":
        return solve_mitm(family, args.cell_side, args.budget)
    if args.engine == "sample":
        return sample_random(family, args.budget, args.seed)
    if args.engine == "structural":
        return structural_verify(family)
    raise SelbalError(f"unknown engine '{args.engine}'")


def _solve_config(args) -> dict:
    return {
        "instance": args.instance,
        "engine": args.engine,
        "budget": args.budget,
        "seed": args.seed,
        "cell_side": args.cell_side,
        "tolerance": args.tolerance,
        "threads": args.threads,
    }


def cmd_solve(args) -> int:
    family = load_instance(args.instance)
    verdict = _run_engine(family, args)
    doc = _report("solve", _solve_config(args), {"verdict": verdict.to_dict()})
    _emit(doc, args.format, args.output)
    return EXIT_INCONCLUSIVE if verdict.kind == INCONCLUSIVE else EXIT_OK


def cmd_verify(args) -> int:
    family = load_instance(args.instance)
    config = {"instance": args.instance, "falsify": args.falsify,
              "seed": args.seed}
    try:
        verdict = structural_verify(family)
    except PreconditionFailure as exc:
        doc = _report("verify", config, {
            "structural": "fail",
            "failed_check": exc.check,
            "detail": exc.detail,
        })
        _emit(doc, args.format, args.output)
        return EXIT_ERROR
    body: dict = {"structural": "pass", "verdict": verdict.to_dict()}
    if args.falsify:
        falsification = sample_random(family, args.falsify, args.seed)
        body["falsification"] = falsification.to_dict()
        if falsification.is_balancing:
            body["structural"] = "contradicted"
    doc = _report("verify", config, body)
    _emit(doc, args.format, args.output)
    return EXIT_ERROR if body["structural"] == "contradicted" else EXIT_OK


def _parse_range(spec: str) -> list[int]:
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise SelbalError("range must be A:B or A:B:STEP")
    a, b = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) == 3 else 1
    if a < 1 or b < a or step < 1:
        raise SelbalError("range must satisfy 1 <= A <= B with STEP >= 1")
    return list(range(a, b + 1, step))


def cmd_bounds(args) -> int:
    if args.n is not None:
        ns = [args.n]
    elif args.range:
        ns = _parse_range(args.range)
    else:
        raise SelbalError("bounds needs --n or --range")
    rows = [sigma_bracket(n, cap=args.cap).to_dict() for n in ns]
    config = {"n": args.n, "range": args.range, "cap": args.cap}
    if args.format == "json":
        _emit(_report("bounds", config, {"rows": rows}), "json", args.output)
    else:
        header = (f"{'n':>6} {'lower_m':>9} {'upper_m':>9} "
                  f"{'lower_ratio':>12} {'upper_ratio':>12}  source")
        lines = [header]
        for row in rows:
            lo_r = "n/a" if row["lower_ratio"] is None else f"{row['lower_ratio']:.4f}"
            up_r = "n/a" if row["upper_ratio"] is None else f"{row['upper_ratio']:.4f}"
            up_m = "none" if row["upper_m"] is None else row["upper_m"]
            lines.append(f"{row['n']:>6} {row['lower_m']:>9} {up_m:>9} "
                         f"{lo_r:>12} {up_r:>12}  {row['lower_source']}")
        text = "\n".join(lines) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="selbal",
                     description="Generate, decide, and bound selective"
                                 " balancing of unit-vector families.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an instance file")
    gen.add_argument("--example-figure2", action="store_true",
                     help="the named 34-vector instance in R^25")
    gen.add_argument("--plan", action="store_true",
                     help="derive parameters from --lambda and -d")
    gen.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="growth exponent > 1 for --plan")
    gen.add_argument("-d", type=int, default=None, help="lattice dimension")
    gen.add_argument("-p", type=int, default=None, help="scale base >= 2")
    gen.add_argument("-k", type=int, default=None, help="chain depth >= 0")
    gen.add_argument("-L", type=int, default=None, help="box side length")
    gen.add_argument("-D", "--box-radius", dest="box_radius", type=int,
                     default=1, help="shell search box radius (default 1)")
    gen.add_argument("--budget", type=int, default=5_000_000,
                     help="enumeration point budget")
    gen.add_argument("-o", "--output", required=True,
                     help="instance file path")
    gen.set_defaults(func=cmd_generate)

    slv = sub.add_parser("solve", help="run a decision engine on an instance")
    slv.add_argument("instance")
    slv.add_argument("--engine", required=True,
                     choices=["exhaustive", "mitm", "bb", "sample",
                              "structural"])
    slv.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                     help="candidate/node budget; trials for --engine sample")
    slv.add_argument("--seed", type=int, default=0)
    slv.add_argument("--cell-side", dest="cell_side", type=float, default=None,
                     help="mitm grid cell side (default 1/sqrt(n+1))")
    slv.add_argument("--tolerance", type=float, default=0.0,
                     help="boundary tolerance for non-exact inputs"
                          " (recorded; exact instances never need it)")
    slv.add_argument("--threads", type=int, default=1,
                     help="worker cap (recorded; verdicts are"
                          " thread-count independent)")
    slv.add_argument("--format", choices=["json", "table"], default="json")
    slv.add_argument("-o", "--output", default=None)
    slv.set_defaults(func=cmd_solve)

    ver = sub.add_parser("verify", help="structural verification of an instance")
    ver.add_argument("instance")
    ver.add_argument("--falsify", type=int, default=0,
                     help="additionally draw this many random combinations")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--format", choices=["json", "table"], default="json")
    ver.add_argument("-o", "--output", default=None)
    ver.set_defaults(func=cmd_verify)

    bnd = sub.add_parser("bounds", help="sigma(n) bracket rows")
    bnd.add_argument("--n", type=int, default=None)
    bnd.add_argument("--range", default=None, help="A:B or A:B:STEP")
    bnd.add_argument("--cap", type=int, default=DEFAULT_THRESHOLD_CAP,
                     help="upper-threshold search cap")
    bnd.add_argument("--format", choices=["json", "table"], default="table")
    bnd.add_argument("-o", "--output", default=None)
    bnd.set_defaults(func=cmd_bounds)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SelbalError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
