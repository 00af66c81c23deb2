"""Command-line interface.

Exit status is 0 on success, 1 on usage errors (bad flags, unreadable or
mismatched inputs) and 2 when a numerical computation fails to reach its
accuracy target.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from fcconv.convolve import ConvolutionPlan, convolve_grid_closed, quadrature_weights
from fcconv.errors import FCConvError, PrecisionError
from fcconv.extension import DEFAULT_Q, DEFAULT_R, GridSamples
from fcconv.harness import DENSITIES, convergence_study, dyadic_levels
from fcconv.kernels import Kernel
from fcconv.moments import beta_table, load_table, save_table

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return repr(float(v))


# {{{ argument handling


def _add_kernel(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--kernel", choices=("pow", "log"), required=required,
                   help="power-law |x|^gamma or logarithmic kernel")
    p.add_argument("--gamma", type=float, help="exponent of the power-law kernel")


def _add_extension(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r", "--rr", dest="r", type=int, default=DEFAULT_R,
                   help=f"continuation smoothness order (default: {DEFAULT_R})")
    p.add_argument("--q", type=int, default=DEFAULT_Q,
                   help=f"finite difference order (default: {DEFAULT_Q})")


def _kernel(args) -> Kernel | None:
    if args.kernel is None:
        if args.gamma is not None:
            raise UsageError("--gamma given without --kernel pow")
        return None
    if args.kernel == "pow":
        if args.gamma is None:
            raise UsageError("--kernel pow requires --gamma")
        return Kernel.power(args.gamma)
    if args.gamma is not None:
        raise UsageError("--kernel log takes no --gamma")
    return Kernel.log()


def _table(args, n: int | None):
    """Load ``--table`` (checking it against ``--kernel`` and ``n``) or build one."""
    g = _kernel(args)
    if args.table is not None:
        t = load_table(args.table)
        if g is not None and t.kernel != g:
            raise UsageError(f"kernel mismatch: table has {t.kernel}, requested {g}")
        if n is not None and t.n != n:
            raise UsageError(f"grid mismatch: table has n = {t.n}, input has n = {n}")
        return t
    if g is None:
        raise UsageError("either --table or --kernel is required")
    if n is None:
        raise UsageError("--n is required without --table")
    return beta_table(g, n)


def _write_lines(lines, out) -> None:
    text = "".join(f"{line}\n" for line in lines)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# }}}


# {{{ commands


def _cmd_moments(args) -> None:
    g = _kernel(args)
    if g is None:
        raise UsageError("moments requires --kernel")
    if args.out is None:
        raise UsageError("moments requires --out")
    save_table(beta_table(g, args.n, M=args.M, n_cc_initial=args.ncc), args.out)


def _read_samples(path) -> np.ndarray:
    text = sys.stdin.read() if path in (None, "-") else Path(path).read_text(encoding="utf-8")
    try:
        return np.array([float(line) for line in text.split()], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"malformed sample file: {exc}") from None


def _cmd_convolve(args) -> None:
    u = _read_samples(args.input)
    if u.size < 3:
        raise UsageError(f"need at least 3 samples (n + 1 lines): got {u.size}")
    n = u.size - 1
    if args.n is not None and args.n != n:
        raise UsageError(f"grid mismatch: --n {args.n} but input has n = {n}")

    t = _table(args, n)
    plan = ConvolutionPlan(t.kernel, t, args.r, args.q, "fd")
    values = convolve_grid_closed(plan, GridSamples(u))
    _write_lines((_fmt(v) for v in values), args.out)


def _cmd_weights(args) -> None:
    t = _table(args, args.n)
    plan = ConvolutionPlan(t.kernel, t, args.r, args.q, "exact")
    w = quadrature_weights(plan, args.x)
    lines = ["j,weight"] + [f"{j},{_fmt(v)}" for j, v in zip(range(-w.n, w.n), w.weights)]
    _write_lines(lines, args.out)


def _cmd_converge(args) -> None:
    g = _kernel(args)
    if g is None:
        raise UsageError("converge requires --kernel")
    report = convergence_study(g, args.density, args.r, args.q,
                               dyadic_levels(args.nmin, args.nmax), args.mode)
    if args.out is None:
        w = sys.stdout
        w.write("n,h,eps_inf,order\n")
        for row in report.rows:
            order = "" if row.order is None else _fmt(row.order)
            w.write(f"{row.n},{_fmt(row.h)},{_fmt(row.eps_inf)},{order}\n")
    else:
        out = Path(args.out)
        report.to_csv(out)
        report.to_json(out.with_suffix(".json"))


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fcconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("moments", help="precompute and save a moment table")
    _add_kernel(p)
    p.add_argument("--n", type=int, required=True, help="grid parameter")
    p.add_argument("--M", type=int, help="change of variable power (odd)")
    p.add_argument("--ncc", type=int, help="initial number of quadrature nodes")
    p.add_argument("--out", help="output table file")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("convolve", help="apply the scheme to samples (n + 1 lines)")
    _add_kernel(p, required=False)
    _add_extension(p)
    p.add_argument("--n", type=int, help="expected grid parameter")
    p.add_argument("--table", help="moment table file")
    p.add_argument("--in", dest="input", help="sample file (default: stdin)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=_cmd_convolve)

    p = sub.add_parser("weights", help="write quadrature weights for one point")
    _add_kernel(p, required=False)
    _add_extension(p)
    p.add_argument("--n", type=int, help="grid parameter")
    p.add_argument("--table", help="moment table file")
    p.add_argument("--x", type=float, required=True, help="evaluation point in [0, 1]")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=_cmd_weights)

    p = sub.add_parser("converge", help="run a grid refinement study")
    _add_kernel(p)
    _add_extension(p)
    p.add_argument("--density", choices=sorted(DENSITIES), required=True)
    p.add_argument("--nmin", type=int, default=16)
    p.add_argument("--nmax", type=int, default=1024)
    p.add_argument("--mode", choices=("fd", "exact", "compact"), default="fd",
                   help="boundary data source (default: fd)")
    p.add_argument("--out", help="CSV output; a JSON sidecar is written next to it")
    p.set_defaults(func=_cmd_converge)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code is None else int(exc.code)

    try:
        args.func(args)
    except PrecisionError as exc:
        print(f"fcconv: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, FCConvError, OSError) as exc:
        print(f"fcconv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
