"""Command-line front end: wrap / unwrap / compare / bench / report.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or validation error,
3 solver breakdown.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import run_bench
from .errors import (
    FactorBreakdownError,
    InvalidInputError,
    InvalidParameterError,
    PcgBreakdownError,
    PhmFormatError,
)
from .fileio import read_bench_csv, read_phm, write_pgm, write_phm
from .grid import MapKind, wrap_map
from .metrics import congruence_error, q_error, q_error_mean_aligned
from .precond import PrecondKind
from .solver import InitKind, SolverConfig, unwrap
from .sparse import write_matrix_market
from .synth import SynthShape, SynthSpec, generate, table1_sizes

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_BREAKDOWN = 3


def _add_wrap(sub):
    p = sub.add_parser("wrap", help="generate a synthetic wrapped map")
    p.add_argument("--shape", default="gaussian-peaks",
                   choices=[s.value for s in SynthShape])
    p.add_argument("--rows", type=int, default=120)
    p.add_argument("--cols", type=int, default=160)
    p.add_argument("--amplitude", type=float, default=40.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--out", required=True, help="wrapped PHM output path")
    p.add_argument("--truth-out", default=None, help="also write the unwrapped truth")
    p.add_argument("--pgm-out", default=None, help="also write a PGM preview")


def _add_unwrap(sub):
    p = sub.add_parser("unwrap", help="unwrap a wrapped PHM file")
    p.add_argument("input", help="wrapped PHM input path")
    p.add_argument("--out", required=True, help="unwrapped PHM output path")
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--precond", default="ilu0", choices=[k.value for k in PrecondKind])
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--kmax", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--lmax-factor", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=0.005)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", default="random", choices=[k.value for k in InitKind])
    p.add_argument("--demean", action="store_true",
                   help="remove the solution mean after each outer iteration")
    p.add_argument("--reuse-precond", action="store_true",
                   help="build the preconditioner once instead of every outer iteration")
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p.add_argument("--export-matrix", default=None,
                   help="write the final assembled matrix in Matrix Market format")
    p.add_argument("--pgm-out", default=None, help="also write a PGM preview (rewrapped)")


def _add_compare(sub):
    p = sub.add_parser("compare", help="normalized disagreement of two PHM maps")
    p.add_argument("a")
    p.add_argument("b")


def _add_bench(sub):
    p = sub.add_parser("bench", help="run the scale sweep benchmark")
    p.add_argument("--scales", default=None,
                   help="comma list of scales (default: the built-in eight)")
    p.add_argument("--preconds", default=None,
                   help="comma list of preconditioners (default: all five)")
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default="bench.csv", help="CSV output path")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--shape", default="gaussian-peaks",
                   choices=[s.value for s in SynthShape])
    p.add_argument("--amplitude", type=float, default=40.0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--kmax", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--lmax-factor", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=0.005)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--init", default="random", choices=[k.value for k in InitKind])
    p.add_argument("--plots", action="store_true",
                   help="render figures next to the CSV after the sweep")
    p.add_argument("--list-sizes", action="store_true",
                   help="print the built-in scale table and exit")


def _add_report(sub):
    p = sub.add_parser("report", help="render figures from a benchmark CSV")
    p.add_argument("csv", help="benchmark CSV path")
    p.add_argument("--out-dir", default=None,
                   help="figure directory (default: alongside the CSV)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpunwrap",
        description="Lp-norm two-dimensional phase unwrapping and preconditioner benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_wrap(sub)
    _add_unwrap(sub)
    _add_compare(sub)
    _add_bench(sub)
    _add_report(sub)
    return parser


def _cmd_wrap(args) -> int:
    if args.rows < 2:
        print(f"error: --rows must be >= 2 (got {args.rows})", file=sys.stderr)
        return EXIT_USAGE
    if args.cols < 2:
        print(f"error: --cols must be >= 2 (got {args.cols})", file=sys.stderr)
        return EXIT_USAGE
    if args.noise_sigma < 0:
        print(f"error: --noise-sigma must be >= 0 (got {args.noise_sigma})", file=sys.stderr)
        return EXIT_USAGE
    spec = SynthSpec(SynthShape(args.shape), args.rows, args.cols,
                     args.amplitude, seed=args.seed, noise_sigma=args.noise_sigma)
    truth = generate(spec)
    psi = wrap_map(truth)
    write_phm(psi, args.out)
    if args.truth_out:
        write_phm(truth, args.truth_out)
    if args.pgm_out:
        write_pgm(psi, args.pgm_out)
    v = psi.values
    print(f"wrote {args.out}: {psi.rows}x{psi.cols} wrapped map, "
          f"min {v.min():.6g}, max {v.max():.6g}, "
          f"truth range {truth.values.max() - truth.values.min():.6g} rad")
    return EXIT_OK


def _report_dict(args, report, result) -> dict:
    return {
        "input": args.input,
        "output": args.out,
        "rows": result.rows,
        "cols": result.cols,
        "p": args.p,
        "tau": args.tau,
        "preconditioner": args.precond,
        "omega": args.omega,
        "seed": args.seed,
        "init": report.init.value,
        "outer_iters": report.outer_iters,
        "inner_iters_total": report.inner_iters_total,
        "inner_iters_per_outer": report.inner_iters_per_outer,
        "final_error": report.final_error,
        "exit_reason": report.exit_reason.value,
        "assemble_s": report.assemble_time,
        "precond_build_s": report.precond_build_time,
        "pcg_s": report.pcg_time,
        "total_s": report.total_time,
        "objective_history": report.objective_history,
        "ic_shift": report.ic_shift,
    }


def _cmd_unwrap(args) -> int:
    if args.p >= 2.0:
        print(f"error: p must be < 2 (got {args.p})", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = SolverConfig(
            p=args.p,
            tau=args.tau,
            k_max=args.kmax,
            tol=args.tol,
            l_max_factor=args.lmax_factor,
            epsilon=args.epsilon,
            precond_kind=PrecondKind(args.precond),
            omega=args.omega,
            seed=args.seed,
            init=InitKind(args.init),
            demean=args.demean,
            reuse_precond=args.reuse_precond,
        )
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    psi = read_phm(args.input)
    if psi.kind is not MapKind.WRAPPED:
        print("error: input map is not wrapped", file=sys.stderr)
        return EXIT_USAGE
    try:
        result, report = unwrap(psi, cfg)
    except (PcgBreakdownError, FactorBreakdownError) as exc:
        outer = getattr(exc, "outer_iteration", None)
        print(f"solver breakdown at outer iteration {outer}: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    write_phm(result, args.out)
    if args.pgm_out:
        write_pgm(result, args.pgm_out, rewrap=True)
    if args.export_matrix:
        from .assemble import assemble_system, compute_weights
        from .grid import wrapped_gradients

        grads = wrapped_gradients(psi)
        weights = compute_weights(result.values.ravel(), grads, cfg.p, cfg.tau)
        write_matrix_market(assemble_system(weights, grads).matrix, args.export_matrix)
    print(f"unwrapped {args.input} -> {args.out}")
    print(f"  outer iterations : {report.outer_iters} ({report.exit_reason.value})")
    print(f"  inner iterations : {report.inner_iters_total}")
    print(f"  final error      : {report.final_error:.3e}")
    print(f"  assemble time    : {report.assemble_time:.3f} s")
    print(f"  precond build    : {report.precond_build_time:.3f} s")
    print(f"  pcg time         : {report.pcg_time:.3f} s")
    print(f"  total time       : {report.total_time:.3f} s")
    if report.ic_shift > 0:
        print(f"  ic diagonal shift: {report.ic_shift:g}")
    if args.json:
        print(json.dumps(_report_dict(args, report, result), indent=2))
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = read_phm(args.a)
    b = read_phm(args.b)
    if a.values.shape != b.values.shape:
        print(
            f"error: shape mismatch {a.values.shape} vs {b.values.shape}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    mu = a.values.ravel()
    nu = b.values.ravel()
    print(f"q_raw          = {q_error(mu, nu):.8g}")
    print(f"q_mean_aligned = {q_error_mean_aligned(mu, nu):.8g}")
    if a.kind is MapKind.UNWRAPPED and b.kind is MapKind.WRAPPED:
        print(f"congruence     = {congruence_error(a, b):.8g}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    if args.list_sizes:
        for scale, rows, cols in table1_sizes():
            print(f"scale {scale:4.2f}: {rows} x {cols}")
        return EXIT_OK
    if args.p >= 2.0:
        print(f"error: p must be < 2 (got {args.p})", file=sys.stderr)
        return EXIT_USAGE
    scales = (
        [float(s) for s in args.scales.split(",")]
        if args.scales
        else [s for s, _, _ in table1_sizes()]
    )
    try:
        preconds = (
            [PrecondKind(s.strip()) for s in args.preconds.split(",")]
            if args.preconds
            else list(PrecondKind)
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        records = run_bench(
            scales=scales,
            preconds=preconds,
            p=args.p,
            seed=args.seed,
            csv_path=args.csv,
            repeat=args.repeat,
            shape=SynthShape(args.shape),
            amplitude=args.amplitude,
            noise_sigma=args.noise_sigma,
            tau=args.tau,
            k_max=args.kmax,
            tol=args.tol,
            l_max_factor=args.lmax_factor,
            epsilon=args.epsilon,
            omega=args.omega,
            init=InitKind(args.init),
        )
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.plots and records:
        from .plots import render_bench_figures

        for path in render_bench_figures(read_bench_csv(args.csv), Path(args.csv).parent):
            print(f"wrote {path}")
    ok = sum(1 for r in records if r.exit_reason != "breakdown")
    return EXIT_OK if ok >= 1 else EXIT_RUNTIME


def _cmd_report(args) -> int:
    rows = read_bench_csv(args.csv)
    if not rows:
        print("error: CSV holds no benchmark rows", file=sys.stderr)
        return EXIT_USAGE
    out_dir = args.out_dir if args.out_dir is not None else Path(args.csv).parent
    from .plots import render_bench_figures

    for path in render_bench_figures(rows, out_dir):
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "wrap": _cmd_wrap,
    "unwrap": _cmd_unwrap,
    "compare": _cmd_compare,
    "bench": _cmd_bench,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (InvalidInputError, InvalidParameterError, PhmFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    entry()
