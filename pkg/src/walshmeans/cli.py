"""Command-line front end.

Subcommands map one-to-one onto the library operations and emit CSV for
grid data and JSON for structured reports.  A fixed seed makes reports
byte-identical across runs.  Exit codes: 0 ok, 1 config error, 2 guard
rail, 3 a checked identity failed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .dyadic import GridSpec
from .exact import avg_sweep_at_zero, divergence_report, validate_nseq
from .lebesgue import classify_wlp, mt2_convergence_experiment
from .maximal import subsequence_from_spec, weak_type_experiment
from .summability import (
    MatrixValidationError,
    apply_mean,
    c2_quantity,
    kernel_V,
    kernel_decomposition,
    matrix_from_spec,
    upsilon,
)
from .tensor import (
    GridFunction2D,
    llogl_weak_type_experiment,
    load_grid2d,
    save_grid2d,
    tensor_mean,
)
from .transform import load_grid1d, save_grid1d

MAX_K_1D = 14
MAX_K_2D = 8

OK, CONFIG_ERROR, GUARD_RAIL, IDENTITY_FAILURE = 0, 1, 2, 3


class GuardRailError(ValueError):
    pass


def _check_resolution(K: int, dims: int) -> GridSpec:
    cap = MAX_K_1D if dims == 1 else MAX_K_2D
    if K > cap:
        raise GuardRailError(
            f"resolution {K} exceeds the {dims}D guard rail of {cap}")
    return GridSpec(K)


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_grid(f, out: str | None, saver) -> None:
    if out:
        saver(f, out)
    else:
        saver(f, sys.stdout)


def cmd_kernel(args) -> int:
    spec = _check_resolution(args.resolution, 1)
    T = matrix_from_spec(args.matrix)
    if args.decompose:
        v1, v2 = kernel_decomposition(T, args.n, spec)
        v = kernel_V(T, args.n, spec)
        err = float(abs(v1.samples + v2.samples - v.samples).max())
        base = args.out or "kernel.csv"
        stem = base[:-4] if base.endswith(".csv") else base
        save_grid1d(v, f"{stem}.csv")
        save_grid1d(v1, f"{stem}.part1.csv")
        save_grid1d(v2, f"{stem}.part2.csv")
        sys.stderr.write(f"max |V1+V2-V| = {err:.3e}\n")
        return OK if err <= 1e-9 else IDENTITY_FAILURE
    _emit_grid(kernel_V(T, args.n, spec), args.out, save_grid1d)
    return OK


def cmd_mean(args) -> int:
    f = load_grid1d(args.input)
    _check_resolution(f.spec.resolution, 1)
    T = matrix_from_spec(args.matrix)
    coeff = apply_mean(T, args.n, f, path="coefficient")
    kern = apply_mean(T, args.n, f, path="kernel")
    err = float(abs(coeff.samples - kern.samples).max())
    _emit_grid(coeff, args.out, save_grid1d)
    if err > 1e-10:
        sys.stderr.write(f"mean path disagreement: {err:.3e}\n")
        return IDENTITY_FAILURE
    return OK


def cmd_upsilon(args) -> int:
    T = matrix_from_spec(args.matrix)
    subseq = subsequence_from_spec(args.seq)
    rows = []
    for n in subseq:
        rows.append({"n": n, "upsilon": upsilon(T, n), "t0": float(T.row(n)[0])})
    _emit({"family": T.name, "subsequence": args.seq, "rows": rows}, args.out)
    return OK


def cmd_maximal(args) -> int:
    _check_resolution(args.resolution, 1)
    T = matrix_from_spec(args.matrix)
    subseq = subsequence_from_spec(args.seq)
    report = weak_type_experiment(T, subseq, trials=args.trials,
                                  K=args.resolution, seed=args.seed,
                                  operator=args.operator)
    _emit(report.to_dict(), args.out)
    return OK


def cmd_tensor(args) -> int:
    F = load_grid2d(args.input)
    _check_resolution(F.spec.resolution, 2)
    T0 = matrix_from_spec(args.matrix0)
    T1 = matrix_from_spec(args.matrix1)
    first = tensor_mean(T0, args.n0, T1, args.n1, F)
    other = tensor_mean(T1, args.n1, T0, args.n0, F.__class__(F.spec, F.samples.T))
    err = float(abs(first.samples - other.samples.T).max())
    _emit_grid(first, args.out, save_grid2d)
    if err > 1e-10:
        sys.stderr.write(f"iteration order disagreement: {err:.3e}\n")
        return IDENTITY_FAILURE
    return OK


def cmd_llogl(args) -> int:
    _check_resolution(args.resolution, 2)
    T0 = matrix_from_spec(args.matrix0)
    T1 = matrix_from_spec(args.matrix1)
    report = llogl_weak_type_experiment(
        T0, subsequence_from_spec(args.seq0),
        T1, subsequence_from_spec(args.seq1),
        trials=args.trials, K=args.resolution, seed=args.seed)
    _emit(report.to_dict(), args.out)
    return OK


def _parse_point(text: str) -> tuple[int, int]:
    a, _, b = text.partition(",")
    return int(a), int(b)


def cmd_wlp(args) -> int:
    F = load_grid2d(args.input)
    _check_resolution(F.spec.resolution, 2)
    depths = None
    if args.depths:
        lo, _, hi = args.depths.partition("..")
        depths = range(int(lo), int(hi) + 1)
    diags = [classify_wlp(F, _parse_point(p), depth_range=depths).to_dict()
             for p in args.point]
    _emit({"diagnostics": diags}, args.out)
    return OK


def cmd_mt2(args) -> int:
    if args.input:
        F = load_grid2d(args.input)
    else:
        spec = _check_resolution(args.resolution, 2)
        half = spec.size // 2
        samples = np.zeros((spec.size, spec.size))
        samples[:half, :half] = 1.0
        F = GridFunction2D(spec, samples)
    _check_resolution(F.spec.resolution, 2)
    T0 = matrix_from_spec(args.matrix0)
    T1 = matrix_from_spec(args.matrix1)
    points = [_parse_point(p) for p in args.point]
    report = mt2_convergence_experiment(
        T0, T1, subsequence_from_spec(args.seq0), subsequence_from_spec(args.seq1),
        F, points)
    _emit(report.to_dict(), args.out)
    return OK


def cmd_example1(args) -> int:
    seq = tuple(int(x) for x in args.nseq.split(","))
    verdict = validate_nseq(seq)
    if not verdict.ok:
        sys.stderr.write("invalid sequence: " + "; ".join(verdict.violations) + "\n")
        return CONFIG_ERROR
    rows = divergence_report(seq)
    sweep = avg_sweep_at_zero(seq)
    payload = {
        "nseq": list(seq),
        "divergence": [r.to_dict() for r in rows],
        "avg_at_zero": [{"depth": s["depth"], "k": s["k"],
                         "avg": str(s["avg"]), "avg_decimal": s["avg_decimal"],
                         "avg_times_2k": s["avg_times_2k"]} for s in sweep],
    }
    _emit(payload, args.out)
    return OK if all(r.meets_bound for r in rows) else IDENTITY_FAILURE


def cmd_c2(args) -> int:
    subseq = subsequence_from_spec(args.seq)
    rows = [{"n": n, "c2": c2_quantity(args.alpha, n)} for n in subseq]
    _emit({"alpha": args.alpha, "subsequence": args.seq, "rows": rows}, args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="walshmeans",
        description="Walsh-Paley summability experiments on the dyadic grid")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, report=False):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out", help="output path (stdout when omitted)")
        if report:
            sp.add_argument("--json", action="store_true",
                            help="emit JSON (the default; flag kept for scripts)")
        return sp

    sp = add("kernel", cmd_kernel, "sample a summation kernel V_n")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--resolution", type=int, required=True)
    sp.add_argument("--decompose", action="store_true",
                    help="also write the V1/V2 split and check V1+V2=V")

    sp = add("mean", cmd_mean, "apply a matrix mean to a grid CSV")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--input", required=True)

    sp = add("upsilon", cmd_upsilon, "boundedness functional along a subsequence", report=True)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--seq", required=True)

    sp = add("maximal", cmd_maximal, "weak-type ratio experiment (1D)", report=True)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--seq", required=True)
    sp.add_argument("--resolution", type=int, required=True)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--operator", default="abs_mean",
                    choices=("abs_mean", "mean", "dyadic_maximal"))

    sp = add("tensor", cmd_tensor, "tensor-product mean of a 2D grid CSV")
    sp.add_argument("--matrix0", required=True)
    sp.add_argument("--matrix1", required=True)
    sp.add_argument("--n0", type=int, required=True)
    sp.add_argument("--n1", type=int, required=True)
    sp.add_argument("--input", required=True)

    sp = add("llogl-experiment", cmd_llogl, "2D L log L weak-type experiment", report=True)
    sp.add_argument("--matrix0", required=True)
    sp.add_argument("--matrix1", required=True)
    sp.add_argument("--seq0", required=True)
    sp.add_argument("--seq1", required=True)
    sp.add_argument("--resolution", type=int, required=True)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("wlp", cmd_wlp, "Walsh-Lebesgue point diagnostics", report=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--point", action="append", required=True,
                    help="grid point i,j (repeatable)")
    sp.add_argument("--depths", help="diagonal depth range a..b")

    sp = add("mt2-experiment", cmd_mt2, "tensor-mean convergence at points", report=True)
    sp.add_argument("--matrix0", required=True)
    sp.add_argument("--matrix1", required=True)
    sp.add_argument("--seq0", required=True)
    sp.add_argument("--seq1", required=True)
    sp.add_argument("--point", action="append", required=True)
    sp.add_argument("--input", help="2D grid CSV; defaults to the quarter square")
    sp.add_argument("--resolution", type=int, default=8)

    sp = add("example1", cmd_example1, "exact divergence example tables", report=True)
    sp.add_argument("--nseq", default="5,17,65")

    sp = add("c2-check", cmd_c2, "Cesaro subsequence condition values", report=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--seq", required=True)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except GuardRailError as exc:
        sys.stderr.write(f"guard rail: {exc}\n")
        return GUARD_RAIL
    except (ValueError, OSError, MatrixValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
