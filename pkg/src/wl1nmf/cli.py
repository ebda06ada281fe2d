"""Command-line driver.

Subcommands: ``factorize`` (run a solver on a MatrixMarket file),
``gen`` (synthetic data), ``prob`` (zero-solution probability curves),
``bench`` (sparse vs dense per-sweep timing) and ``reduce`` (sign-matrix
encoding and verification).  Progress goes to stderr, data to stdout or
the requested files.  Exit codes: 0 ok, 2 usage, 3 data error, 4 numeric.
"""

from __future__ import annotations

import argparse
import sys
from time import perf_counter

import numpy as np

from . import analysis, datagen, io_formats, reduction
from .dense_cd import cd_dense
from .hals import hals_sweep, initial_factors
from .scd_solver import objective, scd
from .sparse_core import (
    FactorPair,
    SolveTrace,
    SweepRecord,
    WL1Problem,
    factor_sparsity,
)

__all__ = ["main", "build_parser"]


def _progress(*parts):
    print(*parts, file=sys.stderr)


def _parse_init(text):
    if text == "random":
        return "random", 0
    if text == "hals":
        return "hals", 10
    if text.startswith("hals:"):
        return "hals", int(text.split(":", 1)[1])
    raise argparse.ArgumentTypeError(f"init must be 'random' or 'hals:K', got {text!r}")


def _parse_size(text):
    try:
        m, n = text.lower().split("x")
        return int(m), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 100x200, got {text!r}")


def _parse_int_list(text):
    out = []
    for part in text.split(","):
        if ":" in part:
            lo, hi = part.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _csv_list(parse):
    return lambda text: [parse(tok) for tok in text.split(",")]


def _hals_solve(problem: WL1Problem):
    """Least-squares baseline run, traced with the weighted-L1 objective."""
    x = problem.X
    if x.nnz == 0:
        m, n = x.shape
        return FactorPair(np.zeros((m, problem.rank)), np.zeros((problem.rank, n))), SolveTrace()
    t0 = perf_counter()
    w, h = initial_factors(problem)
    trace = SolveTrace(warmup_seconds=perf_counter() - t0)
    rng = np.random.default_rng(problem.seed + 1)
    norm1 = float(x.values.sum())
    rel_prev = None
    start = perf_counter()
    for sweep in range(1, problem.max_sweeps + 1):
        w, h = hals_sweep(x, w, h, rng=rng)
        obj = objective(x, w, h, problem.lam)
        elapsed = perf_counter() - start
        trace.records.append(
            SweepRecord(sweep, obj, elapsed, factor_sparsity(w), factor_sparsity(h))
        )
        rel = obj / norm1
        if problem.tol is not None and rel_prev is not None \
                and abs(rel_prev - rel) < problem.tol:
            break
        rel_prev = rel
        if problem.time_limit is not None and elapsed >= problem.time_limit:
            break
    return FactorPair(w, h), trace


def _cmd_factorize(args):
    x = io_formats.read_matrix_market(args.input)
    if float(x.values.sum()) == 0.0:
        print("input matrix has no nonzero entries; relative error undefined",
              file=sys.stderr)
        return 4
    init, init_sweeps = args.init
    if args.solver == "cd-dense" and args.lam != 1.0:
        print("cd-dense requires --lambda 1", file=sys.stderr)
        return 2
    problem = WL1Problem(
        x,
        rank=args.rank,
        lam=args.lam,
        init=init,
        init_sweeps=init_sweeps,
        tol=args.tol,
        max_sweeps=args.max_sweeps,
        time_limit=args.time_limit,
        seed=args.seed,
    )
    _progress(f"factorize: {x.nrows}x{x.ncols} nnz={x.nnz} rank={args.rank} "
              f"lambda={args.lam} solver={args.solver}")
    if args.solver == "scd":
        pair, trace = scd(problem, threads=args.threads)
    elif args.solver == "cd-dense":
        pair, trace = cd_dense(problem)
    else:
        pair, trace = _hals_solve(problem)
    report = analysis.error_report(x, None, pair.W, pair.H, args.lam)
    print(f"rel_l1 {report.rel_l1:.17g}")
    print(f"w_sparsity {report.w_sparsity:.17g}")
    print(f"h_sparsity {report.h_sparsity:.17g}")
    print(f"sweeps {len(trace)}")
    if args.out_w:
        io_formats.write_dense_csv(pair.W, args.out_w)
    if args.out_h:
        io_formats.write_dense_csv(pair.H, args.out_h)
    if args.trace:
        io_formats.write_trace_csv(trace, args.trace)
    return 0


def _gen_comments(args, extra):
    return [f"generator: {datagen.GENERATOR_FAMILY}", f"seed: {args.seed}", extra]


def _cmd_gen(args):
    if args.generator == "uniform":
        x = datagen.gen_uniform_sparse(args.m, args.n, args.zero_frac, args.seed)
        meta = f"uniform m={args.m} n={args.n} zero_frac={args.zero_frac}"
    elif args.generator == "bernoulli":
        x = datagen.gen_bernoulli(args.m, args.n, args.p, args.seed)
        meta = f"bernoulli m={args.m} n={args.n} p={args.p}"
        if x.nnz == 0:
            print("warning: generated matrix is empty", file=sys.stderr)
    elif args.generator == "lowrank-fz":
        noise = datagen.LaplaceNoiseSpec(args.sigma)
        fz = datagen.FalseZeroSpec(args.q1, args.q2)
        x, truth = datagen.gen_lowrank_falsezeros(
            args.m, args.n, args.rank, noise, fz, args.seed
        )
        meta = (f"lowrank-fz m={args.m} n={args.n} rank={args.rank} "
                f"sigma={args.sigma} q1={args.q1} q2={args.q2}")
        if args.out_truth:
            io_formats.write_dense_csv(truth, args.out_truth)
    else:  # saltpepper
        x = datagen.gen_saltpepper(io_formats.read_matrix_market(args.input),
                                   args.p, args.seed)
        meta = f"saltpepper p={args.p} input={args.input}"
    io_formats.write_matrix_market(x, args.out, comments=_gen_comments(args, meta))
    _progress(f"gen {args.generator}: wrote {x.nrows}x{x.ncols} nnz={x.nnz} to {args.out}")
    return 0


def _cmd_prob(args):
    rows = ["m,p,alpha1,alpha2" + (",mc_alpha1,mc_se1,mc_alpha2,mc_se2" if args.mc else "")]
    for m in args.m_list:
        for p in args.p_list:
            setting = analysis.BernoulliLADSetting(m, p)
            cells = [
                str(m), f"{p:.17g}",
                f"{analysis.prob_alpha1_positive(setting):.17g}",
                f"{analysis.prob_alpha2_positive(setting):.17g}",
            ]
            if args.mc:
                e1, s1 = analysis.prob_mc_estimate(setting, "alpha1", args.mc, args.seed)
                e2, s2 = analysis.prob_mc_estimate(setting, "alpha2", args.mc, args.seed + 1)
                cells += [f"{e1:.17g}", f"{s1:.17g}", f"{e2:.17g}", f"{s2:.17g}"]
            rows.append(",".join(cells))
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _per_sweep_seconds(trace: SolveTrace) -> float:
    return trace.records[-1].seconds / len(trace.records)


def _cmd_bench(args):
    print("m,n,zero_frac,nnz,scd_sweep_seconds,cd_sweep_seconds,sigma,gain,max_obj_rel_diff")
    for m, n in args.sizes:
        for zf in args.zero_fracs:
            x = datagen.gen_uniform_sparse(m, n, zf, args.seed)
            _progress(f"bench: {m}x{n} zero_frac={zf} nnz={x.nnz}")
            base = dict(rank=args.rank, lam=1.0, init="hals", init_sweeps=10,
                        tol=None, max_sweeps=args.sweeps, seed=args.seed)
            _, trace_s = scd(WL1Problem(x, **base), threads=args.threads)
            _, trace_d = cd_dense(WL1Problem(x, **base))
            obj_s = trace_s.objectives()
            obj_d = trace_d.objectives()
            rel_diff = float(np.max(np.abs(obj_s - obj_d) / np.maximum(obj_d, 1e-300)))
            sigma = analysis.sigma_gain(m, n, x.nnz)
            ts, td = _per_sweep_seconds(trace_s), _per_sweep_seconds(trace_d)
            print(f"{m},{n},{zf:.17g},{x.nnz},{ts:.6f},{td:.6f},"
                  f"{sigma:.4f},{td / ts:.4f},{rel_diff:.3e}")
    return 0


def _cmd_reduce(args):
    if args.action == "encode":
        m = reduction.SignMatrix(io_formats.read_dense_csv(args.input))
        inst = reduction.encode(m, args.budget)
        io_formats.write_matrix_market(inst.X, args.out)
        print(f"budget {inst.budget}")
        return 0
    m = reduction.SignMatrix(io_formats.read_dense_csv(args.m))
    w = io_formats.read_dense_csv(args.w).ravel()
    h = io_formats.read_dense_csv(args.h).ravel()
    lhs, rhs = reduction.verify_reduction(m, w, h)
    print(f"encoded_error {lhs:.17g}")
    print(f"sign_error_plus_st {rhs:.17g}")
    print(f"relation {'equal' if lhs == rhs else ('greater' if lhs > rhs else 'VIOLATED')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wl1nmf",
        description="Weighted-L1 nonnegative matrix factorization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fac = sub.add_parser("factorize", help="factor a MatrixMarket matrix")
    fac.add_argument("--input", required=True)
    fac.add_argument("--rank", type=int, required=True)
    fac.add_argument("--lambda", dest="lam", type=float, default=1.0)
    fac.add_argument("--solver", choices=("scd", "cd-dense", "hals"), default="scd")
    fac.add_argument("--init", type=_parse_init, default=("hals", 10),
                     help="'random' or 'hals:K'")
    fac.add_argument("--seed", type=int, default=0)
    fac.add_argument("--tol", type=float, default=1e-6)
    fac.add_argument("--max-sweeps", type=int, default=200)
    fac.add_argument("--time-limit", type=float, default=None)
    fac.add_argument("--threads", type=int, default=1)
    fac.add_argument("--out-w")
    fac.add_argument("--out-h")
    fac.add_argument("--trace")
    fac.set_defaults(func=_cmd_factorize)

    gen = sub.add_parser("gen", help="generate synthetic matrices")
    gsub = gen.add_subparsers(dest="generator", required=True)
    g_uni = gsub.add_parser("uniform")
    g_uni.add_argument("--m", type=int, required=True)
    g_uni.add_argument("--n", type=int, required=True)
    g_uni.add_argument("--zero-frac", type=float, required=True)
    g_ber = gsub.add_parser("bernoulli")
    g_ber.add_argument("--m", type=int, required=True)
    g_ber.add_argument("--n", type=int, required=True)
    g_ber.add_argument("--p", type=float, required=True)
    g_fz = gsub.add_parser("lowrank-fz")
    g_fz.add_argument("--m", type=int, required=True)
    g_fz.add_argument("--n", type=int, required=True)
    g_fz.add_argument("--rank", type=int, required=True)
    g_fz.add_argument("--sigma", type=float, required=True)
    g_fz.add_argument("--q1", type=float, required=True)
    g_fz.add_argument("--q2", type=float, required=True)
    g_fz.add_argument("--out-truth")
    g_sp = gsub.add_parser("saltpepper")
    g_sp.add_argument("--input", required=True)
    g_sp.add_argument("--p", type=float, required=True)
    for sp in (g_uni, g_ber, g_fz, g_sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", required=True)
        sp.set_defaults(func=_cmd_gen)

    prob = sub.add_parser("prob", help="zero-solution probability curves")
    prob.add_argument("--m-list", type=_parse_int_list, required=True,
                      help="comma list and/or lo:hi ranges, e.g. 1:400")
    prob.add_argument("--p-list", type=_csv_list(float), required=True)
    prob.add_argument("--mc", type=int, default=0,
                      help="add Monte-Carlo columns with this many samples")
    prob.add_argument("--seed", type=int, default=0)
    prob.add_argument("--out")
    prob.set_defaults(func=_cmd_prob)

    bench = sub.add_parser("bench", help="sparse vs dense per-sweep timing")
    bench.add_argument("--sizes", type=_csv_list(_parse_size), required=True)
    bench.add_argument("--zero-fracs", type=_csv_list(float), required=True)
    bench.add_argument("--rank", type=int, default=20)
    bench.add_argument("--sweeps", type=int, default=30)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--threads", type=int, default=1)
    bench.set_defaults(func=_cmd_bench)

    red = sub.add_parser("reduce", help="sign-matrix encoding and verification")
    rsub = red.add_subparsers(dest="action", required=True)
    r_enc = rsub.add_parser("encode")
    r_enc.add_argument("--input", required=True, help="CSV of +-1 entries")
    r_enc.add_argument("--budget", type=int, default=0)
    r_enc.add_argument("--out", required=True)
    r_enc.set_defaults(func=_cmd_reduce)
    r_ver = rsub.add_parser("verify")
    r_ver.add_argument("--m", required=True)
    r_ver.add_argument("--w", required=True)
    r_ver.add_argument("--h", required=True)
    r_ver.set_defaults(func=_cmd_reduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except analysis.DegenerateInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (io_formats.MatrixMarketError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
