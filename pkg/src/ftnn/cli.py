"""Command-line interface.

Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure,
4 I/O failure.  Every command prints a one-line JSON summary on stdout.
The worker-thread count for slice-wise SVT comes from ``FTNN_NUM_THREADS``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ftnn import analysis, io, metrics, synth
from ftnn.framelet import ConfigurationError, FILTER_BANKS, build_system
from ftnn.solvers import SolverConfig, complete, default_lambda, objective_trace, rpca, shiftdim
from ftnn.tensor import NumericError, ShapeError
from ftnn.transforms import TRANSFORMS, make_transform

EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 2, 3, 4


class UsageError(Exception):
    pass


def _dims(text):
    try:
        dims = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N1xN2xN3, got {text!r}") from None
    if len(dims) != 3 or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"expected three positive extents, got {text!r}")
    return dims


def _float_list(text):
    try:
        return [float(p) for p in text.split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(summary):
    print(json.dumps(summary, sort_keys=True))


def _normalize(x, where=None):
    vals = x if where is None else x[where]
    lo = float(vals.min()) if vals.size else 0.0
    hi = float(vals.max()) if vals.size else 1.0
    span = hi - lo if hi > lo else 1.0
    return (x - lo) / span, lo, span


def _rel_error(x, truth):
    denom = np.linalg.norm(truth)
    return float(np.linalg.norm(x - truth) / denom) if denom else float(np.linalg.norm(x))


def _report_summary(report):
    return {"iterations": report.iterations, "converged": report.converged,
            "objective": report.objective, "seconds": round(report.wall_time, 3)}


def cmd_gen(args):
    summary = {"kind": args.kind, "seed": args.seed}
    if args.kind == "saltpepper":
        if args.input is None or args.rho is None:
            raise UsageError("gen saltpepper needs --in and --rho")
        x = io.read_t3b(args.input)
        noisy, corrupted = synth.add_salt_pepper(x, args.rho, args.seed)
        payload = io.encode_t3b(noisy)
        if args.mask_out:
            io.write_mask(args.mask_out, corrupted)
        summary.update(dims=list(x.shape), corrupted=len(corrupted))
    else:
        if args.dims is None:
            raise UsageError(f"gen {args.kind} needs --dims")
        summary["dims"] = list(args.dims)
        if args.kind == "lowrank":
            if args.rank is None:
                raise UsageError("gen lowrank needs --rank")
            payload = io.encode_t3b(synth.gen_tubal_lowrank(*args.dims, args.rank, args.seed))
            summary["rank"] = args.rank
        elif args.kind == "smooth":
            payload = io.encode_t3b(synth.gen_smooth(*args.dims, args.bandwidth, args.seed))
            summary["bandwidth"] = args.bandwidth
        else:
            if args.sr is None:
                raise UsageError("gen mask needs --sr")
            mask = synth.gen_mask(*args.dims, args.sr, args.seed)
            payload = io.encode_mask(mask)
            summary["count"] = len(mask)
    io.atomic_write_bytes(args.out, payload)
    summary.update(out=str(args.out), checksum=io.checksum(payload))
    _emit(summary)


def cmd_complete(args):
    obs = io.read_t3b(args.obs)
    mask = io.read_mask(args.mask)
    if mask.shape != obs.shape:
        raise UsageError(f"mask shape {mask.shape} does not match observation {obs.shape}")
    observed = mask.to_bool()
    scaled, lo, span = _normalize(obs, observed)
    cfg = SolverConfig(beta=args.beta, tol=args.tol, max_iter=args.max_iter,
                       transform=args.transform, filter=args.filter, levels=args.levels)
    x, report = complete(scaled, mask, cfg)
    x = x * span + lo
    x[observed] = obs[observed]
    io.write_t3b(args.out, x)
    if args.trace:
        io.write_csv(args.trace, objective_trace(report))
    summary = {"command": "complete", "dims": list(obs.shape),
               "sampling_rate": mask.sampling_rate, **_report_summary(report),
               "out": str(args.out)}
    if args.truth:
        summary["rel_error"] = _rel_error(x, io.read_t3b(args.truth))
    _emit(summary)


def cmd_rpca(args):
    obs = io.read_t3b(args.obs)
    work = shiftdim(obs) if args.shiftdim else obs
    scaled, lo, span = _normalize(work)
    lam = args.lam if args.lam is not None else default_lambda(work.shape)
    cfg = SolverConfig(beta=args.beta, lam=lam, tol=args.tol, max_iter=args.max_iter,
                       transform=args.transform, filter=args.filter, levels=args.levels)
    low, sparse, report = rpca(scaled, cfg)
    low, sparse = low * span + lo, sparse * span
    if args.shiftdim:
        low, sparse = shiftdim(low, inverse=True), shiftdim(sparse, inverse=True)
    io.write_t3b(args.out_l, low)
    io.write_t3b(args.out_e, sparse)
    if args.trace:
        io.write_csv(args.trace, objective_trace(report))
    summary = {"command": "rpca", "dims": list(obs.shape), "solver_dims": list(work.shape),
               "lambda": lam, **_report_summary(report)}
    if args.truth:
        summary["rel_error"] = _rel_error(low, io.read_t3b(args.truth))
    _emit(summary)


def cmd_analyze_rank(args):
    x, _, _ = _normalize(io.read_t3b(args.input))
    rows = [["transform", "epsilon", "mean_truncated_rank", "slices"]]
    out = Path(args.out)
    hist_files = {}
    for name in args.transform:
        t_op = make_transform(name, x.shape[2], args.filter, args.levels)
        spectra = analysis.multi_rank_spectrum(x, t_op, args.eps)
        for spec in spectra:
            rows.append([name, spec.epsilon, spec.mean_rank, len(spec.truncated_ranks)])
        hist_path = out.with_name(f"{out.stem}_hist_{name}.csv")
        counts = spectra[0].histogram * spectra[0].singular_values.size
        hist_rows = [["bin", "count", "fraction"]]
        hist_rows += [[label, int(round(c)), float(f)] for label, c, f in
                      zip(analysis.HIST_LABELS, counts, spectra[0].histogram)]
        io.write_csv(hist_path, hist_rows)
        hist_files[name] = str(hist_path)
    io.write_csv(out, rows)
    _emit({"command": "analyze-rank", "dims": list(x.shape), "out": str(out),
           "histograms": hist_files,
           "mean_ranks": {f"{r[0]}@{r[1]}": r[2] for r in rows[1:]}})


def cmd_metrics(args):
    ref = io.read_t3b(args.ref)
    test = io.read_t3b(args.test)
    if ref.shape != test.shape:
        raise UsageError(f"shape mismatch: {ref.shape} vs {test.shape}")
    report = metrics.quality(ref, test, args.peak)
    io.write_csv(args.out, report.rows())
    _emit({"command": "metrics", "dims": list(ref.shape), "mean_psnr": report.mean_psnr,
           "mean_ssim": report.mean_ssim, "out": str(args.out)})


def cmd_transform(args):
    if args.action == "dump-w":
        if args.n is None:
            raise UsageError("transform dump-w needs --n")
        system = build_system(args.filter, args.levels, args.n)
        w = system.matrix()
        io.write_csv(args.out, io.matrix_rows(w))
        _emit({"command": "transform", "action": "dump-w", "rows": w.shape[0],
               "cols": w.shape[1], "out": str(args.out)})
        return
    if args.input is None:
        raise UsageError(f"transform {args.action} needs --in")
    x = io.read_t3b(args.input)
    if args.action == "analyze":
        system = build_system(args.filter, args.levels, x.shape[2])
        y = system.analyze(x)
    else:
        bands = (FILTER_BANKS[args.filter].r - 1) * args.levels + 1
        if x.shape[2] % bands:
            raise UsageError(f"n3={x.shape[2]} is not a multiple of the band count {bands}")
        system = build_system(args.filter, args.levels, x.shape[2] // bands)
        y = system.synthesize(x)
    io.write_t3b(args.out, y)
    _emit({"command": "transform", "action": args.action, "dims": list(y.shape),
           "bands": system.w, "out": str(args.out)})


def _solver_flags(p, beta, tol, max_iter):
    p.add_argument("--filter", choices=sorted(FILTER_BANKS), default="cubic")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--transform", choices=TRANSFORMS, default="framelet")
    p.add_argument("--beta", type=float, default=beta)
    p.add_argument("--tol", type=float, default=tol)
    p.add_argument("--max-iter", type=int, default=max_iter)
    p.add_argument("--trace", help="convergence trace CSV")
    p.add_argument("--truth", help="ground truth T3B; adds rel_error to the summary")


def build_parser():
    parser = argparse.ArgumentParser(prog="ftnn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate synthetic tensors and masks")
    p.add_argument("kind", choices=("lowrank", "smooth", "mask", "saltpepper"))
    p.add_argument("--dims", type=_dims)
    p.add_argument("--rank", type=int)
    p.add_argument("--bandwidth", type=int, default=3)
    p.add_argument("--sr", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--in", dest="input")
    p.add_argument("--mask-out", help="where to write the corrupted-entry mask")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("complete", help="tensor completion")
    p.add_argument("--obs", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    _solver_flags(p, beta=1.0, tol=1e-2, max_iter=100)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("rpca", help="tensor robust PCA")
    p.add_argument("--obs", required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--shiftdim", action="store_true")
    p.add_argument("--out-l", required=True)
    p.add_argument("--out-e", required=True)
    _solver_flags(p, beta=5.0, tol=1e-3, max_iter=200)
    p.set_defaults(func=cmd_rpca)

    p = sub.add_parser("analyze-rank", help="truncated multi-rank study")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--transform", type=lambda s: [t for t in s.split(",") if t],
                   default=["identity", "dct", "framelet"])
    p.add_argument("--filter", choices=sorted(FILTER_BANKS), default="cubic")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--eps", type=_float_list, default=[0.02, 0.01, 0.005])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze_rank)

    p = sub.add_parser("metrics", help="per-slice PSNR and SSIM")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--peak", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("transform", help="framelet analysis/synthesis and matrix export")
    p.add_argument("action", choices=("analyze", "synthesize", "dump-w"))
    p.add_argument("--in", dest="input")
    p.add_argument("--n", type=int)
    p.add_argument("--filter", choices=sorted(FILTER_BANKS), default="cubic")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "transform", None) and isinstance(args.transform, list):
        bad = [t for t in args.transform if t not in TRANSFORMS]
        if bad:
            parser.error(f"unknown transform(s): {', '.join(bad)}")
    try:
        args.func(args)
    except (UsageError, ConfigurationError, ShapeError) as exc:
        print(f"ftnn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.FormatError, OSError) as exc:
        print(f"ftnn: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"ftnn: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"ftnn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
