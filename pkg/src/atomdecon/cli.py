"""Command-line front end.

Exit codes: 0 success, 2 usage or validation error, 3 numerical-domain error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, estimators, kernels, simulation
from .errors import CoverageError, DomainError, ExponentOverflow, NonIntegrableMoment
from .numerics import GridConfig, Sample

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _positive(name):
    def conv(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--{name} must be a number, got {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"--{name} must be positive, got {text!r}")
        return v

    return conv


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _model_from_args(args, default=None) -> simulation.ModelSpec:
    family = default.family if default is not None and args.model is None else None
    if family is None:
        try:
            family = simulation.parse_family(args.model or "normal:3,9")
        except ValueError as exc:
            raise UsageError(f"invalid --model: {exc}") from None
    p = args.p if args.p is not None else (default.p if default else 0.1)
    sigma = args.sigma if args.sigma is not None else (default.sigma if default else 1.0)
    if not 0.0 <= p < 1.0:
        raise UsageError(f"invalid --p: must lie in [0, 1), got {p}")
    if not sigma >= 0.0:
        raise UsageError(f"invalid --sigma: must be non-negative, got {sigma}")
    return simulation.ModelSpec(p, family, sigma)


def cmd_simulate(args) -> int:
    model = _model_from_args(args)
    if args.n < 1:
        raise UsageError(f"invalid --n: must be at least 1, got {args.n}")
    sample = simulation.draw_sample(model, args.n, args.seed)
    lines = ["x"] + [repr(float(v)) for v in sample.values]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _read_sample(path: str, sigma: float) -> Sample:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read --input: {exc}") from None
    rows = [r.strip() for r in text.splitlines() if r.strip()]
    if rows and rows[0].split(",")[0].strip().lower() == "x":
        rows = rows[1:]
    try:
        values = np.array([float(r.split(",")[0]) for r in rows])
        return Sample(values, sigma)
    except ValueError as exc:
        raise UsageError(f"invalid sample file {path!r}: {exc}") from None


def cmd_estimate(args) -> int:
    sample = _read_sample(args.input, args.sigma)
    try:
        kernel_w = kernels.get_kernel(args.kernel_w)
        kernel_k = kernels.get_kernel(args.kernel_k)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    try:
        grid = GridConfig.for_bandwidth(args.h, args.n_grid, args.coverage)
    except ValueError as exc:
        raise UsageError(f"invalid grid: {exc}") from None
    meta = {"mode": args.mode, "h": args.h, "sigma": args.sigma, "n": sample.n,
            "kernel_w": kernel_w.name, "grid": grid.to_dict()}
    if args.mode == "classical":
        result = estimators.fhat_grid(sample, args.h, kernel_w, grid)
    elif args.mode == "known-p":
        if args.p is None or not 0.0 <= args.p < 1.0:
            raise UsageError("invalid --p: known-p mode needs --p in [0, 1)")
        result = estimators.f_known_p_grid(sample, args.h, args.p, kernel_w, grid)
        meta["p"] = args.p
    else:
        if args.g is None:
            raise UsageError("invalid --g: unknown-p mode needs a bandwidth --g")
        if not 0.0 < args.eps < 1.0:
            raise UsageError(f"invalid --eps: must lie in (0, 1), got {args.eps}")
        try:
            config = estimators.EstimatorConfig(args.h, args.g, args.eps, kernel_w, kernel_k, grid)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        result = estimators.f_star_grid(sample, config)
        meta.update({k: result.meta[k] for k in ("p_raw", "p_hat", "truncated", "g", "eps_n")})
        meta["kernel_k"] = kernel_k.name
    if args.clip:
        result = result.clipped()
        meta["clipped"] = True
    if args.xlim is not None:
        if len(args.xlim) != 2 or args.xlim[0] >= args.xlim[1]:
            raise UsageError("invalid --xlim: expected LO,HI with LO < HI")
        result = result.crop(*args.xlim)
    text = result.to_json() if args.format == "json" else result.to_csv()
    _emit(text, args.out)
    sidecar = args.meta or (args.out + ".meta.json" if args.out and args.out != "-" else None)
    if sidecar:
        Path(sidecar).write_text(json.dumps(meta, indent=2), encoding="utf-8")
    else:
        sys.stderr.write(json.dumps(meta) + "\n")
    return 0


def cmd_mc_table(args) -> int:
    preset = simulation.PRESETS.get(args.preset) if args.preset else None
    if args.preset and preset is None:
        raise UsageError(f"invalid --preset: {args.preset!r}")
    model = _model_from_args(args, preset["model"] if preset else None)
    n = args.n or (preset["n"] if preset else 1000)
    bandwidths = args.g or (preset["bandwidths"] if preset else None)
    if not bandwidths:
        raise UsageError("invalid --g: give a bandwidth list or a --preset")
    reps = 1000 if args.full else args.reps
    if reps < 2:
        raise UsageError("invalid --reps: need at least 2 replications")
    try:
        kernel_k = kernels.get_kernel(args.kernel_k)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    rows = simulation.mc_study(model, n, bandwidths, reps, args.seed, kernel_k, workers=args.workers)
    if args.format == "json":
        text = simulation.summaries_to_json(rows)
    else:
        text = simulation.summaries_to_csv(rows)
    _emit(text, args.out)
    return 0


def _kernel_report(kernel: kernels.Kernel, h: float, sigma: float) -> dict:
    moments = {}
    for j in range(5):
        try:
            moments[j] = kernels.kernel_moment(kernel, j, tol=1e-8)
        except NonIntegrableMoment:
            moments[j] = None
    report = {
        "name": kernel.name,
        "kind": kernel.kind,
        "alpha": kernel.alpha,
        "A" if kernel.kind == "w" else "C": kernel.edge_const,
        "ft_integral": kernel.ft_integral,
        "ft_sup": kernel.sup_ft(),
        "fourier_pair_residual": kernels.fourier_pair_residual(kernel),
        "moments": moments,
        "h": h,
        "sigma": sigma,
        "lemma51_ratio": asymptotics.lemma51_ratio(kernel, h, sigma),
    }
    if kernel.kind == "k":
        report["B"] = kernel.origin_const
        report["gamma"] = kernel.origin_order
    return report


def cmd_kernel_info(args) -> int:
    try:
        kernel = kernels.get_kernel(args.kernel)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    rep = _kernel_report(kernel, args.h, args.sigma)
    if args.format == "json":
        _emit(json.dumps(rep, indent=2) + "\n", args.out)
        return 0
    buf = io.StringIO()
    buf.write(f"kernel       {rep['name']} ({rep['kind']}-type)\n")
    for key in ("A", "B", "C", "alpha", "gamma"):
        if key in rep:
            buf.write(f"{key:<12} {rep[key]:g}\n")
    buf.write(f"int phi      {rep['ft_integral']:.6f}\n")
    buf.write(f"max |phi|    {rep['ft_sup']:.6f}\n")
    buf.write(f"pair resid   {rep['fourier_pair_residual']:.3e}\n")
    for j, m in rep["moments"].items():
        buf.write(f"moment[{j}]    {'not integrable' if m is None else format(round(m, 9) + 0.0, '.8f')}\n")
    buf.write(f"ratio        {rep['lemma51_ratio']:.4f}  (h={args.h:g}, sigma={args.sigma:g})\n")
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_asymptotics(args) -> int:
    try:
        kernel_w = kernels.get_kernel(args.kernel_w)
        kernel_k = kernels.get_kernel(args.kernel_k)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    if not 0.0 <= args.p < 1.0:
        raise UsageError(f"invalid --p: must lie in [0, 1), got {args.p}")
    try:
        sched = asymptotics.default_schedule(args.n, args.sigma)
    except DomainError as exc:
        raise UsageError(f"invalid --n: {exc}") from None
    g = args.g if args.g is not None else sched.g
    h = args.h if args.h is not None else sched.h
    rep = {
        "n": args.n, "sigma": args.sigma, "p": args.p,
        "schedule": {"h": sched.h, "g": sched.g, "eta_n": sched.eta_n, "delta_n": sched.delta_n,
                     "eps_n": sched.eps_n, "eps_raw": sched.eps_raw},
        "g": g, "h": h,
        "asymptotic_sd_p": asymptotics.asymptotic_sd_p(g, args.n, args.sigma, kernel_k),
        "corrected_sd_p": asymptotics.corrected_sd_p(g, args.n, args.sigma, kernel_k),
        "ratio_k": asymptotics.lemma51_ratio(kernel_k, g, args.sigma),
        "asymptotic_sd_f": asymptotics.asymptotic_sd_f(h, args.n, args.sigma, args.p, kernel_w),
        "corrected_sd_f": asymptotics.corrected_sd_f(h, args.n, args.sigma, args.p, kernel_w),
        "ratio_w": asymptotics.lemma51_ratio(kernel_w, h, args.sigma),
    }
    if args.format == "json":
        _emit(json.dumps(rep, indent=2) + "\n", args.out)
    else:
        flat = [("n", rep["n"]), ("sigma", rep["sigma"])]
        flat += [(f"schedule.{k}", v) for k, v in rep["schedule"].items()]
        flat += [(k, rep[k]) for k in ("g", "h", "asymptotic_sd_p", "corrected_sd_p", "ratio_k",
                                        "asymptotic_sd_f", "corrected_sd_f", "ratio_w")]
        _emit("quantity,value\n" + "".join(f"{k},{v!r}\n" for k, v in flat), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atomdecon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(p, with_defaults=True):
        p.add_argument("--model", default=None, help="normal:MEAN,VAR | gamma:SHAPE[,RATE] | mixture:W,M,V,...")
        p.add_argument("--p", type=float, default=None, help="atom mass P(Y = 0)")
        p.add_argument("--sigma", type=float, default=None, help="noise standard deviation")

    s = sub.add_parser("simulate", help="draw a sample X = BV + sigma Z")
    model_flags(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="estimate the density (and atom mass) on an FFT grid")
    e.add_argument("--input", required=True, help="CSV with header 'x' ('-' for stdin)")
    e.add_argument("--sigma", type=_positive("sigma"), required=True)
    e.add_argument("--h", type=_positive("h"), required=True)
    e.add_argument("--g", type=_positive("g"), default=None)
    e.add_argument("--eps", type=float, default=0.01)
    e.add_argument("--p", type=float, default=None)
    e.add_argument("--mode", choices=["unknown-p", "known-p", "classical"], default="unknown-p")
    e.add_argument("--kernel-w", default="deconv_w")
    e.add_argument("--kernel-k", default="atom_k")
    e.add_argument("--n-grid", type=int, default=2**16)
    e.add_argument("--coverage", type=float, default=64.0)
    e.add_argument("--xlim", type=_float_list, default=None)
    e.add_argument("--clip", action="store_true", help="clip negative values and renormalize")
    e.add_argument("--format", choices=["csv", "json"], default="csv")
    e.add_argument("--out", default=None)
    e.add_argument("--meta", default=None, help="sidecar JSON path (default OUT.meta.json)")
    e.set_defaults(func=cmd_estimate)

    m = sub.add_parser("mc-table", help="Monte Carlo study of the atom estimator")
    m.add_argument("--preset", choices=sorted(k for k in simulation.PRESETS if k.startswith("table")))
    model_flags(m)
    m.add_argument("--n", type=int, default=None)
    m.add_argument("--g", type=_float_list, default=None)
    m.add_argument("--reps", type=int, default=200)
    m.add_argument("--full", action="store_true", help="use R = 1000 replications")
    m.add_argument("--seed", type=int, default=1)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--kernel-k", default="atom_k")
    m.add_argument("--format", choices=["csv", "json"], default="csv")
    m.add_argument("--out", default=None)
    m.set_defaults(func=cmd_mc_table)

    k = sub.add_parser("kernel-info", help="kernel constants, moments and diagnostics")
    k.add_argument("--kernel", required=True)
    k.add_argument("--h", type=_positive("h"), default=0.5)
    k.add_argument("--sigma", type=_positive("sigma"), default=1.0)
    k.add_argument("--format", choices=["text", "json"], default="text")
    k.add_argument("--out", default=None)
    k.set_defaults(func=cmd_kernel_info)

    a = sub.add_parser("asymptotics", help="bandwidth schedule and SD predictors")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--sigma", type=_positive("sigma"), default=1.0)
    a.add_argument("--p", type=float, default=0.1)
    a.add_argument("--g", type=_positive("g"), default=None)
    a.add_argument("--h", type=_positive("h"), default=None)
    a.add_argument("--kernel-w", default="deconv_w")
    a.add_argument("--kernel-k", default="atom_k")
    a.add_argument("--format", choices=["csv", "json"], default="csv")
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_asymptotics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"atomdecon {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except ExponentOverflow as exc:
        sys.stderr.write(f"atomdecon {args.command}: numerical error: {exc}\n")
        return EXIT_NUMERIC
    except (CoverageError, DomainError) as exc:
        sys.stderr.write(f"atomdecon {args.command}: numerical error: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
