"""Command-line surface: fit, compare, simulate, sample, plotdata.

Structured output is line-delimited JSON (one record per line, each carrying
``schema_version``); a human-readable table goes to standard output. Exit
codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .competitors import compare_models, fit_mixture_em, fit_normal, fit_weibull
from .composed import nww
from .errors import IngestionError, NwwError
from .gof import GofReport, ad_cvm_statistics, information_criteria
from .inference import fit_mle
from .ingest import IngestionSpec, read_csv
from .montecarlo import run_study
from .params import positive_params
from .sampling import sample

SCHEMA_VERSION = 1

EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def _parse_params(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise IngestionError(f"--params expects k1,l1,k2,l2 (got {text!r})")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise IngestionError(f"--params expects four numbers (got {text!r})") from None
    if any(not (math.isfinite(v) and v > 0) for v in vals):
        raise IngestionError(f"--params must all be positive and finite (got {text!r})")
    return vals


def _parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise IngestionError(f"--grid expects lo:hi:step (got {text!r})")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise IngestionError(f"--grid expects numbers lo:hi:step (got {text!r})") from None
    if step <= 0 or hi <= lo:
        raise IngestionError(f"--grid needs hi > lo and step > 0 (got {text!r})")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _parse_sizes(text):
    try:
        sizes = [int(s) for s in text.split(",")]
    except ValueError:
        raise IngestionError(f"--sizes expects comma-separated integers (got {text!r})") from None
    if not sizes or any(s < 10 for s in sizes):
        raise IngestionError(f"--sizes must all be >= 10 (got {text!r})")
    return sizes


def _resolve_seed(args):
    if args.seed is None:
        seed = secrets.randbits(32)
        print(f"seed drawn from entropy: {seed}")
        return seed
    return args.seed


def _ingest(args):
    spec = IngestionSpec(
        path=args.data,
        column=args.column,
        delimiter=args.delimiter,
        header=not args.no_header,
        drop_nonpositive=not args.strict,
    )
    result = read_csv(spec)
    for w in result.warnings:
        print(f"warning: {w}")
    return result


class _RunWriter:
    """Collects JSONL records and writes them with a run_meta header line."""

    def __init__(self, args, seed):
        self.out = getattr(args, "out", None)
        self.seed = seed
        self.command = sys.argv[1:] or [args.command]
        self.t0 = time.perf_counter()
        self.records = []
        self.warnings = []

    def add(self, record_type, payload):
        self.records.append({"schema_version": SCHEMA_VERSION, "record": record_type, **payload})

    def finish(self):
        meta = {
            "schema_version": SCHEMA_VERSION,
            "record": "run_meta",
            "tool": f"nwwfit {__version__}",
            "command": self.command,
            "seed": self.seed,
            "wall_time_s": round(time.perf_counter() - self.t0, 6),
            "warnings": self.warnings,
        }
        if self.out:
            with open(self.out, "w", encoding="utf-8") as fh:
                for rec in [meta, *self.records]:
                    fh.write(json.dumps(rec) + "\n")
            print(f"report written to {self.out}")


def _fit_payload(fit):
    se = None if fit.std_errors is None else [float(s) for s in fit.std_errors]
    return {
        "model": fit.model_name,
        "n": fit.n_obs,
        "estimates": fit.estimates.as_dict(),
        "std_errors": dict(zip(fit.estimates.names, se)) if se else None,
        "loglik": fit.loglik,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "gradient_norm": fit.gradient_norm_at_opt,
    }


def _describe(data):
    x = data.observations
    mean = float(x.mean())
    sd = float(x.std())
    skew = float(np.mean(((x - mean) / sd) ** 3)) if sd > 0 else math.nan
    kurt = float(np.mean(((x - mean) / sd) ** 4) - 3.0) if sd > 0 else math.nan
    return {
        "n": int(x.size),
        "mean": mean,
        "median": float(np.median(x)),
        "min": float(x.min()),
        "max": float(x.max()),
        "variance": float(x.var()),
        "skewness": skew,
        "excess_kurtosis": kurt,  # kurtosis minus 3, i.e. 0 for a normal sample
    }


def _print_fit_table(fit, report=None):
    print(f"model: {fit.model_name}   n={fit.n_obs}   loglik={fit.loglik:.4f}")
    print(f"{'param':>10} {'estimate':>14} {'std.err':>12}")
    se = fit.std_errors
    for i, name in enumerate(fit.estimates.names):
        se_txt = f"{se[i]:.5f}" if se is not None else "n/a"
        print(f"{name:>10} {fit.estimates.values[i]:>14.5f} {se_txt:>12}")
    if report is not None:
        print(
            f"AIC={report.aic:.1f}  CAIC={report.caic:.1f}  BIC={report.bic:.1f}  "
            f"HQIC={report.hqic:.1f}  A*={report.a_star:.4f}  W*={report.w_star:.4f}"
        )


def _gof_record(report):
    return {
        "model": report.model_name,
        "n": report.n,
        "n_params": report.n_params,
        "loglik": report.loglik,
        "aic": report.aic,
        "caic": report.caic,
        "bic": report.bic,
        "hqic": report.hqic,
        "a_star": report.a_star,
        "w_star": report.w_star,
        "error": report.error,
    }


def cmd_fit(args):
    seed = _resolve_seed(args)
    writer = _RunWriter(args, seed)
    ingestion = _ingest(args)
    writer.warnings.extend(ingestion.warnings)
    data = ingestion.data

    reports = compare_models(data, models=(args.model,), seed=seed, starts=args.starts)
    report = reports[0]
    if report.error is not None:
        raise NwwError(f"fit failed: {report.error}")
    fit = report.fit

    stats = _describe(data)
    writer.add("descriptive_stats", stats)
    writer.add("fit_result", {**_fit_payload(fit), "criteria": _gof_record(report)})
    writer.finish()
    _print_fit_table(fit, report)
    return 0


def cmd_compare(args):
    seed = _resolve_seed(args)
    writer = _RunWriter(args, seed)
    ingestion = _ingest(args)
    writer.warnings.extend(ingestion.warnings)
    data = ingestion.data

    reports = compare_models(data, seed=seed, starts=args.starts)
    writer.add("descriptive_stats", _describe(data))
    for rank, rep in enumerate(reports, start=1):
        writer.add("gof_report", {"rank": rank, **_gof_record(rep)})
    writer.finish()

    print(f"{'rank':>4} {'model':>8} {'loglik':>14} {'AIC':>12} {'CAIC':>12} "
          f"{'BIC':>12} {'HQIC':>12} {'A*':>10} {'W*':>10}")
    for rank, rep in enumerate(reports, start=1):
        if rep.error is not None:
            print(f"{rank:>4} {rep.model_name:>8}  failed: {rep.error}")
        else:
            print(
                f"{rank:>4} {rep.model_name:>8} {rep.loglik:>14.2f} {rep.aic:>12.1f} "
                f"{rep.caic:>12.1f} {rep.bic:>12.1f} {rep.hqic:>12.1f} "
                f"{rep.a_star:>10.4f} {rep.w_star:>10.4f}"
            )
    return 0


def cmd_simulate(args):
    seed = _resolve_seed(args)
    writer = _RunWriter(args, seed)
    params = positive_params(
        k1=args.params[0], lam1=args.params[1], k2=args.params[2], lam2=args.params[3]
    )
    sizes = _parse_sizes(args.sizes)
    report = run_study(params, sizes, args.reps, seed, starts=args.starts)

    names = list(params.names)
    writer.add(
        "simulation_report",
        {
            "scenario": params.as_dict(),
            "sizes": report.sample_sizes,
            "replications": report.replications,
            "bias": {str(n): dict(zip(names, report.bias[i].tolist()))
                     for i, n in enumerate(report.sample_sizes)},
            "mse": {str(n): dict(zip(names, report.mse[i].tolist()))
                    for i, n in enumerate(report.sample_sizes)},
            "failures": report.failures,
            "valid": report.valid,
        },
    )
    writer.finish()

    header = "".join(f"{name:>12}" for name in names)
    print(f"scenario: {params.as_dict()}   reps={report.replications}")
    print(f"{'n':>6} {'':>6}{header}")
    for i, n in enumerate(report.sample_sizes):
        bias_row = "".join(f"{v:>12.5f}" for v in report.bias[i])
        mse_row = "".join(f"{v:>12.5f}" for v in report.mse[i])
        print(f"{n:>6} {'bias':>6}{bias_row}")
        print(f"{'':>6} {'mse':>6}{mse_row}   failures={report.failures[i]}")
    if not report.valid:
        print("warning: failure fraction exceeded 5%; report flagged invalid")
    return 0


def cmd_sample(args):
    seed = _resolve_seed(args)
    writer = _RunWriter(args, seed)
    model = nww(*args.params)
    result = sample(model, args.n, seed, workers=args.threads)
    out = Path(args.out)
    with out.open("w", encoding="utf-8") as fh:
        for v in result.values:
            fh.write(f"{float(v)!r}\n")
    writer.out = None
    writer.finish()
    print(
        f"wrote {args.n} draws to {out} "
        f"(acceptance rate {result.acceptance_rate:.4f}, seed {seed})"
    )
    return 0


def cmd_plotdata(args):
    seed = _resolve_seed(args)
    model = nww(*args.params)
    grid = _parse_grid(args.grid)
    pdf_vals = np.asarray(model.pdf(grid), dtype=float)
    cdf_vals = np.asarray(model.cdf(grid), dtype=float)

    hist = None
    if args.data:
        ingestion = _ingest(args)
        edges = np.append(grid, grid[-1] + (grid[1] - grid[0] if grid.size > 1 else 1.0))
        counts, _ = np.histogram(ingestion.data.observations, bins=edges, density=True)
        hist = counts

    with open(args.out, "w", encoding="utf-8") as fh:
        cols = "x,pdf,cdf" + (",hist_density" if hist is not None else "")
        fh.write(cols + "\n")
        for i, x in enumerate(grid):
            row = f"{x:.10g},{pdf_vals[i]:.10g},{cdf_vals[i]:.10g}"
            if hist is not None:
                row += f",{hist[i]:.10g}"
            fh.write(row + "\n")
    print(f"wrote {grid.size} grid rows to {args.out} (seed {seed})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nwwfit",
        description="Fit, compare, simulate and sample two-baseline composed "
        "distributions (Weibull/Weibull preset) on positive-valued data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_ingest_flags(p):
        p.add_argument("--data", required=True, help="CSV file with observations")
        p.add_argument("--column", default=0, help="column name or 0-based index")
        p.add_argument("--delimiter", default=",")
        p.add_argument("--no-header", action="store_true", help="file has no header row")
        p.add_argument("--strict", action="store_true",
                       help="error on nonpositive values instead of dropping them")

    def add_common(p, out_required=False):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", required=out_required, help="output file path")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; results do not depend on it")

    p_fit = sub.add_parser("fit", help="fit one model to a data file")
    add_ingest_flags(p_fit)
    p_fit.add_argument("--model", default="nww",
                       choices=["nww", "nn", "ww", "normal", "weibull"])
    p_fit.add_argument("--starts", type=int, default=6)
    add_common(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_cmp = sub.add_parser("compare", help="fit and rank all five models")
    add_ingest_flags(p_cmp)
    p_cmp.add_argument("--starts", type=int, default=4)
    add_common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_sim = sub.add_parser("simulate", help="bias/MSE study at given true parameters")
    p_sim.add_argument("--params", required=True, type=_parse_params,
                       help="true parameters k1,l1,k2,l2")
    p_sim.add_argument("--sizes", default="50,100,200,500")
    p_sim.add_argument("--reps", type=int, default=500,
                       help="replications per size (500 runs in minutes; "
                       "use 10000 for a full-scale study)")
    p_sim.add_argument("--starts", type=int, default=2)
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_smp = sub.add_parser("sample", help="draw pseudo-random values, one per line")
    p_smp.add_argument("--params", required=True, type=_parse_params)
    p_smp.add_argument("--n", type=int, required=True)
    add_common(p_smp, out_required=True)
    p_smp.set_defaults(func=cmd_sample)

    p_plt = sub.add_parser("plotdata", help="emit (x, pdf, cdf) rows over a grid")
    p_plt.add_argument("--params", required=True, type=_parse_params)
    p_plt.add_argument("--grid", required=True, help="lo:hi:step")
    p_plt.add_argument("--data", default=None,
                       help="optional CSV; adds normalized histogram column")
    p_plt.add_argument("--column", default=0)
    p_plt.add_argument("--delimiter", default=",")
    p_plt.add_argument("--no-header", action="store_true")
    p_plt.add_argument("--strict", action="store_true")
    add_common(p_plt, out_required=True)
    p_plt.set_defaults(func=cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except IngestionError as exc:  # raised by argument type converters
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        return args.func(args)
    except IngestionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except NwwError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
