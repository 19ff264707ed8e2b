#!/usr/bin/env python3
"""Desk-scale bias/MSE study over the four simulation scenarios.

With the default 500 replications this runs in minutes and reproduces the
qualitative pattern (bias and MSE shrinking with n); pass --reps 10000 for a
full-scale run.
"""

import argparse

import numpy as np

from nwwfit import positive_params, run_study

SCENARIOS = [
    (1.3, 2.0, 1.5, 1.8),
    (3.0, 1.5, 2.8, 2.5),
    (2.0, 2.2, 6.5, 4.1),
    (1.4, 1.6, 4.8, 5.1),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="50,100,200,500")
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20260810)
    ap.add_argument("--starts", type=int, default=2)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    for scen in SCENARIOS:
        params = positive_params(k1=scen[0], lam1=scen[1], k2=scen[2], lam2=scen[3])
        report = run_study(params, sizes, args.reps, args.seed, starts=args.starts)
        print(f"\nscenario {scen}  reps={args.reps}")
        header = "".join(f"{n:>12}" for n in params.names)
        print(f"{'n':>6} {'':>6}{header}  failures")
        for i, n in enumerate(report.sample_sizes):
            print(f"{n:>6} {'bias':>6}" + "".join(f"{v:>12.5f}" for v in report.bias[i]))
            print(f"{'':>6} {'mse':>6}" + "".join(f"{v:>12.5f}" for v in report.mse[i])
                  + f"  {report.failures[i]}")
        if not report.valid:
            print("warning: failure fraction above 5%, report invalid")
        decreasing = np.sum(np.abs(report.bias[-1]) < np.abs(report.bias[0])) + np.sum(
            report.mse[-1] < report.mse[0]
        )
        print(f"cells shrinking from n={sizes[0]} to n={sizes[-1]}: {decreasing}/8")


if __name__ == "__main__":
    main()
