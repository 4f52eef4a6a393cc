#!/usr/bin/env python3
"""Sample-size scaling of the corruption-free DP mean.

Runs dp_plain (gamma = 1/n) and dp_robust (fixed gamma) on clean data over
a range of n at fixed d. The filtered estimator's bound column is constant
in n by construction; the gamma = 1/n estimator's error shrinks as n grows.

Example:
    python scripts/run_n_scaling.py --ns 100,1000,10000 --d 50 --out-dir results/
"""

import argparse
from pathlib import Path

from dprobust.estimators import Method
from dprobust.harness import (
    ExperimentConfig,
    aggregate_to_csv,
    excess_error_table,
    run_sweep,
    write_records_csv,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ns", default="100,1000,10000")
    parser.add_argument("--d", type=int, default=50)
    parser.add_argument("--gamma", type=float, default=0.1)
    parser.add_argument("--epsilon", type=float, default=1.0)
    parser.add_argument("--tau", type=float, default=0.05)
    parser.add_argument("--c-thresh", type=float, default=1.0)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--base-seed", type=int, default=0)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()

    config = ExperimentConfig(
        n_values=tuple(int(v) for v in args.ns.split(",")),
        d_values=(args.d,),
        gamma=args.gamma,
        epsilon=args.epsilon,
        tau=args.tau,
        c_thresh=args.c_thresh,
        trials=args.trials,
        base_seed=args.base_seed,
        methods=(Method.DP_PLAIN, Method.DP_ROBUST),
        adversary=None,
    )
    records = run_sweep(config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_records_csv(records, out_dir / "n_scaling_records.csv")
    rows = excess_error_table(records)
    (out_dir / "n_scaling_aggregate.csv").write_text(aggregate_to_csv(rows))
    for row in rows:
        print(
            f"n={row.n} d={row.d}: "
            + " ".join(f"{m}={v:.3f}" for m, v in sorted(row.medians.items()))
        )
    print(f"wrote {out_dir / 'n_scaling_records.csv'}")


if __name__ == "__main__":
    main()
