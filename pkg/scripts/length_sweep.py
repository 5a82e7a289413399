#!/usr/bin/env python3
"""Attack statistics versus message length under the two-previous-block
schedule: average error rate and the chance of exceeding fractional error
thresholds, for random messages of increasing length."""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from qbc.adversary import length_sweep
from qbc.cipher import MODE_SUM_PREV, KeySchedule
from qbc.simulator import RotationParams

THETA1 = RotationParams(0.0, 0.15 * math.pi, 0.72 * math.pi, 0.32 * math.pi)
THETA2 = RotationParams(0.0, 0.45 * math.pi, 0.17 * math.pi, 1.64 * math.pi)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--min-length", type=int, default=10)
    parser.add_argument("--max-length", type=int, default=300)
    parser.add_argument("--step", type=int, default=10)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--x", type=float, action="append", default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("results/length_sweep.csv"))
    args = parser.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    x_values = args.x or [0.25, 0.5]
    schedule = KeySchedule(MODE_SUM_PREV, THETA1, THETA2, t_prime=2)
    lengths = range(args.min_length, args.max_length + 1, args.step)
    rows = length_sweep(schedule, lengths, x_values, args.runs, np.random.default_rng(args.seed))
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["length", "avg_err_rate", "p_x", "x"])
        writer.writerows((r.length, r.avg_err_rate, r.p_x, r.x) for r in rows)
    print(f"{len(rows)} rows -> {args.out}")


if __name__ == "__main__":
    main()
