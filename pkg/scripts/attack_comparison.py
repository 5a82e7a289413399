#!/usr/bin/env python3
"""Compare the eavesdropper's error histograms for the one-previous-block
table schedule versus the two-previous-block sum schedule (1000 runs each,
published angle set, 97-character example message)."""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from qbc.adversary import error_rate, p_exceed, simulate_eve_attack
from qbc.cipher import MODE_SUM_PREV, MODE_TABLE, KeySchedule
from qbc.simulator import RotationParams

THETA1 = RotationParams(0.0, 0.15 * math.pi, 0.72 * math.pi, 0.32 * math.pi)
THETA2 = RotationParams(0.0, 0.45 * math.pi, 0.17 * math.pi, 1.64 * math.pi)

MESSAGE = (
    "All human wisdom is contained in these words. Wait and hope. "
    "The Count of Monte Cristo. Chap 117."
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    length = len(MESSAGE)
    for label, schedule in (
        ("table", KeySchedule(MODE_TABLE, THETA1, THETA2)),
        ("sum_prev2", KeySchedule(MODE_SUM_PREV, THETA1, THETA2, t_prime=2)),
    ):
        rng = np.random.default_rng(args.seed + hash(label) % 1000)
        records, histogram = simulate_eve_attack(MESSAGE, schedule, args.runs, rng)
        path = args.out_dir / f"attack_{label}.csv"
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["errors", "count"])
            writer.writerows(histogram.rows())
        errors = np.array([r.errors for r in records])
        print(
            f"{label:9s} mean={errors.mean():6.2f}  R={error_rate(records, length):.4f}"
            f"  P(err<20)={float((errors < 20).mean()):.3f}"
            f"  P(x=0.5)={p_exceed(records, 0.5, length):.3f}  -> {path}"
        )


if __name__ == "__main__":
    main()
