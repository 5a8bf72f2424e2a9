"""Average running length of the CUSUM detector on standard-normal input.

For each threshold reports the mean gap between false alarms and the mean
delay to detect a unit mean shift.
"""

import argparse

import numpy as np

from rfid_ekf.cusum import CusumConfig, CusumState, cusum_step


def alarm_gap(x, cfg):
    state, alarms = CusumState(), 0
    for v in x:
        state, d = cusum_step(state, float(v), cfg)
        alarms += d
    return len(x) / alarms if alarms else float("inf")


def delay(shift, cfg, runs, rng):
    total = 0
    for _ in range(runs):
        state, d = CusumState(), 0
        while not d:
            state, d = cusum_step(state, float(rng.normal(shift, 1)), cfg)
            total += 1
    return total / runs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=400_000)
    ap.add_argument("--upsilon", type=float, nargs="+", default=[0.5, 0.0])
    ap.add_argument("--thetas", type=float, nargs="+", default=[2, 4, 6, 8])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    x = np.random.default_rng(args.seed).normal(size=args.samples)
    for ups in args.upsilon:
        print(f"upsilon={ups}")
        for theta in args.thetas:
            cfg = CusumConfig(theta, ups)
            d = delay(1.0, cfg, 1000, np.random.default_rng(args.seed + 1))
            print(f"  theta={theta:g}: ARL0 {alarm_gap(x, cfg):10.1f}   delay(+1) {d:6.2f}")


if __name__ == "__main__":
    main()
