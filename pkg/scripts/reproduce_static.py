"""Static convergence tables for both scales and all six initial errors.

Prints the median relative error per frame and writes traces under --out.
"""

import argparse

import numpy as np

from rfid_ekf.config import resolve_config
from rfid_ekf.output import emit
from rfid_ekf.runner import run_experiment

CASES = ["under90", "under50", "under20", "over20", "over50", "over90"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--out", default="out/static")
    args = ap.parse_args()

    for scale in ("s1", "s2"):
        print(f"scenario {scale}: median relative error by frame")
        for case in CASES:
            cfg = resolve_config(f"static-{scale}-{case}").replace(seeds=args.seeds)
            results = run_experiment(cfg)
            emit(results, cfg, "csv", args.out)
            med = [np.median([t[i].rel_err for t, _ in results]) for i in range(cfg.k_max)]
            print(f"  {case:8s} " + " ".join(f"{m:.4f}" for m in med))


if __name__ == "__main__":
    main()
