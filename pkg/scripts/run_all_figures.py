"""Run every figure preset and print a runtime table.

    python scripts/run_all_figures.py --out results [--trials 20] [--only fig3a fig6]
"""
import argparse
import json
import time

from kastap.experiment import PRESETS, get_preset, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--trials", type=int, help="override trial counts (quick look)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--only", nargs="*", help="preset ids to run")
    args = ap.parse_args()

    ids = args.only or list(PRESETS)
    for pid in ids:
        spec = get_preset(pid).replace(master_seed=args.seed)
        if args.trials:
            spec = spec.replace(trials=args.trials)
        t0 = time.perf_counter()
        csv_path, json_path = run_experiment(spec, args.out)
        wall = time.perf_counter() - t0
        meta = json.loads(json_path.read_text())
        print(f"{pid:14s} {wall:7.1f} s  {len(meta['columns']) - 1:2d} curves  -> {csv_path}")


if __name__ == "__main__":
    main()
