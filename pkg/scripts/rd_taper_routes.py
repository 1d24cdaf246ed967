"""Compare the reduced-dimension taper routes at 100 Hz on the sigma_v=0.5 scene.

    python scripts/rd_taper_routes.py [--trials 50]
"""
import argparse

from kastap import AlgorithmSpec, ClutterScenario, sinr_vs_snapshots


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=50)
    args = ap.parse_args()
    sc = ClutterScenario(icm_sigma_v=0.5)
    algs = [AlgorithmSpec("full", "LRGP-EIG", snapshots=4, taper_sigma_v=1.0)]
    algs += [AlgorithmSpec(route.replace("-", "_"), "LRGP-RD", snapshots=4, taper_sigma_v=1.0, taper_route=route)
             for route in ("lift", "congruence", "block-lag")]
    c = sinr_vs_snapshots(sc, algs, [4, 16], trials=args.trials)
    print(f"optimum {c.optimum_db[0]:.2f} dB")
    for a in c.algorithms:
        col = c.column(a)
        print(f"{a:12s} L=4 {col[0]:6.2f} dB   L=16 {col[1]:6.2f} dB")


if __name__ == "__main__":
    main()
