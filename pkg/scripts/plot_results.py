"""Render result CSVs as PNGs next to them (needs matplotlib).

    python scripts/plot_results.py results/*.csv
"""
import sys
from pathlib import Path

import numpy as np

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is needed: pip install 'artifact[plot]'")

LABELS = {"doppler_hz": "target Doppler (Hz)", "snapshots": "training snapshots L", "snr_db": "SNR (dB)",
          "icm_sigma_v": "true sigma_v (m/s)", "velocity_error_mps": "velocity error (m/s)",
          "yaw_error_deg": "yaw error (deg)", "azimuth_deg": "azimuth (deg)"}


def plot(path):
    path = Path(path)
    header = path.read_text().splitlines()[0].split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    fig, ax = plt.subplots(figsize=(6, 4))
    if header[0] == "azimuth_deg":
        ax.plot(data[:, 1], data[:, 2], label="assumed ridge")
        ax.plot(data[:, 1], data[:, 3], "--", label="true ridge")
        ax.set_xlabel("spatial frequency")
        ax.set_ylabel("Doppler (Hz)")
    else:
        for j, name in enumerate(header[1:], start=1):
            style = "k:" if name.startswith("optimum") else "-"
            ax.plot(data[:, 0], data[:, j], style, label=name.rsplit("_", 1)[0])
        ax.set_xlabel(LABELS.get(header[0], header[0]))
        ax.set_ylabel("Pd" if header[1].endswith("_pd") else "SINR (dB)")
        if header[0] == "snapshots":
            ax.set_xscale("log")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7)
    ax.set_title(path.stem)
    fig.tight_layout()
    out = path.with_suffix(".png")
    fig.savefig(out, dpi=120)
    plt.close(fig)
    print(out)


if __name__ == "__main__":
    for p in sys.argv[1:]:
        plot(p)
