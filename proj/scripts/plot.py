#!/usr/bin/env python3
"""Render tracking and estimation figures from trial CSV logs.

Usage: plot.py out/friday_enviro_sine_seed*.csv [-o figure.png]
"""
import argparse
import csv
import sys


def load(path):
    rows = []
    with open(path) as f:
        for line in f:
            if line.startswith("#"):
                continue
            rows.append(line)
    reader = csv.DictReader(rows)
    cols = {k: [] for k in reader.fieldnames}
    for rec in reader:
        for k, v in rec.items():
            cols[k].append(float(v))
    return cols


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csvs", nargs="+")
    ap.add_argument("-o", "--output", default="trajectory.png")
    args = ap.parse_args()

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_p, ax_e, ax_r) = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    for path in args.csvs:
        c = load(path)
        ax_p.plot(c["t"], c["p"], lw=0.8, label=path)
        ax_e.plot(c["t"], [abs(p - pr) for p, pr in zip(c["p"], c["pr"])], lw=0.8)
        ax_r.plot(c["t"], c["r_true"], lw=0.8, color="k", alpha=0.5)
        ax_r.plot(c["t"], c["r_hat"], lw=0.8)
    c0 = load(args.csvs[0])
    ax_p.plot(c0["t"], c0["pr"], "k--", lw=1.0, label="reference")
    ax_p.set_ylabel("p [m]")
    ax_p.legend(fontsize=6)
    ax_e.set_ylabel("|p - pr| [m]")
    ax_r.set_ylabel("residual [N]")
    ax_r.set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print("wrote", args.output)


if __name__ == "__main__":
    sys.exit(main())
