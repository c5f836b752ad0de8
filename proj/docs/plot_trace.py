#!/usr/bin/env python3
"""Plot a trace.csv produced by `cylsim simulate` (or a compare trace).

Usage: python3 docs/plot_trace.py trace.csv [out.png]
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    trace = pd.read_csv(sys.argv[1])
    out = sys.argv[2] if len(sys.argv) > 2 else "trace.png"

    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 9))

    for j in (1, 2, 3):
        axes[0].plot(trace["t"], trace[f"q{j}"], label=f"q{j}")
        axes[0].plot(trace["t"], trace[f"qd{j}"], "--", label=f"qd{j}")
        axes[1].plot(trace["t"], trace[f"e{j}"], label=f"e{j}")
        axes[2].plot(trace["t"], trace[f"tau{j}"], label=f"tau{j}")

    axes[0].set_ylabel("position")
    axes[1].set_ylabel("tracking error")
    axes[2].set_ylabel("torque / force")
    axes[2].set_xlabel("t [s]")
    for ax in axes:
        ax.legend(loc="upper right", fontsize=8)
        ax.grid(True, alpha=0.3)

    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
