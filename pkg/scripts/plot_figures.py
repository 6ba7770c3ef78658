#!/usr/bin/env python3
"""Render the CSVs from ``reproduce_figures.py`` (needs matplotlib)."""
import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def load(path):
    return np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dir", default="out/figures")
    args = p.parse_args()
    d = Path(args.dir)

    f1 = load(d / "fig1.csv")
    ratios = np.unique(f1["gamma0_over_Gamma"])
    times = np.unique(f1["Gamma_t"])
    surface = f1["fidelity"].reshape(len(ratios), len(times))
    fig, ax = plt.subplots()
    mesh = ax.pcolormesh(times, ratios, surface, shading="auto")
    fig.colorbar(mesh, label="F")
    ax.set(xlabel=r"$\Gamma t$", ylabel=r"$\gamma_0/\Gamma$")
    fig.savefig(d / "fig1.png", dpi=150)

    f2 = load(d / "fig2.csv")
    fig, ax = plt.subplots()
    for N in np.unique(f2["N"]):
        sel = f2["N"] == N
        ax.plot(f2["mu_t"][sel], f2["fidelity"][sel], label=f"N = {N:.0e}")
    ax.set(xlabel=r"$\mu t$", ylabel="F")
    ax.legend()
    fig.savefig(d / "fig2.png", dpi=150)

    f3 = load(d / "fig3.csv")
    controlled = np.char.lower(f3["controlled"].astype(str)) == "true"
    fig, ax = plt.subplots()
    for r in np.unique(f3["gamma0_over_Gamma"]):
        for flag, style in ((False, "--"), (True, "-")):
            sel = (f3["gamma0_over_Gamma"] == r) & (controlled == flag)
            label = f"{r:g}" + (" controlled" if flag else " free")
            ax.plot(f3["Gamma_t"][sel], f3["fidelity"][sel], style, label=label)
    ax.set(xlabel=r"$\Gamma t$", ylabel="F")
    ax.legend(title=r"$\gamma_0/\Gamma$")
    fig.savefig(d / "fig3.png", dpi=150)
    print(f"wrote PNGs to {d}")


if __name__ == "__main__":
    main()
