#!/usr/bin/env python3
"""Write fig1.csv, fig2.csv and fig3.csv into one directory and time each."""
import argparse
import time

from centralspin import cli


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="out/figures")
    p.add_argument("--seed", type=int, default=cli.figures.FIG3_SEED, help="fig3 pulse seed")
    args = p.parse_args()
    for name, write in (("fig1", cli.write_fig1), ("fig2", cli.write_fig2)):
        start = time.perf_counter()
        path = write(args.out)
        print(f"{name}: {path} ({time.perf_counter() - start:.1f}s)")
    start = time.perf_counter()
    path = cli.write_fig3(args.out, args.seed)
    print(f"fig3: {path} ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main()
