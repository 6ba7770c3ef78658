#!/usr/bin/env python3
"""Ensemble-averaged fidelity from sampled finite baths.

Realization ``i`` uses seed ``master + i``, so the result does not depend on
the worker count. Writes ``t,mean_fidelity,std_fidelity``.
"""
import argparse
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from centralspin.cli import _csv_text, _num, write_atomic
from centralspin.oracle import evolve_amplitudes, sample_bath
from centralspin.propagator import TimeGrid


def one_realization(index, args):
    bath = sample_bath(args.N, args.muA, args.nuA, args.w_mean, args.w_spread, seed=args.seed + index)
    grid = TimeGrid(args.t_max, args.n_steps)
    return np.abs(evolve_amplitudes(bath, args.omega0, grid).g_tilde)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--muA", type=float, default=0.1)
    p.add_argument("--nuA", type=float, default=0.05)
    p.add_argument("--w-mean", dest="w_mean", type=float, default=0.0)
    p.add_argument("--w-spread", dest="w_spread", type=float, default=0.0)
    p.add_argument("--omega0", type=float, default=5.0)
    p.add_argument("--t-max", dest="t_max", type=float, default=20.0)
    p.add_argument("--n-steps", dest="n_steps", type=int, default=20000)
    p.add_argument("--realizations", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", default="out/ensemble.csv")
    args = p.parse_args()

    job = partial(one_realization, args=args)
    indices = range(args.realizations)
    if args.workers == 1:
        curves = [job(i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            curves = list(pool.map(job, indices))
    F = np.array(curves)
    times = TimeGrid(args.t_max, args.n_steps).times
    rows = [[_num(t), _num(m), _num(s)] for t, m, s in zip(times, F.mean(axis=0), F.std(axis=0))]
    write_atomic(args.out, _csv_text(["t", "mean_fidelity", "std_fidelity"], rows))
    print(args.out)


if __name__ == "__main__":
    main()
