"""Command-line front end.

    centralspin run CONFIG [--seed N] [--out PATH]
    centralspin sweep CONFIG [--seed N] [--out DIR]
    centralspin oracle-compare CONFIG [--seed N] [--out DIR]
    centralspin fig1|fig2|fig3 --out DIR

Worker count for sweeps comes from ``CENTRALSPIN_WORKERS`` (default: all CPUs).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import figures
from .config import ConfigError, load_config, override, parse_config
from .control import TwoTimeKernel
from .kernels import Box, Exponential, GaussianBath
from .oracle import (
    BathRealization, OracleError, compare_reduced, evolve_amplitudes, sample_bath,
)
from .propagator import (
    PropagatorSeries, SolverError, analytic_box, analytic_exponential, solve_volterra,
    to_lab_frame,
)
from .tcl import coefficients, evolve_exact

SCENARIO_COLUMNS = (
    "t", "re_G", "im_G", "fidelity", "gamma", "S",
    "rho11", "rho00", "re_rho10", "im_rho10", "valid",
)
WORKERS_ENV = "CENTRALSPIN_WORKERS"


def _num(x):
    return repr(float(x) + 0.0)  # + 0.0 folds -0.0 into 0.0


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def solve_scenario(cfg):
    """Propagator series for a config (numerical or closed form)."""
    k = cfg.kernel
    if cfg.solver == "analytic":
        if cfg.control.mode != "off":
            raise ConfigError("analytic solver does not support control pulses")
        if isinstance(k, Exponential):
            return analytic_exponential(k.Gamma, k.gamma0, cfg.grid, h=cfg.h or 0.0)
        if isinstance(k, Box):
            return analytic_box(k.Omega, k.Acal, k.N, cfg.grid, h=cfg.h)
        raise ConfigError(f"no analytic solution for kernel type {k.kind!r}")
    return solve_volterra(TwoTimeKernel(k, cfg.control), cfg.grid, h=cfg.h)


def scenario_table(cfg, series, extra=None):
    """Rows of the scenario CSV; ``extra`` maps column name -> per-node values."""
    coeffs = coefficients(series)
    traj = evolve_exact(cfg.initial_state, series)
    G = to_lab_frame(series)
    F = np.abs(series.g_tilde)
    header = list(SCENARIO_COLUMNS) + list(extra or {})
    cols = [
        series.times, G.real, G.imag, F, coeffs.gamma, coeffs.S,
        traj.rho11, traj.rho00, traj.rho10.real, traj.rho10.imag,
    ]
    rows = []
    for k in range(len(series.times)):
        row = [_num(c[k]) for c in cols]
        row.append("1" if coeffs.valid_mask[k] else "0")
        row.extend(_num(v[k]) for v in (extra or {}).values())
        rows.append(row)
    return header, rows


def run_scenario(cfg, output=None):
    """Solve one scenario and write its CSV; returns the output path."""
    series = solve_scenario(cfg)
    path = Path(output or cfg.output)
    write_atomic(path, _csv_text(*scenario_table(cfg, series)))
    return path


def _run_text(args):
    text, output = args
    return str(run_scenario(parse_config(text), output))


def worker_count():
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        n = int(raw)
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV} must be >= 1")
        return n
    return os.cpu_count() or 1


def run_sweep(cfg, out_dir=None, workers=None):
    """Run one scenario per sweep value; returns the index file path."""
    if cfg.sweep is None:
        raise ConfigError("config has no [sweep] section")
    out_dir = Path(out_dir) if out_dir else Path(cfg.output).parent
    stem = Path(cfg.output).stem
    key = cfg.sweep.param.replace(".", "_")
    jobs, index_rows = [], []
    for i, value in enumerate(cfg.sweep.values):
        sub = override(cfg, cfg.sweep.param, value)
        name = f"{stem}_{key}_{i:03d}.csv"
        jobs.append((sub.to_ini(), str(out_dir / name)))
        index_rows.append([cfg.sweep.param, _num(value), name])
    workers = workers or worker_count()
    if workers == 1 or len(jobs) == 1:
        for job in jobs:
            _run_text(job)
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            list(pool.map(_run_text, jobs))
    index = out_dir / f"{stem}_sweep.csv"
    write_atomic(index, _csv_text(["param", "value", "file"], index_rows))
    return index


def bath_for(cfg):
    """Explicit bath realisation and central frequency matching the kernel."""
    k = cfg.kernel
    opts = dict(cfg.bath or {})
    w_mean = opts.get("w_mean", 0.0)
    if isinstance(k, Box):
        bath = BathRealization.box(k.Acal, k.N, w_mean)
        omega0 = opts.get("omega0", k.Omega + w_mean + 0.5 * k.Acal * (1 - 1 / k.N))
        return bath, omega0
    if isinstance(k, GaussianBath):
        # Omega_k ~ N(Acal/2, nu^2) reproduces the Gaussian envelope and carrier
        bath = sample_bath(
            k.N, opts.get("muA", k.Acal / k.N), opts.get("nuA", 0.0),
            w_mean, opts.get("w_spread", k.nu), seed=cfg.seed,
        )
        return bath, opts.get("omega0", k.Acal + w_mean)
    raise ConfigError("oracle-compare needs a box or gaussian kernel")


def oracle_compare(cfg, out_dir=None):
    """Run oracle and reduced solver on one grid; returns the report dict."""
    bath, omega0 = bath_for(cfg)
    reduced = solve_scenario(cfg)
    traj = evolve_amplitudes(bath, omega0, cfg.grid, cfg.control)
    oracle_series = PropagatorSeries(cfg.grid, traj.g_tilde, traj.dg_tilde, traj.h)
    report = compare_reduced(traj, reduced)
    report.update(N=int(bath.N), h_oracle=traj.h, h_reduced=reduced.h,
                  max_norm_drift=float(np.abs(traj.norm - 1).max()))

    out_dir = Path(out_dir) if out_dir else Path(cfg.output).parent
    stem = Path(cfg.output).stem
    write_atomic(out_dir / f"{stem}_reduced.csv", _csv_text(*scenario_table(cfg, reduced)))
    write_atomic(
        out_dir / f"{stem}_oracle.csv",
        _csv_text(*scenario_table(cfg, oracle_series, {"norm": traj.norm})),
    )
    write_atomic(out_dir / f"{stem}_report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


def write_fig1(out_dir):
    ratios, times, F = figures.fig1_surface()
    rows = [[_num(r), _num(t), _num(f)] for r, row in zip(ratios, F) for t, f in zip(times, row)]
    path = Path(out_dir) / "fig1.csv"
    write_atomic(path, _csv_text(["gamma0_over_Gamma", "Gamma_t", "fidelity"], rows))
    return path


def write_fig2(out_dir):
    sizes, times, F = figures.fig2_curves()
    rows = [[str(N), _num(t), _num(f)] for N, row in zip(sizes, F) for t, f in zip(times, row)]
    path = Path(out_dir) / "fig2.csv"
    write_atomic(path, _csv_text(["N", "mu_t", "fidelity"], rows))
    return path


def write_fig3(out_dir, seed=figures.FIG3_SEED):
    ratios, times, free, ctl = figures.fig3_curves(seed=seed)
    rows = []
    for r, f_row, c_row in zip(ratios, free, ctl):
        for flag, curve in (("false", f_row), ("true", c_row)):
            rows.extend([_num(r), flag, _num(t), _num(f)] for t, f in zip(times, curve))
    path = Path(out_dir) / "fig3.csv"
    write_atomic(path, _csv_text(["gamma0_over_Gamma", "controlled", "Gamma_t", "fidelity"], rows))
    return path


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _u64(text):
    val = int(text)
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return val


def build_parser():
    p = argparse.ArgumentParser(prog="centralspin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("run", "solve one scenario and write its CSV"),
        ("sweep", "run the [sweep] values of a scenario"),
        ("oracle-compare", "compare the finite-bath oracle with the reduced solver"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config")
        sp.add_argument("--seed", type=_u64, default=None)
        sp.add_argument("--out", default=None, help="output file (run) or directory")
    for name in ("fig1", "fig2", "fig3"):
        sp = sub.add_parser(name, help=f"write {name}.csv")
        sp.add_argument("--out", required=True, help="output directory")
        if name == "fig3":
            sp.add_argument("--seed", type=_u64, default=figures.FIG3_SEED)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            print(run_scenario(_load(args), args.out))
        elif args.command == "sweep":
            print(run_sweep(_load(args), args.out))
        elif args.command == "oracle-compare":
            report = oracle_compare(_load(args), args.out)
            print(json.dumps(report, sort_keys=True))
        elif args.command == "fig1":
            print(write_fig1(args.out))
        elif args.command == "fig2":
            print(write_fig2(args.out))
        elif args.command == "fig3":
            print(write_fig3(args.out, args.seed))
    except (ConfigError, SolverError, OracleError, OSError, ValueError) as exc:
        print(f"centralspin: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
