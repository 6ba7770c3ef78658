"""Scenario configuration files.

INI layout::

    [scenario]   output, seed, units, solver, h
    [kernel]     type = exponential | box | gaussian | tabulated | zero, plus parameters
    [control]    mode = off | constant | random, tau, kappa, psi
    [grid]       t_max, n_steps
    [initial]    rho11, rho10   (or state = excited | ground | plus)
    [sweep]      param = <section>.<key>, values = v1, v2, ...
    [bath]       omega0, w_mean, w_spread, muA, nuA   (oracle-compare only)

All numbers are dimensionless, in units of the rate named by ``units``;
times are in units of its inverse.
"""
from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .control import PulseSequence
from .kernels import Box, Exponential, GaussianBath, Tabulated
from .propagator import TimeGrid
from .tcl import QubitState

SOLVERS = ("volterra", "analytic")
_KERNEL_PARAMS = {
    "exponential": (Exponential, ("Gamma", "gamma0")),
    "box": (Box, ("Acal", "N", "Omega")),
    "gaussian": (GaussianBath, ("Acal", "N", "nu")),
}
_BATH_KEYS = ("omega0", "w_mean", "w_spread", "muA", "nuA")


class ConfigError(ValueError):
    pass


def _fmt(x):
    if isinstance(x, complex):
        return repr(x)
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def _float(section, key, default=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"[{section.name}] missing key {key!r}")
        return default
    try:
        val = float(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a number") from None
    if not math.isfinite(val):
        raise ConfigError(f"[{section.name}] {key} must be finite")
    return val


def _int(section, key, default=None):
    raw = section.get(key)
    if raw is not None:
        try:
            return int(raw.strip())  # exact, so 64-bit seeds survive
        except ValueError:
            pass
    val = _float(section, key, default)
    if val != int(val):
        raise ConfigError(f"[{section.name}] {key} must be an integer")
    return int(val)


def _complex(raw, where):
    try:
        return complex(raw.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"{where}: {raw!r} is not a complex number") from None


@dataclass(frozen=True)
class Sweep:
    param: str
    values: tuple

    def __post_init__(self):
        if "." not in self.param:
            raise ConfigError("sweep param must look like <section>.<key>")
        if not self.values:
            raise ConfigError("sweep values must be nonempty")
        if not all(math.isfinite(v) for v in self.values):
            raise ConfigError("sweep values must be finite")


@dataclass(frozen=True)
class ScenarioConfig:
    kernel: object
    grid: TimeGrid
    control: PulseSequence = field(default_factory=PulseSequence)
    rho11: float = 1.0
    rho10: complex = 0j
    output: str = "scenario.csv"
    seed: int = 0
    units: str = "Gamma"
    solver: str = "volterra"
    h: float | None = None
    sweep: Sweep | None = None
    bath: dict | None = None

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {SOLVERS}")

    @property
    def initial_state(self):
        try:
            return QubitState.from_populations(self.rho11, self.rho10)
        except ValueError as exc:
            raise ConfigError(f"[initial] {exc}") from None

    def with_seed(self, seed):
        control = self.control
        if control.mode != "off":
            control = replace(control, seed=int(seed))
        return replace(self, seed=int(seed), control=control)

    def to_ini(self):
        cp = to_parser(self)
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _parse_kernel(sec, grid):
    kind = sec.get("type")
    if kind is None:
        raise ConfigError("[kernel] missing key 'type'")
    kind = kind.strip().lower()
    if kind == "zero":
        return Tabulated.zeros(grid.t_max)
    if kind == "tabulated":
        if "file" in sec:
            data = np.loadtxt(sec["file"], delimiter=",", ndmin=2)
            values = data[:, 0] + 1j * (data[:, 1] if data.shape[1] > 1 else 0)
        elif "values" in sec:
            values = [_complex(v, "[kernel] values") for v in sec["values"].split(",") if v.strip()]
        else:
            raise ConfigError("[kernel] tabulated needs 'values' or 'file'")
        return Tabulated(_float(sec, "dt"), tuple(values))
    if kind not in _KERNEL_PARAMS:
        raise ConfigError(f"[kernel] unknown type {kind!r}")
    cls, names = _KERNEL_PARAMS[kind]
    args = [(_int if name == "N" else _float)(sec, name) for name in names]
    try:
        return cls(*args)
    except ValueError as exc:
        raise ConfigError(f"[kernel] {exc}") from None


def from_parser(cp):
    for name in ("kernel", "grid"):
        if not cp.has_section(name):
            raise ConfigError(f"missing section [{name}]")
    scen = cp["scenario"] if cp.has_section("scenario") else cp["DEFAULT"]
    try:
        grid = TimeGrid(_float(cp["grid"], "t_max"), _int(cp["grid"], "n_steps"))
    except ValueError as exc:
        raise ConfigError(f"[grid] {exc}") from None
    kernel = _parse_kernel(cp["kernel"], grid)
    seed = _int(scen, "seed", 0)
    if seed < 0 or seed >= 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")

    control = PulseSequence.off()
    if cp.has_section("control"):
        sec = cp["control"]
        mode = sec.get("mode", "off").strip().lower()
        if mode != "off":
            try:
                control = PulseSequence(
                    mode=mode, tau=_float(sec, "tau"), kappa=_float(sec, "kappa"),
                    Psi=_float(sec, "psi"), seed=seed,
                )
            except ValueError as exc:
                raise ConfigError(f"[control] {exc}") from None

    rho11, rho10 = 1.0, 0j
    if cp.has_section("initial"):
        sec = cp["initial"]
        state = sec.get("state")
        if state is not None:
            presets = {"excited": (1.0, 0j), "ground": (0.0, 0j), "plus": (0.5, 0.5 + 0j)}
            if state.strip() not in presets:
                raise ConfigError(f"[initial] unknown state {state!r}")
            rho11, rho10 = presets[state.strip()]
        else:
            rho11 = _float(sec, "rho11", 1.0)
            rho10 = _complex(sec.get("rho10", "0"), "[initial] rho10")

    sweep = None
    if cp.has_section("sweep"):
        sec = cp["sweep"]
        try:
            values = tuple(float(v) for v in sec.get("values", "").split(",") if v.strip())
        except ValueError:
            raise ConfigError("[sweep] values must be numbers") from None
        sweep = Sweep(sec.get("param", "").strip(), values)

    bath = None
    if cp.has_section("bath"):
        bath = {k: _float(cp["bath"], k) for k in _BATH_KEYS if k in cp["bath"]}

    h = _float(scen, "h") if "h" in scen else None
    cfg = ScenarioConfig(
        kernel=kernel, grid=grid, control=control, rho11=rho11, rho10=rho10,
        output=scen.get("output", "scenario.csv"), seed=seed,
        units=scen.get("units", "Gamma"), solver=scen.get("solver", "volterra").strip(),
        h=h, sweep=sweep, bath=bath,
    )
    cfg.initial_state  # validates
    return cfg


def to_parser(cfg):
    cp = configparser.ConfigParser()
    cp.optionxform = str
    scen = {"output": cfg.output, "seed": str(cfg.seed), "units": cfg.units, "solver": cfg.solver}
    if cfg.h is not None:
        scen["h"] = _fmt(cfg.h)
    cp["scenario"] = scen

    k = cfg.kernel
    if isinstance(k, Tabulated):
        cp["kernel"] = {
            "type": "tabulated", "dt": _fmt(k.dt),
            "values": ", ".join(_fmt(complex(v)) for v in k.values),
        }
    else:
        _, names = _KERNEL_PARAMS[k.kind]
        cp["kernel"] = {"type": k.kind, **{n: _fmt(getattr(k, n)) for n in names}}

    c = cfg.control
    if c.mode == "off":
        cp["control"] = {"mode": "off"}
    else:
        cp["control"] = {"mode": c.mode, "tau": _fmt(c.tau), "kappa": _fmt(c.kappa), "psi": _fmt(c.Psi)}
    cp["grid"] = {"t_max": _fmt(cfg.grid.t_max), "n_steps": str(cfg.grid.n_steps)}
    cp["initial"] = {"rho11": _fmt(cfg.rho11), "rho10": _fmt(complex(cfg.rho10))}
    if cfg.sweep is not None:
        cp["sweep"] = {"param": cfg.sweep.param, "values": ", ".join(_fmt(v) for v in cfg.sweep.values)}
    if cfg.bath:
        cp["bath"] = {key: _fmt(cfg.bath[key]) for key in _BATH_KEYS if key in cfg.bath}
    return cp


def parse_config(text):
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    return from_parser(cp)


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def override(cfg, param, value):
    """Copy of ``cfg`` with ``<section>.<key>`` set to ``value``."""
    cp = to_parser(cfg)
    section, _, key = param.partition(".")
    if not cp.has_section(section):
        cp.add_section(section)
    cp[section][key] = _fmt(value)
    if cp.has_section("sweep"):
        cp.remove_section("sweep")
    return from_parser(cp)
