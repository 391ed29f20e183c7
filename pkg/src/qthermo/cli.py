"""``qthermo``: named numerical experiments emitting CSV or JSON.

Usage::

    qthermo list
    qthermo describe <experiment>
    qthermo <experiment> [--param key=value ...] [--out path] [--format csv|json]
                         [--mesh N] [--jobs K]

Exit codes: 0 success, 1 invalid configuration, 2 numerical tolerance failure.
``QTHERMO_JOBS`` in the environment overrides ``--jobs``.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__
from .errors import AccuracyError, QThermoError

UNITS_NOTE = "time in 1/Gamma; energies in units of the cold gap unless overridden"


class ConfigError(Exception):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


PARSERS = {"float": float, "int": int, "str": str, "floats": _floats, "ints": _ints}


@dataclass(frozen=True)
class Param:
    kind: str
    default: object
    help: str


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    reproduces: str
    params: dict
    columns: tuple[str, ...]
    run: Callable
    default_mesh: int | None = None


# --------------------------------------------------------------------------
# experiment bodies: run(params, mesh, pmap) -> list of row tuples
# --------------------------------------------------------------------------

def _quasi_otto(p, mesh, pmap):
    from .carnot import quasi_otto_constants
    from .protocols import logit

    xi, q = quasi_otto_constants()
    return [(xi, q, float(logit(q)))]


def _rescaling(p, mesh, pmap):
    from .carnot import optimal_rescaling, rescaled_efficiency, rescaled_power

    args = (p["alpha_C"], p["alpha_H"], p["tau_C"], p["tau_H"], 1 / p["T_C"], 1 / p["T_H"])
    lc, lh = optimal_rescaling(*args)
    power = rescaled_power(lc, lh, *args)
    eta = rescaled_efficiency(lc, lh, p["alpha_C"], p["alpha_H"], 1 / p["T_C"], 1 / p["T_H"])
    return [(lc, lh, power, eta, 1 - math.sqrt(p["T_C"] / p["T_H"]))]


def _shape(p, mesh, pmap):
    from .carnot import optimal_shape, shape_functional
    from .protocols import smoothstep

    opt = optimal_shape(p["q0"], p["q1"])
    ref = shape_functional(smoothstep(p["q0"], p["q1"], mesh=mesh), form="first")
    table = pmap(lambda k: opt.smoothing_table([k], p["gamma"], p["tau"])[0], p["k"])
    return [(k, F, opt.F_min, ref, int(flag)) for k, F, flag in table]


def _carnot_nm(p, mesh, pmap):
    from .nonmarkov import carnot_power_sweep, carnot_regime

    ys = np.linspace(p["y_min"], p["y_max"], mesh)
    rows = pmap(lambda c: carnot_power_sweep([c], ys), sorted(p["c"]))
    return [(c, y, r, carnot_regime(c)) for block in rows for c, y, r in block]


def _otto_exact(p, mesh, pmap):
    from .nonmarkov import otto_limit_cycle, otto_power_nonmarkov
    from .otto import OttoSpec, exponential_profile, exact_power, itt_power

    taus = np.geomspace(p["tau_min"], p["tau_max"], mesh)

    def row(tau):
        if p["y"] == 0:
            f = exponential_profile(p["Gamma"])
            spec = OttoSpec(p["eps1"], p["eps2"], 1 / p["T_C"], 1 / p["T_H"], tau, tau, f, f)
            P = exact_power(spec)
        else:
            spec = OttoSpec(p["eps1"], p["eps2"], 1 / p["T_C"], 1 / p["T_H"], tau, tau)
            P = otto_power_nonmarkov(p["eps1"], p["eps2"], p["T_C"], p["T_H"], p["y"], tau,
                                     Gamma=p["Gamma"])
        sim = float("nan")
        if p["simulate"]:
            sim, _ = otto_limit_cycle(p["eps1"], p["eps2"], p["T_C"], p["T_H"], p["y"], tau, tau,
                                      Gamma=p["Gamma"], n_cycles=p["cycles"])
            if abs(sim - P) > 1e-6:
                raise AccuracyError(f"limit cycle {sim!r} disagrees with closed form {P!r} at tau={tau!r}")
        return (float(tau), P, sim, itt_power(spec))

    return pmap(row, taus)


def _otto_nm(p, mesh, pmap):
    from .nonmarkov import markov_otto_reference, otto_max

    ref = markov_otto_reference(p["eps1"], p["eps2"], p["T_C"], p["T_H"], p["Gamma"])

    def row(y):
        opt = otto_max(p["eps1"], p["eps2"], p["T_C"], p["T_H"], y, p["Gamma"])
        return (y, opt.tau_star, opt.power, opt.power / ref)

    return pmap(row, sorted(p["y"]))


def _blp(p, mesh, pmap):
    from .infoflow import blp_measure
    from .nonmarkov import AncillaBathSpec

    def row(y):
        spec = AncillaBathSpec(p["T"], p["Gamma"], p["Gamma"], y * p["Gamma"], p["E"])
        return (y, blp_measure(spec, p["p1"], p["p2"], mesh=mesh))

    return pmap(row, sorted(p["y"]))


def _free_energy(p, mesh, pmap):
    from .infoflow import free_energy_trace
    from .nonmarkov import AncillaBathSpec

    spec = AncillaBathSpec(p["T"], p["Gamma"], p["Gamma"], p["y"] * p["Gamma"], p["eps"])
    rho0 = np.diag([p["rho00"], 1 - p["rho00"]])
    tr = free_energy_trace(spec, rho0, p["t_max"], mesh)
    if tr.decomposition_residual() > 1e-9:
        raise AccuracyError(f"decomposition residual {tr.decomposition_residual():.3e}")
    return [tuple(float(v) for v in r) for r in zip(tr.times, tr.F_total, tr.F_S, tr.F_A, tr.MI)]


def _bath(p):
    from .dissipators import BathSpec

    return BathSpec(p["T"], p["Gamma"], p["kind"])


def _sd_accuracy(p, mesh, pmap):
    from .protocols import smoothstep
    from .slow_driving import sd_residual

    bath = _bath(p)
    proto = smoothstep(p["q0"], p["q1"])
    res = pmap(lambda tau: sd_residual(proto.with_duration(tau), bath, n_out=mesh), p["tau"])
    rows = []
    for i, (tau, r) in enumerate(zip(p["tau"], res)):
        ratio = res[i - 1] / r if i else float("nan")
        rows.append((float(tau), r, ratio))
    return rows


def _dissipation(p, mesh, pmap):
    from .carnot import first_order_heat, amplitude_for_bath
    from .protocols import smoothstep
    from .slow_driving import dissipation_report

    bath = _bath(p)
    proto = smoothstep(p["q0"], p["q1"])

    def row(tau):
        pr = proto.with_duration(tau)
        rep = dissipation_report(pr, bath, n=mesh)
        q1 = first_order_heat(amplitude_for_bath(bath), bath.beta, pr)
        return (float(tau), rep.deltaS_irr, rep.sigma, q1, -bath.beta * q1)

    return pmap(row, p["tau"])


_THERMO = {
    "T_C": Param("float", 1.0, "cold bath temperature"),
    "T_H": Param("float", 4.0, "hot bath temperature"),
    "eps1": Param("float", 1.0, "cold isochore gap"),
    "eps2": Param("float", 2.0, "hot isochore gap"),
    "Gamma": Param("float", 1.0, "reset rate of system and ancilla"),
}
_BATH = {
    "q0": Param("float", 0.9, "initial ground population"),
    "q1": Param("float", 0.7, "final ground population"),
    "T": Param("float", 1.0, "bath temperature"),
    "Gamma": Param("float", 1.0, "bath rate"),
    "kind": Param("str", "reset", "bath kind: reset, fermionic or bosonic"),
}

EXPERIMENTS: dict[str, Experiment] = {e.name: e for e in [
    Experiment(
        "carnot-quasi-otto",
        "Maximum of ln(q/(1-q))^2 q(1-q)/4: the power constant of the quasi-Otto Carnot cycle.",
        "the quasi-Otto constants xi ~ 0.11 at q* ~ 0.92 (gap over temperature ~ 2.4)",
        {}, ("xi", "q_star", "gap_over_T"), _quasi_otto),
    Experiment(
        "carnot-rescaling",
        "Closed-form optimal stroke stretch factors and the resulting power and efficiency.",
        "the optimal speed rescaling and the Curzon-Ahlborn efficiency for symmetric strokes",
        {"alpha_C": Param("float", 0.05, "cold first-order heat ratio (> 0)"),
         "alpha_H": Param("float", -0.05, "hot first-order heat ratio (< 0)"),
         "tau_C": Param("float", 1.0, "cold stroke duration"),
         "tau_H": Param("float", 1.0, "hot stroke duration"),
         "T_C": Param("float", 1.0, "cold temperature"),
         "T_H": Param("float", 4.0, "hot temperature")},
        ("lambda_C", "lambda_H", "power[Q0_H/time]", "efficiency", "eta_curzon_ahlborn"), _rescaling),
    Experiment(
        "carnot-shape",
        "Shape functional of the smoothed optimal cosine protocols against its infimum.",
        "convergence of the smoothed optimal protocol family to the minimal shape functional",
        {"q0": Param("float", 0.9, "initial ground population"),
         "q1": Param("float", 0.7, "final ground population"),
         "k": Param("ints", (10, 20, 40, 80, 160), "smoothing parameters"),
         "gamma": Param("float", 1.0, "bath rate used for the breakdown flag"),
         "tau": Param("float", 100.0, "stroke duration used for the breakdown flag")},
        ("k", "F_k", "F_min", "F_smoothstep", "sd_breakdown_flag"), _shape, 2000),
    Experiment(
        "carnot-nm-sweep",
        "Maximum Carnot power with an ancilla bath, normalized to the Markovian value, over c and y.",
        "maximum Carnot power versus ancilla coupling y for several ancilla rate ratios c",
        {"c": Param("floats", (0.3, 1.0, 3.0), "ancilla to system rate ratios"),
         "y_min": Param("float", 0.0, "smallest coupling gamma/Gamma"),
         "y_max": Param("float", 10.0, "largest coupling gamma/Gamma")},
        ("c", "y", "power_ratio", "regime"), _carnot_nm, 201),
    Experiment(
        "otto-exact",
        "Exact Otto power for equal isochore durations, optionally checked by joint-state limit cycles.",
        "the exact finite-time Otto power and its limit-cycle simulation",
        {**{k: v for k, v in _THERMO.items()},
         "y": Param("float", 0.0, "ancilla coupling gamma/Gamma (0 = exponential relaxation)"),
         "tau_min": Param("float", 0.05, "shortest isochore duration"),
         "tau_max": Param("float", 20.0, "longest isochore duration"),
         "simulate": Param("int", 0, "1 to run the limit-cycle simulation per point"),
         "cycles": Param("int", 200, "cycles in the simulation")},
        ("tau[1/Gamma]", "power[eps*Gamma]", "power_simulated[eps*Gamma]", "power_itt[eps*Gamma]"),
        _otto_exact, 41),
    Experiment(
        "otto-nm-sweep",
        "Maximum Otto power over the isochore duration versus ancilla coupling, normalized to the Markovian supremum.",
        "the growth of the maximum Otto power with the ancilla coupling",
        {**{k: v for k, v in _THERMO.items()},
         "y": Param("floats", (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0), "couplings gamma/Gamma")},
        ("y", "tau_star[1/Gamma]", "power_max[eps*Gamma]", "power_ratio"), _otto_nm),
    Experiment(
        "blp-sweep",
        "Distinguishability backflow of the system versus ancilla coupling.",
        "the backflow measure versus coupling and its zero region below a threshold",
        {"y": Param("floats", (0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0), "couplings gamma/Gamma"),
         "p1": Param("float", 1.0, "ground population of the first initial state"),
         "p2": Param("float", 0.0, "ground population of the second initial state"),
         "T": Param("float", 1.0, "bath temperature"),
         "E": Param("float", 1.0, "gap (resonant)"),
         "Gamma": Param("float", 1.0, "reset rate")},
        ("y", "N_blp"), _blp, 10_000),
    Experiment(
        "free-energy-trace",
        "Excess free energy of system plus ancilla split into system, ancilla and correlation parts.",
        "the flow of free energy from the system into the ancilla and the correlations",
        {"T": Param("float", 2.5, "bath temperature"),
         "eps": Param("float", 1.0, "system and ancilla gap"),
         "rho00": Param("float", 0.7, "initial system ground population"),
         "y": Param("float", 2.0, "coupling gamma/Gamma"),
         "Gamma": Param("float", 1.0, "reset rate"),
         "t_max": Param("float", 10.0, "final time")},
        ("time[1/Gamma]", "F_total[eps]", "F_S[eps]", "F_A[eps]", "MI[eps]"), _free_energy, 10_000),
    Experiment(
        "sd-accuracy",
        "Gap between the exact driven state and the first-order slow-driving state versus duration.",
        "the second-order accuracy of the slow-driving expansion",
        {**_BATH, "tau": Param("floats", (20.0, 40.0, 80.0, 160.0), "stroke durations")},
        ("tau[1/Gamma]", "residual", "ratio_to_previous"), _sd_accuracy, 401),
    Experiment(
        "dissipation-scaling",
        "Irreversible entropy of an isothermal stroke and its 1/tau law.",
        "the low-dissipation scaling of the irreversible entropy",
        {**_BATH, "tau": Param("floats", (20.0, 40.0, 80.0), "stroke durations")},
        ("tau[1/Gamma]", "deltaS_irr", "sigma[1/Gamma]", "Q1[T]", "minus_beta_Q1"), _dissipation, 400),
]}


# --------------------------------------------------------------------------
# plumbing
# --------------------------------------------------------------------------

def parse_params(exp: Experiment, pairs) -> dict:
    values = {k: v.default for k, v in exp.params.items()}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"parameter {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in exp.params:
            raise ConfigError(f"unknown parameter {key!r} for {exp.name}; known: {sorted(exp.params)}")
        try:
            values[key] = PARSERS[exp.params[key].kind](raw.strip())
        except ValueError as err:
            raise ConfigError(f"bad value for {key}: {err}") from None
    return values


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(exp: Experiment, rows, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# {exp.name}: {UNITS_NOTE}\n")
        buf.write(",".join(exp.columns) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        return buf.getvalue()
    records = [{c: (float(v) if isinstance(v, (float, np.floating)) else v) for c, v in zip(exp.columns, r)}
               for r in rows]
    clean = json.loads(json.dumps(records, default=lambda o: o.item() if hasattr(o, "item") else str(o)))
    return json.dumps({"experiment": exp.name, "units": UNITS_NOTE, "columns": list(exp.columns),
                       "rows": clean}, indent=2, sort_keys=True) + "\n"


def describe(exp: Experiment) -> str:
    lines = [f"{exp.name}: {exp.summary}", f"  reproduces: {exp.reproduces}",
             f"  columns: {', '.join(exp.columns)}"]
    if exp.default_mesh:
        lines.append(f"  --mesh default: {exp.default_mesh}")
    if exp.params:
        lines.append("  parameters:")
        for k, p in exp.params.items():
            default = ",".join(_fmt(v) for v in p.default) if isinstance(p.default, tuple) else _fmt(p.default)
            lines.append(f"    {k} ({p.kind}, default {default}): {p.help}")
    return "\n".join(lines)


def _jobs(cli_jobs: int | None) -> int:
    env = os.environ.get("QTHERMO_JOBS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"QTHERMO_JOBS must be an integer, got {env!r}") from None
    else:
        n = cli_jobs or 1
    if n < 1:
        raise ConfigError("jobs must be >= 1")
    return n


def run(name: str, params=None, out: str | None = None, fmt: str = "csv", mesh: int | None = None,
        jobs: int | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    exp = EXPERIMENTS.get(name)
    if exp is None:
        raise ConfigError(f"unknown experiment {name!r}; try 'qthermo list'")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    values = parse_params(exp, params)
    mesh = exp.default_mesh if mesh is None else mesh
    if mesh is not None and mesh < 2:
        raise ConfigError("mesh must be >= 2")
    n_jobs = _jobs(jobs)
    start = time.perf_counter()
    if n_jobs == 1:
        rows = exp.run(values, mesh, lambda f, xs: [f(x) for x in xs])
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rows = exp.run(values, mesh, lambda f, xs: list(pool.map(f, xs)))
    text = render(exp, rows, fmt)
    wall = time.perf_counter() - start
    if out is None:
        stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        meta = {"experiment": name, "params": {k: list(v) if isinstance(v, tuple) else v
                                               for k, v in values.items()},
                "mesh": mesh, "format": fmt, "jobs": n_jobs, "version": __version__,
                "wall_time_s": wall}
        with open(out + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qthermo", description="Finite-time quantum heat engine experiments.")
    ap.add_argument("command", help="experiment name, 'list' or 'describe'")
    ap.add_argument("target", nargs="?", help="experiment to describe")
    ap.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("--out")
    ap.add_argument("--format", default="csv", choices=("csv", "json"))
    ap.add_argument("--mesh", type=int)
    ap.add_argument("--jobs", type=int)
    ap.add_argument("--version", action="version", version=f"qthermo {__version__}")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as err:
        return 0 if err.code == 0 else 1
    try:
        if args.command == "list":
            for name, exp in EXPERIMENTS.items():
                print(f"{name}\t{exp.summary}")
            return 0
        if args.command == "describe":
            if args.target not in EXPERIMENTS:
                raise ConfigError(f"unknown experiment {args.target!r}")
            print(describe(EXPERIMENTS[args.target]))
            return 0
        if args.target is not None:
            raise ConfigError(f"unexpected argument {args.target!r}")
        return run(args.command, args.param, args.out, args.format, args.mesh, args.jobs)
    except ConfigError as err:
        print(f"qthermo: error: {err}", file=sys.stderr)
        return 1
    except AccuracyError as err:
        print(f"qthermo: numerical tolerance failure: {err}", file=sys.stderr)
        return 2
    except (QThermoError, ValueError) as err:
        print(f"qthermo: invalid configuration: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
