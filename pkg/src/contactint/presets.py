"""Desk-scale reference scenarios, written as data files.

Each ``preset_*`` function writes into ``outdir`` and returns a short text
summary.  Plotting is left to external tools.
"""

from __future__ import annotations

import itertools
import math
import os

import numpy as np

from .core import ContactState
from .diagnostics import (
    benchmark,
    energy_drift_slope,
    format_benchmark_table,
    format_stability_table,
    kepler_elements_series,
    precession_rate,
    sphere_distance,
    stability_scan,
)
from .integrators import integrate
from .models import PerturbedKepler, QuadraticActionOscillator
from .output import write_table, write_trajectory

__all__ = ["PRESETS", "run_preset", "FIG3_STARTS", "FIG4_START", "STIFFNESS_GRID"]

FIG1_T_END = 20000.0
FIG1_T_END_FULL = 200000.0
FIG4_START = ContactState([0.0], [-1.0], -7.0, 0.0)
STIFFNESS_GRID = tuple(round(0.05 * k, 2) for k in range(1, 13))
# on / outside / inside the H = 0 sphere of radius 6 (gamma = 1, C = 18)
FIG3_STARTS = {
    "on": ContactState([2 * math.sqrt(3)], [2 * math.sqrt(3)], 2 * math.sqrt(3)),
    "outside": ContactState([4.0], [4.0], 4.0),
    "inside": ContactState([2.0], [2.0], 2.0),
}


def _path(outdir, name, fmt):
    return os.path.join(outdir, f"{name}.{fmt}")


def _kepler_summary(traj, mu):
    r = np.hypot(traj.q[:, 0], traj.q[:, 1])
    E, L, ecc, _ = kepler_elements_series(traj.q, traj.p, mu)
    return {
        "method": traj.method.name,
        "status": traj.status.value,
        "t_last": float(traj.t[-1]),
        "r_min": float(r.min()),
        "r_max": float(r.max()),
        "energy_min": float(E.min()),
        "energy_max": float(E.max()),
        "energy_drift_slope": energy_drift_slope(traj, mu),
        "precession_rate": precession_rate(traj, mu),
        "max_eccentricity": float(ecc.max()),
    }


def _kepler_preset(name, outdir, fmt, alpha, tau, t_end, methods, sample_every):
    model = PerturbedKepler(mu=1.0, alpha=alpha, omega=math.pi)
    state0 = model.default_state()
    rows = []
    for m in methods:
        traj = integrate(model, m, state0, tau, t_end, sample_every=sample_every)
        write_trajectory(_path(outdir, f"{name}_{m}", fmt), traj, model, fmt)
        rows.append(_kepler_summary(traj, model.mu))
    columns = list(rows[0])
    write_table(_path(outdir, f"{name}_summary", fmt), columns, [[r[c] for c in columns] for r in rows], fmt)
    lines = [f"{name}: Kepler alpha={alpha:g}, omega=pi, tau={tau:g}, t_end={t_end:g}"]
    for r in rows:
        lines.append(
            f"  {r['method']:<8} {r['status']:<16} t_last={r['t_last']:<10g} "
            f"r in [{r['r_min']:.4f}, {r['r_max']:.4f}]  precession={r['precession_rate']:+.3e} rad/time"
        )
    return "\n".join(lines)


def preset_fig1(outdir, fmt="csv", full=False):
    t_end = FIG1_T_END_FULL if full else FIG1_T_END
    return _kepler_preset("fig1", outdir, fmt, 0.01, 0.1, t_end, ("chi2", "cvi2", "rk4"), 10)


def preset_fig2(outdir, fmt="csv", full=False):
    return _kepler_preset("fig2", outdir, fmt, 0.05, 0.3, 1000.0, ("chi2", "cvi2", "rk4", "chi6"), 1)


def preset_fig3(outdir, fmt="csv", full=False):
    model = QuadraticActionOscillator(1.0, 18.0)
    lines = ["fig3: quadratic oscillator gamma=1, C=18, tau=0.1, t_end=500"]
    for m, (label, state0) in itertools.product(("chi2", "cvi2"), FIG3_STARTS.items()):
        traj = integrate(model, m, state0, 0.1, 500.0)
        dist = sphere_distance(traj.coords(), model.gamma, model.C)
        write_trajectory(_path(outdir, f"fig3_{m}_{label}", fmt), traj, model, fmt, extra={"sphere_distance": dist})
        lines.append(
            f"  {m:<6} {label:<8} {traj.status.value:<10} final (q,p,s)={np.round(traj.final.coords(), 4)}"
            f"  max sphere distance {dist.max():.4f}"
        )
    return "\n".join(lines)


def preset_fig4(outdir, fmt="csv", full=False):
    model = QuadraticActionOscillator(1.0, 18.0)
    methods = ("chi2", "cvi2", "rk4")
    reports = stability_scan(model, methods, FIG4_START, STIFFNESS_GRID, 500.0, bound=100.0)
    rows = []
    for rep in reports.values():
        for tau, ok, status in zip(rep.tau_grid, rep.stable, rep.statuses):
            rows.append([rep.method, tau, int(ok), status])
    write_table(_path(outdir, "fig4_scan", fmt), ["method", "tau", "stable", "status"], rows, fmt)
    for m, tau in itertools.product(methods, STIFFNESS_GRID):
        traj = integrate(model, m, FIG4_START, tau, 500.0, bound=100.0)
        write_trajectory(_path(outdir, f"fig4_{m}_tau{tau:g}", fmt), traj, model, fmt)
    table = format_stability_table(reports)
    with open(os.path.join(outdir, "fig4_scan.txt"), "w", encoding="utf-8") as fh:
        fh.write(table + "\n")
    return "fig4: stability scan from (0, -1, -7), t_end=500, bound 100\n" + table


def preset_table1(outdir, fmt="csv", full=False, repeats=10):
    model = QuadraticActionOscillator(1.0, 18.0)
    rows = benchmark(model, ("chi2", "cvi2", "rk4", "midpoint"), 0.1, 500.0, repeats=repeats, state0=FIG4_START)
    title = f"Integration of the quadratic contact oscillator, tau=0.1, t in [0, 500], {repeats} runs"
    table = format_benchmark_table(rows, title)
    with open(os.path.join(outdir, "table1.txt"), "w", encoding="utf-8") as fh:
        fh.write(table + "\n")
    counter_keys = list(rows[0].counters)
    columns = ["method", "mean_time_s", "std_time_s", "steps", *(f"{k}_per_step" for k in counter_keys)]
    data = [[r.method, r.mean_time, r.std_time, r.steps, *(r.per_step()[k] for k in counter_keys)] for r in rows]
    write_table(_path(outdir, "table1", fmt), columns, data, fmt)
    return table


PRESETS = {
    "fig1": preset_fig1,
    "fig2": preset_fig2,
    "fig3": preset_fig3,
    "fig4": preset_fig4,
    "table1": preset_table1,
}


def run_preset(name, outdir, fmt="csv", full=False):
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    os.makedirs(outdir, exist_ok=True)
    return PRESETS[name](outdir, fmt, full)
