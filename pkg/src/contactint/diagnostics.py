"""Quantitative checks of the structural claims made for contact integrators.

Convergence orders, Kepler orbital elements, distance to the invariant
sphere of the quadratic oscillator, fixed points of the discrete maps and
their stability, step-size stability scans, a finite-difference residual of
the generalised Euler-Lagrange equations, and timing/evaluation-count
benchmarks.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .core import ContactState, EvalCounters, map_jacobian
from .errors import InsufficientSamples, ModelSingularity, NoConvergence, ReferenceUnavailable
from .integrators import StepMethod, Status, Trajectory, _as_method, integrate

__all__ = [
    "EvalCounters",
    "OrbitalElements",
    "StabilityReport",
    "FixedPoint",
    "BenchmarkResult",
    "convergence_errors",
    "convergence_order",
    "kepler_elements",
    "kepler_elements_series",
    "energy_drift_slope",
    "precession_rate",
    "sphere_distance",
    "oscillator_fixed_points",
    "numerical_fixed_point",
    "stability_scan",
    "gel_residual",
    "benchmark",
    "format_benchmark_table",
    "format_stability_table",
]


# ---------------------------------------------------------------- convergence


def _final_error(traj: Trajectory, reference):
    final = traj.final
    if isinstance(reference, Trajectory):
        if abs(reference.t[-1] - final.t) > 1e-9 * max(1.0, abs(final.t)):
            raise ReferenceUnavailable(
                f"reference ends at t={reference.t[-1]:.6g}, run ends at t={final.t:.6g}"
            )
        return float(np.linalg.norm(final.coords() - reference.coords()[-1]))
    ref = reference(final.t)
    if isinstance(ref, ContactState):
        return float(np.linalg.norm(final.coords() - ref.coords()))
    q_ref, p_ref = ref
    diff = np.concatenate([final.q - np.atleast_1d(q_ref), final.p - np.atleast_1d(p_ref)])
    return float(np.linalg.norm(diff))


def _resolve_reference(model, state0, tau_list, reference):
    if reference is None:
        exact = getattr(model, "exact", None)
        if exact is None:
            raise ReferenceUnavailable(f"{model!r} has no analytic solution; pass a reference")
        q0, p0 = float(state0.q[0]), float(state0.p[0])
        return lambda t: exact(q0, p0, t - state0.t)
    if isinstance(reference, Trajectory):
        if not reference.completed:
            raise ReferenceUnavailable("reference trajectory did not complete")
        if reference.tau > min(tau_list) / 20 * (1 + 1e-12):
            raise ReferenceUnavailable(
                f"reference step {reference.tau:g} exceeds min(tau_list)/20 = {min(tau_list) / 20:g}"
            )
    return reference


def convergence_errors(model, method, state0, t_end, tau_list, reference=None):
    """Final-state errors for each step size in ``tau_list``.

    ``reference`` is a callable ``t -> (q, p)`` (compares positions and
    momenta) or ``t -> ContactState`` (compares ``q, p, s``), or a finely
    resolved :class:`Trajectory`.  ``None`` uses the model's ``exact``
    solution when it has one.
    """
    taus = np.asarray(tau_list, dtype=float)
    if taus.size < 3 or np.any(np.diff(taus) >= 0):
        raise ValueError("tau_list needs at least three strictly decreasing values")
    reference = _resolve_reference(model, state0, taus, reference)
    errors = []
    for tau in taus:
        traj = integrate(model, method, state0, tau, t_end, sample_every=10**9)
        if not traj.completed:
            raise ReferenceUnavailable(f"run with tau={tau:g} failed: {traj.status.value}")
        errors.append(_final_error(traj, reference))
    return taus, np.array(errors)


def convergence_order(model, method, state0, t_end, tau_list, reference=None) -> float:
    """Least-squares slope of ``log(error)`` against ``log(tau)``."""
    taus, errors = convergence_errors(model, method, state0, t_end, tau_list, reference)
    slope, _ = np.polyfit(np.log(taus), np.log(errors), 1)
    return float(slope)


# ---------------------------------------------------------------- Kepler


@dataclass(frozen=True)
class OrbitalElements:
    energy: float
    angular_momentum: float
    eccentricity: float
    perihelion_angle: float


def kepler_elements(state: ContactState, mu=1.0) -> OrbitalElements:
    """Two-body elements from position and momentum (planar, unit mass).

    The eccentricity vector is the Laplace-Runge-Lenz vector
    ``e = (p x L)/mu - q/|q|``.
    """
    E, L, ecc, angle = kepler_elements_series(state.q[None, :], state.p[None, :], mu)
    return OrbitalElements(float(E[0]), float(L[0]), float(ecc[0]), float(angle[0]))


def kepler_elements_series(q, p, mu=1.0):
    """Vectorised elements for ``(N, 2)`` arrays; returns ``(E, L, e, angle)``."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    r = np.hypot(q[:, 0], q[:, 1])
    if np.any(r <= 0):
        raise ModelSingularity("orbital elements undefined at |q| = 0")
    E = 0.5 * np.sum(p * p, axis=1) - mu / r
    L = q[:, 0] * p[:, 1] - q[:, 1] * p[:, 0]
    ex = p[:, 1] * L / mu - q[:, 0] / r
    ey = -p[:, 0] * L / mu - q[:, 1] / r
    return E, L, np.hypot(ex, ey), np.arctan2(ey, ex)


def energy_drift_slope(traj: Trajectory, mu=1.0) -> float:
    """Least-squares slope of the Kepler energy along ``traj`` (per time unit)."""
    E = kepler_elements_series(traj.q, traj.p, mu)[0]
    return float(np.polyfit(traj.t - traj.t[0], E, 1)[0])


def precession_rate(traj: Trajectory, mu=1.0) -> float:
    """Slope of the unwrapped perihelion angle (radians per time unit).

    Meaningless for (numerically) circular orbits, where the angle is noise.
    """
    angle = np.unwrap(kepler_elements_series(traj.q, traj.p, mu)[3])
    return float(np.polyfit(traj.t - traj.t[0], angle, 1)[0])


# ---------------------------------------------------------------- oscillator


def sphere_distance(state, gamma=1.0, C=18.0):
    """``| sqrt(q^2 + p^2 + gamma s^2) - sqrt(2C) |``.

    Accepts a :class:`ContactState` or an array of ``(q, p, s)`` rows.
    """
    if isinstance(state, ContactState):
        x = state.coords()
    else:
        x = np.asarray(state, dtype=float)
    sq = np.sum(x[..., :-1] ** 2, axis=-1) + gamma * x[..., -1] ** 2
    return np.abs(np.sqrt(sq) - math.sqrt(2.0 * C))


def oscillator_fixed_points(gamma, C, tau=0.0):
    """Poles of the quadratic oscillator and their step-size-shifted images.

    Returns ``((s_N, s_S), (s_N_tau, s_S_tau))`` with
    ``s_N = sqrt(2C/gamma)`` and ``s_N_tau = sqrt(8C/gamma + tau^2 C^2) / 2``.
    """
    s0 = math.sqrt(2.0 * C / gamma)
    s1 = 0.5 * math.sqrt(8.0 * C / gamma + tau**2 * C**2)
    return (s0, -s0), (s1, -s1)


@dataclass
class FixedPoint:
    state: np.ndarray
    eigenvalue_moduli: np.ndarray
    iterations: int

    @property
    def stable(self) -> bool:
        return bool(np.all(self.eigenvalue_moduli <= 1.0 + 1e-9))


def numerical_fixed_point(model, method, tau, guess, t=0.0, fd_step=1e-7, tol=1e-12, maxiter=50) -> FixedPoint:
    """Newton iteration on ``Phi(x) - x = 0`` for the one-step map in ``(q, p, s)``.

    The Jacobian is formed by central differences; the eigenvalue moduli of
    the map's Jacobian at the root decide stability.
    """
    method = _as_method(method)
    x = np.asarray(guess.coords() if isinstance(guess, ContactState) else guess, dtype=float)

    def phi(y):
        return method.step(model, ContactState.from_coords(y, t), tau).coords()

    for it in range(1, maxiter + 1):
        J = map_jacobian(phi, x, fd_step)
        r = phi(x) - x
        dx = np.linalg.solve(J - np.eye(x.size), -r)
        x = x + dx
        if np.linalg.norm(dx) <= tol * max(1.0, np.linalg.norm(x)):
            J = map_jacobian(phi, x, fd_step)
            return FixedPoint(x, np.sort(np.abs(np.linalg.eigvals(J))), it)
    raise NoConvergence(f"fixed-point Newton iteration did not converge in {maxiter} steps")


# ---------------------------------------------------------------- stability


@dataclass
class StabilityReport:
    """Outcome of a step-size scan for one method.

    ``max_stable_tau`` is the largest grid value whose run completed inside
    the bound (``None`` if there is none).  ``threshold_tau`` is the largest
    value below which *every* grid value was stable, a stricter reading.
    """

    method: str
    tau_grid: list
    stable: list
    statuses: list
    max_stable_tau: float | None
    threshold_tau: float | None
    final_states: list = field(default_factory=list)


def stability_scan(model, methods, state0, tau_grid, t_end, bound=100.0) -> dict:
    """Run every method at every step size; classify completed-and-bounded runs.

    With ``bound=math.inf`` only non-finite states and model/sub-flow errors
    count as failures.
    """
    if not bound > 0:
        raise ValueError("bound must be positive")
    grid = sorted(float(x) for x in tau_grid)
    reports = {}
    for m in methods:
        method = _as_method(m)
        stable, statuses, finals = [], [], []
        for tau in grid:
            traj = integrate(model, method, state0, tau, t_end, sample_every=10**9, bound=bound)
            stable.append(traj.completed)
            statuses.append(traj.status.value)
            finals.append(traj.final.coords())
        ok = [tau for tau, good in zip(grid, stable) if good]
        threshold = None
        for tau, good in zip(grid, stable):
            if not good:
                break
            threshold = tau
        reports[method.name] = StabilityReport(
            method.name, grid, stable, statuses, max(ok) if ok else None, threshold, finals
        )
    return reports


def format_stability_table(reports: dict) -> str:
    lines = [f"{'method':<10}{'max_stable_tau':>16}{'threshold_tau':>16}  unstable"]
    for rep in reports.values():
        bad = ",".join(f"{t:g}" for t, ok in zip(rep.tau_grid, rep.stable) if not ok) or "-"
        mst = "none" if rep.max_stable_tau is None else f"{rep.max_stable_tau:g}"
        thr = "none" if rep.threshold_tau is None else f"{rep.threshold_tau:g}"
        lines.append(f"{rep.method:<10}{mst:>16}{thr:>16}  {bad}")
    return "\n".join(lines)


# ---------------------------------------------------------------- Herglotz residual


def gel_residual(trajectory: Trajectory, model) -> float:
    """Max-norm residual of the generalised Euler-Lagrange equations.

    With ``L = |q'|^2/2 - V - f(s)`` the equations read
    ``-grad V - q'' - df/ds q' = 0``; velocities and accelerations come from
    central differences of the sampled positions.
    """
    t = np.asarray(trajectory.t)
    if t.size < 3:
        raise InsufficientSamples(f"need at least 3 samples, got {t.size}")
    dt = np.diff(t)
    h = dt[0]
    if not np.allclose(dt, h, rtol=1e-8, atol=0):
        raise ValueError("gel_residual needs uniformly spaced samples")
    q = trajectory.q
    qdot = (q[2:] - q[:-2]) / (2 * h)
    qddot = (q[2:] - 2 * q[1:-1] + q[:-2]) / h**2
    worst = 0.0
    for k in range(1, t.size - 1):
        tk, sk, qk = t[k], trajectory.s[k], q[k]
        res = -model.grad_V(qk, tk) - qddot[k - 1] - model.df_ds(sk, tk) * qdot[k - 1]
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


# ---------------------------------------------------------------- benchmark


@dataclass
class BenchmarkResult:
    method: str
    mean_time: float
    std_time: float
    steps: int
    counters: dict
    status: str

    def per_step(self) -> dict:
        return {k: v / self.steps for k, v in self.counters.items()} if self.steps else {}


_TABLE_LABELS = {
    "chi": "CHI ({order})",
    "cvi": "CVI ({order})",
    "rk4": "Runge-Kutta ({order})",
    "midpoint": "Midpoint ({order})",
}


def _ordinal(n):
    return f"{n}{'nd' if n == 2 else 'th'}"


def benchmark(model, methods, tau, t_end, repeats=10, state0=None) -> list:
    """Time ``repeats`` runs per method (serially, monotonic clock).

    Timings are hardware dependent; the evaluation counters are exact.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    state0 = model.default_state() if state0 is None else state0
    rows = []
    for m in methods:
        method = _as_method(m)
        times = []
        traj = None
        for _ in range(repeats):
            start = time.perf_counter()
            traj = integrate(model, method, state0, tau, t_end, sample_every=1)
            times.append(time.perf_counter() - start)
        std = statistics.stdev(times) if repeats > 1 else 0.0
        rows.append(
            BenchmarkResult(method.name, statistics.fmean(times), std, traj.steps, traj.counters.as_dict(), traj.status.value)
        )
    return rows


def format_benchmark_table(rows, title=None) -> str:
    """Plain-text table: integrator type (order), mean time, standard deviation."""
    lines = []
    if title:
        lines.append(title)
    header = f"{'Integrator type (order)':<26}{'Mean time (s)':>16}{'Standard deviation':>22}"
    lines.append(header)
    lines.append("-" * len(header))
    for row in rows:
        method = StepMethod.parse(row.method)
        label = _TABLE_LABELS[method.kind].format(order=_ordinal(method.order))
        lines.append(f"{label:<26}{row.mean_time:>16.4f}{'+- ' + format(row.std_time, '.4f'):>22}")
    return "\n".join(lines)
