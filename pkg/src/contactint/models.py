"""Separable contact Hamiltonians ``H = |p|^2/2 + V(q, t) + f(s, t)``.

Every model supplies the potential piece ``V`` with its gradient, the action
piece ``f`` with ``df/ds``, and the exact frozen-time flow of ``H_A = f``
in closed form (:meth:`SeparableContactModel.action_flow`).  The kinetic
piece is fixed by the framework.
"""

from __future__ import annotations

import math

import numpy as np

from .core import ContactState, EvalCounters
from .errors import DegenerateDenominator, ModelSingularity, NoConvergence, SubflowBlowup, UnsupportedRegime

__all__ = [
    "SeparableContactModel",
    "PerturbedKepler",
    "QuadraticActionOscillator",
    "LinearDampedOscillator",
    "CountingModel",
    "kepler_a_map",
    "quadratic_a_map",
    "damped_oscillator_exact",
    "make_model",
    "MODEL_PARAMS",
]

_FD_TIME_STEP = 1e-6


class SeparableContactModel:
    """Base class for contact Hamiltonians of the separable form.

    Subclasses implement ``V``, ``grad_V``, ``f``, ``df_ds`` and
    ``action_flow``.  ``dV_dt``/``df_dt`` fall back to central differences
    in time; ``solve_implicit_action`` falls back to Newton's method.
    """

    dim = 1
    autonomous = True
    name = "model"

    def V(self, q, t=0.0) -> float:
        raise NotImplementedError

    def grad_V(self, q, t=0.0) -> np.ndarray:
        raise NotImplementedError

    def f(self, s, t=0.0) -> float:
        raise NotImplementedError

    def df_ds(self, s, t=0.0) -> float:
        raise NotImplementedError

    def action_flow(self, p, s, t, tau):
        """Exact flow of ``H_A = f(s, t)`` at frozen ``t``: returns ``(p', s')``."""
        raise NotImplementedError

    def dV_dt(self, q, t=0.0) -> float:
        h = _FD_TIME_STEP
        return (self.V(q, t + h) - self.V(q, t - h)) / (2 * h)

    def df_dt(self, s, t=0.0) -> float:
        h = _FD_TIME_STEP
        return (self.f(s, t + h) - self.f(s, t - h)) / (2 * h)

    def a_map(self, state: ContactState, tau) -> ContactState:
        p, s = self.action_flow(state.p, state.s, state.t, tau)
        return ContactState(state.q, p, s, state.t)

    def solve_implicit_action(self, rhs, t, h, guess=None, tol=1e-15, maxiter=50):
        """Solve ``s + h * f(s, t) = rhs`` for ``s``.

        Used by the variational integrator.  Raises
        :class:`DegenerateDenominator` where ``1 + h df/ds`` vanishes.
        """
        s = rhs if guess is None else guess
        for _ in range(maxiter):
            slope = 1.0 + h * self.df_ds(s, t)
            if abs(slope) < 1e-12:
                raise DegenerateDenominator("1 + h df/ds vanished while solving for the action")
            delta = (s + h * self.f(s, t) - rhs) / slope
            s -= delta
            if abs(delta) <= tol * max(1.0, abs(s)):
                return s
        raise NoConvergence("implicit action update did not converge")

    def default_state(self) -> ContactState:
        return ContactState(np.ones(self.dim), np.zeros(self.dim), 0.0, 0.0)

    def random_state(self, rng) -> ContactState:
        """A random state inside the model's admissible region."""
        return ContactState(
            rng.uniform(-2, 2, self.dim), rng.uniform(-2, 2, self.dim), rng.uniform(-2, 2), rng.uniform(0, 2)
        )

    def params(self) -> dict:
        return {}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


def kepler_a_map(state: ContactState, tau, alpha, omega) -> ContactState:
    """Frozen-time action flow for ``f = alpha sin(omega t) s``.

    Both ``s`` and ``p`` decay by ``exp(-c tau)`` with ``c = alpha sin(omega t)``.
    This is also the ``s -> 0`` limit of the ratio rule ``p' = p f(s')/f(s)``.
    """
    decay = math.exp(-alpha * math.sin(omega * state.t) * tau)
    return ContactState(state.q, state.p * decay, state.s * decay, state.t)


def quadratic_a_map(state: ContactState, tau, gamma) -> ContactState:
    """Frozen-time action flow for ``f = gamma s^2 / 2``."""
    p, s = _quadratic_flow(state.p, state.s, tau, gamma)
    return ContactState(state.q, p, s, state.t)


def _quadratic_flow(p, s, tau, gamma):
    d = 1.0 + 0.5 * gamma * tau * s
    if d <= 0.0:
        blowup = 2.0 / (gamma * abs(s))
        raise SubflowBlowup(
            f"action sub-flow from s={s:.6g} blows up after {blowup:.6g} (step {tau:.6g})",
            blowup_time=blowup,
        )
    return p / (d * d), s / d


class PerturbedKepler(SeparableContactModel):
    """Kepler problem with periodic linear-in-``s`` forcing.

    ``V(q) = -mu/|q|`` and ``f(s, t) = alpha sin(omega t) s``; the induced
    Newton equation is ``q'' + grad V + alpha sin(omega t) q' = 0``.
    """

    dim = 2
    autonomous = False
    name = "kepler"

    def __init__(self, mu=1.0, alpha=0.01, omega=math.pi, eps_radius=1e-10):
        if mu <= 0 or eps_radius <= 0:
            raise ValueError("mu and eps_radius must be positive")
        self.mu = float(mu)
        self.alpha = float(alpha)
        self.omega = float(omega)
        self.eps_radius = float(eps_radius)
        self.autonomous = self.alpha == 0.0

    def _radius(self, q):
        r = math.hypot(q[0], q[1])
        if not r > self.eps_radius:
            raise ModelSingularity(f"Kepler collision: |q| = {r:.3e} <= {self.eps_radius:.1e}")
        return r

    def V(self, q, t=0.0):
        return -self.mu / self._radius(q)

    def grad_V(self, q, t=0.0):
        r = self._radius(q)
        return (self.mu / r**3) * np.asarray(q, dtype=float)

    def damping(self, t):
        return self.alpha * math.sin(self.omega * t)

    def f(self, s, t=0.0):
        return self.damping(t) * s

    def df_ds(self, s, t=0.0):
        return self.damping(t)

    def dV_dt(self, q, t=0.0):
        return 0.0

    def df_dt(self, s, t=0.0):
        return self.alpha * self.omega * math.cos(self.omega * t) * s

    def action_flow(self, p, s, t, tau):
        decay = math.exp(-self.damping(t) * tau)
        return p * decay, s * decay

    def solve_implicit_action(self, rhs, t, h, guess=None, **_):
        denom = 1.0 + h * self.damping(t)
        if abs(denom) < 1e-12:
            raise DegenerateDenominator("1 + h df/ds vanished")
        return rhs / denom

    def default_state(self):
        return ContactState([1.0, 0.0], [0.0, 1.0], 0.0, 0.0)

    def random_state(self, rng):
        r = rng.uniform(0.5, 2.0)
        phi = rng.uniform(0, 2 * math.pi)
        q = r * np.array([math.cos(phi), math.sin(phi)])
        return ContactState(q, rng.uniform(-1, 1, 2), rng.uniform(-1, 1), rng.uniform(0, 10))

    def params(self):
        return {"mu": self.mu, "alpha": self.alpha, "omega": self.omega, "eps_radius": self.eps_radius}


class QuadraticActionOscillator(SeparableContactModel):
    """Harmonic oscillator with action term ``gamma s^2 / 2``.

    ``V(q) = q^2/2 - C``.  The ``H = 0`` surface is the ellipsoid
    ``q^2 + p^2 + gamma s^2 = 2C`` carrying the equilibria
    ``(0, 0, +-sqrt(2C/gamma))``.
    """

    dim = 1
    name = "quadratic_oscillator"

    def __init__(self, gamma=1.0, C=18.0):
        if gamma <= 0 or C <= 0:
            raise ValueError("gamma and C must be positive")
        self.gamma = float(gamma)
        self.C = float(C)

    def V(self, q, t=0.0):
        return 0.5 * float(np.dot(q, q)) - self.C

    def grad_V(self, q, t=0.0):
        return np.asarray(q, dtype=float).copy()

    def f(self, s, t=0.0):
        return 0.5 * self.gamma * s * s

    def df_ds(self, s, t=0.0):
        return self.gamma * s

    def dV_dt(self, q, t=0.0):
        return 0.0

    def df_dt(self, s, t=0.0):
        return 0.0

    def action_flow(self, p, s, t, tau):
        return _quadratic_flow(p, s, tau, self.gamma)

    def solve_implicit_action(self, rhs, t, h, guess=None, **_):
        # s + h*gamma*s^2/2 = rhs, root continuous with s = rhs at h = 0
        a = h * self.gamma
        disc = 1.0 + 2.0 * a * rhs
        if disc < 0.0:
            raise DegenerateDenominator("implicit action update has no real solution")
        root = math.sqrt(disc)
        if 1.0 + root < 1e-12:
            raise DegenerateDenominator("1 + h df/ds vanished")
        return 2.0 * rhs / (1.0 + root)

    def default_state(self):
        return ContactState([0.0], [-1.0], -7.0, 0.0)

    def random_state(self, rng):
        return ContactState(rng.uniform(-6, 6, 1), rng.uniform(-6, 6, 1), rng.uniform(-3, 8), 0.0)

    def params(self):
        return {"gamma": self.gamma, "C": self.C}


class LinearDampedOscillator(SeparableContactModel):
    """``q'' + damping q' + omega0^2 q = 0`` as a contact system."""

    dim = 1
    name = "linear_oscillator"

    def __init__(self, omega0=1.0, damping=0.0):
        if omega0 <= 0 or damping < 0:
            raise ValueError("omega0 must be positive and damping non-negative")
        self.omega0 = float(omega0)
        self.damping = float(damping)

    def V(self, q, t=0.0):
        return 0.5 * self.omega0**2 * float(np.dot(q, q))

    def grad_V(self, q, t=0.0):
        return self.omega0**2 * np.asarray(q, dtype=float)

    def f(self, s, t=0.0):
        return self.damping * s

    def df_ds(self, s, t=0.0):
        return self.damping

    def dV_dt(self, q, t=0.0):
        return 0.0

    def df_dt(self, s, t=0.0):
        return 0.0

    def action_flow(self, p, s, t, tau):
        decay = math.exp(-self.damping * tau)
        return p * decay, s * decay

    def solve_implicit_action(self, rhs, t, h, guess=None, **_):
        denom = 1.0 + h * self.damping
        if abs(denom) < 1e-12:
            raise DegenerateDenominator("1 + h df/ds vanished")
        return rhs / denom

    def default_state(self):
        return ContactState([1.0], [0.0], 0.0, 0.0)

    def exact(self, q0, p0, t):
        return damped_oscillator_exact(q0, p0, self.omega0, self.damping, t)

    def params(self):
        return {"omega0": self.omega0, "damping": self.damping}


def damped_oscillator_exact(q0, p0, omega0, damping, t):
    """Closed-form ``(q(t), q'(t))`` of the underdamped linear oscillator."""
    if damping >= 2.0 * omega0:
        raise UnsupportedRegime("only the underdamped regime damping < 2 omega0 is supported")
    beta = 0.5 * damping
    wd = math.sqrt(omega0**2 - beta**2)
    a = q0
    b = (p0 + beta * q0) / wd
    t = np.asarray(t, dtype=float)
    decay = np.exp(-beta * t)
    c, s = np.cos(wd * t), np.sin(wd * t)
    q = decay * (a * c + b * s)
    p = decay * ((b * wd - beta * a) * c - (a * wd + beta * b) * s)
    if q.ndim == 0:
        return float(q), float(p)
    return q, p


class CountingModel:
    """Proxy that forwards to a model and tallies evaluations.

    Each run gets its own proxy and :class:`EvalCounters`; the wrapped model
    is never mutated.
    """

    def __init__(self, model, counters=None):
        self.model = model
        self.counters = EvalCounters() if counters is None else counters
        self.dim = model.dim
        self.autonomous = model.autonomous
        self.name = model.name

    def V(self, q, t=0.0):
        self.counters.V_evals += 1
        return self.model.V(q, t)

    def grad_V(self, q, t=0.0):
        self.counters.grad_V_evals += 1
        return self.model.grad_V(q, t)

    def f(self, s, t=0.0):
        self.counters.f_evals += 1
        return self.model.f(s, t)

    def df_ds(self, s, t=0.0):
        self.counters.df_ds_evals += 1
        return self.model.df_ds(s, t)

    def action_flow(self, p, s, t, tau):
        self.counters.a_map_evals += 1
        return self.model.action_flow(p, s, t, tau)

    def a_map(self, state, tau):
        p, s = self.action_flow(state.p, state.s, state.t, tau)
        return ContactState(state.q, p, s, state.t)

    def __getattr__(self, item):
        return getattr(self.model, item)


MODEL_PARAMS = {
    "kepler": ("mu", "alpha", "omega", "eps_radius"),
    "quadratic_oscillator": ("gamma", "C"),
    "linear_oscillator": ("omega0", "damping"),
}

_MODEL_CLASSES = {
    "kepler": PerturbedKepler,
    "quadratic_oscillator": QuadraticActionOscillator,
    "linear_oscillator": LinearDampedOscillator,
}


def make_model(name, **params):
    """Build a registered model from its string id and keyword parameters."""
    try:
        cls = _MODEL_CLASSES[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(_MODEL_CLASSES)}") from None
    unknown = set(params) - set(MODEL_PARAMS[name])
    if unknown:
        raise ValueError(f"unknown parameter(s) for {name}: {sorted(unknown)}")
    return cls(**params)
