"""One-step maps and the fixed-step trajectory driver.

Contact Hamiltonian integrators (CHI) compose the exact flows of the three
pieces of ``H = |p|^2/2 + V(q, t) + f(s, t)``:

* ``A``: flow of ``f`` at frozen time (delegated to the model),
* ``B``: flow of ``V`` at frozen time,
* ``C``: flow of the kinetic energy,
* ``D``: advance of the time coordinate.

The second-order scheme is the palindrome ``D C B A B C D`` with half steps
on every map but the central ``A``; even orders above two come from the triple-jump
recursion.  The contact variational integrator (CVI) is the explicit
discrete Herglotz map of a trapezoidal discrete Lagrangian.  RK4 and the
explicit midpoint rule are provided as non-geometric baselines.

Internally every map works on raw ``(q, p, s, t)`` tuples; the public
``step_*`` functions take and return :class:`~contactint.core.ContactState`.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import ContactState, EvalCounters, vector_field_raw
from .errors import ContactError, DegenerateDenominator, ModelSingularity, SubflowBlowup
from .models import CountingModel

__all__ = [
    "StepMethod",
    "Status",
    "Trajectory",
    "step_A",
    "step_B",
    "step_C",
    "step_D",
    "chi2_step",
    "chi_step",
    "triple_jump_coefficients",
    "cvi2_step",
    "discrete_momenta",
    "rk4_step",
    "midpoint_step",
    "integrate",
    "METHOD_NAMES",
]

DENOMINATOR_TOL = 1e-12


# ---------------------------------------------------------------- sub-maps


def _flow_B(model, q, p, s, t, tau, compat=False):
    V = model.V(q, t)
    gV = model.grad_V(q, t)
    ds = 0.5 * V if compat else V
    return q, p - tau * gV, s - tau * ds, t


def _flow_C(q, p, s, t, tau):
    return q + tau * p, p, s + 0.5 * tau * float(np.dot(p, p)), t


def _tag(exc, submap):
    if getattr(exc, "submap", None) is None:
        exc.submap = submap
    return exc


def step_A(model, state: ContactState, tau) -> ContactState:
    """Exact frozen-time flow of the action piece ``f(s, t)``."""
    p, s = model.action_flow(state.p, state.s, state.t, tau)
    return ContactState(state.q, p, s, state.t)


def step_B(model, state: ContactState, tau, b_map_compat=False) -> ContactState:
    """Exact frozen-time flow of the potential: ``p -= tau grad V``, ``s -= tau V``.

    ``b_map_compat=True`` uses ``s -= tau V / 2`` instead, which is not the
    flow of ``V`` and degrades the scheme (kept for comparison only).
    """
    return ContactState(*_flow_B(model, state.q, state.p, state.s, state.t, tau, b_map_compat))


def step_C(state: ContactState, tau) -> ContactState:
    """Exact flow of ``|p|^2/2``: free drift, ``s += tau |p|^2 / 2``."""
    return ContactState(*_flow_C(state.q, state.p, state.s, state.t, tau))


def step_D(state: ContactState, tau) -> ContactState:
    return ContactState(state.q, state.p, state.s, state.t + tau)


# ---------------------------------------------------------------- CHI


def _chi2(model, q, p, s, t, tau, compat=False):
    half = 0.5 * tau
    tm = t + half
    stage = "B"
    try:
        q, p, s, _ = _flow_C(q, p, s, t, half)
        q, p, s, _ = _flow_B(model, q, p, s, tm, half, compat)
        stage = "A"
        p, s = model.action_flow(p, s, tm, tau)
        stage = "B"
        q, p, s, _ = _flow_B(model, q, p, s, tm, half, compat)
        q, p, s, _ = _flow_C(q, p, s, tm, half)
    except ContactError as exc:
        raise _tag(exc, stage)
    return q, p, s, t + tau


def chi2_step(model, state: ContactState, tau, b_map_compat=False) -> ContactState:
    """Second-order contact Hamiltonian integrator.

    Applies the palindrome ``D(tau/2) C(tau/2) B(tau/2) A(tau) B(tau/2) C(tau/2) D(tau/2)``:
    kinetic drift outermost, the action flow in the centre, and both
    potential kicks and the action flow evaluated at the midpoint time.
    Errors from a sub-map are re-raised with a ``submap`` attribute.
    """
    return ContactState(*_chi2(model, state.q, state.p, state.s, state.t, tau, b_map_compat))


@lru_cache(maxsize=None)
def triple_jump_coefficients(order: int) -> tuple:
    """Sub-step fractions of the recursive triple jump for an even ``order``.

    ``S_{2k+2}(tau) = S_{2k}(g1 tau) S_{2k}(g2 tau) S_{2k}(g1 tau)`` with
    ``g1 = 1 / (2 - 2^(1/(2k+1)))`` and ``g2 = 1 - 2 g1``.
    """
    if order < 2 or order % 2:
        raise ValueError(f"CHI order must be an even integer >= 2, got {order}")
    if order == 2:
        return (1.0,)
    inner = triple_jump_coefficients(order - 2)
    g1 = 1.0 / (2.0 - 2.0 ** (1.0 / (order - 1)))
    g2 = 1.0 - 2.0 * g1
    return tuple(g * c for g in (g1, g2, g1) for c in inner)


def _chi(model, q, p, s, t, tau, order=2, compat=False):
    for c in triple_jump_coefficients(order):
        q, p, s, t = _chi2(model, q, p, s, t, c * tau, compat)
    return q, p, s, t


def chi_step(model, state: ContactState, tau, order=2, b_map_compat=False) -> ContactState:
    """Contact Hamiltonian integrator of any even order (triple jump)."""
    return ContactState(*_chi(model, state.q, state.p, state.s, state.t, tau, order, b_map_compat))


# ---------------------------------------------------------------- CVI


def _cvi2(model, q, p, s, t, tau, gV0=None, V0=None):
    """One CVI step; returns the new state plus ``grad V`` and ``V`` at it.

    Passing the previous step's trailing ``gV0``/``V0`` saves one potential
    gradient per step.
    """
    h = 0.5 * tau
    t1 = t + tau
    try:
        if gV0 is None:
            gV0 = model.grad_V(q, t)
        if V0 is None:
            V0 = model.V(q, t)
        fs0 = model.df_ds(s, t)
        F0 = model.f(s, t)
        q1 = q - h * tau * gV0 + p * (tau - h * tau * fs0)
        V1 = model.V(q1, t1)
        gV1 = model.grad_V(q1, t1)
        v = (q1 - q) / tau
        # s1 = s + tau * L(q, q1, s, s1) with the action term averaged over both ends
        rhs = s + tau * (0.5 * float(np.dot(v, v)) - 0.5 * (V0 + V1) - 0.5 * F0)
        s1 = model.solve_implicit_action(rhs, t1, h)
        denom = 1.0 + h * model.df_ds(s1, t1)
        if abs(denom) < DENOMINATOR_TOL:
            raise DegenerateDenominator(f"CVI momentum denominator {denom:.3e}")
        p1 = ((1.0 - h * fs0) * p - h * (gV0 + gV1)) / denom
    except ContactError as exc:
        raise _tag(exc, "cvi")
    return (q1, p1, s1, t1), gV1, V1


def cvi2_step(model, state: ContactState, tau) -> ContactState:
    """Second-order explicit contact variational integrator.

    The position update is
    ``q1 = q - tau^2/2 grad V(q, t) + p (tau - tau^2/2 df/ds(s, t))``,
    the action follows from ``s1 = s + tau L`` with the discrete Lagrangian
    ``L = |q1 - q|^2 / (2 tau^2) - (V(q, t) + V(q1, t1))/2 - (f(s, t) + f(s1, t1))/2``
    (solved in closed form by the model), and the momentum is
    ``p1 = ((1 - tau/2 df/ds(s)) p - tau/2 (grad V(q) + grad V(q1))) / (1 + tau/2 df/ds(s1))``.
    """
    new, _, _ = _cvi2(model, state.q, state.p, state.s, state.t, tau)
    return ContactState(*new)


@dataclass(frozen=True)
class DiscreteMomenta:
    """Momenta at both ends of one discrete interval ``[k, k+1]``.

    ``p_plus`` lives at the left node ``k`` and ``p_minus`` at the right node
    ``k+1``.  On a critical discrete curve the ``p_minus`` of one interval
    equals the ``p_plus`` of the next, and both equal the map's momentum.
    """

    p_minus: np.ndarray
    p_plus: np.ndarray
    s_next: float


def discrete_momenta(model, q_prev, q_next, s_prev, t, tau, s_next=None) -> DiscreteMomenta:
    """Discrete Legendre transforms of the CVI Lagrangian on one interval.

    With ``L(q_k, q_{k+1}, s_k, s_{k+1})`` as in :func:`cvi2_step`:

    ``p_plus  = -tau dL/dq_k     / (1 + tau dL/ds_k)``
    ``p_minus =  tau dL/dq_{k+1} / (1 - tau dL/ds_{k+1})``

    ``s_next`` is solved from the action relation when not supplied.
    """
    q_prev = np.asarray(q_prev, dtype=float)
    q_next = np.asarray(q_next, dtype=float)
    h = 0.5 * tau
    t1 = t + tau
    V0, V1 = model.V(q_prev, t), model.V(q_next, t1)
    gV0, gV1 = model.grad_V(q_prev, t), model.grad_V(q_next, t1)
    v = (q_next - q_prev) / tau
    if s_next is None:
        rhs = s_prev + tau * (0.5 * float(np.dot(v, v)) - 0.5 * (V0 + V1) - 0.5 * model.f(s_prev, t))
        s_next = model.solve_implicit_action(rhs, t1, h)
    left = 1.0 - h * model.df_ds(s_prev, t)
    right = 1.0 + h * model.df_ds(s_next, t1)
    if abs(left) < DENOMINATOR_TOL or abs(right) < DENOMINATOR_TOL:
        raise DegenerateDenominator("discrete Legendre transform denominator vanished")
    p_plus = (v + h * gV0) / left
    p_minus = (v - h * gV1) / right
    return DiscreteMomenta(p_minus, p_plus, float(s_next))


# ---------------------------------------------------------------- baselines


def _field(model, q, p, s, t):
    try:
        return vector_field_raw(model, q, p, s, t)
    except ContactError as exc:
        raise _tag(exc, "field")


def _rk4(model, q, p, s, t, tau):
    h = 0.5 * tau
    k1 = _field(model, q, p, s, t)
    k2 = _field(model, q + h * k1[0], p + h * k1[1], s + h * k1[2], t + h)
    k3 = _field(model, q + h * k2[0], p + h * k2[1], s + h * k2[2], t + h)
    k4 = _field(model, q + tau * k3[0], p + tau * k3[1], s + tau * k3[2], t + tau)
    w = tau / 6.0
    return (
        q + w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        p + w * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        s + w * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
        t + tau,
    )


def _midpoint(model, q, p, s, t, tau):
    h = 0.5 * tau
    k1 = _field(model, q, p, s, t)
    k2 = _field(model, q + h * k1[0], p + h * k1[1], s + h * k1[2], t + h)
    return q + tau * k2[0], p + tau * k2[1], s + tau * k2[2], t + tau


def rk4_step(model, state: ContactState, tau) -> ContactState:
    """Classical RK4 on the extended field (contact flow plus ``t' = 1``)."""
    return ContactState(*_rk4(model, state.q, state.p, state.s, state.t, tau))


def midpoint_step(model, state: ContactState, tau) -> ContactState:
    return ContactState(*_midpoint(model, state.q, state.p, state.s, state.t, tau))


# ---------------------------------------------------------------- methods

METHOD_NAMES = ("chi2", "chi4", "chi6", "cvi2", "rk4", "midpoint")


@dataclass(frozen=True)
class StepMethod:
    """An integrator choice: ``kind`` in {"chi", "cvi", "rk4", "midpoint"}."""

    kind: str
    order: int = 2
    b_map_compat: bool = False

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind == "chi":
            if self.order < 2 or self.order % 2:
                raise ValueError(f"CHI order must be an even integer >= 2, got {self.order}")
        elif kind in ("cvi", "midpoint"):
            object.__setattr__(self, "order", 2)
        elif kind == "rk4":
            object.__setattr__(self, "order", 4)
        else:
            raise ValueError(f"unknown method kind {self.kind!r}")
        if self.b_map_compat and kind != "chi":
            raise ValueError("b_map_compat only applies to CHI methods")

    @classmethod
    def parse(cls, name: str, b_map_compat=False) -> "StepMethod":
        """Build from a method string such as ``"chi4"``, ``"cvi2"`` or ``"rk4"``."""
        key = name.strip().lower()
        if key.startswith("chi") and key[3:].isdigit():
            return cls("chi", int(key[3:]), b_map_compat)
        if key == "cvi2":
            return cls("cvi", 2, b_map_compat)
        if key in ("rk4", "midpoint"):
            return cls(key, b_map_compat=b_map_compat)
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHOD_NAMES)}")

    @property
    def name(self) -> str:
        if self.kind == "chi":
            return f"chi{self.order}"
        if self.kind == "cvi":
            return "cvi2"
        return self.kind

    def raw_step(self, model, q, p, s, t, tau):
        if self.kind == "chi":
            return _chi(model, q, p, s, t, tau, self.order, self.b_map_compat)
        if self.kind == "cvi":
            return _cvi2(model, q, p, s, t, tau)[0]
        if self.kind == "rk4":
            return _rk4(model, q, p, s, t, tau)
        return _midpoint(model, q, p, s, t, tau)

    def step(self, model, state: ContactState, tau) -> ContactState:
        return ContactState(*self.raw_step(model, state.q, state.p, state.s, state.t, tau))

    def __call__(self, model, state, tau):
        return self.step(model, state, tau)


def _as_method(method) -> StepMethod:
    if isinstance(method, StepMethod):
        return method
    return StepMethod.parse(method)


# ---------------------------------------------------------------- driver


class Status(enum.Enum):
    COMPLETED = "Completed"
    DIVERGED = "Diverged"
    MODEL_SINGULARITY = "ModelSingularity"
    SUBFLOW_BLOWUP = "SubflowBlowup"


@dataclass
class Trajectory:
    """Sampled states of one run.

    Samples are stored column-wise: ``t`` has shape ``(N,)``, ``q`` and ``p``
    shape ``(N, n)``, ``s`` shape ``(N,)``.
    """

    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    s: np.ndarray
    method: StepMethod
    tau: float
    status: Status = Status.COMPLETED
    t_fail: float | None = None
    message: str = ""
    failed_submap: str | None = None
    counters: EvalCounters = field(default_factory=EvalCounters)
    steps: int = 0
    wall_time: float = 0.0

    def __len__(self):
        return self.t.size

    def __getitem__(self, i) -> ContactState:
        return ContactState(self.q[i], self.p[i], self.s[i], self.t[i])

    def states(self):
        return [self[i] for i in range(len(self))]

    @property
    def final(self) -> ContactState:
        return self[-1]

    @property
    def completed(self) -> bool:
        return self.status is Status.COMPLETED

    def coords(self) -> np.ndarray:
        """``(N, 2n+1)`` array of ``(q, p, s)`` rows."""
        return np.column_stack([self.q, self.p, self.s])

    @classmethod
    def from_samples(cls, t, q, p, s, method=None, tau=None):
        """Wrap externally produced samples (e.g. an analytic solution)."""
        t = np.asarray(t, dtype=float)
        q = np.asarray(q, dtype=float).reshape(t.size, -1)
        p = np.asarray(p, dtype=float).reshape(t.size, -1)
        s = np.asarray(s, dtype=float).reshape(t.size)
        if tau is None:
            tau = float(t[1] - t[0]) if t.size > 1 else 0.0
        return cls(t, q, p, s, method, tau)


_STATUS_OF = {
    ModelSingularity: Status.MODEL_SINGULARITY,
    SubflowBlowup: Status.SUBFLOW_BLOWUP,
}


def integrate(model, method, state0: ContactState, tau, t_end, sample_every=1, bound=math.inf) -> Trajectory:
    """Run a fixed-step integration from ``state0.t`` to ``t_end``.

    The number of steps is ``ceil((t_end - t0) / tau)`` (with a small
    tolerance for round-off).  Every ``sample_every``-th state is stored,
    and the last state reached is always stored.  Failures never raise:
    a sub-map error, a non-finite state, or a state with
    ``max |(q, p, s)| > bound`` stops the run and sets ``status``.
    """
    method = _as_method(method)
    if not tau > 0:
        raise ValueError("tau must be positive")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    t0 = state0.t
    if t_end < t0:
        raise ValueError("t_end must not precede the initial time")
    nsteps = max(0, math.ceil((t_end - t0) / tau - 1e-9))

    counters = EvalCounters()
    cmodel = CountingModel(model, counters)
    n = state0.n
    cap = nsteps // sample_every + 2
    ts = np.empty(cap)
    qs = np.empty((cap, n))
    ps = np.empty((cap, n))
    ss = np.empty(cap)

    q, p, s, t = state0.q.copy(), state0.p.copy(), state0.s, t0
    ts[0], qs[0], ps[0], ss[0] = t, q, p, s
    count = 1
    status, t_fail, message, submap = Status.COMPLETED, None, "", None

    is_cvi = method.kind == "cvi"
    gV = V = None
    done = 0
    start = time.perf_counter()
    # overflow on the way to a non-finite state is reported through ``status``
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, nsteps + 1):
            try:
                if is_cvi:
                    new, gV, V = _cvi2(cmodel, q, p, s, t, tau, gV, V)
                else:
                    new = method.raw_step(cmodel, q, p, s, t, tau)
            except ContactError as exc:
                status = _STATUS_OF.get(type(exc), Status.DIVERGED)
                t_fail, message, submap = t, str(exc), getattr(exc, "submap", None)
                break
            q1, p1, s1, _ = new
            s1 = float(s1)
            if not (math.isfinite(s1) and np.isfinite(q1).all() and np.isfinite(p1).all()):
                status, t_fail, message = Status.DIVERGED, t, "non-finite state"
                break
            q, p, s, t = q1, p1, s1, t0 + k * tau
            done = k
            if bound < math.inf and max(abs(s), np.abs(q).max(), np.abs(p).max()) > bound:
                status, t_fail, message = Status.DIVERGED, t, f"state left the bound {bound:g}"
                break
            if k % sample_every == 0:
                ts[count], qs[count], ps[count], ss[count] = t, q, p, s
                count += 1
    wall = time.perf_counter() - start

    if ts[count - 1] != t:
        ts[count], qs[count], ps[count], ss[count] = t, q, p, s
        count += 1
    return Trajectory(
        ts[:count].copy(),
        qs[:count].copy(),
        ps[:count].copy(),
        ss[:count].copy(),
        method,
        float(tau),
        status,
        t_fail,
        message,
        submap,
        counters,
        done,
        wall,
    )
