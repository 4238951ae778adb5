"""Phase-space states, the contact vector field and contact-form checks.

All formulas are written in Darboux coordinates ``(q, p, s)`` where the
contact form reads ``eta = ds - p . dq``.  Time ``t`` is carried alongside as
an explicit coordinate so that time-dependent models can be split like any
other piece of the Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import DegenerateForm

__all__ = [
    "ContactState",
    "EvalCounters",
    "eta_at",
    "contact_vector_field",
    "hamiltonian",
    "hamiltonian_drift",
    "contact_form_defect",
    "map_jacobian",
]


def _as_vector(x):
    arr = np.array(x, dtype=float).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ContactState:
    """A point ``(q, p, s, t)`` of the extended contact phase space.

    ``q`` and ``p`` are stored as read-only 1-D float arrays of equal length
    ``n >= 1``.  Non-finite components are rejected at construction.
    """

    q: np.ndarray
    p: np.ndarray
    s: float
    t: float = 0.0

    def __post_init__(self):
        q = _as_vector(self.q)
        p = _as_vector(self.p)
        if q.size == 0 or q.shape != p.shape:
            raise ValueError(
                f"q and p must be non-empty with equal length, got {q.size} and {p.size}"
            )
        s = float(self.s)
        t = float(self.t)
        if not (np.isfinite(q).all() and np.isfinite(p).all() and np.isfinite(s) and np.isfinite(t)):
            raise ValueError("ContactState components must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.q.size

    def coords(self) -> np.ndarray:
        """Flat ``(q, p, s)`` vector of length ``2n + 1`` (time excluded)."""
        return np.concatenate([self.q, self.p, [self.s]])

    @classmethod
    def from_coords(cls, x, t=0.0) -> "ContactState":
        x = np.asarray(x, dtype=float)
        n = (x.size - 1) // 2
        if x.size != 2 * n + 1 or n < 1:
            raise ValueError(f"coordinate vector must have odd length >= 3, got {x.size}")
        return cls(x[:n], x[n : 2 * n], x[-1], t)

    def replace(self, **changes) -> "ContactState":
        values = {"q": self.q, "p": self.p, "s": self.s, "t": self.t}
        values.update(changes)
        return ContactState(**values)

    def __eq__(self, other):
        if not isinstance(other, ContactState):
            return NotImplemented
        return (
            np.array_equal(self.q, other.q)
            and np.array_equal(self.p, other.p)
            and self.s == other.s
            and self.t == other.t
        )

    __hash__ = None


@dataclass
class EvalCounters:
    """Per-run evaluation counts; never shared between runs."""

    grad_V_evals: int = 0
    V_evals: int = 0
    f_evals: int = 0
    df_ds_evals: int = 0
    vector_field_evals: int = 0
    a_map_evals: int = 0

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def reset(self):
        for f in fields(self):
            setattr(self, f.name, 0)


def eta_at(state: ContactState) -> np.ndarray:
    """Coefficients of ``eta = ds - p dq`` in the basis ``(dq, dp, ds)``."""
    n = state.n
    c = np.zeros(2 * n + 1)
    c[:n] = -state.p
    c[-1] = 1.0
    return c


def _count_field(model):
    counters = getattr(model, "counters", None)
    if counters is not None:
        counters.vector_field_evals += 1


def vector_field_raw(model, q, p, s, t):
    """Contact vector field on raw arrays; returns ``(dq, dp, ds)``."""
    _count_field(model)
    V = model.V(q, t)
    gV = model.grad_V(q, t)
    f = model.f(s, t)
    fs = model.df_ds(s, t)
    kin = 0.5 * float(np.dot(p, p))
    dq = np.array(p, dtype=float)
    dp = -gV - p * fs
    ds = kin - V - f
    return dq, dp, ds


def contact_vector_field(model, state: ContactState):
    """Evaluate the contact Hamiltonian vector field at ``state``.

    Returns
    -------
    dq, dp : ndarray
    ds : float
    dt : float
        Always 1.0; time is an explicit coordinate.
    """
    _check_dim(model, state)
    dq, dp, ds = vector_field_raw(model, state.q, state.p, state.s, state.t)
    return dq, dp, ds, 1.0


def _check_dim(model, state):
    if model.dim != state.n:
        raise ValueError(f"model has dimension {model.dim}, state has {state.n}")


def hamiltonian_raw(model, q, p, s, t) -> float:
    return 0.5 * float(np.dot(p, p)) + model.V(q, t) + model.f(s, t)


def hamiltonian(model, state: ContactState) -> float:
    """``|p|^2/2 + V(q, t) + f(s, t)``."""
    _check_dim(model, state)
    return hamiltonian_raw(model, state.q, state.p, state.s, state.t)


def hamiltonian_drift(model, state: ContactState) -> float:
    """Instantaneous rate ``dH/dt`` along the contact flow.

    For autonomous models this is ``-H * df/ds``.  Explicit time dependence
    adds ``dV/dt + df/dt``.
    """
    H = hamiltonian(model, state)
    rate = -H * model.df_ds(state.s, state.t)
    if not model.autonomous:
        rate += model.dV_dt(state.q, state.t) + model.df_dt(state.s, state.t)
    return rate


def map_jacobian(func, x, fd_step=1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of ``func: R^m -> R^k`` at ``x``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = fd_step
        cols.append((np.asarray(func(x + e)) - np.asarray(func(x - e))) / (2.0 * fd_step))
    return np.column_stack(cols)


def contact_form_defect(step, model, state: ContactState, tau, fd_step=1e-6, tol=1e-14) -> float:
    """Relative failure of a one-step map to be a contact transformation.

    ``step(model, state, tau)`` must return a :class:`ContactState`.  The map
    is differentiated in ``(q, p, s)`` at fixed ``t``; the pulled-back form
    ``c' = eta(state')^T J`` is compared with the best scalar multiple of
    ``eta(state)``.  A contact map gives zero up to finite-difference noise.
    """
    if tau <= 0 or fd_step <= 0:
        raise ValueError("tau and fd_step must be positive")
    t = state.t

    def phi(x):
        return step(model, ContactState.from_coords(x, t), tau).coords()

    J = map_jacobian(phi, state.coords(), fd_step)
    image = step(model, state, tau)
    c_new = eta_at(image) @ J
    c = eta_at(state)
    norm = np.linalg.norm(c_new)
    if norm < tol:
        raise DegenerateForm(f"pulled-back contact form has norm {norm:.3e}")
    lam = float(c_new @ c) / float(c @ c)
    return float(np.linalg.norm(c_new - lam * c) / norm)
