"""Independent reference implementations used as test oracles.

Nothing here imports the integrators: the brute-force flows below integrate
the contact equations of motion of a sub-Hamiltonian with tiny RK4 steps.
The inner loop is compiled with numba so that hundreds of reference
solutions with ~10^5 steps each stay within a few seconds.
"""

import math

import numba
import numpy as np

from contactint.models import LinearDampedOscillator, PerturbedKepler, QuadraticActionOscillator


def batch_parameters(model, t):
    """Per-row coefficients of ``V = -mu/|q| + kappa |q|^2 / 2 + v0`` and ``f = c s + g s^2 / 2``."""
    t = np.asarray(t, dtype=float)
    zeros = np.zeros_like(t)
    if isinstance(model, PerturbedKepler):
        return dict(mu=zeros + model.mu, kappa=zeros, v0=zeros, c=model.alpha * np.sin(model.omega * t), g=zeros)
    if isinstance(model, QuadraticActionOscillator):
        return dict(mu=zeros, kappa=zeros + 1.0, v0=zeros - model.C, c=zeros, g=zeros + model.gamma)
    if isinstance(model, LinearDampedOscillator):
        return dict(mu=zeros, kappa=zeros + model.omega0**2, v0=zeros, c=zeros + model.damping, g=zeros)
    raise TypeError(f"no oracle for {model!r}")


_PARAM_KEYS = ("mu", "kappa", "v0", "c", "g", "wa", "wb", "wc")


@numba.njit(cache=True)
def _sub_field(x, prm, out):
    mu, kappa, v0, c, g, wa, wb, wc = prm[0], prm[1], prm[2], prm[3], prm[4], prm[5], prm[6], prm[7]
    q1, q2, p1, p2, s = x[0], x[1], x[2], x[3], x[4]
    r2 = q1 * q1 + q2 * q2
    inv_r = 1.0 / math.sqrt(r2) if mu != 0.0 else 0.0
    V = -mu * inv_r + 0.5 * kappa * r2 + v0
    gv = mu * inv_r**3 + kappa
    F = c * s + 0.5 * g * s * s
    Fs = c + g * s
    K = 0.5 * (p1 * p1 + p2 * p2)
    H = wa * F + wb * V + wc * K
    Hs = wa * Fs
    # q' = H_p, p' = -H_q - p H_s, s' = p.H_p - H
    out[0] = wc * p1
    out[1] = wc * p2
    out[2] = -wb * gv * q1 - p1 * Hs
    out[3] = -wb * gv * q2 - p2 * Hs
    out[4] = wc * 2.0 * K - H


@numba.njit(cache=True)
def _brute_force(x0, prm, tau, max_step):
    out = x0.copy()
    k1 = np.empty(5)
    k2 = np.empty(5)
    k3 = np.empty(5)
    k4 = np.empty(5)
    y = np.empty(5)
    for i in range(x0.shape[0]):
        nsub = int(math.ceil(tau[i] / max_step))
        h = tau[i] / nsub
        x = x0[i].copy()
        for _ in range(nsub):
            _sub_field(x, prm[i], k1)
            for j in range(5):
                y[j] = x[j] + 0.5 * h * k1[j]
            _sub_field(y, prm[i], k2)
            for j in range(5):
                y[j] = x[j] + 0.5 * h * k2[j]
            _sub_field(y, prm[i], k3)
            for j in range(5):
                y[j] = x[j] + h * k3[j]
            _sub_field(y, prm[i], k4)
            for j in range(5):
                x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        out[i] = x
    return out


class SubHamiltonianBatch:
    """Batch of ``(state, piece)`` pairs sharing one padded coordinate layout.

    Positions and momenta are padded to two components; the oscillator
    potentials ignore the padding because it stays identically zero.
    ``piece`` selects the sub-Hamiltonian: ``"A"`` the action term at frozen
    time, ``"B"`` the potential, ``"C"`` the kinetic energy.
    """

    def __init__(self):
        self.prm = []
        self.x = []
        self.tau = []

    def add(self, model, piece, state, tau):
        coeffs = batch_parameters(model, state.t)
        coeffs.update(wa=float(piece == "A"), wb=float(piece == "B"), wc=float(piece == "C"))
        self.prm.append([float(coeffs[k]) for k in _PARAM_KEYS])
        self.x.append(pad(state))
        self.tau.append(float(tau))

    def integrate(self, max_step=1e-5):
        """RK4 per case with ``ceil(tau / max_step)`` equal sub-steps."""
        return _brute_force(np.array(self.x), np.array(self.prm), np.array(self.tau), max_step)


def pad(state):
    q = np.zeros(2)
    p = np.zeros(2)
    q[: state.n] = state.q
    p[: state.n] = state.p
    return np.concatenate([q, p, [state.s]])


def rk4_reference(model, state, t_end, h):
    """Plain-loop RK4 of the full contact flow with step ``h``, for small runs."""
    n = state.n
    x = state.coords().astype(float)
    t = state.t
    nsteps = math.ceil((t_end - t) / h - 1e-9)
    h = (t_end - t) / nsteps

    def rhs(x, t):
        q, p, s = x[:n], x[n : 2 * n], x[2 * n]
        fs = model.df_ds(s, t)
        dq = p
        dp = -model.grad_V(q, t) - p * fs
        ds = 0.5 * p @ p - model.V(q, t) - model.f(s, t)
        return np.concatenate([dq, dp, [ds]])

    for _ in range(nsteps):
        k1 = rhs(x, t)
        k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h)
        k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h)
        k4 = rhs(x + h * k3, t + h)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return x
