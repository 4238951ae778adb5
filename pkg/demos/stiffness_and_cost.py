"""
=============================================
Step-size stability and cost per step
=============================================

Starting just below the south pole, ``(q, p, s) = (0, -1, -7)``, the
quadratic oscillator first moves away from the repelling pole and then
relaxes to the north pole.  Large steps make this transient hard for
explicit methods.
"""

# %%

import numpy as np

from contactint import ContactState, QuadraticActionOscillator, integrate
from contactint.diagnostics import benchmark, format_benchmark_table, format_stability_table, stability_scan

model = QuadraticActionOscillator(gamma=1.0, C=18.0)
start = ContactState([0.0], [-1.0], -7.0)
grid = np.round(np.arange(0.05, 0.61, 0.05), 2)

# %%
# Stability scan
# --------------
#
# A run counts as stable when it reaches ``t = 500`` with every coordinate
# below 100 in absolute value.

reports = stability_scan(model, ("chi2", "cvi2", "rk4"), start, grid, 500.0, bound=100.0)
print(format_stability_table(reports))

# %%
# What goes wrong for the variational map
# ---------------------------------------
#
# For mid-range steps its implicit action update has no real root on the
# first step, which ends the run.

traj = integrate(model, "cvi2", start, 0.3, 500.0, bound=100.0)
print(traj.status.value, "at t =", traj.t_fail, "-", traj.message)

# %%
# Cost
# ----
#
# Counters are exact; times depend on the machine.

rows = benchmark(model, ("chi2", "cvi2", "rk4", "midpoint"), 0.1, 500.0, repeats=3, state0=start)
print(format_benchmark_table(rows, "tau = 0.1, t in [0, 500], 3 runs"))
for row in rows:
    per = row.per_step()
    print(f"{row.method:<9} grad V per step {per['grad_V_evals']:.3f}, "
          f"vector field per step {per['vector_field_evals']:.0f}")
