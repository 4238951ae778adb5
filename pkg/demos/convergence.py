"""
=============================================
Observed order of convergence
=============================================

The damped linear oscillator ``q'' + c q' + q = 0`` has a closed-form
solution, so every integrator can be checked against it directly.
"""

# %%

import numpy as np

from contactint import ContactState, LinearDampedOscillator, QuadraticActionOscillator, integrate
from contactint.diagnostics import convergence_errors, convergence_order

model = LinearDampedOscillator(omega0=1.0, damping=0.3)
state0 = ContactState([1.0], [0.0], 0.0)
taus = [0.2, 0.1, 0.05, 0.025]

for method in ("chi2", "chi4", "chi6", "cvi2", "rk4", "midpoint"):
    _, errors = convergence_errors(model, method, state0, 10.0, taus)
    slope = np.polyfit(np.log(taus), np.log(errors), 1)[0]
    print(f"{method:<9} errors " + " ".join(f"{e:.2e}" for e in errors) + f"   slope {slope:.2f}")

# %%
# Without an exact solution
# -------------------------
#
# A much finer sixth-order run serves as the reference.  Here the action
# ``s`` is part of the error.

osc = QuadraticActionOscillator(gamma=1.0, C=18.0)
start = ContactState([0.0], [2.0], 1.0)
reference = integrate(osc, "chi6", start, 0.01 / 20, 2.0)
for method in ("chi2", "chi4", "cvi2"):
    print(method, round(convergence_order(osc, method, start, 2.0, [0.04, 0.02, 0.01], reference), 2))
