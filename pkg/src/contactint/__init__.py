"""Structure-preserving integrators for contact Hamiltonian systems.

The package integrates dissipative mechanical systems written in contact
form, ``H(q, p, s, t) = |p|^2 / 2 + V(q, t) + f(s, t)``, with splitting
(``chi2``, ``chi4``, ``chi6``) and variational (``cvi2``) schemes, and
compares them against fixed-step Runge-Kutta baselines.
"""

from .core import (
    ContactState,
    EvalCounters,
    contact_form_defect,
    contact_vector_field,
    eta_at,
    hamiltonian,
    hamiltonian_drift,
)
from .errors import (
    ContactError,
    DegenerateDenominator,
    DegenerateForm,
    InsufficientSamples,
    ModelSingularity,
    NoConvergence,
    ReferenceUnavailable,
    SubflowBlowup,
    UnsupportedRegime,
)
from .integrators import (
    METHOD_NAMES,
    Status,
    StepMethod,
    Trajectory,
    chi2_step,
    chi_step,
    cvi2_step,
    discrete_momenta,
    integrate,
    midpoint_step,
    rk4_step,
    step_A,
    step_B,
    step_C,
    step_D,
)
from .models import (
    LinearDampedOscillator,
    PerturbedKepler,
    QuadraticActionOscillator,
    SeparableContactModel,
    make_model,
)

__version__ = "0.1.0"

__all__ = [
    "ContactState",
    "EvalCounters",
    "contact_form_defect",
    "contact_vector_field",
    "eta_at",
    "hamiltonian",
    "hamiltonian_drift",
    "ContactError",
    "DegenerateDenominator",
    "DegenerateForm",
    "InsufficientSamples",
    "ModelSingularity",
    "NoConvergence",
    "ReferenceUnavailable",
    "SubflowBlowup",
    "UnsupportedRegime",
    "METHOD_NAMES",
    "Status",
    "StepMethod",
    "Trajectory",
    "chi2_step",
    "chi_step",
    "cvi2_step",
    "discrete_momenta",
    "integrate",
    "midpoint_step",
    "rk4_step",
    "step_A",
    "step_B",
    "step_C",
    "step_D",
    "LinearDampedOscillator",
    "PerturbedKepler",
    "QuadraticActionOscillator",
    "SeparableContactModel",
    "make_model",
]
