"""Lower bounds on the minimal period of nonstationary periodic orbits.

Covers Lipschitz ODEs, parabolic equations with nonlinearities on fractional
spaces, and strongly damped wave/beam equations, together with the spectral
tools and manufactured orbits used to check the bounds numerically.
"""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundResult,
    CertificateResult,
    HyperbolicBoundInput,
    Method,
    ParabolicBoundInput,
    UhbdProfile,
    abstract_certificate,
    corollary1_bound,
    hyperbolic_bound,
    k_beta,
    ode_bounds,
    parabolic_bound,
    parabolic_closed_form_bound,
    rvl_bound,
)
from .errors import (  # noqa: E402
    ConvergenceError,
    DegenerateModeError,
    DetectionError,
    DomainError,
    NumericError,
    PeriodkitError,
    SingularityError,
)
from .spectral import ModeSystem, XiPair, mu_decomposition, xi_pair  # noqa: E402

__all__ = [
    "BoundResult", "CertificateResult", "HyperbolicBoundInput", "Method", "ParabolicBoundInput",
    "UhbdProfile", "abstract_certificate", "corollary1_bound", "hyperbolic_bound", "k_beta",
    "ode_bounds", "parabolic_bound", "parabolic_closed_form_bound", "rvl_bound",
    "ConvergenceError", "DegenerateModeError", "DetectionError", "DomainError", "NumericError",
    "PeriodkitError", "SingularityError", "ModeSystem", "XiPair", "mu_decomposition", "xi_pair",
]
