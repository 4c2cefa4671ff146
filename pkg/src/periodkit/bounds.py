"""Lower bounds on the minimal period of nonstationary periodic solutions.

Covers the classical ODE constants, the parabolic bound built from
``K_beta = min H``, its closed-form and Robinson/Vidal-Lopez relaxations,
the abstract two-constant bound ``1/(L(1+sqrt(M(1+mu0/L))))^2`` and the
strongly damped hyperbolic bound, plus a numerical certificate for the
general inequality driven by a (UHBD) profile.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericError
from .minimize import ScalarMinimizerConfig, minimize_unit_interval

SQRT2 = math.sqrt(2.0)
HYPERBOLIC_M = 1.0 + SQRT2
_E_HALF = math.exp(-0.5)
_SERIES_CUTOFF = 1e-16


class Method(str, enum.Enum):
    YORKE_HILBERT = "yorke_hilbert"
    BUSENBERG_BANACH = "busenberg_banach"
    PARABOLIC_KBETA = "parabolic_Kbeta"
    PARABOLIC_CLOSED_FORM = "parabolic_closed_form"
    PARABOLIC_RVL = "parabolic_rvl"
    HYPERBOLIC_MAIN = "hyperbolic_main"
    COROLLARY1 = "corollary1"
    ABSTRACT_SCAN = "abstract_scan"


@dataclass(frozen=True)
class BoundResult:
    lower_bound_T: float
    method_tag: Method
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.lower_bound_T > 0 and math.isfinite(self.lower_bound_T)):
            raise NumericError(f"bound must be positive and finite, got {self.lower_bound_T}")

    def to_dict(self) -> dict:
        return {
            "lower_bound_T": self.lower_bound_T,
            "method_tag": self.method_tag.value,
            "diagnostics": dict(self.diagnostics),
        }


def _check_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


def _check_beta(beta):
    if not (0.0 <= beta < 1.0):
        raise DomainError(f"beta must lie in [0, 1), got {beta!r}")


def _check_eta(eta):
    eta_arr = np.asarray(eta, dtype=float)
    if not np.all((eta_arr > 0.0) & (eta_arr < 1.0)):
        raise DomainError(f"eta must lie in (0, 1), got {eta!r}")


@dataclass(frozen=True)
class ParabolicBoundInput:
    lipschitz_L: float
    beta: float = 0.0

    def __post_init__(self):
        _check_positive("lipschitz_L", self.lipschitz_L)
        _check_beta(self.beta)


@dataclass(frozen=True)
class HyperbolicBoundInput:
    lipschitz_L: float
    alpha: float

    def __post_init__(self):
        _check_positive("lipschitz_L", self.lipschitz_L)
        _check_positive("alpha", self.alpha)


# ---------------------------------------------------------------- ODE


def ode_bounds(L: float) -> tuple[BoundResult, BoundResult]:
    """Yorke's Hilbert-space bound 2*pi/L and the Banach-space bound 6/L."""
    _check_positive("L", L)
    return (BoundResult(2.0 * math.pi / L, Method.YORKE_HILBERT),
            BoundResult(6.0 / L, Method.BUSENBERG_BANACH))


# ---------------------------------------------------------------- parabolic


def m_beta(beta: float) -> float:
    """Smoothing constant (beta/e)^beta of the analytic semigroup, 1 at beta = 0."""
    _check_beta(beta)
    if beta == 0.0:
        return 1.0
    return math.exp(beta * (math.log(beta) - 1.0))


def incomplete_integral(beta: float, eta):
    """Lower incomplete gamma ``int_0^eta s^(-beta) e^(-s) ds`` for eta in (0, 1).

    Uses the alternating series ``sum (-1)^k eta^(k+1-beta) / (k! (k+1-beta))``,
    so the endpoint singularity never has to be sampled. Accepts scalar or
    array ``eta``.
    """
    _check_beta(beta)
    _check_eta(eta)
    eta_arr = np.asarray(eta, dtype=float)
    if beta == 0.0:
        out = -np.expm1(-eta_arr)
    else:
        lead = eta_arr ** (1.0 - beta)
        power = np.ones_like(eta_arr)  # (-eta)^k / k!
        out = lead / (1.0 - beta)
        k = 0
        while True:
            k += 1
            power = power * (-eta_arr) / k
            term = lead * power / (k + 1.0 - beta)
            out = out + term
            if np.max(np.abs(term)) < _SERIES_CUTOFF or k > 200:
                break
    return float(out) if np.ndim(eta) == 0 else out


def parabolic_H(eta, beta: float):
    """H(eta) = eta^b/(1-eta) + (M_b/eta) (e^-eta + eta^b * int_0^eta s^-b e^-s ds)."""
    _check_eta(eta)
    mb = m_beta(beta)
    eta_arr = np.asarray(eta, dtype=float)
    eb = eta_arr ** beta
    out = eb / (1.0 - eta_arr) + (mb / eta_arr) * (np.exp(-eta_arr) + eb * incomplete_integral(beta, eta_arr))
    return float(out) if np.ndim(eta) == 0 else out


def tilde_H(eta, beta: float):
    """The weaker profile function obtained from the alternative inequality.

    ``eta^b/(1-eta) + M_b / (eta^(1-b) (1-e^-eta)) * int_0^eta s^-b e^-s ds``.
    """
    _check_eta(eta)
    mb = m_beta(beta)
    eta_arr = np.asarray(eta, dtype=float)
    out = (eta_arr ** beta / (1.0 - eta_arr)
           + mb / (eta_arr ** (1.0 - beta) * -np.expm1(-eta_arr)) * incomplete_integral(beta, eta_arr))
    return float(out) if np.ndim(eta) == 0 else out


def k_beta(beta: float, cfg: ScalarMinimizerConfig | None = None) -> tuple[float, float]:
    """Return ``(K_beta, eta_star)`` where K_beta is the minimum of H over (0, 1)."""
    _check_beta(beta)
    res = minimize_unit_interval(lambda x: parabolic_H(x, beta), cfg,
                                 f_vec=lambda xs: parabolic_H(xs, beta))
    return res.fun, res.x


def parabolic_bound(inp: ParabolicBoundInput, cfg: ScalarMinimizerConfig | None = None) -> BoundResult:
    """T >= (L K_beta)^(-1/(1-beta)); equals 1/(4L) for beta = 0."""
    K, eta_star = k_beta(inp.beta, cfg)
    T = (inp.lipschitz_L * K) ** (-1.0 / (1.0 - inp.beta))
    return BoundResult(T, Method.PARABOLIC_KBETA, {"K_beta": K, "eta_star": eta_star})


def closed_form_constant(beta: float) -> float:
    """H(1/2) upper estimate ``2^(1-b) + 2 M_b e^(-1/2) + M_b/(1-b)``."""
    mb = m_beta(beta)
    return 2.0 ** (1.0 - beta) + 2.0 * mb * _E_HALF + mb / (1.0 - beta)


def rvl_constant(beta: float) -> float:
    """Robinson/Vidal-Lopez constant ``2^(1-b) + M_b / ((1-e^(-1/2))(1-b))``."""
    mb = m_beta(beta)
    return 2.0 ** (1.0 - beta) + mb / (-math.expm1(-0.5) * (1.0 - beta))


def parabolic_closed_form_bound(inp: ParabolicBoundInput) -> BoundResult:
    if inp.beta == 0.0:
        raise DomainError("closed-form bound is stated for beta in (0, 1); "
                          "use parabolic_bound for beta = 0 (T >= 1/(4L))")
    c = closed_form_constant(inp.beta)
    p = 1.0 / (1.0 - inp.beta)
    T = 1.0 / (inp.lipschitz_L ** p * c ** p)
    return BoundResult(T, Method.PARABOLIC_CLOSED_FORM, {"constant": c})


def rvl_bound(inp: ParabolicBoundInput) -> BoundResult:
    if inp.beta == 0.0:
        raise DomainError("the Robinson/Vidal-Lopez bound is stated for beta in (0, 1)")
    c = rvl_constant(inp.beta)
    p = 1.0 / (1.0 - inp.beta)
    T = c ** (-p) * inp.lipschitz_L ** (-p)
    return BoundResult(T, Method.PARABOLIC_RVL, {"constant": c})


# ---------------------------------------------------------------- abstract / hyperbolic


def corollary1_bound(L: float, mu0: float, big_M: float) -> BoundResult:
    """``T >= 1/(L (1 + sqrt(M (1 + mu0/L)))^2)`` for m = 1 and K_mu^(+-) <= (1-mu0/mu)^-1."""
    _check_positive("L", L)
    _check_positive("mu0", mu0)
    _check_positive("big_M", big_M)
    C = big_M * (L + mu0)
    sL, sC = math.sqrt(L), math.sqrt(C)
    T = 1.0 / (L * (1.0 + math.sqrt(big_M * (1.0 + mu0 / L))) ** 2)
    return BoundResult(T, Method.COROLLARY1, {
        "C": C, "eta0": sC / (sL + sC), "G0": (sL + sC) ** 2})


def hyperbolic_printed_formula(L: float, alpha: float) -> float:
    """``1/(L(1+sqrt((1+1/sqrt 2)(1+2/(alpha L)))))^2``, kept for comparison only.

    This closed form uses the factor 1 + 1/sqrt(2), which does not match the
    operator constant M = 1 + sqrt(2) the bound is derived from; see
    ``hyperbolic_bound``.
    """
    _check_positive("L", L)
    _check_positive("alpha", alpha)
    return 1.0 / (L * (1.0 + math.sqrt((1.0 + 1.0 / SQRT2) * (1.0 + 2.0 / (alpha * L)))) ** 2)


def hyperbolic_bound(inp: HyperbolicBoundInput) -> BoundResult:
    """Minimal-period bound for ``u'' + alpha A u' + A u = f(u, u')``.

    Obtained from ``corollary1_bound`` with mu0 = 2/alpha and M = 1 + sqrt(2),
    the constants of the spectral decomposition of the damped operator.
    """
    base = corollary1_bound(inp.lipschitz_L, 2.0 / inp.alpha, HYPERBOLIC_M)
    diag = dict(base.diagnostics)
    diag["printed_formula_T"] = hyperbolic_printed_formula(inp.lipschitz_L, inp.alpha)
    return BoundResult(base.lower_bound_T, Method.HYPERBOLIC_MAIN, diag)


# ---------------------------------------------------------------- UHBD certificate


@dataclass(frozen=True)
class ConstantDecay:
    """m(t) = c."""

    c: float = 1.0

    def __post_init__(self):
        _check_positive("c", self.c)

    def __call__(self, t):
        return self.c * np.ones_like(np.asarray(t, dtype=float)) if np.ndim(t) else self.c


@dataclass(frozen=True)
class PowerDecay:
    """m(t) = coef * t^(-exponent); integrable against e^(-mu t) iff exponent < 1."""

    coef: float
    exponent: float

    def __post_init__(self):
        _check_positive("coef", self.coef)
        if not (self.exponent >= 0 and math.isfinite(self.exponent)):
            raise DomainError(f"exponent must be >= 0, got {self.exponent}")

    def __call__(self, t):
        return self.coef * np.asarray(t, dtype=float) ** (-self.exponent) if np.ndim(t) \
            else self.coef * t ** (-self.exponent)


def _quad(func, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(func, a, b, epsabs=1e-13, epsrel=1e-12, limit=200, **kw)
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"quadrature did not converge: {exc}") from exc
    if not math.isfinite(val):
        raise NumericError("quadrature returned a non-finite value")
    return val


def laplace_partial(m, mu: float, T: float) -> float:
    """``int_0^T m(t) e^(-mu t) dt`` by adaptive quadrature.

    Power-law profiles are integrated with an algebraic endpoint weight so
    the singularity at t = 0 is handled by the rule, not sampled.
    """
    if isinstance(m, PowerDecay):
        if m.exponent >= 1.0:
            raise NumericError(f"int_0^t m(s) e^(-mu s) ds diverges for exponent {m.exponent} >= 1")
        if m.exponent == 0.0:
            return _quad(lambda t: m.coef * math.exp(-mu * t), 0.0, T)
        return m.coef * _quad(lambda t: math.exp(-mu * t), 0.0, T, weight="alg", wvar=(-m.exponent, 0.0))
    return _quad(lambda t: float(m(t)) * math.exp(-mu * t), 0.0, T)


def scaled_decay_integral(m, mu: float, T: float) -> float:
    """``int_0^(mu T) m(s/mu) e^(-s) ds`` (= mu * laplace_partial(m, mu, T))."""
    if isinstance(m, PowerDecay):
        if m.exponent >= 1.0:
            raise NumericError(f"int_0^t m(s) e^(-mu s) ds diverges for exponent {m.exponent} >= 1")
        scale = m.coef * mu ** m.exponent
        if m.exponent == 0.0:
            return scale * _quad(lambda s: math.exp(-s), 0.0, mu * T)
        return scale * _quad(lambda s: math.exp(-s), 0.0, mu * T, weight="alg", wvar=(-m.exponent, 0.0))
    return _quad(lambda s: float(m(s / mu)) * math.exp(-s), 0.0, mu * T)


@dataclass(frozen=True)
class UhbdProfile:
    """Constants of a uniformly half-bounded decomposition.

    ``k_plus``/``k_minus`` map mu to the projection norms K_mu^+ and K_mu^-.
    """

    mu0: float
    big_M: float
    decay_m: Callable
    k_plus: Callable[[float], float]
    k_minus: Callable[[float], float]

    def __post_init__(self):
        if not (self.mu0 >= 0 and math.isfinite(self.mu0)):
            raise DomainError(f"mu0 must be >= 0, got {self.mu0}")
        _check_positive("big_M", self.big_M)


def parabolic_profile(beta: float) -> UhbdProfile:
    """Profile of -A for positive self-adjoint A with V = X^beta."""
    _check_beta(beta)
    return UhbdProfile(0.0, 1.0, PowerDecay(m_beta(beta), beta),
                       k_plus=lambda mu: mu ** beta, k_minus=lambda mu: 1.0)


def hyperbolic_profile(alpha: float) -> UhbdProfile:
    """Profile of the strongly damped operator: mu0 = 2/alpha, M = 1 + sqrt 2, m = 1."""
    _check_positive("alpha", alpha)
    mu0 = 2.0 / alpha
    k = lambda mu: 1.0 / (1.0 - mu0 / mu)  # noqa: E731
    return UhbdProfile(mu0, HYPERBOLIC_M, ConstantDecay(1.0), k, k)


def certificate_rhs(profile: UhbdProfile, L: float, T: float, mu: float) -> float:
    """Right-hand side of the abstract inequality at a single mu."""
    m = profile.decay_m
    plus = profile.k_plus(mu) / (1.0 - mu * profile.big_M * T)
    minus = profile.k_minus(mu) / (mu * T) * (math.exp(-mu * T) * float(m(T)) + scaled_decay_integral(m, mu, T))
    return T * L * (plus + minus)


def certificate_rhs_alternative(profile: UhbdProfile, L: float, T: float, mu: float) -> float:
    """Right-hand side of the alternative inequality (factor 1/(1-e^(-mu T)))."""
    m = profile.decay_m
    plus = profile.k_plus(mu) / (1.0 - mu * profile.big_M * T)
    minus = profile.k_minus(mu) / (mu * T * -math.expm1(-mu * T)) * scaled_decay_integral(m, mu, T)
    return T * L * (plus + minus)


@dataclass(frozen=True)
class CertificateResult:
    violated_at: float | None
    rhs_min: float
    mu_at_min: float | None

    @property
    def certifies_nonexistence(self) -> bool:
        return self.violated_at is not None

    def to_dict(self) -> dict:
        return {"violated_at": self.violated_at, "rhs_min": self.rhs_min,
                "mu_at_min": self.mu_at_min, "certifies_nonexistence": self.certifies_nonexistence}


def mu_scan_grid(profile: UhbdProfile, T: float, mu_grid: int = 4096) -> np.ndarray:
    """Logarithmic grid on (mu0, 1/(M T)) with both ends pulled in by 1e-9 * span."""
    hi = 1.0 / (profile.big_M * T)
    span = hi - profile.mu0
    eps = 1e-9 * span
    return np.geomspace(profile.mu0 + eps, hi - eps, mu_grid)


def abstract_certificate(profile: UhbdProfile, L: float, T: float, mu_grid: int = 4096) -> CertificateResult:
    """Scan mu for a violation of the abstract inequality.

    A violation (RHS < 1) at some mu proves that no nonstationary T-periodic
    solution exists for this profile and Lipschitz constant. When
    ``T >= 1/(mu0 M)`` the inequality gives nothing and the result carries
    no violation and ``rhs_min = inf``.
    """
    _check_positive("L", L)
    _check_positive("T", T)
    if mu_grid < 2:
        raise DomainError("mu_grid must be >= 2")
    if profile.mu0 > 0 and T >= 1.0 / (profile.mu0 * profile.big_M):
        return CertificateResult(None, math.inf, None)
    violated = None
    best, best_mu = math.inf, None
    for mu in mu_scan_grid(profile, T, mu_grid):
        mu = float(mu)
        r = certificate_rhs(profile, L, T, mu)
        if r < best:
            best, best_mu = r, mu
        if violated is None and r < 1.0:
            violated = mu
    return CertificateResult(violated, best, best_mu)


def comparison_inequality_check(m, mu: float, T: float, tol: float = 1e-10) -> bool:
    """Does ``int_0^T m e^(-mu t) dt >= m(T)(1 - e^(-mu T))/mu`` hold (up to ``tol``)?"""
    _check_positive("mu", mu)
    _check_positive("T", T)
    lhs = laplace_partial(m, mu, T)
    rhs = float(m(T)) * -math.expm1(-mu * T) / mu
    return lhs >= rhs - tol * max(1.0, abs(rhs))
