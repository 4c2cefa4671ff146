"""Strongly damped beam: eigenvalues of u'''' and the effective Lipschitz constant.

Hinged ends give ``lam_k = (k pi / l)^4``. Clamped ends give ``lam_k = kappa_k^4``
with ``cos(kappa l) cosh(kappa l) = 1``, solved by bisection. Finite-difference
eigensolvers serve as independent checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg, optimize

from .bounds import BoundResult, HyperbolicBoundInput, hyperbolic_bound
from .errors import DomainError, NumericError
from .spectral import ModeSystem


class Boundary(str, enum.Enum):
    HINGED = "hinged"
    CLAMPED = "clamped"


@dataclass(frozen=True)
class BeamProblem:
    length_l: float
    alpha: float
    beta_damp: float
    lipschitz_h: float
    boundary: Boundary = Boundary.HINGED
    n_modes: int = 16

    def __post_init__(self):
        for name in ("length_l", "alpha", "lipschitz_h"):
            x = getattr(self, name)
            if not (math.isfinite(x) and x > 0):
                raise DomainError(f"{name} must be positive, got {x!r}")
        if not (math.isfinite(self.beta_damp) and self.beta_damp >= 0):
            raise DomainError(f"beta_damp must be >= 0, got {self.beta_damp!r}")
        if self.n_modes < 1:
            raise DomainError("n_modes must be >= 1")
        object.__setattr__(self, "boundary", Boundary(self.boundary))


def hinged_eigenvalues(length_l: float, n: int) -> np.ndarray:
    k = np.arange(1, n + 1)
    return (k * math.pi / length_l) ** 4


def clamped_roots(length_l: float, n: int, xtol: float = 1e-12) -> np.ndarray:
    """Roots ``kappa_k`` of ``cos(kappa l) cosh(kappa l) = 1``, k = 1..n.

    Each root of ``cos x = 1/cosh x`` lies in ``(k pi, (k+1) pi)``, where the
    function changes sign.
    """
    f = lambda x: math.cos(x) - 1.0 / math.cosh(x)  # noqa: E731
    roots = []
    for k in range(1, n + 1):
        a, b = k * math.pi, (k + 1) * math.pi
        try:
            x = optimize.bisect(f, a, b, xtol=xtol, maxiter=200)
        except (ValueError, RuntimeError) as exc:
            raise NumericError(f"bisection failed for clamped mode {k}: {exc}") from exc
        roots.append(x / length_l)
    return np.array(roots)


def clamped_eigenvalues(length_l: float, n: int) -> np.ndarray:
    return clamped_roots(length_l, n) ** 4


def _second_difference(n_inner: int, h: float) -> np.ndarray:
    return (np.diag(-2.0 * np.ones(n_inner)) + np.diag(np.ones(n_inner - 1), 1)
            + np.diag(np.ones(n_inner - 1), -1)) / h ** 2


def fd_eigenvalues(length_l: float, boundary: Boundary, n_grid: int = 2048, k: int = 4) -> np.ndarray:
    """Smallest ``k`` eigenvalues of a finite-difference u'''' on ``n_grid`` intervals.

    Hinged: square of the Dirichlet second difference (u = u'' = 0 at the
    ends). Clamped: pentadiagonal stencil with ghost points mirrored
    (u = u' = 0 at the ends).
    """
    h = length_l / n_grid
    m = n_grid - 1
    if Boundary(boundary) is Boundary.HINGED:
        D2 = _second_difference(m, h)
        D4 = D2 @ D2
    else:
        D4 = (np.diag(6.0 * np.ones(m)) + np.diag(-4.0 * np.ones(m - 1), 1) + np.diag(-4.0 * np.ones(m - 1), -1)
              + np.diag(np.ones(m - 2), 2) + np.diag(np.ones(m - 2), -2))
        D4[0, 0] += 1.0
        D4[-1, -1] += 1.0
        D4 /= h ** 4
    bands = np.zeros((3, m))
    for j in range(3):
        bands[j, :m - j] = np.diagonal(D4, -j)
    vals = linalg.eigvals_banded(bands, lower=True, select="i", select_range=(0, k - 1))
    return np.sort(vals)


def l_tilde(L: float, beta_damp: float, lambda1: float) -> float:
    """``sqrt 2 L (1 + max(lam1^-1/4 + lam1^-1/2, beta/L))``."""
    return math.sqrt(2.0) * L * (1.0 + max(lambda1 ** -0.25 + lambda1 ** -0.5, beta_damp / L))


@dataclass(frozen=True)
class BeamSetup:
    mode_system: ModeSystem
    lambda1: float
    l_tilde: float
    bound: BoundResult
    lambda1_fd: float

    def to_dict(self) -> dict:
        return {"mode_system": self.mode_system.to_dict(), "lambda1": self.lambda1,
                "lambda1_fd": self.lambda1_fd, "l_tilde": self.l_tilde, "bound": self.bound.to_dict()}


def beam_eigenvalues(problem: BeamProblem) -> np.ndarray:
    if problem.boundary is Boundary.HINGED:
        return hinged_eigenvalues(problem.length_l, problem.n_modes)
    return clamped_eigenvalues(problem.length_l, problem.n_modes)


def beam_setup(problem: BeamProblem, fd_grid: int = 2048, fd_rtol: float = 1e-3) -> BeamSetup:
    """Mode system, effective Lipschitz constant and period bound for a beam.

    The smallest eigenvalue is cross-checked against the finite-difference
    solver; a relative mismatch above ``fd_rtol`` raises NumericError.
    """
    lams = beam_eigenvalues(problem)
    lam1 = float(lams[0])
    lam1_fd = float(fd_eigenvalues(problem.length_l, problem.boundary, fd_grid, k=1)[0])
    if abs(lam1_fd - lam1) > fd_rtol * lam1:
        raise NumericError(f"lambda_1 = {lam1} disagrees with finite differences ({lam1_fd})")
    lt = l_tilde(problem.lipschitz_h, problem.beta_damp, lam1)
    ms = ModeSystem(problem.alpha, tuple(float(x) for x in lams))
    return BeamSetup(ms, lam1, lt, hyperbolic_bound(HyperbolicBoundInput(lt, problem.alpha)), lam1_fd)


# ---------------------------------------------------------------- Lipschitz check


def _clamped_modes(x, kappa, l):
    """Clamped eigenfunction and its first two derivatives, unnormalized.

    ``phi = cosh(kx) - cos(kx) - s (sinh(kx) - sin(kx))`` is rewritten with
    decaying exponentials so large ``kappa`` does not cancel catastrophically.
    """
    kl = kappa * l
    # 1 - s = (cos kl - sin kl - e^-kl) / (sinh kl - sin kl), kept in scaled form
    num = math.cos(kl) - math.sin(kl) - math.exp(-kl)
    scale = 2.0 / (1.0 - math.exp(-2 * kl) - 2.0 * math.sin(kl) * math.exp(-kl))
    s = 1.0 - num * scale * math.exp(-kl)
    y = kappa * x
    # cosh y - s sinh y = e^-y (1+s)/2 + e^y (1-s)/2
    decay = np.exp(-y) * (1.0 + s) / 2.0
    g = num * scale * np.exp(y - kl) / 2.0
    c, sn = np.cos(y), np.sin(y)
    phi = decay + g - c + s * sn
    dphi = kappa * (-decay + g + sn + s * c)
    ddphi = kappa ** 2 * (decay + g + c - s * sn)
    return phi, dphi, ddphi


def mode_functions(problem: BeamProblem, x: np.ndarray):
    """Orthonormal eigenfunctions with first and second derivatives on grid ``x``."""
    l = problem.length_l
    n = problem.n_modes
    phi = np.empty((n, len(x)))
    d1 = np.empty_like(phi)
    d2 = np.empty_like(phi)
    if problem.boundary is Boundary.HINGED:
        c = math.sqrt(2.0 / l)
        for k in range(n):
            q = (k + 1) * math.pi / l
            phi[k] = c * np.sin(q * x)
            d1[k] = c * q * np.cos(q * x)
            d2[k] = -c * q * q * np.sin(q * x)
    else:
        for k, kappa in enumerate(clamped_roots(l, n)):
            p, dp, ddp = _clamped_modes(x, kappa, l)
            nrm = math.sqrt(integrate.simpson(p * p, x=x))
            phi[k], d1[k], d2[k] = p / nrm, dp / nrm, ddp / nrm
    return phi, d1, d2


def _forcing_gram(problem: BeamProblem, h_kind: str, n_grid: int = 8193):
    """Gram matrix of ``f`` applied to the coefficient basis of (u, v).

    ``f(u, v) = h(u, v, u_x, u_xx) - beta v`` with the test nonlinearity
    ``h = L (z1 + z2 + z3 + z4) / 2`` (or h = 0); both are linear, so
    ``||f(c)||^2 = c^T G c`` for the stacked coefficient vector ``c``.
    """
    x = np.linspace(0.0, problem.length_l, n_grid)
    phi, d1, d2 = mode_functions(problem, x)
    Lh = problem.lipschitz_h if h_kind == "linear" else 0.0
    if h_kind not in ("linear", "zero"):
        raise DomainError(f"unknown test nonlinearity {h_kind!r}")
    from_u = Lh / 2.0 * (phi + d1 + d2)
    from_v = (Lh / 2.0 - problem.beta_damp) * phi
    basis = np.vstack([from_u, from_v])
    G = integrate.simpson(basis[:, None, :] * basis[None, :, :], x=x, axis=-1)
    return 0.5 * (G + G.T)


def beam_lipschitz_ratios(problem: BeamProblem, samples: int = 10_000, seed: int = 42,
                          h_kind: str = "linear") -> tuple[np.ndarray, float]:
    """Ratios ``||f(w1) - f(w2)|| / ||w1 - w2||`` for random mode-truncated pairs, and L-tilde."""
    setup = beam_setup(problem)
    lams = np.array(setup.mode_system.lambdas)
    G = _forcing_gram(problem, h_kind)
    rng = np.random.default_rng(seed)
    n = problem.n_modes
    # random differences, with per-draw mode scalings so both low and high modes dominate sometimes
    a = rng.normal(size=(samples, n)) * lams ** (-0.5 * rng.uniform(0, 1.5, size=(samples, 1)))
    b = rng.normal(size=(samples, n)) * rng.uniform(0, 2, size=(samples, 1))
    c = np.hstack([a, b])
    num = np.sqrt(np.einsum("si,ij,sj->s", c, G, c))
    den = np.sqrt(np.sum(lams * a * a, axis=1) + np.sum(b * b, axis=1))
    return num / den, setup.l_tilde


def beam_lipschitz_check(problem: BeamProblem, samples: int = 10_000, seed: int = 42,
                         h_kind: str = "linear") -> bool:
    """True when no sampled pair violates ``||f(w1)-f(w2)|| <= L_tilde ||w1-w2||``."""
    if samples < 100:
        raise DomainError("samples must be >= 100")
    ratios, lt = beam_lipschitz_ratios(problem, samples, seed, h_kind)
    return bool(np.all(ratios <= lt * (1 + 1e-12)))
