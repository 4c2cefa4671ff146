"""Manufactured periodic orbits on two-mode Galerkin truncations.

Both coordinates of a rotation orbit share one eigenvalue ``lam`` of A, and
the nonlinearity is a linear skew coupling chosen so the exact solution is
``amplitude * (cos wt, sin wt)``. Period and Lipschitz constant are then
known exactly in the phase-space norms, which makes every period bound
directly checkable. RK4 plus a Poincare section recovers the period
numerically.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from .bounds import BoundResult, HyperbolicBoundInput, ParabolicBoundInput, hyperbolic_bound, parabolic_bound
from .errors import DetectionError, DomainError
from .spectral import block_expm

# Bound-instantiation grids. Hyperbolic ranges keep alpha*lam/omega <= 200,
# so RK4 at dt = period/2000 stays inside its stability region on the stiff
# root (|xi_minus| <= alpha*lam).
PARABOLIC_GRID = {
    "lam": tuple(float(x) for x in np.geomspace(0.5, 50.0, 10)),
    "omega": tuple(float(x) for x in np.geomspace(0.5, 20.0, 10)),
    "beta": (0.0, 0.2, 0.4, 0.6, 0.8),
}
HYPERBOLIC_GRID = {
    "lam": tuple(float(x) for x in np.geomspace(0.5, 50.0, 10)),
    "omega": tuple(float(x) for x in np.geomspace(0.5, 20.0, 10)),
    "alpha": (0.1, 0.25, 0.5, 1.0, 2.0),
}

_J = np.array([[0.0, -1.0], [1.0, 0.0]])


class OrbitKind(str, enum.Enum):
    PARABOLIC = "parabolic_rotation"
    HYPERBOLIC = "hyperbolic_rotation"


@dataclass(frozen=True)
class OrbitSpec:
    """A rotation orbit with known period.

    Parabolic state is ``(u1, u2)``; hyperbolic state is ``(u1, v1, u2, v2)``.
    """

    kind: OrbitKind
    lam: float
    omega: float
    amplitude: float = 1.0
    beta: float = 0.0
    alpha: float | None = None

    @property
    def period_exact(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def lipschitz_exact(self) -> float:
        lam, w = self.lam, self.omega
        if self.kind is OrbitKind.PARABOLIC:
            # |lam I + w J| = sqrt(lam^2 + w^2); |u|_beta = lam^beta |u| on the eigenspace
            return math.hypot(lam, w) / lam ** self.beta
        return math.sqrt((lam - w * w) ** 2 / lam + (self.alpha * lam) ** 2)

    @property
    def dim(self) -> int:
        return 2 if self.kind is OrbitKind.PARABOLIC else 4

    def linear_matrix(self) -> np.ndarray:
        """Matrix of the linear part (-A, resp. the damped block operator)."""
        lam = self.lam
        if self.kind is OrbitKind.PARABOLIC:
            return -lam * np.eye(2)
        B = np.array([[0.0, 1.0], [-lam, -self.alpha * lam]])
        return np.kron(np.eye(2), B)

    def nonlinearity_matrix(self) -> np.ndarray:
        """Matrix of the (linear) coupling term f, embedded in state space."""
        lam, w = self.lam, self.omega
        if self.kind is OrbitKind.PARABOLIC:
            return lam * np.eye(2) + w * _J
        F = np.array([[0.0, 0.0], [lam - w * w, self.alpha * lam]])
        return np.kron(np.eye(2), F)

    def rhs(self, z: np.ndarray) -> np.ndarray:
        return z @ self.linear_matrix().T + z @ self.nonlinearity_matrix().T

    def exact_state(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        a, w = self.amplitude, self.omega
        c, s = a * np.cos(w * t), a * np.sin(w * t)
        if self.kind is OrbitKind.PARABOLIC:
            return np.stack([c, s], axis=-1)
        return np.stack([c, -w * s, s, w * c], axis=-1)

    def split_uv(self, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-mode ``(u, v)``; for parabolic orbits ``v`` is the time derivative."""
        if self.kind is OrbitKind.PARABOLIC:
            return states, self.rhs(states)
        return states[..., 0::2], states[..., 1::2]


def _check_pos(name, x):
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
        raise DomainError(f"{name} must be positive and finite, got {x!r}")


def make_parabolic_orbit(lam: float, omega: float, amplitude: float = 1.0, beta: float = 0.0) -> OrbitSpec:
    for name, x in (("lambda", lam), ("omega", omega), ("amplitude", amplitude)):
        _check_pos(name, x)
    if not (0.0 <= beta < 1.0):
        raise DomainError(f"beta must lie in [0, 1), got {beta!r}")
    return OrbitSpec(OrbitKind.PARABOLIC, float(lam), float(omega), float(amplitude), beta=float(beta))


def make_hyperbolic_orbit(lam: float, omega: float, amplitude: float = 1.0, alpha: float = 1.0) -> OrbitSpec:
    for name, x in (("lambda", lam), ("omega", omega), ("amplitude", amplitude), ("alpha", alpha)):
        _check_pos(name, x)
    return OrbitSpec(OrbitKind.HYPERBOLIC, float(lam), float(omega), float(amplitude), alpha=float(alpha))


# ---------------------------------------------------------------- simulation


class Integrator(str, enum.Enum):
    RK4 = "rk4"


@dataclass(frozen=True)
class SimConfig:
    dt: float
    t_max: float
    integrator: Integrator = Integrator.RK4
    poincare_tol: float = 1e-3

    def __post_init__(self):
        _check_pos("dt", self.dt)
        _check_pos("t_max", self.t_max)
        _check_pos("poincare_tol", self.poincare_tol)

    @classmethod
    def for_orbit(cls, orbit: OrbitSpec, steps_per_period: int = 2000, periods: float = 2.5,
                  poincare_tol: float = 1e-3) -> "SimConfig":
        P = orbit.period_exact
        return cls(P / steps_per_period, periods * P, Integrator.RK4, poincare_tol)


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    u: np.ndarray  # (n_steps, n_modes)
    v: np.ndarray

    def to_csv(self, path) -> None:
        n_modes = self.u.shape[1]
        header = ["t"]
        for k in range(n_modes):
            header += [f"u{k + 1}", f"v{k + 1}"]
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for i, t in enumerate(self.t):
                row = [repr(float(t))]
                for k in range(n_modes):
                    row += [repr(float(self.u[i, k])), repr(float(self.v[i, k]))]
                w.writerow(row)


@dataclass(frozen=True)
class SimulationResult:
    trajectory: Trajectory
    states: np.ndarray
    observed_period: float
    crossings: np.ndarray = field(repr=False)


def _rk4_batch(K: np.ndarray, z0: np.ndarray, dt: np.ndarray, steps: int) -> np.ndarray:
    """Fixed-step RK4 for a batch of linear systems ``z' = K z``; returns all states."""
    z = z0.copy()
    h = dt[:, None]
    out = np.empty((steps + 1,) + z.shape)
    out[0] = z
    for i in range(steps):
        k1 = np.einsum("nij,nj->ni", K, z)
        k2 = np.einsum("nij,nj->ni", K, z + 0.5 * h * k1)
        k3 = np.einsum("nij,nj->ni", K, z + 0.5 * h * k2)
        k4 = np.einsum("nij,nj->ni", K, z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = z
    return out


def _section_index(orbit: OrbitSpec) -> int:
    return 1 if orbit.kind is OrbitKind.PARABOLIC else 2


def _section_rate_index(orbit: OrbitSpec) -> int | None:
    return None if orbit.kind is OrbitKind.PARABOLIC else 3


def poincare_crossings(t: np.ndarray, x: np.ndarray, rate: np.ndarray | None = None) -> np.ndarray:
    """Times where ``x`` crosses 0 upward, refined by linear interpolation."""
    idx = np.nonzero((x[:-1] < 0.0) & (x[1:] >= 0.0))[0]
    if rate is not None:
        idx = idx[(rate[idx] > 0) | (rate[idx + 1] > 0)]
    x0, x1 = x[idx], x[idx + 1]
    frac = -x0 / (x1 - x0)
    return t[idx] + frac * (t[idx + 1] - t[idx])


def period_from_crossings(crossings: np.ndarray) -> float:
    if len(crossings) < 2:
        raise DetectionError(f"need two section crossings, found {len(crossings)}")
    return float(np.mean(np.diff(crossings)))


def integrate(orbit: OrbitSpec, cfg: SimConfig | None = None) -> SimulationResult:
    """RK4 from the exact initial state; period measured on ``{u2 = 0, u2' > 0}``."""
    cfg = cfg or SimConfig.for_orbit(orbit)
    if not cfg.dt < orbit.period_exact / 100.0:
        raise DomainError(f"dt = {cfg.dt} must be below period/100 = {orbit.period_exact / 100.0}")
    steps = int(math.ceil(cfg.t_max / cfg.dt))
    K = (orbit.linear_matrix() + orbit.nonlinearity_matrix())[None]
    z0 = orbit.exact_state(0.0)[None]
    states = _rk4_batch(K, z0, np.array([cfg.dt]), steps)[:, 0, :]
    t = np.arange(steps + 1) * cfg.dt
    u, v = orbit.split_uv(states)
    ri = _section_rate_index(orbit)
    rate = states[:, ri] if ri is not None else v[:, 1]
    crossings = poincare_crossings(t, states[:, _section_index(orbit)], rate)
    period = period_from_crossings(crossings)
    return SimulationResult(Trajectory(t, u, v), states, period, crossings)


def integrate_many(orbits: Sequence[OrbitSpec], steps_per_period: int = 2000,
                   periods: float = 2.5) -> np.ndarray:
    """Observed periods for many orbits at once (one vectorized RK4 per orbit kind)."""
    result = np.empty(len(orbits))
    for kind in OrbitKind:
        sel = [i for i, o in enumerate(orbits) if o.kind is kind]
        if not sel:
            continue
        group = [orbits[i] for i in sel]
        K = np.array([o.linear_matrix() + o.nonlinearity_matrix() for o in group])
        z0 = np.array([o.exact_state(0.0) for o in group])
        dt = np.array([o.period_exact / steps_per_period for o in group])
        steps = int(math.ceil(periods * steps_per_period))
        hist = _rk4_batch(K, z0, dt, steps)
        si = _section_index(group[0])
        for j, (i, o) in enumerate(zip(sel, group)):
            t = np.arange(steps + 1) * dt[j]
            ri = _section_rate_index(o)
            rate = hist[:, j, ri] if ri is not None else (hist[:, j, :] @ (o.linear_matrix()
                                                                           + o.nonlinearity_matrix()).T)[:, 1]
            result[i] = period_from_crossings(poincare_crossings(t, hist[:, j, si], rate))
    return result


def duhamel_residual(orbit: OrbitSpec, sim: SimulationResult, i0: int, i1: int) -> float:
    """Norm of ``z(t) - S(t-t0) z(t0) - int_t0^t S(t-s) F(z(s)) ds`` along a simulated path.

    ``S`` is the semigroup of the linear part, evaluated in closed form per
    mode; the integral uses the trapezoid rule on the stored samples.
    """
    if not 0 <= i0 < i1 < len(sim.trajectory.t):
        raise DomainError("need 0 <= i0 < i1 < number of samples")
    t = sim.trajectory.t
    z = sim.states
    Fm = orbit.nonlinearity_matrix()
    t1 = t[i1]
    if orbit.kind is OrbitKind.PARABOLIC:
        def S(tau):
            return math.exp(-orbit.lam * tau) * np.eye(2)
    else:
        def S(tau):
            blk = block_expm(orbit.lam, orbit.alpha, tau).real
            return np.kron(np.eye(2), blk)
    free = S(t1 - t[i0]) @ z[i0]
    vals = np.array([S(t1 - t[j]) @ (Fm @ z[j]) for j in range(i0, i1 + 1)])
    integral = trapezoid(vals, t[i0:i1 + 1], axis=0)
    r = z[i1] - free - integral
    if orbit.kind is OrbitKind.PARABOLIC:
        return float(np.linalg.norm(r))
    lam = orbit.lam
    return float(math.sqrt(lam * (r[0] ** 2 + r[2] ** 2) + r[1] ** 2 + r[3] ** 2))


# ---------------------------------------------------------------- bound verification


@dataclass(frozen=True)
class VerificationReport:
    period_exact: float
    lipschitz_exact: float
    bound: float
    margin: float
    passed: bool
    observed_period: float | None = None

    def to_dict(self) -> dict:
        return {"period_exact": self.period_exact, "observed_period": self.observed_period,
                "lipschitz_exact": self.lipschitz_exact, "bound": self.bound,
                "margin": self.margin, "pass": self.passed}


def orbit_bound(orbit: OrbitSpec, lipschitz: float | None = None) -> BoundResult:
    L = orbit.lipschitz_exact if lipschitz is None else lipschitz
    if orbit.kind is OrbitKind.PARABOLIC:
        return parabolic_bound(ParabolicBoundInput(L, orbit.beta))
    return hyperbolic_bound(HyperbolicBoundInput(L, orbit.alpha))


def verify_bound(orbit: OrbitSpec, lipschitz: float | None = None,
                 observed_period: float | None = None) -> VerificationReport:
    """Compare the exact period against the kind-appropriate lower bound.

    ``lipschitz`` overrides the exact constant (used to tamper with the
    harness in self-tests).
    """
    L = orbit.lipschitz_exact if lipschitz is None else lipschitz
    b = orbit_bound(orbit, L).lower_bound_T
    margin = orbit.period_exact / b
    return VerificationReport(orbit.period_exact, L, b, margin, margin >= 1.0, observed_period)


def parabolic_grid_orbits(grid: dict = PARABOLIC_GRID) -> list[OrbitSpec]:
    return [make_parabolic_orbit(lam, w, 1.0, b)
            for lam in grid["lam"] for w in grid["omega"] for b in grid["beta"]]


def hyperbolic_grid_orbits(grid: dict = HYPERBOLIC_GRID) -> list[OrbitSpec]:
    return [make_hyperbolic_orbit(lam, w, 1.0, a)
            for lam in grid["lam"] for w in grid["omega"] for a in grid["alpha"]]
