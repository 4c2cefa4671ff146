"""Spectral calculus of the strongly damped operator on finite mode systems.

On each eigenmode ``e_k`` of A (eigenvalue ``lam``) the operator
``(u, v) -> (v, -A(alpha v + u))`` acts on coordinates ``(u_k, v_k)`` as the
2x2 block ``[[0, 1], [-lam, -alpha lam]]``. The phase space carries the
weighted norm ``lam |u_k|^2 + |v_k|^2``; conjugating a block by
``diag(sqrt(lam), 1)`` turns every weighted operator norm into an ordinary
2x2 spectral norm.
"""

from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateModeError, DomainError, SingularityError

DOUBLE_ROOT_RTOL = 1e-9
UHBD_M = 1.0 + math.sqrt(2.0)


def _check_pos(name, x):
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"{name} must be positive and finite, got {x!r}")


def critical_lambda(alpha: float) -> float:
    """The eigenvalue (2/alpha)^2 at which the two roots collide."""
    return (2.0 / alpha) ** 2


def is_double_root(lam: float, alpha: float) -> bool:
    lc = critical_lambda(alpha)
    return abs(lam - lc) <= DOUBLE_ROOT_RTOL * lc


class Branch(str, enum.Enum):
    REAL_DISTINCT = "real_distinct"
    COMPLEX_CONJUGATE = "complex_conjugate"
    DOUBLE_ROOT = "double_root"


@dataclass(frozen=True)
class XiPair:
    lam: float
    alpha: float
    xi_minus: complex
    xi_plus: complex
    branch: Branch

    @property
    def discriminant(self) -> float:
        return (self.alpha * self.lam) ** 2 - 4.0 * self.lam


def xi_pair(lam: float, alpha: float) -> XiPair:
    """Roots of ``xi^2 + alpha lam xi + lam = 0``.

    For the real branch ``xi_plus`` is taken from the product identity
    ``xi_minus xi_plus = lam`` to avoid cancellation. Modes within
    ``DOUBLE_ROOT_RTOL`` of (2/alpha)^2 are labelled ``double_root`` but
    still get the exact roots of their own quadratic.
    """
    _check_pos("lambda", lam)
    _check_pos("alpha", alpha)
    al = alpha * lam
    disc = al * al - 4.0 * lam
    if disc > 0:
        xm = complex(-(al + math.sqrt(disc)) / 2.0)
        xp = complex(lam / xm.real)
    elif disc < 0:
        w = math.sqrt(-disc) / 2.0
        xm = complex(-al / 2.0, -w)
        xp = complex(-al / 2.0, w)
    else:
        xm = xp = complex(-al / 2.0)
    if is_double_root(lam, alpha):
        branch = Branch.DOUBLE_ROOT
    elif lam > critical_lambda(alpha):
        branch = Branch.REAL_DISTINCT
    else:
        branch = Branch.COMPLEX_CONJUGATE
    return XiPair(lam, alpha, xm, xp, branch)


def s_map(xi: complex, alpha: float) -> complex:
    """``s(xi) = -xi^2/(1 + alpha xi)``; maps both roots of a mode back to lam."""
    _check_pos("alpha", alpha)
    den = 1.0 + alpha * xi
    if den == 0:
        raise SingularityError(f"s(xi) is undefined at xi = -1/alpha = {-1.0 / alpha}")
    return -xi * xi / den


def elementary_max_i(z: complex) -> float:
    """max |z z1 + z2| over the unit sphere of C^2."""
    return math.sqrt(1.0 + abs(z) ** 2)


def elementary_max_ii(z: complex) -> float:
    """max |z1|^2 + |2 z z1 + z2|^2 over the unit sphere of C^2."""
    a = abs(z)
    return (a + math.sqrt(1.0 + a * a)) ** 2


# ---------------------------------------------------------------- blocks


def block_matrix(lam: float, alpha: float) -> np.ndarray:
    """Coordinates of the damped operator on one mode."""
    return np.array([[0.0, 1.0], [-lam, -alpha * lam]])


def weighted_norm(mat, lam) -> float | np.ndarray:
    """Operator norm of a 2x2 block (or stack of blocks) in ``lam|u|^2 + |v|^2``."""
    mat = np.asarray(mat)
    lam = np.asarray(lam, dtype=float)
    s = np.sqrt(lam)
    conj = mat.astype(complex, copy=True)
    conj[..., 0, 1] = conj[..., 0, 1] * s
    conj[..., 1, 0] = conj[..., 1, 0] / s
    out = np.linalg.norm(conj, ord=2, axis=(-2, -1))
    return float(out) if out.ndim == 0 else out


def g_ratio(r: float) -> float:
    return (1.0 + math.sqrt(1.0 + r)) / r


def block_operator_norm(lam: float, alpha: float) -> float:
    """Closed form ``(2/alpha) g((2/alpha)^2/lam)`` of the per-mode operator norm."""
    _check_pos("lambda", lam)
    _check_pos("alpha", alpha)
    c = 2.0 / alpha
    return c * g_ratio(c * c / lam)


def projection_matrices(pair: XiPair) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate matrices of the mode projections onto the two root lines.

    Double-root modes use the basis (e, 0), (0, e).
    """
    if pair.branch is Branch.DOUBLE_ROOT:
        return np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)
    xm, xp = pair.xi_minus, pair.xi_plus
    d = xp - xm
    p_minus = np.outer([1.0, xm], [xp, -1.0]) / d
    p_plus = np.outer([1.0, xp], [xm, -1.0]) / (-d)
    return p_minus, p_plus


class ProjectionNorm(NamedTuple):
    norm: float
    p_minus: object
    p_plus: object


def split_coefficients(u: complex, v: complex, pair: XiPair) -> tuple[complex, complex]:
    """Coordinates ``(p^-, p^+)`` of ``(u, v)`` in the basis ``e^-``, ``e^+``."""
    if pair.branch is Branch.DOUBLE_ROOT:
        return complex(u), complex(v)
    xm, xp = pair.xi_minus, pair.xi_plus
    return (xp * u - v) / (xp - xm), (xm * u - v) / (xm - xp)


def basis_vectors(pair: XiPair) -> tuple[np.ndarray, np.ndarray]:
    if pair.branch is Branch.DOUBLE_ROOT:
        return np.array([1.0, 0.0], complex), np.array([0.0, 1.0], complex)
    return np.array([1.0, pair.xi_minus]), np.array([1.0, pair.xi_plus])


def projection_norm(lam: float, alpha: float) -> ProjectionNorm:
    """Common norm of the two mode projections plus their coefficient functionals."""
    pair = xi_pair(lam, alpha)
    if pair.branch is Branch.DOUBLE_ROOT:
        raise DegenerateModeError(
            f"lambda = {lam} is the double root (2/alpha)^2; the mode has no eigenbasis split")
    lc = critical_lambda(alpha)
    if lam > lc:
        n = 1.0 / math.sqrt(1.0 - lc / lam)
    else:
        n = 1.0 / math.sqrt(1.0 - lam / lc)
    pm = lambda u, v: split_coefficients(u, v, pair)[0]  # noqa: E731
    pp = lambda u, v: split_coefficients(u, v, pair)[1]  # noqa: E731
    return ProjectionNorm(n, pm, pp)


# ---------------------------------------------------------------- brute-force oracles


def _nested_sphere_grid(samples: int):
    """Unit vectors (cos t, e^{i phi} sin t) of C^2 on a nested product grid.

    The overall phase is dropped (every quantity sampled here is phase
    invariant). Doubling ``samples`` refines one of the two axes by 2, so
    grids are nested and sampled maxima never decrease.
    """
    if samples < 4:
        raise DomainError("samples must be >= 4")
    level = int(math.floor(math.log2(samples)))
    a = (level + 1) // 2
    b = level - a
    n_t, n_p = 2 ** a, 2 ** b
    theta = np.linspace(0.0, math.pi / 2, n_t + 1)
    phi = np.arange(n_p) * (2 * math.pi / n_p)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    return np.cos(t).ravel().astype(complex), (np.exp(1j * p) * np.sin(t)).ravel()


def brute_force_max_i(z: complex, samples: int = 10**6) -> float:
    z1, z2 = _nested_sphere_grid(samples)
    return float(np.max(np.abs(z * z1 + z2)))


def brute_force_max_ii(z: complex, samples: int = 10**6) -> float:
    z1, z2 = _nested_sphere_grid(samples)
    return float(np.max(np.abs(z1) ** 2 + np.abs(2 * z * z1 + z2) ** 2))


def brute_force_projection_norm(lam: float, alpha: float, samples: int = 10**6,
                                side: str = "minus") -> float:
    """Sampled sup of ``|p^(+-)(u, v)| * ||e^(+-)||`` over weighted unit vectors.

    Converges to ``projection_norm`` from below.
    """
    pair = xi_pair(lam, alpha)
    if pair.branch is Branch.DOUBLE_ROOT:
        raise DegenerateModeError("double-root mode has no eigenbasis split")
    z1, z2 = _nested_sphere_grid(samples)
    u, v = z1 / math.sqrt(lam), z2
    pm, pp = split_coefficients(u, v, pair)
    xi = pair.xi_minus if side == "minus" else pair.xi_plus
    coef = pm if side == "minus" else pp
    return float(np.max(np.abs(coef)) * math.sqrt(lam + abs(xi) ** 2))


def brute_force_block_norm(lam: float, alpha: float, samples: int = 10**6) -> float:
    """Sampled sup of ``sqrt(lam (|z1|^2 + |sqrt(lam) alpha z1 + z2|^2))``."""
    z1, z2 = _nested_sphere_grid(samples)
    vals = np.abs(z1) ** 2 + np.abs(math.sqrt(lam) * alpha * z1 + z2) ** 2
    return float(math.sqrt(lam * np.max(vals)))


# ---------------------------------------------------------------- mode systems


@dataclass(frozen=True)
class ModeSystem:
    """Damping ``alpha`` and eigenvalues of A (nondecreasing, repeated by multiplicity)."""

    alpha: float
    lambdas: tuple[float, ...]

    def __post_init__(self):
        _check_pos("alpha", self.alpha)
        lams = tuple(float(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if not lams:
            raise DomainError("a mode system needs at least one eigenvalue")
        for x in lams:
            _check_pos("lambda", x)
        if any(b < a for a, b in zip(lams, lams[1:])):
            raise DomainError("lambdas must be nondecreasing")

    def __len__(self):
        return len(self.lambdas)

    def pairs(self) -> list[XiPair]:
        return [xi_pair(lam, self.alpha) for lam in self.lambdas]

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "lambdas": list(self.lambdas)}

    @classmethod
    def from_dict(cls, data) -> "ModeSystem":
        if not isinstance(data, dict) or set(data) != {"alpha", "lambdas"}:
            raise DomainError("mode system JSON must be an object with exactly 'alpha' and 'lambdas'")
        lams = data["lambdas"]
        if not isinstance(lams, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                                 for x in lams):
            raise DomainError("'lambdas' must be a list of numbers")
        alpha = data["alpha"]
        if not isinstance(alpha, (int, float)) or isinstance(alpha, bool):
            raise DomainError("'alpha' must be a number")
        return cls(float(alpha), tuple(lams))

    @classmethod
    def load(cls, path) -> "ModeSystem":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")


@dataclass(frozen=True)
class BlockVector:
    """Per-mode coordinates ``(u_k, v_k)`` of an element of the phase space."""

    lambdas: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.lambdas * np.abs(self.u) ** 2 + np.abs(self.v) ** 2)))


def inner(lambdas, a: BlockVector, b: BlockVector) -> complex:
    return complex(np.sum(lambdas * a.u * np.conj(b.u) + a.v * np.conj(b.v)))


@dataclass(frozen=True)
class MuDecomposition:
    mu: float
    n_minus: tuple[int, ...]
    n_zero: tuple[int, ...]
    n_plus_real: tuple[int, ...]
    n_plus_complex: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"mu": self.mu, "n_minus": list(self.n_minus), "n_zero": list(self.n_zero),
                "n_plus_real": list(self.n_plus_real), "n_plus_complex": list(self.n_plus_complex)}


def _check_mu(ms: ModeSystem, mu: float):
    if not (math.isfinite(mu) and mu > 2.0 / ms.alpha):
        raise DomainError(f"mu must exceed 2/alpha = {2.0 / ms.alpha}, got {mu!r}")


def mu_decomposition(ms: ModeSystem, mu: float) -> MuDecomposition:
    """Split mode indices by where their roots sit relative to Re z = -mu."""
    _check_mu(ms, mu)
    minus, zero, preal, pcx = [], [], [], []
    for k, pair in enumerate(ms.pairs()):
        if pair.branch is Branch.DOUBLE_ROOT:
            zero.append(k)
        elif pair.branch is Branch.COMPLEX_CONJUGATE:
            pcx.append(k)
        elif pair.xi_minus.real <= -mu:
            minus.append(k)
        else:
            preal.append(k)
    return MuDecomposition(mu, tuple(minus), tuple(zero), tuple(preal), tuple(pcx))


def uhbd_constant_bound(alpha: float, mu: float) -> float:
    return 1.0 / (1.0 - (2.0 / alpha) / mu)


@dataclass(frozen=True)
class ProjectionBoundReport:
    norm_minus: float
    norm_plus: float
    bound: float

    @property
    def holds(self) -> bool:
        slack = self.bound * (1 + 1e-12)
        return self.norm_minus <= slack and self.norm_plus <= slack

    def to_dict(self) -> dict:
        return {"norm_minus": self.norm_minus, "norm_plus": self.norm_plus,
                "bound": self.bound, "holds": self.holds}


def uhbd_projection_bounds(ms: ModeSystem, mu: float,
                           decomposition: MuDecomposition | None = None) -> ProjectionBoundReport:
    """Exact norms of the projections onto the mu-split and their common bound.

    Modes are mutually orthogonal, so each norm is the largest per-mode
    block norm, computed by SVD in the weighted norm.
    """
    _check_mu(ms, mu)
    dec = decomposition or mu_decomposition(ms, mu)
    minus = set(dec.n_minus)
    eye = np.eye(2, dtype=complex)
    blocks_m, blocks_p = [], []
    for k, pair in enumerate(ms.pairs()):
        if k in minus:
            pm, pp = projection_matrices(pair)
        else:
            pm, pp = np.zeros((2, 2), complex), eye
        blocks_m.append(pm)
        blocks_p.append(pp)
    lams = np.array(ms.lambdas)
    nm = float(np.max(weighted_norm(np.array(blocks_m), lams)))
    npl = float(np.max(weighted_norm(np.array(blocks_p), lams)))
    return ProjectionBoundReport(nm, npl, uhbd_constant_bound(ms.alpha, mu))


@dataclass(frozen=True)
class OperatorBoundReport:
    norm_A_on_plus: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.norm_A_on_plus <= self.bound * (1 + 1e-12)

    def to_dict(self) -> dict:
        return {"norm_A_on_plus": self.norm_A_on_plus, "bound": self.bound, "holds": self.holds}


def _weighted_vec_norm(vec, lam):
    return math.sqrt(lam * abs(vec[0]) ** 2 + abs(vec[1]) ** 2)


def uhbd_operator_bound(ms: ModeSystem, mu: float,
                        decomposition: MuDecomposition | None = None) -> OperatorBoundReport:
    """Norm of the operator restricted to the slow part, against ``mu (1 + sqrt 2)``.

    Modes outside ``n_minus`` contribute their whole 2x2 block; modes in
    ``n_minus`` only the line spanned by ``e^+``.
    """
    _check_mu(ms, mu)
    dec = decomposition or mu_decomposition(ms, mu)
    minus = set(dec.n_minus)
    full = [k for k in range(len(ms)) if k not in minus]
    best = 0.0
    if full:
        lams = np.array([ms.lambdas[k] for k in full])
        blocks = np.array([block_matrix(lam, ms.alpha) for lam in lams])
        best = float(np.max(weighted_norm(blocks, lams)))
    for k in dec.n_minus:
        lam = ms.lambdas[k]
        _, e_plus = basis_vectors(xi_pair(lam, ms.alpha))
        image = block_matrix(lam, ms.alpha) @ e_plus
        best = max(best, _weighted_vec_norm(image, lam) / _weighted_vec_norm(e_plus, lam))
    return OperatorBoundReport(best, mu * UHBD_M)


# ---------------------------------------------------------------- semigroup


def block_expm(lam: float, alpha: float, t: float) -> np.ndarray:
    """``exp(t B)`` for one mode block, from its eigenvalues (Jordan form at the double root)."""
    pair = xi_pair(lam, alpha)
    B = block_matrix(lam, alpha).astype(complex)
    eye = np.eye(2, dtype=complex)
    if pair.branch is Branch.DOUBLE_ROOT:
        xi = -alpha * lam / 2.0
        return np.exp(t * xi) * (eye + t * (B - xi * eye))
    xm, xp = pair.xi_minus, pair.xi_plus
    return (cmath.exp(t * xp) * (B - xm * eye) - cmath.exp(t * xm) * (B - xp * eye)) / (xp - xm)


def semigroup_decay_check(ms: ModeSystem, mu: float, t_grid: Sequence[float],
                          decomposition: MuDecomposition | None = None,
                          n_random: int = 64, seed: int = 42) -> bool:
    """Check the fast part decays at rate mu and the form <Aw, w> <= -mu ||w||^2 there.

    Pass a ``decomposition`` to audit a hand-made (possibly wrong) split.
    """
    _check_mu(ms, mu)
    dec = decomposition or mu_decomposition(ms, mu)
    if not dec.n_minus:
        raise DomainError("the fast part is empty for this mu; nothing to check")
    ts = np.asarray(list(t_grid), dtype=float)
    if np.any(ts < 0):
        raise DomainError("t_grid must be nonnegative")
    tol = 1e-12
    for k in dec.n_minus:
        lam = ms.lambdas[k]
        pair = xi_pair(lam, ms.alpha)
        xi = pair.xi_minus
        if not xi.real <= -mu:
            return False
        e_minus, _ = basis_vectors(pair)
        e_norm = _weighted_vec_norm(e_minus, lam)
        for t in ts:
            if abs(cmath.exp(t * xi)) > math.exp(-mu * t):
                return False
            img = block_expm(lam, ms.alpha, float(t)) @ e_minus
            if _weighted_vec_norm(img, lam) > math.exp(-mu * t) * e_norm * (1 + tol) + tol:
                return False
    rng = np.random.default_rng(seed)
    idx = list(dec.n_minus)
    lams = np.array([ms.lambdas[k] for k in idx])
    basis = [basis_vectors(xi_pair(ms.lambdas[k], ms.alpha))[0] for k in idx]
    blocks = [block_matrix(ms.lambdas[k], ms.alpha) for k in idx]
    for _ in range(n_random):
        c = rng.normal(size=len(idx)) + 1j * rng.normal(size=len(idx))
        u = np.array([c[j] * basis[j][0] for j in range(len(idx))])
        v = np.array([c[j] * basis[j][1] for j in range(len(idx))])
        w = BlockVector(lams, u, v)
        img = [blocks[j] @ np.array([u[j], v[j]]) for j in range(len(idx))]
        aw = BlockVector(lams, np.array([x[0] for x in img]), np.array([x[1] for x in img]))
        form = inner(lams, aw, w).real
        nrm2 = w.norm() ** 2
        if form > -mu * nrm2 * (1 - tol):
            return False
    return True
