"""Self-check suite: closed forms against independent oracles, plus property sweeps.

Each check returns ``(ok, detail)``. The quick subset trims sample counts and
grids so the whole run stays well under a minute.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from . import bounds, galerkin, spectral
from .beam import BeamProblem, beam_lipschitz_check, beam_setup

DEFAULT_SEED = 42


def env_seed() -> int:
    raw = os.environ.get("PERIODKIT_SEED", "")
    try:
        return int(raw) if raw.strip() else DEFAULT_SEED
    except ValueError:
        return DEFAULT_SEED


@dataclass(frozen=True)
class Check:
    name: str
    fn: Callable[[np.random.Generator, bool], tuple[bool, dict]]
    in_quick: bool = True


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: dict
    seconds: float

    def to_dict(self) -> dict:
        # wall time is left out so identical runs serialize identically
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


def _k_beta_zero(rng, quick):
    K, eta = bounds.k_beta(0.0)
    b = bounds.parabolic_bound(bounds.ParabolicBoundInput(1.0, 0.0)).lower_bound_T
    return abs(K - 4.0) < 1e-9 and abs(b - 0.25) < 1e-10, {"K0": K, "eta_star": eta, "bound": b}


def _incomplete_gamma(rng, quick):
    worst = 0.0
    for beta in rng.uniform(0.01, 0.99, 20 if quick else 200):
        eta = rng.uniform(1e-3, 1.0)
        ref = special.gammainc(1 - beta, eta) * special.gamma(1 - beta)
        worst = max(worst, abs(bounds.incomplete_integral(beta, eta) - ref) / ref)
    return worst < 1e-12, {"max_rel_err": worst}


def _rvl_dominance(rng, quick):
    betas = np.round(np.arange(0.05, 0.951, 0.05), 2)
    bad = []
    for b in betas:
        inp = bounds.ParabolicBoundInput(1.0, float(b))
        rvl = bounds.rvl_bound(inp).lower_bound_T
        if not (bounds.parabolic_bound(inp).lower_bound_T > rvl
                and bounds.parabolic_closed_form_bound(inp).lower_bound_T > rvl):
            bad.append(float(b))
    return not bad, {"violations": bad}


def _tilde_dominance(rng, quick):
    etas = np.linspace(0.01, 0.99, 99)
    gap = min(float(np.min(bounds.tilde_H(etas, b) - bounds.parabolic_H(etas, b)))
              for b in np.arange(1, 10) / 10)
    flat = float(np.max(np.abs(bounds.tilde_H(etas, 0.0) - bounds.parabolic_H(etas, 0.0))))
    return gap > 0 and flat < 1e-10, {"min_gap": gap, "beta0_diff": flat}


def _spectral_identities(rng, quick):
    worst = 0.0
    for _ in range(200):
        lam = float(10 ** rng.uniform(-2, 3))
        alpha = float(10 ** rng.uniform(-1.5, 1))
        p = spectral.xi_pair(lam, alpha)
        if p.branch is spectral.Branch.DOUBLE_ROOT:
            continue
        for xi in (p.xi_minus, p.xi_plus):
            worst = max(worst, abs(xi * xi + alpha * lam * xi + lam) / max(lam, abs(xi) ** 2))
            worst = max(worst, abs(spectral.s_map(xi, alpha) - lam) / lam)
        worst = max(worst, abs(p.xi_minus + p.xi_plus + alpha * lam) / (alpha * lam))
        worst = max(worst, abs(p.xi_minus * p.xi_plus - lam) / lam)
    return worst < 1e-10, {"max_rel_residual": worst}


def _projection_oracle(rng, quick):
    n, samples = (6, 10**5) if quick else (50, 10**6)
    worst = 0.0
    for i in range(n):
        alpha = float(10 ** rng.uniform(-0.5, 0.5))
        lc = spectral.critical_lambda(alpha)
        lam = lc * float(10 ** rng.uniform(0.1, 1.0)) if i % 2 else lc * float(10 ** rng.uniform(-1.0, -0.1))
        pn = spectral.projection_norm(lam, alpha)
        for side in ("minus", "plus"):
            bf = spectral.brute_force_projection_norm(lam, alpha, samples, side)
            worst = max(worst, abs(pn.norm - bf))
    return worst < 2e-3, {"max_abs_err": worst, "instances": n, "samples": samples}


def _block_norm_oracle(rng, quick):
    worst, above = 0.0, False
    for _ in range(5 if quick else 20):
        lam = float(10 ** rng.uniform(-1, 2))
        alpha = float(10 ** rng.uniform(-1, 0.5))
        cf = spectral.block_operator_norm(lam, alpha)
        svd = spectral.weighted_norm(spectral.block_matrix(lam, alpha), lam)
        bf = spectral.brute_force_block_norm(lam, alpha, 10**5)
        above |= bf > cf * (1 + 1e-12) or abs(cf - svd) > 1e-12 * cf
        worst = max(worst, (cf - bf) / cf)
    return worst < 2e-3 and not above, {"max_rel_gap": worst, "oracle_exceeded": above}


def random_mode_system(rng, n_max=12):
    alpha = float(10 ** rng.uniform(-1, 1))
    lc = spectral.critical_lambda(alpha)
    lams = np.sort(lc * 10 ** rng.uniform(-2, 2, int(rng.integers(1, n_max + 1))))
    return spectral.ModeSystem(alpha, tuple(float(x) for x in lams))


def _uhbd(rng, quick):
    n = 100 if quick else 1000
    violations = 0
    decay_checked = 0
    for _ in range(n):
        ms = random_mode_system(rng)
        mu = 2.0 / ms.alpha * float(1 + 10 ** rng.uniform(-2, 1))
        if not spectral.uhbd_projection_bounds(ms, mu).holds:
            violations += 1
        if not spectral.uhbd_operator_bound(ms, mu).holds:
            violations += 1
        if spectral.mu_decomposition(ms, mu).n_minus:
            decay_checked += 1
            if not spectral.semigroup_decay_check(ms, mu, np.linspace(0, 5 / mu, 6), n_random=8,
                                                  seed=int(rng.integers(2**31))):
                violations += 1
    return violations == 0, {"systems": n, "violations": violations, "decay_checked": decay_checked}


def _hyperbolic_equivalence(rng, quick):
    worst = 0.0
    for L in np.geomspace(0.01, 100, 20):
        for a in np.geomspace(0.01, 100, 20):
            h = bounds.hyperbolic_bound(bounds.HyperbolicBoundInput(float(L), float(a))).lower_bound_T
            c = bounds.corollary1_bound(float(L), 2.0 / a, bounds.HYPERBOLIC_M).lower_bound_T
            worst = max(worst, abs(h - c) / c)
    return worst <= 1e-14, {"max_rel_diff": worst}


def _grid_instantiation(rng, quick):
    orbits = galerkin.parabolic_grid_orbits() + galerkin.hyperbolic_grid_orbits()
    reports = [galerkin.verify_bound(o) for o in orbits]
    failed = sum(not r.passed for r in reports)
    sim = orbits if not quick else [orbits[i] for i in rng.choice(len(orbits), 40, replace=False)]
    obs = galerkin.integrate_many(sim)
    exact = np.array([o.period_exact for o in sim])
    err = float(np.max(np.abs(obs - exact) / exact))
    return failed == 0 and err < 1e-3, {"orbits": len(orbits), "violations": failed,
                                        "simulated": len(sim), "max_period_rel_err": err,
                                        "min_margin": min(r.margin for r in reports)}


def _tamper_control(rng, quick):
    # an understated L must push the bound above the true period; the
    # parabolic bound scales like 1/L, the hyperbolic one saturates as L -> 0
    o = galerkin.make_parabolic_orbit(4.0, 2.0, 1.0, 0.0)
    r = galerkin.verify_bound(o, lipschitz=o.lipschitz_exact / (10 * galerkin.verify_bound(o).margin))
    return not r.passed, {"tampered_margin": r.margin}


def _beam(rng, quick):
    prob = BeamProblem(math.pi, 1.0, 1.0, 1.0)
    setup = beam_setup(prob)
    lt_ok = abs(setup.l_tilde - 3 * math.sqrt(2)) < 1e-12
    h = bounds.hyperbolic_bound(bounds.HyperbolicBoundInput(3 * math.sqrt(2), 1.0)).lower_bound_T
    lip = beam_lipschitz_check(prob, 1000 if quick else 10_000, seed=int(rng.integers(2**31)))
    ok = abs(setup.lambda1_fd - 1.0) < 1e-3 and lt_ok and abs(setup.bound.lower_bound_T - h) <= 1e-14 * h and lip
    return ok, {"lambda1_fd": setup.lambda1_fd, "l_tilde": setup.l_tilde, "bound": setup.bound.lower_bound_T,
                "lipschitz_check": lip}


def _certificate(rng, quick):
    bad = []
    for beta in (0.0, 0.25, 0.5, 0.75):
        b = bounds.parabolic_bound(bounds.ParabolicBoundInput(1.0, beta)).lower_bound_T
        prof = bounds.parabolic_profile(beta)
        lo = bounds.abstract_certificate(prof, 1.0, 0.8 * b, 1024 if quick else 4096)
        hi = bounds.abstract_certificate(prof, 1.0, 1.2 * b, 1024 if quick else 4096)
        if not lo.certifies_nonexistence or hi.certifies_nonexistence:
            bad.append(beta)
    return not bad, {"failed_betas": bad}


CHECKS = (
    Check("k_beta_zero", _k_beta_zero),
    Check("incomplete_gamma_oracle", _incomplete_gamma),
    Check("rvl_dominance", _rvl_dominance),
    Check("tilde_H_dominance", _tilde_dominance),
    Check("spectral_identities", _spectral_identities),
    Check("projection_norm_oracle", _projection_oracle),
    Check("block_norm_oracle", _block_norm_oracle),
    Check("uhbd_bounds", _uhbd),
    Check("hyperbolic_corollary_equivalence", _hyperbolic_equivalence),
    Check("grid_instantiation", _grid_instantiation),
    Check("tamper_negative_control", _tamper_control),
    Check("beam_pipeline", _beam),
    Check("certificate_consistency", _certificate),
)


def run_suite(quick: bool = False, seed: int | None = None) -> list[CheckOutcome]:
    """Run every check in a fixed order, each with its own seeded generator."""
    seed = env_seed() if seed is None else seed
    out = []
    for i, chk in enumerate(CHECKS):
        if quick and not chk.in_quick:
            continue
        rng = np.random.default_rng([seed, i])
        t0 = time.perf_counter()
        try:
            ok, detail = chk.fn(rng, quick)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        out.append(CheckOutcome(chk.name, bool(ok), detail, time.perf_counter() - t0))
    return out
