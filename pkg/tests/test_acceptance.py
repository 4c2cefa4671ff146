"""Acceptance criteria 1-10. Each test prints one PASS/FAIL line with its measurements."""

import cmath
import math
import time

import numpy as np

from periodkit import bounds, galerkin, spectral
from periodkit.beam import BeamProblem, beam_lipschitz_check, beam_setup, fd_eigenvalues
from periodkit.bounds import HyperbolicBoundInput, ParabolicBoundInput

SEED = 42

# pinned tolerances
TOL_K0 = 1e-9
TOL_QUARTER = 1e-10
TOL_TILDE_FLAT = 1e-10
TOL_SPECTRAL = 1e-10
TOL_PROJ_ORACLE = 2e-3
TOL_HYP_EQUIV = 1e-14
TOL_PERIOD = 1e-3
TOL_BEAM_FD = 1e-3
TOL_L_TILDE = 1e-12
TOL_BEAM_BOUND = 1e-14

# runtime budgets, seconds
BUDGET = {1: 1, 2: 5, 3: 5, 4: 1, 5: 60, 6: 30, 7: 120, 8: 1, 9: 30, 10: 10}


def report(log, n, ok, elapsed, detail):
    within = elapsed < BUDGET[n]
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {n:2d}: {status}  ({elapsed:.2f}s / {BUDGET[n]}s)  {detail}"
    print(line)
    log.append(line)
    assert ok, line
    assert within, line


def test_criterion_01_parabolic_beta_zero(acceptance_log):
    t0 = time.perf_counter()
    K, _ = bounds.k_beta(0.0)
    T = bounds.parabolic_bound(ParabolicBoundInput(1.0, 0.0)).lower_bound_T
    elapsed = time.perf_counter() - t0
    ok = abs(K - 4.0) < TOL_K0 and abs(T - 0.25) < TOL_QUARTER
    report(acceptance_log, 1, ok, elapsed, f"|K0-4|={abs(K - 4):.1e}  |T-0.25|={abs(T - 0.25):.1e}")


def test_criterion_02_dominance_over_rvl(acceptance_log):
    t0 = time.perf_counter()
    worst = math.inf
    for k in range(1, 20):
        beta = 0.05 * k
        inp = ParabolicBoundInput(1.0, beta)
        rvl = bounds.rvl_bound(inp).lower_bound_T
        main = bounds.parabolic_bound(inp).lower_bound_T
        cf = bounds.parabolic_closed_form_bound(inp).lower_bound_T
        worst = min(worst, main / rvl - 1, cf / rvl - 1)
    elapsed = time.perf_counter() - t0
    report(acceptance_log, 2, worst > 0, elapsed, f"min relative gain over RVL = {worst:.3e} (19 betas)")


def test_criterion_03_tilde_H_vs_H(acceptance_log):
    t0 = time.perf_counter()
    etas = np.linspace(0.01, 0.99, 99)
    gap = math.inf
    for beta in np.arange(1, 10) / 10:
        gap = min(gap, float(np.min(bounds.tilde_H(etas, beta) - bounds.parabolic_H(etas, beta))))
    flat = float(np.max(np.abs(bounds.tilde_H(etas, 0.0) - bounds.parabolic_H(etas, 0.0))))
    elapsed = time.perf_counter() - t0
    ok = gap > 0 and flat < TOL_TILDE_FLAT
    report(acceptance_log, 3, ok, elapsed, f"min(H~-H) on 99x9 = {gap:.3e}  max|H~-H| at beta=0 = {flat:.1e}")


def test_criterion_04_spectral_identities(acceptance_log):
    rng = np.random.default_rng(SEED)
    draws = [(float(10 ** rng.uniform(-2, 3)), float(10 ** rng.uniform(-1, 1))) for _ in range(200)]
    t0 = time.perf_counter()
    quad = sumprod = smap = 0.0
    order_ok = True
    for lam, alpha in draws:
        p = spectral.xi_pair(lam, alpha)
        xm, xp = p.xi_minus, p.xi_plus
        for xi in (xm, xp):
            quad = max(quad, abs(xi * xi + alpha * lam * xi + lam) / (1 + alpha * lam))
            smap = max(smap, abs(spectral.s_map(xi, alpha) - lam) / lam)
        sumprod = max(sumprod, abs(xm + xp + alpha * lam) / (alpha * lam), abs(xm * xp - lam) / lam)
        c = 2.0 / alpha
        if p.branch is spectral.Branch.REAL_DISTINCT:
            order_ok &= xm.imag == xp.imag == 0 and xm.real < -c < xp.real < -1.0 / alpha
        elif p.branch is spectral.Branch.COMPLEX_CONJUGATE:
            order_ok &= xm == xp.conjugate() and -c < xm.real < 0 and xp.imag > 0
        else:
            order_ok &= xm == xp
    elapsed = time.perf_counter() - t0
    ok = quad < TOL_SPECTRAL and sumprod < TOL_SPECTRAL and smap < TOL_SPECTRAL and order_ok
    report(acceptance_log, 4, ok, elapsed,
           f"quad={quad:.1e} sum/prod={sumprod:.1e} s_map={smap:.1e} ordering={'ok' if order_ok else 'broken'}")


def test_criterion_05_projection_oracle(acceptance_log):
    rng = np.random.default_rng(SEED)
    instances = []
    for i in range(50):
        alpha = float(10 ** rng.uniform(-0.7, 0.7))
        lc = spectral.critical_lambda(alpha)
        # alternate branches, staying at least 25% away from the double root
        factor = 10 ** rng.uniform(0.1, 1.5) if i % 2 == 0 else 10 ** rng.uniform(-1.5, -0.1)
        instances.append((lc * float(factor), alpha))
    t0 = time.perf_counter()
    worst = 0.0
    branches = set()
    for lam, alpha in instances:
        branches.add(spectral.xi_pair(lam, alpha).branch)
        closed = spectral.projection_norm(lam, alpha).norm
        for side in ("minus", "plus"):
            worst = max(worst, abs(closed - spectral.brute_force_projection_norm(lam, alpha, 10**6, side)))
    elapsed = time.perf_counter() - t0
    ok = worst < TOL_PROJ_ORACLE and len(branches) == 2
    report(acceptance_log, 5, ok, elapsed, f"max |closed - brute force| = {worst:.2e} over 50 instances x 2 sides")


def test_criterion_06_uhbd_bounds(acceptance_log):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    violations = checks = decay_modes = 0
    for _ in range(1000):
        alpha = float(10 ** rng.uniform(-1, 1))
        lc = spectral.critical_lambda(alpha)
        lams = np.sort(lc * 10 ** rng.uniform(-2, 2.5, int(rng.integers(1, 9))))
        ms = spectral.ModeSystem(alpha, tuple(float(x) for x in lams))
        for mu in (2 / alpha) * (1 + np.geomspace(1e-3, 20, 4)):
            mu = float(mu)
            dec = spectral.mu_decomposition(ms, mu)
            checks += 1
            violations += not spectral.uhbd_projection_bounds(ms, mu, dec).holds
            violations += not spectral.uhbd_operator_bound(ms, mu, dec).holds
            for k in dec.n_minus:
                xm = spectral.xi_pair(ms.lambdas[k], alpha).xi_minus
                decay_modes += 1
                for t in (0.1 / mu, 1 / mu, 5 / mu):
                    violations += abs(cmath.exp(t * xm)) > math.exp(-mu * t) * (1 + 1e-12)
            if dec.n_minus:
                violations += not spectral.semigroup_decay_check(ms, mu, [0.0, 0.5 / mu, 2 / mu], dec, n_random=4)
    elapsed = time.perf_counter() - t0
    report(acceptance_log, 6, violations == 0, elapsed,
           f"{checks} (system, mu) pairs, {decay_modes} fast modes, violations = {violations}")


def test_criterion_07_grid_instantiation(acceptance_log):
    t0 = time.perf_counter()
    orbits = galerkin.parabolic_grid_orbits() + galerkin.hyperbolic_grid_orbits()
    reps = [galerkin.verify_bound(o) for o in orbits]
    violations = sum(not r.passed for r in reps)
    observed = galerkin.integrate_many(orbits, steps_per_period=2000)
    exact = np.array([o.period_exact for o in orbits])
    err = float(np.max(np.abs(observed - exact) / exact))
    elapsed = time.perf_counter() - t0
    ok = len(orbits) == 1000 and violations == 0 and err < TOL_PERIOD
    report(acceptance_log, 7, ok, elapsed,
           f"{len(orbits)} orbits, violations = {violations}, min margin = {min(r.margin for r in reps):.1f}, "
           f"max period rel err = {err:.1e}")


def test_criterion_08_hyperbolic_equivalence(acceptance_log):
    t0 = time.perf_counter()
    worst = 0.0
    for L in np.geomspace(1e-2, 1e2, 20):
        for a in np.geomspace(1e-2, 1e2, 20):
            h = bounds.hyperbolic_bound(HyperbolicBoundInput(float(L), float(a))).lower_bound_T
            c = bounds.corollary1_bound(float(L), 2.0 / float(a), 1 + math.sqrt(2)).lower_bound_T
            worst = max(worst, abs(h - c) / c)
    elapsed = time.perf_counter() - t0
    report(acceptance_log, 8, worst <= TOL_HYP_EQUIV, elapsed, f"max rel diff on 20x20 = {worst:.1e}")


def test_criterion_09_beam_pipeline(acceptance_log):
    prob = BeamProblem(math.pi, 1.0, 1.0, 1.0, "hinged")
    t0 = time.perf_counter()
    setup = beam_setup(prob)
    fd1 = float(fd_eigenvalues(math.pi, "hinged", 2048, k=1)[0])
    lt_ref = math.sqrt(2) * 1.0 * (1 + max(1.0 + 1.0, 1.0))
    bref = bounds.hyperbolic_bound(HyperbolicBoundInput(3 * math.sqrt(2), 1.0)).lower_bound_T
    lip = beam_lipschitz_check(prob, samples=10_000, seed=SEED)
    elapsed = time.perf_counter() - t0
    e_fd = abs(setup.lambda1 - fd1) / fd1
    e_lt = abs(setup.l_tilde - lt_ref)
    e_b = abs(setup.bound.lower_bound_T - bref) / bref
    ok = (setup.lambda1 == 1.0 and e_fd < TOL_BEAM_FD and abs(lt_ref - 3 * math.sqrt(2)) < 1e-15
          and e_lt < TOL_L_TILDE and e_b <= TOL_BEAM_BOUND and lip)
    report(acceptance_log, 9, ok, elapsed,
           f"lambda1 vs FD {e_fd:.1e}, |L~-3sqrt2| = {e_lt:.1e}, bound rel diff {e_b:.1e}, 1e4 draws ok = {lip}")


def test_criterion_10_certificate_consistency(acceptance_log):
    t0 = time.perf_counter()
    rows = []
    ok = True
    for beta in (0.0, 0.25, 0.5, 0.75):
        b = bounds.parabolic_bound(ParabolicBoundInput(1.0, beta)).lower_bound_T
        prof = bounds.parabolic_profile(beta)
        low = bounds.abstract_certificate(prof, 1.0, 0.8 * b)
        high = bounds.abstract_certificate(prof, 1.0, 1.2 * b)
        ok &= low.certifies_nonexistence and not high.certifies_nonexistence
        rows.append(f"b={beta}: {low.rhs_min:.3f}/{high.rhs_min:.3f}")
    elapsed = time.perf_counter() - t0
    report(acceptance_log, 10, ok, elapsed, "rhs_min at 0.8T/1.2T  " + ", ".join(rows))

