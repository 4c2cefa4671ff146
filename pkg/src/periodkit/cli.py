"""Command-line front end. Every command prints one JSON envelope on stdout.

Exit codes: 0 success, 1 domain error or failed self-check, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, bounds, galerkin, spectral, verify
from .errors import DegenerateModeError, DomainError, PeriodkitError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def jsonable(obj):
    """Plain-JSON copy of ``obj``: numpy scalars unwrapped, NaN/inf as null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if hasattr(obj, "value"):  # enums
        return obj.value
    return obj


def dumps(obj) -> str:
    # json writes floats with repr, which is the shortest round-trip form
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


def envelope(command: str, inputs: dict, results) -> dict:
    return {"command": command, "inputs": inputs, "results": results, "version": __version__}


# ---------------------------------------------------------------- argument parsing helpers


def parse_decay(text: str):
    parts = text.split(":")
    try:
        if parts[0] == "constant" and len(parts) == 2:
            return bounds.ConstantDecay(float(parts[1]))
        if parts[0] == "power" and len(parts) == 3:
            return bounds.PowerDecay(float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad --m value {text!r}: {exc}") from exc
    raise UsageError(f"--m must be 'constant:C' or 'power:C:EXP', got {text!r}")


def parse_projection_constant(text: str, mu0: float):
    if text == "one":
        return lambda mu: 1.0
    if text == "corollary":
        return lambda mu: 1.0 / (1.0 - mu0 / mu)
    if text.startswith("power:"):
        try:
            b = float(text.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad projection constant {text!r}") from exc
        return lambda mu: mu ** b
    raise UsageError(f"projection constant must be 'one', 'corollary' or 'power:b', got {text!r}")


def parse_range(text: str) -> list[float]:
    """``a:b:step`` inclusive of ``b`` (up to rounding)."""
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"--betas must look like a:b:step, got {text!r}") from exc
    if not step > 0 or b < a:
        raise UsageError("--betas needs step > 0 and a <= b")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(n)]


# ---------------------------------------------------------------- commands


def cmd_bound(args) -> tuple[dict, int]:
    kind = args.kind
    if kind == "ode":
        _need(args, "L")
        hil, ban = bounds.ode_bounds(args.L)
        res = {"hilbert": hil.to_dict(), "banach": ban.to_dict()}
    elif kind == "parabolic":
        _need(args, "L")
        inp = bounds.ParabolicBoundInput(args.L, args.beta)
        res = {"bound": bounds.parabolic_bound(inp).to_dict()}
        if args.beta > 0:
            res["closed_form"] = bounds.parabolic_closed_form_bound(inp).to_dict()
            res["rvl"] = bounds.rvl_bound(inp).to_dict()
    elif kind == "hyperbolic":
        _need(args, "L", "alpha")
        b = bounds.hyperbolic_bound(bounds.HyperbolicBoundInput(args.L, args.alpha))
        res = {"bound": b.to_dict()}
    else:
        _need(args, "L", "T", "mu0", "M", "m")
        decay = parse_decay(args.m)
        prof = bounds.UhbdProfile(args.mu0, args.M, decay,
                                  parse_projection_constant(args.k_plus, args.mu0),
                                  parse_projection_constant(args.k_minus, args.mu0))
        cert = bounds.abstract_certificate(prof, args.L, args.T, args.mu_grid)
        res = {"certificate": cert.to_dict()}
        if args.mu0 > 0:
            res["corollary1"] = bounds.corollary1_bound(args.L, args.mu0, args.M).to_dict()
    return res, EXIT_OK


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"bound {args.kind} requires {', '.join(missing)}")


def _mode_entry(k, lam, alpha):
    pair = spectral.xi_pair(lam, alpha)
    try:
        proj = spectral.projection_norm(lam, alpha).norm
    except DegenerateModeError:
        proj = None
    return {"index": k, "lambda": lam, "branch": pair.branch.value,
            "xi_minus": complex(pair.xi_minus), "xi_plus": complex(pair.xi_plus),
            "double_root": pair.branch is spectral.Branch.DOUBLE_ROOT,
            "projection_norm": proj, "block_norm": spectral.block_operator_norm(lam, alpha)}


def cmd_spectral(args) -> tuple[dict, int]:
    try:
        ms = spectral.ModeSystem.load(args.file)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"cannot read mode system from {args.file}: {exc}") from exc
    res = {"alpha": ms.alpha, "critical_lambda": spectral.critical_lambda(ms.alpha),
           "modes": [_mode_entry(k, lam, ms.alpha) for k, lam in enumerate(ms.lambdas)]}
    if args.mu is not None:
        dec = spectral.mu_decomposition(ms, args.mu)
        res["decomposition"] = dec.to_dict()
        res["projection_bounds"] = spectral.uhbd_projection_bounds(ms, args.mu, dec).to_dict()
        res["operator_bound"] = spectral.uhbd_operator_bound(ms, args.mu, dec).to_dict()
        if dec.n_minus:
            t = np.linspace(0.0, 5.0 / args.mu, 11)
            res["decay_check"] = spectral.semigroup_decay_check(ms, args.mu, t, dec, seed=verify.env_seed())
        else:
            res["decay_check"] = None
    return res, EXIT_OK


def cmd_simulate(args) -> tuple[dict, int]:
    if args.kind == "parabolic":
        orbit = galerkin.make_parabolic_orbit(args.lam, args.omega, args.amplitude, args.beta)
    else:
        orbit = galerkin.make_hyperbolic_orbit(args.lam, args.omega, args.amplitude, args.alpha)
    cfg = galerkin.SimConfig.for_orbit(orbit, args.steps_per_period, args.periods)
    sim = galerkin.integrate(orbit, cfg)
    report = galerkin.verify_bound(orbit, observed_period=sim.observed_period)
    if args.trajectory:
        sim.trajectory.to_csv(args.trajectory)
    if args.report:
        Path(args.report).write_text(dumps(report.to_dict()))
    res = {"report": report.to_dict(),
           "period_rel_err": abs(sim.observed_period - orbit.period_exact) / orbit.period_exact,
           "crossings": len(sim.crossings), "dt": cfg.dt, "steps": len(sim.trajectory.t) - 1,
           "trajectory_file": args.trajectory, "report_file": args.report}
    return res, EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> tuple[dict, int]:
    outcomes = verify.run_suite(quick=args.quick)
    failed = [o.name for o in outcomes if not o.passed]
    for name in failed:
        print(f"FAILED: {name}", file=sys.stderr)
    res = {"quick": args.quick, "seed": verify.env_seed(), "all_passed": not failed,
           "failed": failed, "checks": [o.to_dict() for o in outcomes]}
    return res, EXIT_FAIL if failed else EXIT_OK


COMPARE_COLUMNS = ("beta", "K_beta", "eta_star", "closed_form_constant", "rvl_constant",
                   "bound_K_beta", "bound_closed_form", "bound_rvl", "K_beta_below_rvl")


def compare_rows(betas, L=1.0) -> list[dict]:
    rows = []
    for b in betas:
        K, eta = bounds.k_beta(b)
        inp = bounds.ParabolicBoundInput(L, b)
        if b > 0:
            cf, rvl = bounds.closed_form_constant(b), bounds.rvl_constant(b)
            bcf = bounds.parabolic_closed_form_bound(inp).lower_bound_T
            brvl = bounds.rvl_bound(inp).lower_bound_T
        else:
            cf = rvl = bcf = brvl = None
        rows.append({"beta": b, "K_beta": K, "eta_star": eta, "closed_form_constant": cf, "rvl_constant": rvl,
                     "bound_K_beta": bounds.parabolic_bound(inp).lower_bound_T,
                     "bound_closed_form": bcf, "bound_rvl": brvl,
                     "K_beta_below_rvl": None if rvl is None else K < rvl})
    return rows


def cmd_compare(args) -> tuple[dict, int]:
    betas = parse_range(args.betas)
    if any(not 0.0 <= b < 1.0 for b in betas):
        raise DomainError("all betas must lie in [0, 1)")
    return {"rows": compare_rows(betas, args.L)}, EXIT_OK


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARE_COLUMNS)
    for r in rows:
        w.writerow(["" if r[c] is None else (repr(r[c]) if isinstance(r[c], float) else r[c])
                    for c in COMPARE_COLUMNS])
    return buf.getvalue()


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="periodkit", description="Lower bounds on minimal periods of periodic orbits.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="evaluate a period lower bound")
    b.add_argument("kind", choices=("ode", "parabolic", "hyperbolic", "abstract"))
    b.add_argument("--L", type=float, help="Lipschitz constant")
    b.add_argument("--beta", type=float, default=0.0, help="fractional exponent (parabolic)")
    b.add_argument("--alpha", type=float, help="damping coefficient (hyperbolic)")
    b.add_argument("--T", type=float, help="candidate period (abstract)")
    b.add_argument("--mu0", type=float, help="decomposition threshold (abstract)")
    b.add_argument("--M", type=float, help="growth constant of the slow part (abstract)")
    b.add_argument("--m", help="decay profile: constant:C or power:C:EXP (abstract)")
    b.add_argument("--k-plus", default="one", help="one | corollary | power:b")
    b.add_argument("--k-minus", default="one", help="one | corollary | power:b")
    b.add_argument("--mu-grid", type=int, default=4096)
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("spectral", help="spectral report for a mode system JSON file")
    s.add_argument("file")
    s.add_argument("--mu", type=float)
    s.set_defaults(func=cmd_spectral)

    m = sub.add_parser("simulate", help="simulate a manufactured periodic orbit")
    m.add_argument("kind", choices=("parabolic", "hyperbolic"))
    m.add_argument("--lambda", dest="lam", type=float, required=True)
    m.add_argument("--omega", type=float, required=True)
    m.add_argument("--amplitude", type=float, default=1.0)
    m.add_argument("--beta", type=float, default=0.0)
    m.add_argument("--alpha", type=float, default=1.0)
    m.add_argument("--steps-per-period", type=int, default=2000)
    m.add_argument("--periods", type=float, default=2.5)
    m.add_argument("--trajectory", help="write the trajectory CSV here")
    m.add_argument("--report", help="write the verification report JSON here")
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run the self-check suite")
    v.add_argument("--quick", action="store_true")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare", help="tabulate parabolic constants over a beta grid")
    c.add_argument("--betas", required=True, help="a:b:step")
    c.add_argument("--L", type=float, default=1.0)
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.set_defaults(func=cmd_compare)
    return p


def _inputs(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "command")}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        results, code = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"periodkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PeriodkitError as exc:
        print(f"periodkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.command == "compare" and args.format == "csv":
        sys.stdout.write(rows_to_csv(results["rows"]))
    else:
        sys.stdout.write(dumps(envelope(args.command, _inputs(args), results)))
    return code


if __name__ == "__main__":
    sys.exit(main())
