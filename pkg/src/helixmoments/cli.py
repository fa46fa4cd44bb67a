"""Command-line entry point.

Subcommands::

    helixmoments eigen             eigenvalues and coefficients for one Bloch block
    helixmoments moment            toroidal moment of every substate
    helixmoments sweep             run a preset or configured sweep to CSV/JSON
    helixmoments hermiticity-demo  Hermiticity defect with and without the
                                   magnetic curvature term
    helixmoments validate          numerical cross-checks

Exit codes: 0 success, 1 failed validation or physics error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__
from .eigen import EigenConvergenceError, NonHermitianError, eigh
from .field import FieldSpec, tesla_to_tau
from .geometry import DEFAULT_QUAD_POINTS, FrameSingularityError, HelixSpec
from .hamiltonian import BasisSpec, QuadratureConvergenceError, assemble, hermiticity_defect
from .observables import CurrentModel, moment_records
from . import sweep as sw

PARAM_KEYS = ("R", "a", "b", "omega", "p", "n_max", "quad_points", "tau0", "tau1",
              "theta", "phi_M", "B_max", "R_meters", "current_model")


PHYSICS_ERRORS = (
    NonHermitianError, FrameSingularityError, EigenConvergenceError, QuadratureConvergenceError, OSError,
)


class UsageError(Exception):
    pass


def _add_common(parser):
    g = parser.add_argument_group("parameters")
    g.add_argument("--config", help="key = value or JSON file; flags override it")
    g.add_argument("--R", type=float)
    g.add_argument("--a", type=float)
    g.add_argument("--b", type=float)
    g.add_argument("--omega", type=int)
    g.add_argument("--p", type=int, help="Bloch index (sweeps accept --p-list)")
    g.add_argument("--n-max", dest="n_max", type=int)
    g.add_argument("--quad-points", dest="quad_points", type=int)
    g.add_argument("--tau0", type=float, help="vertical flux in units of pi*hbar/e")
    g.add_argument("--tau1", type=float, help="in-plane flux in units of pi*hbar/e")
    g.add_argument("--theta", type=float, help="field polar angle; uses --B-max as magnitude")
    g.add_argument("--phi-M", dest="phi_M", type=float, help="azimuth of the in-plane field")
    g.add_argument("--B-max", dest="B_max", type=float,
                   help="field magnitude: flux units, or Tesla when --R-meters is given")
    g.add_argument("--R-meters", dest="R_meters", type=float,
                   help="physical major radius; switches --B-max to Tesla")
    g.add_argument("--current-model", dest="current_model",
                   choices=[m.value for m in CurrentModel])
    g.add_argument("--no-vmag", dest="no_vmag", action="store_true", default=None,
                   help="drop the magnetic curvature term (Hermiticity demonstration only)")


def build_parser():
    parser = argparse.ArgumentParser(prog="helixmoments", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("eigen", "print eigenvalues and eigenvectors"),
                        ("moment", "print toroidal moments for all substates"),
                        ("hermiticity-demo", "defect with and without the magnetic curvature term")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("sweep", help="run a sweep preset or a configured sweep")
    _add_common(p)
    p.add_argument("--preset", help="named preset, e.g. fig1a (see --list-presets)")
    p.add_argument("--list-presets", action="store_true")
    p.add_argument("--kind", choices=sw.KINDS)
    p.add_argument("--grid", help='"start:stop:num" or comma list')
    p.add_argument("--p-list", dest="p_list", help="comma-separated Bloch indices")
    p.add_argument("--output", "-o", help="output file (default: stdout as CSV)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, help=f"worker processes (default ${sw.WORKERS_ENV} or 1)")
    p.add_argument("--plot", action="store_true", help="also write a PNG next to the output")

    sub.add_parser("validate", help="run the numerical cross-checks")
    return parser


def resolve(args) -> dict:
    """Merge defaults < config file < flags."""
    params = {}
    if getattr(args, "config", None):
        params.update(sw.load_config(args.config))
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "config"):
            params[key] = value
    if params.pop("no_vmag", False):
        params["include_vmag"] = False
    return params


def _field(params) -> FieldSpec:
    phi_M = params.get("phi_M", 0.0)
    B_max = params.get("B_max")
    if B_max is not None and params.get("R_meters"):
        B_max = tesla_to_tau(B_max, params["R_meters"])
    if params.get("theta") is not None:
        return FieldSpec.from_polar(sw.DEFAULT_TAU_MAX if B_max is None else B_max, params["theta"], phi_M)
    return FieldSpec(params.get("tau0", 0.0), params.get("tau1", 0.0), phi_M)


def _helix(params, base=None) -> HelixSpec:
    base = base or HelixSpec()
    return HelixSpec(params.get("R", base.R), params.get("a", base.a), params.get("b", base.b),
                     params.get("omega", base.omega))


def _basis(params) -> BasisSpec:
    return BasisSpec(params.get("p", 0), params.get("n_max", 2), params.get("quad_points", DEFAULT_QUAD_POINTS))


def _echo(params, stream=None):
    stream = stream or sys.stderr
    for key in sorted(params):
        print(f"# {key} = {params[key]}", file=stream)


def cmd_eigen(params, as_json):
    spec, fs, basis = _helix(params), _field(params), _basis(params)
    include_vmag = params.get("include_vmag", True)
    H = assemble(spec, fs, basis, include_vmag=include_vmag)
    sol = eigh(H, allow_non_hermitian=not include_vmag)
    if as_json:
        print(json.dumps({
            "p": sol.p, "n": basis.indices.tolist(), "eigenvalues": sol.eigenvalues.tolist(),
            "eigenvectors_real": sol.eigenvectors.real.tolist(),
            "eigenvectors_imag": sol.eigenvectors.imag.tolist(),
            "residuals": sol.residuals.tolist(),
        }, indent=1))
        return 0
    print(f"p = {sol.p}, n = {basis.indices.tolist()}")
    for alpha in range(sol.dim):
        coeffs = " ".join(f"{c.real:+.6f}{c.imag:+.6f}j" for c in sol.eigenvectors[:, alpha])
        print(f"alpha={alpha}  eps={sol.eigenvalues[alpha]:+.12g}  C=[{coeffs}]")
    return 0


def cmd_moment(params, as_json):
    spec, fs, basis = _helix(params), _field(params), _basis(params)
    include_vmag = params.get("include_vmag", True)
    sol = eigh(assemble(spec, fs, basis, include_vmag=include_vmag), allow_non_hermitian=not include_vmag)
    records = moment_records(spec, fs, basis, sol, params.get("current_model", "paramagnetic"))
    if as_json:
        print(json.dumps([
            {"p": r.p, "alpha": r.alpha, "eigenvalue": r.eigenvalue, "moment": r.moment.tolist(),
             "model": r.model, **r.metadata}
            for r in records
        ], indent=1))
        return 0
    print("p  alpha  eigenvalue               TM_x                     TM_y                     TM_z")
    for r in records:
        print(f"{r.p:<2} {r.alpha:<6} {r.eigenvalue:<+24.16e} "
              + " ".join(f"{v:<+24.16e}" for v in r.moment))
    return 0


def cmd_hermiticity(params, as_json):
    base = HelixSpec(1.0, *sw.CONFIGURATIONS["circular"], 4)
    spec = _helix(params, base)
    if "theta" not in params and "tau0" not in params and "tau1" not in params:
        params = {**params, "tau0": 1.0, "tau1": 1.0}
    _echo({"R": spec.R, "a": spec.a, "b": spec.b, "omega": spec.omega,
           **{k: v for k, v in params.items() if k in PARAM_KEYS}})
    fs, basis = _field(params), _basis(params)
    with_vmag = hermiticity_defect(assemble(spec, fs, basis, include_vmag=True))
    without = hermiticity_defect(assemble(spec, fs, basis, include_vmag=False))
    if as_json:
        print(json.dumps({"with_vmag": with_vmag, "without_vmag": without}))
    else:
        print(f"hermiticity defect with magnetic curvature term:    {with_vmag:.6e}")
        print(f"hermiticity defect without magnetic curvature term: {without:.6e}")
    return 0 if with_vmag < 1e-10 else 1


def _plan(params) -> sw.SweepPlan:
    overrides = {}
    for key in ("tau0", "tau1", "theta", "phi_M", "n_max", "quad_points", "current_model",
                "include_vmag", "output", "format"):
        if key in params:
            overrides[key] = params[key]
    if "B_max" in params:
        B = params["B_max"]
        overrides["tau_max"] = tesla_to_tau(B, params["R_meters"]) if params.get("R_meters") else B
    if "p_list" in params:
        overrides["p_list"] = sw._coerce("p_list", params["p_list"])
    elif "p" in params:
        overrides["p_list"] = (params["p"],)
    kind = params.get("kind", params.get("sweep"))
    if "grid" in params:
        g = params["grid"]
        overrides["grid"] = sw.parse_grid(g) if isinstance(g, str) else tuple(g)

    if params.get("preset"):
        plan = sw.preset(params["preset"], **overrides)
        if any(k in params for k in ("R", "a", "b", "omega")):
            plan = replace(plan, helix=_helix(params, plan.helix))
        if kind and kind != plan.kind:
            raise UsageError(f"--kind {kind} conflicts with preset {params['preset']} ({plan.kind})")
        return plan
    if not kind:
        raise UsageError("sweep needs --preset or --kind (or 'sweep = ...' in the config)")
    if kind == "theta" and "theta" in overrides:
        overrides.pop("theta")
    overrides.setdefault("grid", sw._default_grid(kind))
    return sw.SweepPlan(kind=kind, helix=_helix(params), **overrides)


def cmd_sweep(params):
    if params.get("list_presets"):
        for name, entry in sw.PRESET_TABLE.items():
            print(f"{name:<18} {entry[0]}")
        return 0
    plan = _plan(params)
    _echo({**plan.resolved(), "grid": f"{len(plan.grid)} points [{plan.grid[0]:g}, {plan.grid[-1]:g}]"})
    rows = sw.run_sweep(plan, params.get("workers"))
    if plan.output:
        out = sw.emit(rows, plan.output, plan.format)
        sw.write_params(plan, out)
        print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
        if params.get("plot"):
            from .plotting import plot_sweep

            png = plot_sweep(rows, out.with_suffix(".png"), plan.kind, title=params.get("preset"))
            print(f"wrote {png}", file=sys.stderr)
    else:
        sw.write_rows(rows, sys.stdout, plan.format)
    failed = sum(1 for r in rows if r.error)
    if failed:
        print(f"{failed} grid point(s) failed; see the error column", file=sys.stderr)
        return 1
    return 0


def cmd_validate():
    from .validation import run_all

    results = run_all()
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("all checks passed" if ok else "SOME CHECKS FAILED")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate()
        params = resolve(args)
        if args.command == "sweep":
            return cmd_sweep(params)
        if args.command != "hermiticity-demo":
            _echo({k: v for k, v in params.items() if k in PARAM_KEYS})
        as_json = params.get("json", False)
        if args.command == "eigen":
            return cmd_eigen(params, as_json)
        if args.command == "moment":
            return cmd_moment(params, as_json)
        if args.command == "hermiticity-demo":
            return cmd_hermiticity(params, as_json)
    except PHYSICS_ERRORS as exc:
        print(f"helixmoments: error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, KeyError, ValueError) as exc:
        print(f"helixmoments: error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
