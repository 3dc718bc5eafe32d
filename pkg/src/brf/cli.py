"""Command-line entry point: brf <command> [options].

Exit codes: 0 ok, 2 bad input, 3 numerical failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import catalog as cat
from . import report
from .aligned import MisuseError, NotAligned, UnsupportedSpace
from .config import FlowConfig, MultistartConfig, default_tolerances
from .curvature import DiagonalMetric, hq_form
from .flow import canonical_state, flow_rhs, integrate
from .group import cartan_scan, verify_rigidity
from .legacy import (
    SingularPoint,
    corrigendum_report,
    legacy_F,
    legacy_partials,
    legacy_partials_fd,
    legacy_point,
    ratio_derivatives,
    ricci_ratios,
)
from .liealg import ConstructionError, ParameterError
from .newton import NumericalFailure
from .solver import InconsistentModel, brf_residual_parts, ricci_spectrum_exact, solve_corrected

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class VerificationFailed(RuntimeError):
    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


def _number(text: str, exact: bool):
    v = Fraction(text.strip())
    return v if exact else float(v)


def _grid(text: str, exact: bool) -> list:
    return [_number(t, exact) for t in text.split(",") if t.strip()]


def _model(args):
    if getattr(args, "spec", None):
        model, z1 = cat.load_spec_file(args.spec)
        return model, z1, model.name
    if not args.space:
        raise ParameterError("pass --space or --spec")
    return cat.load_model(args.space), None, args.space


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> dict:
    model, _, sid = _model(args)
    kap = {"kappa1": model.kappa1, "kappa2": model.kappa2}
    out = {
        "space_id": sid,
        "c1": model.c1,
        "c2": model.c2,
        "lambdas": list(model.lambdas),
        **kap,
        "dims": list(model.dims),
        "manifold_dim": model.manifold_dim,
        "swapped": model.alignment.swapped,
        "alignment_certificate": model.alignment.certificate(),
        "casimir_cross_check": all(c.cross_check for c in model.casimirs),
        "assumption": model.assumption,
    }
    if args.space and not getattr(args, "spec", None):
        try:
            e = cat.entry(args.space)
            chk = cat.check_entry(e, exact_mode=args.exact)
            out["catalog_match"] = chk["ok"]
            out["catalog_mismatches"] = chk["mismatches"]
            out["notes"] = e.notes
        except cat.UnknownSpace:
            pass
    return out


def cmd_solve(args) -> dict:
    model, z_spec, sid = _model(args)
    grid = _grid(args.z1_grid, args.exact) if args.z1_grid else [z_spec if z_spec is not None else model.c1 - 1]
    search = MultistartConfig(starts=args.starts, seed=args.seed) if args.starts else None
    tol = args.tol or 1e-10
    sols, res, certs, rows = [], [], [], []
    for z1 in sorted(grid, key=float):
        [sol], info = solve_corrected(model, z1, search)
        sols.append({"z1": z1, "x": list(sol.metric.x), "gk_coordinates": list(sol.gk_coordinates)})
        res.append(sol.residual)
        certs.append(info["certificate"]["holds"])
        row = {"z1": z1, "residual": sol.residual, "gk": list(sol.gk_coordinates)}
        if "search" in info:
            row["other_solutions"] = len(info["search"]["other_solutions"])
            row["search_converged"] = info["search"]["converged"]
        rows.append(row)
    out = {
        "space_id": sid,
        "z1_grid": sorted(grid, key=float),
        "mode": "corrected",
        "exact": args.exact,
        "solutions": sols,
        "residuals": res,
        "certificates": certs,
        "table": rows,
    }
    if max(res) >= tol or not all(certs) or any(r.get("other_solutions") for r in rows):
        raise VerificationFailed("corrected solve did not verify", out)
    return out


def cmd_verify(args) -> dict:
    model, z_spec, sid = _model(args)
    z1 = _number(args.z1, args.exact) if args.z1 else (z_spec or model.c1 - 1)
    x = _grid(args.x, args.exact)
    if len(x) != 3:
        raise ParameterError("--x needs three comma-separated values")
    metric = DiagonalMetric(float(z1), *(float(v) for v in x))
    sp = model.at(float(z1))
    parts = brf_residual_parts(sp, metric, hq_form(sp).scale(args.h_scale))
    out = {"space_id": sid, "z1": z1, "x": x, "h_scale": args.h_scale, "residual": max(parts.values()), "parts": parts}
    tol = args.tol or 1e-10
    out["brf"] = out["residual"] < tol
    if not out["brf"]:
        raise VerificationFailed(f"residual {out['residual']:.3e} is above {tol:g}", out)
    return out


def cmd_legacy(args) -> dict:
    model, _, sid = _model(args)
    z1 = _number(args.at, args.exact) if args.at else model.c1 - 1
    pt = legacy_point(model, z1)
    fx, fz = legacy_partials(model, pt.x3, z1)
    der = ratio_derivatives(model, z1)
    fdx, fdz = legacy_partials_fd(model, pt.x3, z1)
    out = {
        "space_id": sid,
        "mode": "legacy",
        "exact": args.exact,
        "z1": z1,
        "point": list(pt.x),
        "F": legacy_F(pt.x3, z1, model),
        "dF_dx3": fx,
        "dF_dz1": fz,
        "dF_dx3_fd": fdx,
        "dF_dz1_fd": fdz,
        "x3_prime": der["x3_prime"],
        "r12_prime": der["r12_prime"],
        "r13_prime": der["r13_prime"],
        "r12_prime_fd": der["r12_prime_fd"],
        "r13_prime_fd": der["r13_prime_fd"],
        "ratios": ricci_ratios(model, pt),
    }
    ref = cat.legacy_reference_check(sid, z1, out) if args.exact else None
    if ref is not None:
        out["published_check"] = ref
        out["published_inconsistent"] = [r["quantity"] for r in ref if not r.get("published_consistent", True)]
    if args.z1_grid:
        curve = []
        for z in _grid(args.z1_grid, False):
            p = legacy_point(model, z)
            curve.append({"z1": z, "x1": p.x1, "x2": p.x2, "x3": p.x3})
        out["curve"] = curve
    return out


def cmd_corrigendum(args) -> dict:
    model, _, sid = _model(args)
    grid = _grid(args.z1_grid or "1/2,1,2", True)
    rows = corrigendum_report(model, grid)
    table = [
        {
            "z1": r["z1"],
            "legacy_x": list(r["legacy_point"]),
            "legacy_residual": r["legacy_residual"],
            "corrected_gk": list(r["corrected_gk"]),
            "corrected_residual": r["corrected_residual"],
            "h2_p3_delta": r["h2_p3_delta"],
        }
        for r in rows
    ]
    return {"space_id": sid, "mode": "legacy-vs-corrected", "z1_grid": grid, "rows": table}


def cmd_flow(args) -> dict:
    model, z_spec, sid = _model(args)
    z1 = float(Fraction(args.z1)) if args.z1 else float(z_spec or model.c1 - 1)
    space = model.at(z1)
    cfg = FlowConfig(t_end=args.t_end, local_tol=args.tol or FlowConfig.local_tol)
    if args.x0:
        x0 = [float(Fraction(t)) for t in args.x0.split(",")]
    else:
        x0 = list(canonical_state(space).x)
    tr = integrate(space, x0, args.t_end, cfg, h_scale=args.h_scale)
    if args.csv:
        tr.to_csv(args.csv)
    return {
        "space_id": sid,
        "z1": z1,
        "x0": x0,
        "h_scale": args.h_scale,
        "t_end": args.t_end,
        "status": tr.status,
        "steps": len(tr.states) - 1,
        "rejected": tr.rejected,
        "final": {"t": tr.final.t, "x": list(tr.final.x)},
        "final_residual": tr.residuals[-1],
        "harmonic_max": tr.harmonic_max,
        "rhs_at_canonical": flow_rhs(space, canonical_state(space)).tolist(),
    }


def cmd_group(args) -> dict:
    alg = cat.load_algebra(args.algebra)
    scale = tuple(float(Fraction(t)) for t in args.gb_scale.split(",")) if args.gb_scale else ()
    rep = verify_rigidity(alg, args.trials, args.seed, scale)
    out = {"command": "group", **rep}
    if len(alg.ideals) == 2:
        out["cartan_roots"] = cartan_scan(alg, scale or (1.0, 1.0))
    if rep["status"] == "CRITICAL":
        raise VerificationFailed("rigidity search found a non-trivial solution", out)
    return out


def cmd_catalog_test(args) -> dict:
    rows = []
    for e in cat.catalog():
        r = cat.check_entry(e, exact_mode=not args.float_mode)
        rows.append({"id": e.id, "kind": e.kind, "ok": r["ok"], "mismatches": len(r["mismatches"])})
        if e.kind == "aligned":
            model = cat.load_model(e.id)
            spec = ricci_spectrum_exact(model, model.c1 - 1)
            rows[-1]["jacobi"] = model.embedding.g1.jacobi_exact() and model.embedding.g2.jacobi_exact()
            rows[-1]["certificate"] = all(model.alignment.certificate().values())
            rows[-1]["spectrum_blocks"] = len(spec)
    out = {"entries": rows, "ok": all(r["ok"] and r.get("jacobi", True) and r.get("certificate", True) for r in rows)}
    if not out["ok"]:
        raise VerificationFailed("catalog self-test failed", out)
    return out


COMMANDS = {
    "analyze": cmd_analyze,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "legacy": cmd_legacy,
    "corrigendum": cmd_corrigendum,
    "flow": cmd_flow,
    "group": cmd_group,
    "catalog-test": cmd_catalog_test,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="brf", description="Bismut Ricci flat metrics on aligned homogeneous spaces")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write PREFIX.json and PREFIX.md")
    common.add_argument("--exact", action="store_true", help="rational arithmetic where available")
    common.add_argument("--tol", type=float, default=None, help="override the acceptance tolerance")
    common.add_argument("--seed", type=int, default=0)
    space = argparse.ArgumentParser(add_help=False)
    space.add_argument("--space", help="catalog id")
    space.add_argument("--spec", help="space-spec JSON file")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common, space], help="constants of a space")
    s = sub.add_parser("solve", parents=[common, space], help="corrected BRF solutions over a z1 grid")
    s.add_argument("--z1-grid", help="comma-separated z1 values (rationals allowed)")
    s.add_argument("--starts", type=int, default=0, help="multistart Newton confirmation with N starts")
    s = sub.add_parser("verify", parents=[common, space], help="BRF residual of a given diagonal metric")
    s.add_argument("--z1")
    s.add_argument("--x", required=True, help="x1,x2,x3 in g_b units")
    s.add_argument("--h-scale", type=float, default=1.0)
    s = sub.add_parser("legacy", parents=[common, space], help="legacy curve data and derivatives")
    s.add_argument("--at", help="z1 at which to evaluate (default c1-1)")
    s.add_argument("--z1-grid", help="also tabulate the legacy curve on this grid")
    s = sub.add_parser("corrigendum", parents=[common, space], help="legacy vs corrected comparison")
    s.add_argument("--z1-grid")
    s = sub.add_parser("flow", parents=[common, space], help="generalized Ricci flow trajectory")
    s.add_argument("--z1")
    s.add_argument("--x0", help="x1,x2,x3 (default: canonical)")
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--h-scale", type=float, default=1.0)
    s.add_argument("--csv", help="trajectory CSV path")
    s = sub.add_parser("group", parents=[common], help="rigidity search on a compact group")
    s.add_argument("--algebra", required=True, help="su2 or su2+su2")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--gb-scale", help="comma-separated scales of -B per ideal")
    s = sub.add_parser("catalog-test", parents=[common], help="validate every catalog entry")
    s.add_argument("--float", dest="float_mode", action="store_true", help="compare in floating point")
    return p


def _emit(payload: dict, args) -> None:
    text = report.dumps(payload)
    if getattr(args, "out", None):
        report.write(payload, args.out)
    sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None and os.environ.get("BRF_TOL"):
        args.tol = default_tolerances().compare
    try:
        payload = COMMANDS[args.command](args)
        payload = {"command": args.command, **payload}
        _emit(payload, args)
        return EXIT_OK
    except VerificationFailed as exc:
        _emit({"command": args.command, "error": "verification", "message": str(exc), **exc.payload}, args)
        return EXIT_VERIFY
    except (cat.UnknownSpace, cat.MalformedSpec, ParameterError, MisuseError, NotAligned, UnsupportedSpace,
            ConstructionError, ValueError, OSError) as exc:
        _emit({"command": args.command, "error": type(exc).__name__, "message": str(exc).strip("'\"")}, args)
        return EXIT_INPUT
    except (NumericalFailure, SingularPoint, ZeroDivisionError, np.linalg.LinAlgError) as exc:
        _emit({"command": args.command, "error": type(exc).__name__, "message": str(exc)}, args)
        return EXIT_NUMERIC
    except InconsistentModel as exc:
        _emit({"command": args.command, "error": type(exc).__name__, "message": str(exc)}, args)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
