"""Command-line front-end.

Subcommands: hardy-table, green, tone, capacity, classify, solve, yamabe,
verify.  Simple geometric queries are configured with flags; solve and
yamabe read a JSON scenario file.  Reports are written as JSON with a
fixed 17-significant-digit float format so identical runs produce
byte-identical files; tables are CSV.

Exit status: 0 on success, 1 on a computational failure, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from .capacity import capacitor_solve, classify_criticality, global_capacity
from .errors import ConfigError, RadpdeError
from .geometry import (CurvatureProfile, ModelManifold, flat_model,
                       hyperbolic_model, solve_jacobi)
from .green import green_kernel, make_green_kernel, subcriticality_state
from .hardy import chi_general, chi_limit
from .mesh import PotentialProfile, RadialMesh, annulus_mesh, ball_mesh
from .solver import (CoefficientProfile, Nonlinearity, multi_solution_sequence,
                     run_pipeline)
from .spectral import fundamental_tone
from .yamabe import (YamabeProblem, conformal_laplacian_subcritical,
                     run_prescribed_curvature, to_coefficients)
from . import verify as verify_mod

SCHEMA_VERSION = 1


# ---- deterministic serialization ---------------------------------------------

def _format_json(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits and sorted keys."""
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad_in}{json.dumps(str(k))}: {_format_json(obj[k], indent + 1)}'
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad_in}{_format_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            return json.dumps(str(x))
        return format(x, ".17g")
    return json.dumps(str(obj))


def write_json(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["schema_version"] = SCHEMA_VERSION
    path.write_text(_format_json(payload) + "\n")


def write_csv(path: Path, header: List[str], columns: List[np.ndarray]) -> None:
    rows = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format(v, ".17g") for v in row))
    path.write_text("\n".join(lines) + "\n")


# ---- scenario parsing ----------------------------------------------------------

def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError("missing required key", field=f"{where}.{key}")
    return cfg[key]


def model_from_config(cfg: dict) -> ModelManifold:
    kind = _require(cfg, "kind", "model")
    m = int(_require(cfg, "m", "model"))
    p = float(cfg.get("p", 2.0))
    if m < 2:
        raise ConfigError("dimension m must be >= 2", field="model.m")
    if p <= 1.0:
        raise ConfigError("exponent p must be > 1", field="model.p")
    if kind == "flat":
        return flat_model(m, p)
    if kind == "hyperbolic":
        kappa = float(cfg.get("kappa", 1.0))
        if kappa <= 0.0:
            raise ConfigError("kappa must be positive", field="model.kappa")
        return hyperbolic_model(m, p, kappa)
    if kind == "curvature":
        if "csv" in cfg:
            profile = CurvatureProfile.from_csv(cfg["csv"])
        elif "constant" in cfg:
            profile = CurvatureProfile.constant(float(cfg["constant"]))
        else:
            raise ConfigError("curvature model needs 'csv' or 'constant'",
                              field="model")
        r_max = float(cfg.get("r_max", 50.0))
        warping = solve_jacobi(profile, r_max)
        return ModelManifold(m=m, p=p, warping=warping)
    raise ConfigError(f"unknown model kind {kind!r}", field="model.kind")


def profile_from_config(spec, where: str) -> Callable:
    """Radial profile from a number or a named-term specification.

    Terms: constant {value}, indicator {amp, lo, hi}, bump {amp, lo, hi}
    (smooth, compactly supported), gaussian {amp, center, width}; a list
    of terms is summed.
    """
    if spec is None:
        return lambda r: np.zeros_like(np.asarray(r, dtype=float))
    if isinstance(spec, (int, float)):
        val = float(spec)
        return lambda r: np.full_like(np.asarray(r, dtype=float), val)
    if isinstance(spec, list):
        parts = [profile_from_config(s, f"{where}[{i}]") for i, s in enumerate(spec)]
        return lambda r: sum(part(r) for part in parts)
    if not isinstance(spec, dict):
        raise ConfigError("profile must be a number, object or list", field=where)
    kind = _require(spec, "kind", where)
    if kind == "constant":
        val = float(_require(spec, "value", where))
        return lambda r: np.full_like(np.asarray(r, dtype=float), val)
    if kind == "indicator":
        amp = float(_require(spec, "amp", where))
        lo, hi = float(_require(spec, "lo", where)), float(_require(spec, "hi", where))
        return lambda r: amp * ((np.asarray(r, dtype=float) >= lo)
                                & (np.asarray(r, dtype=float) <= hi)).astype(float)
    if kind == "bump":
        amp = float(_require(spec, "amp", where))
        lo, hi = float(_require(spec, "lo", where)), float(_require(spec, "hi", where))
        if hi <= lo:
            raise ConfigError("bump needs lo < hi", field=where)
        return verify_mod._smooth_bump(lo, hi, amp)
    if kind == "gaussian":
        amp = float(_require(spec, "amp", where))
        center = float(_require(spec, "center", where))
        width = float(_require(spec, "width", where))
        return lambda r: amp * np.exp(-((np.asarray(r, dtype=float) - center) / width) ** 2)
    raise ConfigError(f"unknown profile kind {kind!r}", field=where)


def meshes_from_config(model: ModelManifold, cfg: dict) -> List[RadialMesh]:
    kind = cfg.get("kind", "ball")
    n = int(cfg.get("elements", 1000))
    if n < 4:
        raise ConfigError("need at least 4 elements", field="domain.elements")
    radius = float(_require(cfg, "radius", "domain"))
    if radius <= 0.0:
        raise ConfigError("radius must be positive", field="domain.radius")
    rungs = int(cfg.get("rungs", 1))
    factor = float(cfg.get("ladder_factor", 2.0))
    if rungs > 1 and factor <= 1.0:
        raise ConfigError("ladder factor must be > 1", field="domain.ladder_factor")
    radii = [radius * factor ** j for j in range(rungs)]
    if kind == "ball":
        return [ball_mesh(model, R, n, graded=bool(cfg.get("graded", False)))
                for R in radii]
    if kind == "annulus":
        inner = float(_require(cfg, "inner", "domain"))
        if inner <= 0.0 or inner >= radius:
            raise ConfigError("need 0 < inner < radius", field="domain.inner")
        spacing = cfg.get("spacing", "uniform")
        return [annulus_mesh(model, inner, R, n, spacing=spacing) for R in radii]
    raise ConfigError(f"unknown domain kind {kind!r}", field="domain.kind")


def load_scenario(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError("scenario file not found", field=str(path))
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", field=str(path))
    if not isinstance(cfg, dict):
        raise ConfigError("scenario must be a JSON object", field=str(path))
    return cfg


# ---- subcommands ---------------------------------------------------------------

def _model_flags(sub):
    sub.add_argument("--kind", choices=["flat", "hyperbolic"], default="hyperbolic")
    sub.add_argument("--m", type=int, default=3)
    sub.add_argument("--p", type=float, default=2.0)
    sub.add_argument("--kappa", type=float, default=1.0)


def _model_from_flags(args) -> ModelManifold:
    return model_from_config({"kind": args.kind, "m": args.m, "p": args.p,
                              "kappa": args.kappa})


def cmd_hardy_table(args) -> int:
    mm = _model_from_flags(args)
    radii = np.logspace(np.log10(args.rmin), np.log10(args.rmax), args.n)
    chi = np.asarray(chi_general(mm, radii), dtype=float)
    kappa = mm.warping.kappa
    limit = chi_limit(mm.alpha, mm.p, kappa) if kappa and kappa > 0.0 else 0.0
    ratio = chi / limit if limit > 0.0 else np.full_like(chi, np.nan)
    out = Path(args.out) / "hardy_table.csv"
    write_csv(out, ["r", "chi", "limit", "ratio_to_limit"],
              [radii, chi, np.full_like(chi, limit), ratio])
    print(f"wrote {out}")
    return 0


def cmd_green(args) -> int:
    mm = _model_from_flags(args)
    state = subcriticality_state(mm)
    payload = {"subcriticality": state, "m": mm.m, "p": mm.p}
    if state == "subcritical":
        kernel = make_green_kernel(mm)
        payload["asymptotic_class"] = kernel.asymptotic_class
        radii = np.logspace(np.log10(args.rmin), np.log10(args.rmax), args.n)
        vals = np.array([green_kernel(mm, r) for r in radii])
        write_csv(Path(args.out) / "green_kernel.csv", ["r", "G"], [radii, vals])
    out = Path(args.out) / "green.json"
    write_json(out, payload)
    print(f"wrote {out}")
    return 0


def cmd_tone(args) -> int:
    mm = _model_from_flags(args)
    if args.inner is not None:
        mesh = annulus_mesh(mm, args.inner, args.radius, args.elements)
    else:
        mesh = ball_mesh(mm, args.radius, args.elements)
    V = PotentialProfile.hardy(mm, scale=args.hardy_scale) if args.hardy_scale else None
    tone = fundamental_tone(mesh, V)
    out = Path(args.out) / "tone.json"
    write_json(out, {"lambda": tone.lam, "method": tone.method,
                     "iterations": tone.iterations, "residual": tone.residual})
    print(f"wrote {out}")
    return 0


def _capacity_meshes(args):
    mm = _model_from_flags(args)
    radii = [args.radius * args.ladder_factor ** j for j in range(args.rungs)]
    meshes = [annulus_mesh(mm, args.inner, R, args.elements, spacing="log")
              for R in radii]
    V = PotentialProfile.hardy(mm, scale=args.hardy_scale) if args.hardy_scale else None
    return meshes, V


def cmd_capacity(args) -> int:
    meshes, V = _capacity_meshes(args)
    ladder = global_capacity(meshes, V)
    table = [{"outer_radius": res.domain[1], "value": res.value,
              "flux_value": res.flux_value} for res in ladder["results"]]
    out = Path(args.out) / "capacity.json"
    write_json(out, {"estimate": ladder["estimate"], "monotone": ladder["monotone"],
                     "rungs": table})
    print(f"wrote {out}")
    return 0


def cmd_classify(args) -> int:
    meshes, V = _capacity_meshes(args)
    rep = classify_criticality(meshes, V)
    out = Path(args.out) / "classify.json"
    write_json(out, {"classification": rep["classification"],
                     "values": rep["values"], "floor": rep["floor"]})
    print(f"wrote {out}")
    if rep["ground_state"] is not None:
        gs = rep["ground_state"]
        gs.to_csv(Path(args.out) / "ground_state.csv")
    return 0


def cmd_solve(args) -> int:
    cfg = load_scenario(args.scenario)
    model = model_from_config(_require(cfg, "model", "scenario"))
    meshes = meshes_from_config(model, _require(cfg, "domain", "scenario"))
    coef_cfg = _require(cfg, "coefficients", "scenario")
    a = profile_from_config(coef_cfg.get("a"), "coefficients.a")
    b = profile_from_config(coef_cfg.get("b"), "coefficients.b")
    coeffs = CoefficientProfile(a=a, b=b)
    nl = cfg.get("nonlinearity", {"kind": "power", "sigma": 2.0})
    if nl.get("kind", "power") != "power":
        raise ConfigError("only power nonlinearities are configurable",
                          field="nonlinearity.kind")
    F = Nonlinearity.power(float(nl.get("sigma", 2.0)))
    solver_cfg = cfg.get("solver", {})
    eps = float(solver_cfg.get("epsilon", 1.0))
    lam = solver_cfg.get("window")
    if lam is None:
        raise ConfigError("solver.window [lo, hi] is required", field="solver.window")
    lam = (float(lam[0]), float(lam[1]))
    tol = args.tol if args.tol is not None else float(solver_cfg.get("tol", 1e-8))
    k_solutions = int(solver_cfg.get("solutions", 1))
    outdir = Path(args.out)
    if k_solutions > 1:
        reports = multi_solution_sequence(meshes, coeffs, F, k_max=k_solutions,
                                          eps0=eps, lam=lam)
    else:
        reports = [run_pipeline(meshes, coeffs, F, eps, lam, tol=tol)]
    summaries = []
    for k, rep in enumerate(reports):
        rep.solution.to_csv(outdir / f"solution_{k}.csv")
        summaries.append(rep.summary())
    write_json(outdir / "solve.json", {"reports": summaries, "seed": args.seed})
    print(f"wrote {outdir / 'solve.json'}")
    return 0


def cmd_yamabe(args) -> int:
    cfg = load_scenario(args.scenario)
    model = model_from_config(_require(cfg, "model", "scenario"))
    meshes = meshes_from_config(model, _require(cfg, "domain", "scenario"))
    curv = _require(cfg, "curvature", "scenario")
    s = profile_from_config(_require(curv, "s", "curvature"), "curvature.s")
    s_tilde = profile_from_config(_require(curv, "s_tilde", "curvature"),
                                  "curvature.s_tilde")
    yp = YamabeProblem(m=model.m, s=s, s_tilde=s_tilde)
    solver_cfg = cfg.get("solver", {})
    eps = float(solver_cfg.get("epsilon", 1.0))
    lam = solver_cfg.get("window")
    if lam is None:
        raise ConfigError("solver.window [lo, hi] is required", field="solver.window")
    lam = (float(lam[0]), float(lam[1]))
    multi = int(solver_cfg.get("solutions", 0))
    rep = run_prescribed_curvature(yp, meshes, eps=eps, lam=lam, multi=multi)
    verdict = conformal_laplacian_subcritical(yp, model)
    outdir = Path(args.out)
    rep.conformal_factor.to_csv(outdir / "conformal_factor.csv")
    write_json(outdir / "yamabe.json",
               {"C1": rep.C1, "C2": rep.C2,
                "uniform_equivalence": rep.uniform_equivalence,
                "subcriticality": verdict,
                "solve": rep.solve_report.summary() if rep.solve_report else None})
    print(f"wrote {outdir / 'yamabe.json'}")
    return 0


def cmd_verify(args) -> int:
    results = verify_mod.run_all(seed=args.seed)
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        all_ok &= r.passed
        print(f"{status}  {r.name.ljust(width)}  {r.seconds:7.2f}s  {r.detail}")
    payload = {"passed": all_ok,
               "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail,
                           "seconds": r.seconds} for r in results]}
    write_json(Path(args.out) / "verify.json", payload)
    return 0 if all_ok else 1


# ---- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radpde",
        description="Radial quasilinear PDE laboratory on model manifolds")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--tol", type=float, default=None,
                        help="override solver tolerance")
    subs = parser.add_subparsers(dest="command", required=True)

    ht = subs.add_parser("hardy-table", help="tabulate the Hardy weight")
    _model_flags(ht)
    ht.add_argument("--rmin", type=float, default=0.05)
    ht.add_argument("--rmax", type=float, default=50.0)
    ht.add_argument("--n", type=int, default=100)
    ht.set_defaults(func=cmd_hardy_table)

    gr = subs.add_parser("green", help="Green kernel and subcriticality")
    _model_flags(gr)
    gr.add_argument("--rmin", type=float, default=0.1)
    gr.add_argument("--rmax", type=float, default=20.0)
    gr.add_argument("--n", type=int, default=100)
    gr.set_defaults(func=cmd_green)

    tn = subs.add_parser("tone", help="fundamental tone of a domain")
    _model_flags(tn)
    tn.add_argument("--radius", type=float, required=True)
    tn.add_argument("--inner", type=float, default=None)
    tn.add_argument("--elements", type=int, default=2000)
    tn.add_argument("--hardy-scale", type=float, default=0.0,
                    help="use V = scale * chi as the potential")
    tn.set_defaults(func=cmd_tone)

    for name, fn in (("capacity", cmd_capacity), ("classify", cmd_classify)):
        cp = subs.add_parser(name, help=f"{name} over an annulus ladder")
        _model_flags(cp)
        cp.add_argument("--inner", type=float, default=1.0)
        cp.add_argument("--radius", type=float, default=2.0)
        cp.add_argument("--rungs", type=int, default=8)
        cp.add_argument("--ladder-factor", type=float, default=2.0)
        cp.add_argument("--elements", type=int, default=600)
        cp.add_argument("--hardy-scale", type=float, default=0.0)
        cp.set_defaults(func=fn)

    sv = subs.add_parser("solve", help="monotone pipeline from a scenario file")
    sv.add_argument("scenario", help="JSON scenario path")
    sv.set_defaults(func=cmd_solve)

    ym = subs.add_parser("yamabe", help="prescribed-curvature run from a scenario")
    ym.add_argument("scenario", help="JSON scenario path")
    ym.set_defaults(func=cmd_yamabe)

    vf = subs.add_parser("verify", help="run the full verification suite")
    vf.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"config error: cannot create output directory: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RadpdeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
