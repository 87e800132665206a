"""Golden-value and property verification suite.

Each check exercises one block of the library against closed forms or
structural properties and returns a pass/fail verdict with a short
diagnostic string; run_all collects them into a table the CLI can print.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .capacity import capacitor_solve, classify_criticality, global_capacity
from .green import green_kernel
from .hardy import chi_flat_closed, chi_general, chi_hyperbolic_closed, chi_limit, zeta_check
from .geometry import flat_model, hyperbolic_model
from .mesh import (DiscreteFunction, PotentialProfile, annulus_mesh, ball_mesh,
                   lagrangian, picone, qv_energy)
from .solver import (CoefficientProfile, Nonlinearity, dirichlet_solve,
                     equation_residual, hyperbolic_exact_solution,
                     monotone_iteration, multi_solution_sequence,
                     obstacle_complementarity, obstacle_solve,
                     pasting_min_check, run_pipeline,
                     uniform_lower_bound_check, _coef_at_q,
                     _residual_scale_vector)
from .spectral import fundamental_tone


@dataclass
class VerifyResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _smooth_bump(lo: float, hi: float, amp: float) -> Callable:
    """C-infinity bump supported on (lo, hi) with peak value amp."""

    def f(r):
        r = np.asarray(r, dtype=float)
        x = (r - lo) / (hi - lo)
        core = np.where((x > 0.0) & (x < 1.0),
                        np.exp(-1.0 / np.maximum(x * (1.0 - x), 1e-300)), 0.0)
        return amp * core * math.e ** 4

    return f


def check_hardy_closed_forms() -> Tuple[bool, str]:
    radii = np.logspace(math.log10(0.05), math.log10(20.0), 50)
    m3 = hyperbolic_model(3, 2, 1.0)
    got3 = chi_general(m3, radii)
    ref3 = chi_hyperbolic_closed(3, 2, 1.0, radii)
    err3 = float(np.max(np.abs(got3 / ref3 - 1.0)))
    m2 = hyperbolic_model(2, 2, 1.0)
    got2 = chi_general(m2, radii)
    ref2 = chi_hyperbolic_closed(2, 2, 1.0, radii)
    err2 = float(np.max(np.abs(got2 / ref2 - 1.0)))
    ok = err3 <= 1e-6 and err2 <= 1e-6
    return ok, f"H3 rel err {err3:.2e}, H2 rel err {err2:.2e}"


def check_hardy_limits() -> Tuple[bool, str]:
    worst_gap, worst_end = 0.0, 0.0
    for kappa in (0.5, 1.0, 2.0):
        for alpha in (1.0, 2.0, 3.0):
            # p = 2 turns alpha = m - 1 into a plain dimension choice
            m = int(alpha) + 1
            mm = hyperbolic_model(m, 2, kappa)
            limit = chi_limit(alpha, 2.0, kappa)
            grid = np.logspace(-2, math.log10(50.0 / kappa), 60)
            chi = np.asarray(chi_general(mm, grid), dtype=float)
            worst_gap = max(worst_gap, float(np.max((limit - chi) / limit)))
            end = float(chi_general(mm, 50.0 / kappa))
            worst_end = max(worst_end, abs(end / limit - 1.0))
    ok = worst_gap <= 1e-12 and worst_end <= 1e-3
    return ok, f"max limit excess {worst_gap:.2e}, end gap {worst_end:.2e}"


def check_euclidean_constant() -> Tuple[bool, str]:
    worst = 0.0
    for (m, p) in ((3, 2), (4, 2), (5, 3)):
        mm = flat_model(m, p)
        r = 1e-3
        got = float(chi_general(mm, r)) * r ** p
        ref = ((m - p) / p) ** p
        worst = max(worst, abs(got / ref - 1.0))
    return worst <= 1e-4, f"max rel err {worst:.2e}"


def check_zeta_positivity() -> Tuple[bool, str]:
    worst_ratio = 0.0
    min_zeta = math.inf
    grid = np.logspace(-12, 2, 400)
    for m in range(2, 7):
        for kappa in (0.5, 1.0, 2.0):
            rep = zeta_check(m, kappa, grid=grid)
            min_zeta = min(min_zeta, rep.min_zeta)
            worst_ratio = max(worst_ratio, abs(rep.ratio_origin - 1.0),
                              abs(rep.ratio_infinity - 1.0))
    ok = min_zeta > 0.0 and worst_ratio <= 0.01
    return ok, f"min zeta {min_zeta:.3g}, worst endpoint ratio gap {worst_ratio:.2e}"


def check_exact_solutions() -> Tuple[bool, str]:
    t0 = time.time()
    m4 = hyperbolic_model(4, 2, 1.0)
    mesh = ball_mesh(m4, 8.0, 4000)
    F = Nonlinearity.power(3.0)
    aq = _coef_at_q(mesh, 2.0)
    bq = _coef_at_q(mesh, 1.0)
    worst_res, worst_sup = 0.0, 0.0
    for tau in (1.0, 2.0):
        u = hyperbolic_exact_solution(4, tau)
        uv = np.asarray(u(mesh.nodes), dtype=float)
        res = equation_residual(mesh, aq, bq, F, uv)
        scale = float(np.max(_residual_scale_vector(mesh, aq, bq, F, uv)))
        worst_res = max(worst_res, float(np.max(np.abs(res[mesh.free]))) / scale)
        sol = dirichlet_solve(mesh, 2.0, 1.0, F, float(u(8.0)))
        worst_sup = max(worst_sup, float(np.max(np.abs(sol.values - uv))))
    dt = time.time() - t0
    ok = worst_res <= 1e-6 and worst_sup <= 1e-4 and dt < 10.0
    return ok, f"residual {worst_res:.2e}, recovery sup {worst_sup:.2e}, {dt:.2f}s"


def check_capacity() -> Tuple[bool, str]:
    m3 = flat_model(3, 2)
    res = capacitor_solve(annulus_mesh(m3, 1.0, 2.0, 800), 0.0)
    err_val = abs(res.value / (4.0 * math.pi) - 1.0)
    err_flux = abs(res.flux_value - res.value) / res.value
    meshes3 = [annulus_mesh(m3, 1.0, 2.0 * 2.0 ** j, 600, spacing="log")
               for j in range(9)]
    lad = global_capacity(meshes3, 0.0)
    err_lim = abs(lad["estimate"] / (2.0 * math.pi) - 1.0)
    m2 = flat_model(2, 2)
    err_log = 0.0
    for R in (8.0, 64.0, 512.0):
        r2 = capacitor_solve(annulus_mesh(m2, 1.0, R, 600, spacing="log"), 0.0)
        err_log = max(err_log, abs(r2.value / (math.pi / math.log(R)) - 1.0))
    cls3 = classify_criticality(meshes3, 0.0)["classification"]
    meshes2 = [annulus_mesh(m2, 1.0, 2.0 * 2.0 ** j, 600, spacing="log")
               for j in range(9)]
    cls2 = classify_criticality(meshes2, 0.0)["classification"]
    ok = (err_val <= 5e-3 and err_flux <= 1e-3 and err_lim <= 1e-2
          and err_log <= 2e-2 and lad["monotone"]
          and cls3 == "subcritical" and cls2 == "critical")
    return ok, (f"4pi err {err_val:.2e}, flux gap {err_flux:.2e}, 2pi err "
                f"{err_lim:.2e}, log err {err_log:.2e}, m3 {cls3}, m2 {cls2}")


def check_tones() -> Tuple[bool, str]:
    m3 = flat_model(3, 2)
    t1 = fundamental_tone(annulus_mesh(m3, 1.0, 2.0, 2000), None)
    err1 = abs(t1.lam / math.pi ** 2 - 1.0)
    t2 = fundamental_tone(ball_mesh(m3, math.pi, 2000), None)
    err2 = abs(t2.lam - 1.0)
    ok = err1 <= 1e-3 and err2 <= 1e-3
    return ok, f"annulus tone err {err1:.2e}, ball tone err {err2:.2e}"


def check_picone_lagrangian(seed: int = 0) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    m3 = flat_model(3, 2)
    mesh = annulus_mesh(m3, 1.0, 2.0, 1500)

    def random_positive():
        c = rng.uniform(0.3, 2.0, 4)
        vals = c[0] + c[1] * np.sin(c[2] * mesh.nodes + c[3]) ** 2
        return DiscreteFunction(mesh, vals)

    min_picone = math.inf
    max_scaling = 0.0
    for _ in range(200):
        w, z = random_positive(), random_positive()
        min_picone = min(min_picone, picone(mesh, w, z))
        c = float(rng.uniform(0.5, 3.0))
        max_scaling = max(max_scaling, abs(picone(mesh, w, DiscreteFunction(mesh, c * w.values))))

    V = PotentialProfile(lambda r: -0.5 * np.ones_like(np.asarray(r, dtype=float)))
    g = dirichlet_solve(mesh, V, None, None, boundary=(1.0, 0.7))
    worst_lag = 0.0
    for _ in range(50):
        c = rng.uniform(-1.0, 1.0, 2)
        vals = np.abs(c[0] * np.sin(math.pi * (mesh.nodes - 1.0))
                      + c[1] * np.sin(2.0 * math.pi * (mesh.nodes - 1.0)))
        vals[mesh.essential] = 0.0
        phi = DiscreteFunction(mesh, vals)
        L = lagrangian(mesh, phi, g)
        E = 2.0 * qv_energy(mesh, V, phi)
        worst_lag = max(worst_lag, abs(L - E) / max(abs(E), 1e-300))
    ok = min_picone >= -1e-10 and max_scaling <= 1e-10 and worst_lag <= 1e-6
    return ok, (f"min I {min_picone:.2e}, |I(w,cw)| {max_scaling:.2e}, "
                f"identity rel err {worst_lag:.2e}")


def _random_scenario(rng: np.random.Generator):
    """Coefficients satisfying the monotone-scheme hypotheses on flat R^3."""
    model = flat_model(3, 2)
    lam = (0.25, 1.0)
    a_amp = float(rng.uniform(0.05, 0.2))
    a = _smooth_bump(lam[0], lam[1], a_amp)
    bp_amp = float(rng.uniform(0.1, 0.3))
    bp_lo = float(rng.uniform(1.5, 2.0))
    b_plus = _smooth_bump(bp_lo, bp_lo + 1.0, bp_amp)
    eps = float(rng.uniform(0.3, 0.7))
    F = Nonlinearity.power(float(rng.choice([2.0, 3.0, 4.0])))
    return model, lam, a, b_plus, eps, F


def check_monotone_pipeline(seed: int = 0) -> Tuple[bool, str]:
    from .solver import compute_delta_info
    rng = np.random.default_rng(seed)
    worst_iter = 0
    for case in range(10):
        model, lam, a, b_plus, eps, F = _random_scenario(rng)
        meshes = [ball_mesh(model, R, 1000) for R in (8.0, 24.0, 48.0)]
        info = compute_delta_info(meshes, a, F, eps, lam, b_plus=b_plus)
        bm_amp = 0.5 * info.delta * float(rng.uniform(0.2, 1.0))
        b_minus = _smooth_bump(lam[0], lam[1], bm_amp)
        coeffs = CoefficientProfile(a=a,
                                    b=lambda r, bp=b_plus, bm=b_minus: bp(r) - bm(r),
                                    b_minus_window=lam)
        rep = run_pipeline(meshes, coeffs, F, eps, lam)
        its = rep.iterates
        if not all(np.all(its[k + 1] <= its[k] + 1e-10) for k in range(len(its) - 1)):
            return False, f"case {case}: iterates not non-increasing"
        if rep.iterations > 200:
            return False, f"case {case}: {rep.iterations} iterations"
        worst_iter = max(worst_iter, rep.iterations)
        sol = rep.solution.values
        if np.any(sol < rep.phi_inf.values - 1e-8) or np.any(sol > rep.phi_0.values + 1e-8):
            return False, f"case {case}: limit escaped the bracket"
        # floor stability: inf of the subsolution ladder over the window
        lb = uniform_lower_bound_check(meshes, coeffs, F, eps, lam)
        running = lb["running_min"]
        if running[-1] <= 0.0:
            return False, f"case {case}: floor not positive"
        if abs(running[-1] - running[-2]) > 0.01 * abs(running[-1]):
            return False, f"case {case}: floor drifts more than 1%"
    return True, f"10 scenarios, max iterations {worst_iter}"


def check_multi_solution(seed: int = 0) -> Tuple[bool, str]:
    t0 = time.time()
    model = flat_model(3, 2)
    lam = (0.25, 1.0)
    a = _smooth_bump(lam[0], lam[1], 0.2)
    b = lambda r: _smooth_bump(2.0, 3.0, 0.3)(r) - _smooth_bump(lam[0], lam[1], 0.01)(r)
    coeffs = CoefficientProfile(a=a, b=b, b_minus_window=lam)
    F = Nonlinearity.power(3.0)
    meshes = [ball_mesh(model, R, 1200) for R in (4.0, 6.0, 8.0)]
    reports = multi_solution_sequence(meshes, coeffs, F, k_max=3, eps0=0.5, lam=lam)
    sups = [float(np.max(r.solution.values)) for r in reports]
    decreasing = all(s2 < s1 for s1, s2 in zip(sups, sups[1:]))
    bounded = all(s <= r.upper + 1e-9 for s, r in zip(sups, reports))
    dt = time.time() - t0
    ok = len(reports) == 3 and decreasing and bounded and dt < 60.0
    return ok, f"sup norms {['%.4g' % s for s in sups]}, {dt:.1f}s"


def check_obstacle_pasting(seed: int = 0) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    m3 = flat_model(3, 2)
    mesh = annulus_mesh(m3, 1.0, 4.0, 600)
    V = PotentialProfile(lambda r: -0.1 * np.ones_like(np.asarray(r, dtype=float)))
    worst_comp = 0.0
    for _ in range(10):
        c = float(rng.uniform(0.2, 0.8))
        center = float(rng.uniform(1.8, 3.0))
        width = float(rng.uniform(0.5, 1.0))
        psi = DiscreteFunction.from_callable(
            mesh, lambda r: c * np.maximum(0.0, 1.0 - ((np.asarray(r, dtype=float) - center) / width) ** 2))
        u = obstacle_solve(mesh, V, psi, (1.0, 0.0))
        rep = obstacle_complementarity(mesh, V, psi, u)
        if not rep["feasible"]:
            return False, "obstacle solution infeasible"
        worst_comp = max(worst_comp, rep["max_complementarity"])
    if worst_comp > 1e-8:
        return False, f"complementarity {worst_comp:.2e}"
    # truncated Green kernel: min(G, c) stays a supersolution
    Gv = np.array([green_kernel(m3, r) for r in mesh.nodes])
    w1 = DiscreteFunction(mesh, Gv)
    w2 = DiscreteFunction(mesh, np.full(mesh.n_nodes, float(green_kernel(m3, 2.0))))
    if not pasting_min_check(mesh, None, w1, w2)["passed"]:
        return False, "truncated Green kernel pasting failed"
    base = dirichlet_solve(mesh, V, None, None, boundary=(1.0, 0.4))
    worst_min = 0.0
    for _ in range(10):
        c0, c1 = rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)
        d0, d1 = rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)
        w1 = DiscreteFunction(mesh, c0 + c1 * base.values)
        w2 = DiscreteFunction(mesh, d0 + d1 * base.values)
        rep = pasting_min_check(mesh, V, w1, w2)
        if not rep["passed"]:
            return False, f"seeded pasting failed at {rep['violations'][:3]}"
        worst_min = min(worst_min, rep["min_scaled_residual"])
    return True, f"complementarity {worst_comp:.2e}, pasting floor {worst_min:.2e}"


_CHECKS = [
    ("hardy-closed-forms", check_hardy_closed_forms),
    ("hardy-limits", check_hardy_limits),
    ("euclidean-constant", check_euclidean_constant),
    ("zeta-positivity", check_zeta_positivity),
    ("exact-solutions", check_exact_solutions),
    ("capacity", check_capacity),
    ("fundamental-tones", check_tones),
    ("picone-lagrangian", check_picone_lagrangian),
    ("monotone-pipeline", check_monotone_pipeline),
    ("multi-solution", check_multi_solution),
    ("obstacle-pasting", check_obstacle_pasting),
]


def run_all(seed: int = 0) -> List[VerifyResult]:
    results = []
    for name, fn in _CHECKS:
        t0 = time.time()
        try:
            if "seed" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                passed, detail = fn(seed=seed)
            else:
                passed, detail = fn()
        except Exception as exc:  # noqa: BLE001 - verdicts must not abort the table
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(VerifyResult(name, passed, detail, time.time() - t0))
    return results
