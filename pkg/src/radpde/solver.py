"""Dirichlet solves, monotone iteration, obstacle problem and pipelines.

The central equation is Delta_{p,f} z + A z^{p-1} - B F(z) = 0 with B >= 0,
solved by damped Newton on the weak form (gradient-descent fallback).  The
monotone scheme brackets solutions of the sign-changing problem between a
subsolution phi_inf and a supersolution phi_0 and iterates linearized
problems whose potentials V_n absorb the negative part of b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (DeltaViolated, LadderStall, NonConvergence, NotCoercive)
from .mesh import (DiscreteFunction, PotentialProfile, RadialMesh, _vals,
                   mass_matrix, qv_energy, qv_residual_vector, residual_scale,
                   stiffness_matrix)


# ---- equation data ----------------------------------------------------------

@dataclass(frozen=True)
class Nonlinearity:
    """Nonlinearity F with F(0) = 0, F > 0 and F(t)/t^{p-1} increasing."""

    F: Callable
    name: str = "F"
    primitive: Optional[Callable] = None
    fprime: Optional[Callable] = None

    @classmethod
    def power(cls, sigma: float) -> "Nonlinearity":
        if sigma <= 0.0:
            raise ValueError("sigma must be positive")
        return cls(F=lambda t: np.abs(t) ** sigma,
                   name=f"t^{sigma:g}",
                   primitive=lambda t: np.abs(t) ** (sigma + 1.0) / (sigma + 1.0),
                   fprime=lambda t: sigma * np.abs(t) ** (sigma - 1.0))

    def derivative(self, t):
        if self.fprime is not None:
            return self.fprime(t)
        h = 1e-6 * (1.0 + np.abs(t))
        return (self.F(t + h) - self.F(np.maximum(t - h, 0.0))) / (h + np.minimum(t, h))

    def validate(self, p: float, grid=None) -> None:
        """Sampled contract check: positivity and monotone quotient."""
        if grid is None:
            grid = np.logspace(-6, 6, 200)
        grid = np.asarray(grid, dtype=float)
        vals = np.asarray(self.F(grid), dtype=float)
        if abs(float(self.F(0.0))) > 1e-14:
            raise ValueError("F(0) must vanish")
        if np.any(vals <= 0.0):
            raise ValueError("F must be positive on (0, inf)")
        quot = vals / grid ** (p - 1.0)
        if np.any(np.diff(quot) <= 0.0):
            raise ValueError("F(t)/t^{p-1} must be strictly increasing")
        if quot[0] > 1e-3 or quot[-1] < 1e3:
            raise ValueError("F(t)/t^{p-1} must tend to 0 at 0 and to infinity at infinity")


@dataclass(frozen=True)
class CoefficientProfile:
    """Radial coefficients a, b with the sign decomposition b = b+ - b-."""

    a: Callable
    b: Callable
    a_support: Optional[float] = None          # a <= 0 beyond this radius
    b_support: Optional[float] = None          # b == 0 beyond this radius
    b_minus_window: Optional[Tuple[float, float]] = None

    def a_at(self, r):
        return np.asarray(self.a(r), dtype=float)

    def b_at(self, r):
        return np.asarray(self.b(r), dtype=float)

    def b_plus(self, r):
        return np.maximum(self.b_at(r), 0.0)

    def b_minus(self, r):
        return np.maximum(-self.b_at(r), 0.0)

    def verify_supports(self, grid) -> dict:
        grid = np.asarray(grid, dtype=float)
        out = {}
        if self.a_support is not None:
            outside = grid > self.a_support
            out["a_nonpositive_outside"] = bool(np.all(self.a_at(grid[outside]) <= 1e-14))
        if self.b_support is not None:
            outside = grid > self.b_support
            out["b_zero_outside"] = bool(np.all(np.abs(self.b_at(grid[outside])) <= 1e-14))
        if self.b_minus_window is not None:
            lo, hi = self.b_minus_window
            outside = (grid < lo) | (grid > hi)
            out["b_minus_inside_window"] = bool(np.all(self.b_minus(grid[outside]) <= 1e-14))
        return out


# ---- weighted assembly helpers ----------------------------------------------

def _weighted_stiffness(mesh: RadialMesh, coef_e: np.ndarray) -> sp.csc_matrix:
    we = mesh.element_measure()
    k_e = coef_e * we / mesh.h ** 2
    n = mesh.n_nodes
    diag = np.zeros(n)
    diag[:-1] += k_e
    diag[1:] += k_e
    return sp.diags([-k_e, diag, -k_e], [-1, 0, 1], format="csc")


def _weighted_mass(mesh: RadialMesh, coef_q: np.ndarray) -> sp.csc_matrix:
    w = coef_q * mesh.wq
    m00 = np.sum(w * mesh.shape0 ** 2, axis=1)
    m11 = np.sum(w * mesh.shape1 ** 2, axis=1)
    m01 = np.sum(w * mesh.shape0 * mesh.shape1, axis=1)
    n = mesh.n_nodes
    diag = np.zeros(n)
    diag[:-1] += m00
    diag[1:] += m11
    return sp.diags([m01, diag, m01], [-1, 0, 1], format="csc")


def _coef_at_q(mesh: RadialMesh, c) -> np.ndarray:
    if c is None:
        return np.zeros_like(mesh.qp)
    if callable(c):
        return np.asarray(c(mesh.qp), dtype=float)
    return np.full_like(mesh.qp, float(c))


def _odd_pow(x, e):
    return np.sign(x) * np.abs(x) ** e


def equation_residual(mesh: RadialMesh, aq: np.ndarray, bq: np.ndarray,
                      F: Optional[Nonlinearity], z: np.ndarray) -> np.ndarray:
    """Weak residual of Delta_{p,f} z + A z^{p-1} - B F(z) for hat tests.

    Sign convention: positive entries certify a supersolution.
    """
    p = mesh.model.p
    s = mesh.slopes(z)
    zq = mesh.values_at_q(z)
    res = mesh.accumulate_slope(_odd_pow(s, p - 1.0))
    res -= mesh.accumulate(aq * _odd_pow(zq, p - 1.0))
    if F is not None:
        res += mesh.accumulate(bq * _odd_pow(zq, 0.0) * F.F(np.abs(zq)))
    return res


def _residual_scale_vector(mesh: RadialMesh, aq, bq, F, z) -> np.ndarray:
    """Per-node magnitude of the residual contributions.

    The radial weight spans many orders of magnitude across a mesh, so
    residuals are judged row by row against the size of their own terms.
    """
    p = mesh.model.p
    s = mesh.slopes(z)
    zq = mesh.values_at_q(z)
    # slope terms are accumulated with absolute element contributions so
    # that monotone profiles do not cancel the scale away
    contrib = np.abs(s) ** (p - 1.0) * mesh.element_measure() / mesh.h
    # roundoff floor: the flux noise that nodal values of size |z| can
    # produce, so locally constant stretches still count as converged
    bound = ((np.abs(z[:-1]) + np.abs(z[1:])) / mesh.h) ** (p - 1.0)
    contrib = contrib + 1e-6 * bound * mesh.element_measure() / mesh.h
    scale = np.zeros(mesh.n_nodes)
    np.add.at(scale, np.arange(mesh.n_elements), contrib)
    np.add.at(scale, np.arange(1, mesh.n_nodes), contrib)
    scale += mesh.accumulate(np.abs(aq) * np.abs(zq) ** (p - 1.0))
    if F is not None:
        scale += mesh.accumulate(np.abs(bq) * F.F(np.abs(zq)))
    return scale + 1e-300


def _residual_scale(mesh: RadialMesh, aq, bq, F, z) -> float:
    return float(np.max(_residual_scale_vector(mesh, aq, bq, F, z)))


def _energy(mesh: RadialMesh, aq, bq, F: Optional[Nonlinearity], z: np.ndarray) -> float:
    p = mesh.model.p
    s = mesh.slopes(z)
    zq = mesh.values_at_q(z)
    val = float(np.sum(np.abs(s) ** p * mesh.element_measure())) / p
    val -= mesh.integrate(aq * np.abs(zq) ** p) / p
    if F is not None and F.primitive is not None:
        val += mesh.integrate(bq * F.primitive(np.abs(zq)))
    return val


def _boundary_array(mesh: RadialMesh, boundary) -> np.ndarray:
    ess = mesh.essential
    if np.isscalar(boundary):
        return np.full(ess.size, float(boundary))
    arr = np.asarray(boundary, dtype=float)
    if arr.size != ess.size:
        raise ValueError("boundary values do not match the essential nodes")
    return arr


def dirichlet_solve(mesh: RadialMesh, A, B, F: Optional[Nonlinearity], boundary,
                    tol: float = 1e-9, max_iter: int = 80,
                    check_coercive: bool = True) -> DiscreteFunction:
    """Positive solution of Delta_{p,f} z + A z^{p-1} - B F(z) = 0, z = boundary.

    Damped Newton on the weak form; steps are halved until the energy
    decreases (residual norm when no primitive is available) and the
    negative-gradient direction is the fallback when the Newton direction
    fails.  The interior residual is driven below tol relative to the size
    of its individual contributions.
    """
    p = mesh.model.p
    aq = _coef_at_q(mesh, A)
    bq = _coef_at_q(mesh, B)
    if np.any(bq < -1e-12):
        raise ValueError("B must be nonnegative")
    bq = np.maximum(bq, 0.0)

    if check_coercive and p == 2.0:
        from .spectral import fundamental_tone
        tone = fundamental_tone(mesh, PotentialProfile(lambda r: _interp_profile(mesh, aq, r)))
        if tone.lam <= 0.0:
            raise NotCoercive(f"fundamental tone of A is {tone.lam:.6g} <= 0")

    free = mesh.free
    bvals = _boundary_array(mesh, boundary)
    z = np.full(mesh.n_nodes, max(float(np.max(bvals)), 1e-8))
    z[mesh.essential] = bvals
    # linearized initial guess: harmonic-type extension of the boundary data
    try:
        K = stiffness_matrix(mesh)
        MA = _weighted_mass(mesh, aq)
        Alin = (K - MA).tocsc()
        rhs = -Alin[:, mesh.essential] @ bvals
        z_lin = z.copy()
        z_lin[free] = spla.spsolve(Alin[np.ix_(free, free)], rhs[free])
        if np.all(z_lin > 0.0):
            z = z_lin
    except Exception:
        pass

    use_energy = F is None or F.primitive is not None
    trace = []
    for _ in range(max_iter):
        res = equation_residual(mesh, aq, bq, F, z)
        scale = _residual_scale_vector(mesh, aq, bq, F, z)
        rnorm = float(np.max(np.abs(res[free]) / scale[free])) if free.size else 0.0
        trace.append(rnorm)
        if rnorm <= tol:
            break
        s = mesh.slopes(z)
        zq = mesh.values_at_q(z)
        coef_e = (p - 1.0) * (s ** 2 + 1e-300) ** ((p - 2.0) / 2.0)
        coef_q = -(p - 1.0) * aq * np.abs(zq) ** (p - 2.0)
        if F is not None:
            coef_q = coef_q + bq * F.derivative(np.abs(zq))
        J = (_weighted_stiffness(mesh, coef_e) + _weighted_mass(mesh, coef_q)).tocsc()
        directions = []
        try:
            dz = spla.spsolve(J[np.ix_(free, free)], res[free])
            directions.append(-dz)
        except Exception:
            pass
        directions.append(-res[free])  # gradient of the energy
        base = _energy(mesh, aq, bq, F, z) if use_energy else rnorm
        accepted = False
        for d in directions:
            t = 1.0
            while t >= 2.0 ** -40:
                z_try = z.copy()
                z_try[free] += t * d
                r_try = equation_residual(mesh, aq, bq, F, z_try)
                rn_try = float(np.max(np.abs(r_try[free]) / scale[free]))
                ok = rn_try < rnorm
                if not ok and use_energy:
                    metric = _energy(mesh, aq, bq, F, z_try)
                    ok = metric <= base - 1e-16 * (1.0 + abs(base))
                if ok:
                    z = z_try
                    accepted = True
                    break
                t *= 0.5
            if accepted:
                break
        if not accepted:
            break
    else:
        raise NonConvergence("Newton did not reach the residual tolerance", trace=trace)
    res = equation_residual(mesh, aq, bq, F, z)
    scale = _residual_scale_vector(mesh, aq, bq, F, z)
    if free.size and float(np.max(np.abs(res[free]) / scale[free])) > tol:
        raise NonConvergence("stationary point without residual convergence", trace=trace)
    if (free.size and np.any(z[free] <= 0.0)) or np.any(z[mesh.essential] < 0.0):
        raise NonConvergence("converged iterate is not positive", trace=trace)
    return DiscreteFunction(mesh, z)


def _interp_profile(mesh: RadialMesh, values_at_q: np.ndarray, r):
    flat_q = mesh.qp.ravel()
    order = np.argsort(flat_q)
    return np.interp(np.asarray(r, dtype=float), flat_q[order], values_at_q.ravel()[order])


# ---- closed-form hyperbolic solutions ---------------------------------------

def hyperbolic_exact_solution(m: int, tau: float) -> Callable:
    """Member u_tau of the radial family solving, on hyperbolic space H^m,
    Delta u + (m(m-2)/4) u - u^{(m+2)/(m-2)} = 0 for tau >= 1.

    u_tau(r) = (m(m-2) tau^2)^{(m-2)/4} [2 cosh^2(r/2)]^{-(m-2)/2}
               (tau^2 - tanh^2(r/2))^{-(m-2)/2};
    tau = 1 gives the constant (m(m-2)/4)^{(m-2)/4}, larger tau decays in r.
    """
    if m < 3:
        raise ValueError("needs m >= 3")
    if tau < 1.0:
        raise ValueError("tau must be >= 1")
    amp = (m * (m - 2.0) * tau ** 2) ** ((m - 2.0) / 4.0)
    e = (m - 2.0) / 2.0

    def u(r):
        r = np.asarray(r, dtype=float)
        t = np.tanh(0.5 * r)
        return amp * (2.0 * np.cosh(0.5 * r) ** 2) ** (-e) * (tau ** 2 - t ** 2) ** (-e)

    return u


# ---- weighted spectral gap and delta ----------------------------------------

def default_gap_weight(model, a: Callable) -> PotentialProfile:
    """Margin (chi - a)+ between the Hardy weight and a, a valid gap weight
    whenever a sits strictly below chi."""
    from .hardy import chi_general

    def w(r):
        r = np.asarray(r, dtype=float)
        return np.maximum(np.asarray(chi_general(model, r), dtype=float)
                          - np.asarray(a(r), dtype=float), 0.0)

    return PotentialProfile(w, name="(chi - a)+")


def _window_indicator(lam: Tuple[float, float]):
    lo, hi = lam

    def ind(r):
        r = np.asarray(r, dtype=float)
        return ((r >= lo) & (r <= hi)).astype(float)

    return ind


@dataclass(frozen=True)
class DeltaInfo:
    delta: float
    C: float                 # uniform upper bound C_Lambda(eps)
    C_bar: float             # uniform lower bound on Lambda
    min_W: float
    per_rung_sup: List[float]
    per_rung_inf: List[float]


def compute_delta_info(meshes: Sequence[RadialMesh], a: Callable, F: Nonlinearity,
                       eps: float, lam: Tuple[float, float],
                       W: Optional[Callable] = None,
                       b_plus: Optional[Callable] = None) -> DeltaInfo:
    """Ladder estimate of C_Lambda(eps) and the threshold delta.

    Each rung solves the reinforced problem with potential a + W 1_Lambda
    and B = b+; C is the worst sup over the rungs, C_bar the worst inf of
    the companion problem with potential a, and
    delta = (min_Lambda W) C^{p-1} / F(C).
    """
    model = meshes[0].model
    p = model.p
    if W is None:
        W = default_gap_weight(model, a)
    lo, hi = lam
    sample = np.linspace(lo, hi, 801)
    min_W = float(np.min(np.asarray(W(sample), dtype=float)))
    if min_W <= 0.0:
        raise ValueError("gap weight W must be positive on the window")
    ind = _window_indicator(lam)
    A_plus = lambda r: np.asarray(a(r), dtype=float) + np.asarray(W(r), dtype=float) * ind(r)
    sups, infs = [], []
    for mesh in meshes:
        phi0 = dirichlet_solve(mesh, A_plus, b_plus, F, eps)
        sups.append(float(np.max(phi0.values)))
        phi_inf = dirichlet_solve(mesh, a, b_plus, F, eps)
        on_lam = (mesh.nodes >= lo) & (mesh.nodes <= hi)
        infs.append(float(np.min(phi_inf.values[on_lam])))
    C = max(sups)
    C_bar = min(infs)
    delta = min_W * C ** (p - 1.0) / float(F.F(C))
    return DeltaInfo(delta=delta, C=C, C_bar=C_bar, min_W=min_W,
                     per_rung_sup=sups, per_rung_inf=infs)


def compute_delta(meshes, a, F, eps, lam, lam_prime=None, W=None, b_plus=None) -> float:
    return compute_delta_info(meshes, a, F, eps, lam, W=W, b_plus=b_plus).delta


# ---- monotone iteration ------------------------------------------------------

@dataclass
class SolveReport:
    solution: DiscreteFunction
    lower: float
    upper: float
    delta: float
    epsilon: float
    iteration_trace: List[float]
    residual: float
    domain_sequence: List[float] = field(default_factory=list)
    converged: bool = True
    phi_inf: Optional[DiscreteFunction] = None
    phi_0: Optional[DiscreteFunction] = None
    iterates: List[np.ndarray] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.iteration_trace)

    def summary(self) -> dict:
        return {
            "sup_norm": float(np.max(self.solution.values)),
            "inf": float(np.min(self.solution.values)),
            "lower_bound": self.lower,
            "upper_bound": self.upper,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "domain_sequence": list(self.domain_sequence),
        }


def monotone_iteration(mesh: RadialMesh, coeffs: CoefficientProfile, F: Nonlinearity,
                       eps: float, lam: Tuple[float, float],
                       W: Optional[Callable] = None,
                       delta_info: Optional[DeltaInfo] = None,
                       tol: float = 1e-8, max_iter: int = 200) -> SolveReport:
    """Monotone scheme for Delta_{p,f} u + a u^{p-1} - b F(u) = 0, u = eps on
    the boundary, with b- supported in the window lam.

    The n-th iterate solves the problem with potential
    V_n = a + b- F(phi_{n-1})/phi_{n-1}^{p-1} and B = b+; the sequence
    decreases from phi_0 (potential a + W 1_Lambda) toward the bracketed
    solution and stays above phi_inf (potential a).
    """
    p = mesh.model.p
    model = mesh.model
    if W is None:
        W = default_gap_weight(model, coeffs.a)
    if delta_info is None:
        delta_info = compute_delta_info([mesh], coeffs.a, F, eps, lam, W=W,
                                        b_plus=coeffs.b_plus)
    bminus_max = float(np.max(coeffs.b_minus(mesh.qp)))
    if bminus_max > delta_info.delta * (1.0 + 1e-9):
        raise DeltaViolated(
            f"min b = {-bminus_max:.6g} below -delta = {-delta_info.delta:.6g}")

    ind = _window_indicator(lam)
    phi_inf = dirichlet_solve(mesh, coeffs.a, coeffs.b_plus, F, eps)
    A_plus = lambda r: (np.asarray(coeffs.a(r), dtype=float)
                        + np.asarray(W(r), dtype=float) * ind(r))
    phi0 = dirichlet_solve(mesh, A_plus, coeffs.b_plus, F, eps)

    trace: List[float] = []
    iterates: List[np.ndarray] = []
    if bminus_max == 0.0:
        u = phi_inf.values.copy()
        iterates.append(u.copy())
    else:
        prev = phi0.values.copy()
        iterates.append(prev.copy())
        u = prev
        for _ in range(max_iter):
            prev_interp = lambda r: np.interp(np.asarray(r, dtype=float),
                                              mesh.nodes, prev)

            def V_n(r):
                ph = np.maximum(prev_interp(r), 1e-300)
                return (np.asarray(coeffs.a(r), dtype=float)
                        + coeffs.b_minus(r) * F.F(ph) / ph ** (p - 1.0))

            phi_n = dirichlet_solve(mesh, V_n, coeffs.b_plus, F, eps)
            step = float(np.max(np.abs(phi_n.values - prev)))
            trace.append(step)
            iterates.append(phi_n.values.copy())
            prev = phi_n.values
            u = prev
            if step < tol:
                break
        else:
            raise NonConvergence("monotone iteration exceeded max_iter", trace=trace)

    slack = 1e-8 * (1.0 + float(np.max(phi0.values)))
    if np.any(u > phi0.values + slack) or np.any(u < phi_inf.values - slack):
        raise NonConvergence("limit escaped the [phi_inf, phi_0] bracket", trace=trace)

    aq = _coef_at_q(mesh, coeffs.a)
    bq_full = np.asarray(coeffs.b(mesh.qp), dtype=float)
    res = _full_equation_residual(mesh, aq, bq_full, F, u)
    scale = _residual_scale(mesh, aq, np.abs(bq_full), F, u)
    rnorm = float(np.max(np.abs(res[mesh.free]))) / scale if mesh.free.size else 0.0
    return SolveReport(solution=DiscreteFunction(mesh, u),
                       lower=delta_info.C_bar, upper=delta_info.C,
                       delta=delta_info.delta, epsilon=eps,
                       iteration_trace=trace, residual=rnorm,
                       domain_sequence=[float(mesh.nodes[-1])],
                       phi_inf=phi_inf, phi_0=phi0, iterates=iterates)


def _full_equation_residual(mesh, aq, bq, F, z):
    """Residual with a signed b (the b- part enters through the F term)."""
    p = mesh.model.p
    s = mesh.slopes(z)
    zq = mesh.values_at_q(z)
    res = mesh.accumulate_slope(_odd_pow(s, p - 1.0))
    res -= mesh.accumulate(aq * _odd_pow(zq, p - 1.0))
    res += mesh.accumulate(bq * F.F(np.abs(zq)))
    return res


def run_pipeline(meshes: Sequence[RadialMesh], coeffs: CoefficientProfile,
                 F: Nonlinearity, eps: float, lam: Tuple[float, float],
                 W: Optional[Callable] = None, tol: float = 1e-8,
                 stability_rel: float = 0.01) -> SolveReport:
    """Run the monotone scheme on every ladder rung; the last rung's output
    is the global-solution surrogate, with a stabilization check between
    the final two rungs on their common window."""
    model = meshes[0].model
    if W is None:
        W = default_gap_weight(model, coeffs.a)
    info = compute_delta_info(meshes, coeffs.a, F, eps, lam, W=W,
                              b_plus=coeffs.b_plus)
    reports = [monotone_iteration(mesh, coeffs, F, eps, lam, W=W,
                                  delta_info=info, tol=tol) for mesh in meshes]
    final = reports[-1]
    final.domain_sequence = [float(m.nodes[-1]) for m in meshes]
    if len(reports) >= 2:
        prev = reports[-2]
        common = prev.solution.mesh.nodes
        interp = np.interp(common, final.solution.mesh.nodes, final.solution.values)
        denom = float(np.max(np.abs(interp))) + 1e-300
        drift = float(np.max(np.abs(interp - prev.solution.values))) / denom
        final.converged = drift < stability_rel
    return final


def multi_solution_sequence(meshes: Sequence[RadialMesh], coeffs: CoefficientProfile,
                            F: Nonlinearity, k_max: int, eps0: float = 1.0,
                            lam: Optional[Tuple[float, float]] = None,
                            W: Optional[Callable] = None,
                            eps_floor: float = 1e-12) -> List[SolveReport]:
    """Distinct bounded solutions u_0 > u_1 > ... via a shrinking epsilon
    ladder: each epsilon_k is halved until C_Lambda(eps_k) drops below the
    minimum of the previous solution on the window."""
    model = meshes[0].model
    if W is None:
        W = default_gap_weight(model, coeffs.a)
    reports: List[SolveReport] = []
    eps = eps0
    for k in range(k_max):
        if k > 0:
            lo, hi = lam
            nodes = meshes[-1].nodes
            on_lam = (nodes >= lo) & (nodes <= hi)
            target = float(np.min(reports[-1].solution.values[on_lam]))
            while True:
                eps *= 0.5
                if eps < eps_floor:
                    raise LadderStall("epsilon underflow before k_max solutions")
                info = compute_delta_info(meshes, coeffs.a, F, eps, lam, W=W,
                                          b_plus=coeffs.b_plus)
                if info.C < target:
                    break
        rep = run_pipeline(meshes, coeffs, F, eps, lam, W=W)
        reports.append(rep)
    return reports


# ---- uniform bound checks ----------------------------------------------------

def uniform_lower_bound_check(meshes: Sequence[RadialMesh], coeffs: CoefficientProfile,
                              F: Nonlinearity, eps: float, lam: Tuple[float, float],
                              floor: Optional[float] = None) -> dict:
    """Solve the subsolution problem (potential a, B = b+) on each rung and
    watch inf over the window: it should stabilize instead of decaying."""
    lo, hi = lam
    infs = []
    inf_domain = []
    for mesh in meshes:
        z = dirichlet_solve(mesh, coeffs.a, coeffs.b_plus, F, eps)
        on_lam = (mesh.nodes >= lo) & (mesh.nodes <= hi)
        infs.append(float(np.min(z.values[on_lam])))
        inf_domain.append(float(np.min(z.values)))
    running = np.minimum.accumulate(infs)
    stable = (abs(running[-1] - running[-2]) <= 0.01 * abs(running[-1])
              if len(infs) >= 2 else True)
    report = {"inf_per_rung": infs, "inf_domain_per_rung": inf_domain,
              "running_min": running.tolist(), "stable": bool(stable)}
    if floor is not None:
        report["above_floor"] = bool(running[-1] >= floor)
    return report


def uniform_upper_bound_check(meshes: Sequence[RadialMesh], A, B, F: Nonlinearity,
                              eps: float, lam: Tuple[float, float], c: float,
                              loc_tol: float = 1e-5) -> dict:
    """Per-rung sup of the solve with data (A, B) plus the localization
    identity sup_U z = sup_{U cap Lambda} z on U = {z > alpha}, where alpha
    satisfies F(t)/t^{p-1} >= c for t >= alpha."""
    model = meshes[0].model
    p = model.p
    # invert the quotient on a sampled grid
    ts = np.logspace(-8, 8, 4001)
    quot = np.asarray(F.F(ts), dtype=float) / ts ** (p - 1.0)
    idx = np.searchsorted(quot, c)
    alpha = float(ts[min(idx, ts.size - 1)])
    alpha = max(alpha, eps * (1.0 + 1e-9))
    sups = []
    localization = []
    lo, hi = lam
    for mesh in meshes:
        z = dirichlet_solve(mesh, A, B, F, eps)
        sups.append(float(np.max(z.values)))
        U = z.values > alpha
        if np.any(U):
            sup_U = float(np.max(z.values[U]))
            on_lam = U & (mesh.nodes >= lo) & (mesh.nodes <= hi)
            sup_lam = float(np.max(z.values[on_lam])) if np.any(on_lam) else -math.inf
            localization.append(abs(sup_U - sup_lam) <= loc_tol * (1.0 + sup_U))
        else:
            localization.append(True)  # vacuous
    stable = (abs(sups[-1] - sups[-2]) <= 0.01 * abs(sups[-1])
              if len(sups) >= 2 else True)
    return {"sup_per_rung": sups, "alpha": alpha,
            "localization_ok": localization, "stable": bool(stable)}


# ---- obstacle problem ---------------------------------------------------------

def obstacle_solve(mesh: RadialMesh, V, psi, theta, tol: float = 1e-12,
                   max_iter: int = 200) -> DiscreteFunction:
    """Minimizer of the Q_V energy over {u >= psi, u = theta on the boundary}.

    p = 2 uses a primal active-set method (exact complementarity at the
    discrete level); other p fall back to projected gradient descent with
    backtracking on the energy.
    """
    from .spectral import fundamental_tone
    psi_v = _vals(psi) if not np.isscalar(psi) else np.full(mesh.n_nodes, float(psi))
    theta_arr = _boundary_array(mesh, theta)
    if np.any(theta_arr < psi_v[mesh.essential] - 1e-14):
        raise ValueError("boundary datum must dominate the obstacle")
    tone = fundamental_tone(mesh, V)
    if tone.lam <= 0.0:
        raise NotCoercive(f"fundamental tone of V is {tone.lam:.6g} <= 0")
    free = mesh.free
    if mesh.model.p == 2.0:
        K = stiffness_matrix(mesh)
        MV = mass_matrix(mesh, V) if V is not None else None
        Amat = (K if MV is None else (K - MV)).tocsc()
        u = np.zeros(mesh.n_nodes)
        u[mesh.essential] = theta_arr
        active = np.zeros(mesh.n_nodes, dtype=bool)
        for _ in range(max_iter):
            fixed = np.zeros(mesh.n_nodes, dtype=bool)
            fixed[mesh.essential] = True
            fixed |= active
            u_fix = np.where(active, psi_v, u)
            u_fix[mesh.essential] = theta_arr
            solve_idx = np.nonzero(~fixed)[0]
            if solve_idx.size:
                rhs = -(Amat[:, np.nonzero(fixed)[0]] @ u_fix[np.nonzero(fixed)[0]])
                sol = spla.spsolve(Amat[np.ix_(solve_idx, solve_idx)], rhs[solve_idx])
                u = u_fix.copy()
                u[solve_idx] = sol
            else:
                u = u_fix
            r = Amat @ u
            add = np.zeros(mesh.n_nodes, dtype=bool)
            add[solve_idx] = u[solve_idx] < psi_v[solve_idx] - 1e-14
            release = active & (r < -1e-14)
            if not add.any() and not release.any():
                break
            active = (active | add) & ~release
            active[mesh.essential] = False
        u = np.maximum(u, psi_v)
        u[mesh.essential] = theta_arr
        return DiscreteFunction(mesh, u)
    # projected descent for general p
    u = np.maximum(psi_v, float(np.max(theta_arr)))
    u[mesh.essential] = theta_arr
    step = 1.0
    for _ in range(20000):
        grad = qv_residual_vector(mesh, V, u)
        grad[mesh.essential] = 0.0
        proj = u - grad
        proj[free] = np.maximum(proj[free], psi_v[free])
        pg = u - proj
        if float(np.max(np.abs(pg))) < tol:
            break
        e0 = qv_energy(mesh, V, u)
        while step > 1e-16:
            trial = u.copy()
            trial[free] = np.maximum(u[free] - step * grad[free], psi_v[free])
            if qv_energy(mesh, V, trial) < e0:
                u = trial
                step *= 1.3
                break
            step *= 0.5
        else:
            break
    return DiscreteFunction(mesh, u)


def obstacle_complementarity(mesh: RadialMesh, V, psi, u) -> dict:
    """Nodewise complementarity diagnostics for an obstacle solution."""
    psi_v = _vals(psi) if not np.isscalar(psi) else np.full(mesh.n_nodes, float(psi))
    uv = _vals(u)
    res = qv_residual_vector(mesh, V, uv)
    scale = residual_scale(mesh, V, uv)
    gap = uv - psi_v
    comp = np.abs(gap[mesh.free] * res[mesh.free]) / scale
    return {"max_complementarity": float(np.max(comp)) if mesh.free.size else 0.0,
            "min_residual_scaled": float(np.min(res[mesh.free]) / scale),
            "feasible": bool(np.all(gap >= -1e-12))}


def pasting_min_check(mesh: RadialMesh, V, w1, w2, tol: float = 1e-6) -> dict:
    """Verify that min(w1, w2) is still a discrete supersolution.

    The kink can cross at most one element per intersection; the reported
    tolerance absorbs the quadrature slop there.
    """
    v1, v2 = _vals(w1), _vals(w2)
    w = np.minimum(v1, v2)
    res = qv_residual_vector(mesh, V, w)
    scale = residual_scale(mesh, V, w)
    scaled = res[mesh.free] / scale
    bad = np.nonzero(scaled < -tol)[0]
    return {"passed": bad.size == 0,
            "min_scaled_residual": float(np.min(scaled)) if scaled.size else 0.0,
            "violations": mesh.nodes[mesh.free][bad].tolist()}


def necessary_condition_check(mesh: RadialMesh, coeffs: CoefficientProfile,
                              u, F: Nonlinearity, tol: float = 1e-6,
                              n_rungs: int = 4, n_sub: int = 400) -> dict:
    """Tone of a on shrinking neighborhoods of B0 = {b <= 0}.

    A bounded positive supersolution forces lambda_a(B0) >= 0; the report
    also evaluates the quantitative bound linking ||b-||_inf, F(u)/u^{p-1}
    on B0 and the tone of the near-maximal set of b-.
    """
    from .spectral import fundamental_tone
    model = mesh.model
    nodes = mesh.nodes
    bvals = coeffs.b_at(nodes)
    mask = bvals <= 0.0
    if not np.any(mask):
        return {"vacuous": True, "tones": [], "final_nonneg": True}
    lo = float(nodes[mask][0])
    hi = float(nodes[mask][-1])
    r0, r1 = float(nodes[0]), float(nodes[-1])
    width = hi - lo + 1e-12
    margins = np.linspace(0.5 * width + 0.2 * (r1 - r0), 0.05 * width, n_rungs)
    a_prof = PotentialProfile(coeffs.a, name="a")
    tones = []
    for marg in margins:
        a_lo = max(lo - marg, r0)
        a_hi = min(hi + marg, r1)
        sub = _region_mesh(model, a_lo, a_hi, n_sub)
        tones.append(fundamental_tone(sub, a_prof).lam)

    uv = _vals(u)
    p = model.p
    on_b0 = mask
    quot = F.F(np.abs(uv[on_b0])) / np.abs(uv[on_b0]) ** (p - 1.0)
    lhs = float(np.max(coeffs.b_minus(nodes))) * float(np.min(quot))
    b_minus = coeffs.b_minus(nodes)
    bm_max = float(np.max(b_minus))
    rhs = math.inf
    if bm_max > 0.0:
        for eps in (0.25, 0.5, 0.75):
            sel = b_minus >= (1.0 - eps) * bm_max
            s_lo, s_hi = float(nodes[sel][0]), float(nodes[sel][-1])
            pad = 0.05 * (s_hi - s_lo + 0.1)
            sub = _region_mesh(model, max(s_lo - pad, r0), min(s_hi + pad, r1), n_sub)
            rhs = min(rhs, fundamental_tone(sub, a_prof).lam / (1.0 - eps))
    return {"vacuous": False, "tones": tones, "final_nonneg": tones[-1] >= -tol,
            "bound_lhs": lhs, "bound_rhs": rhs,
            "bound_holds": lhs <= rhs + tol}


def _region_mesh(model, lo: float, hi: float, n: int) -> RadialMesh:
    from .mesh import annulus_mesh, ball_mesh
    if lo <= 1e-12:
        return ball_mesh(model, hi, n)
    return annulus_mesh(model, lo, hi, n)
