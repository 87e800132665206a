"""Prescribed-scalar-curvature front-end.

Translates radial curvature data (s, s_tilde, m) into the coefficient pair
(a, b) = (-s/c_m, -s_tilde/c_m) with the critical power F(t) = t^{(m+2)/(m-2)},
runs the solver pipeline and packages the conformal factor into uniform
metric bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionTooLow
from .green import subcriticality_state
from .hardy import chi_general
from .mesh import RadialMesh
from .solver import (CoefficientProfile, Nonlinearity, SolveReport,
                     multi_solution_sequence, run_pipeline)


@dataclass(frozen=True)
class YamabeProblem:
    m: int
    s: Callable          # scalar curvature profile s(r)
    s_tilde: Callable    # target curvature profile

    def __post_init__(self):
        if self.m < 3:
            raise DimensionTooLow("prescribed-curvature problems need m >= 3")

    @property
    def c_m(self) -> float:
        return 4.0 * (self.m - 1.0) / (self.m - 2.0)

    @property
    def sigma(self) -> float:
        return (self.m + 2.0) / (self.m - 2.0)


@dataclass(frozen=True)
class ConformalReport:
    conformal_factor: "object"
    C1: float
    C2: float
    uniform_equivalence: bool
    solve_report: Optional[SolveReport] = None


def to_coefficients(yp: YamabeProblem) -> Tuple[CoefficientProfile, Nonlinearity]:
    """Coefficients (a, b) = (-s/c_m, -s_tilde/c_m) and the critical power."""
    c_m = yp.c_m
    a = lambda r: -np.asarray(yp.s(r), dtype=float) / c_m
    b = lambda r: -np.asarray(yp.s_tilde(r), dtype=float) / c_m
    return CoefficientProfile(a=a, b=b), Nonlinearity.power(yp.sigma)


def reconstruct_curvatures(yp: YamabeProblem, coeffs: CoefficientProfile):
    """Inverse of to_coefficients, for round-trip checks."""
    c_m = yp.c_m
    return (lambda r: -c_m * coeffs.a_at(r)), (lambda r: -c_m * coeffs.b_at(r))


def conformal_laplacian_subcritical(yp: YamabeProblem, model, grid=None) -> str:
    """Subcriticality verdict for the conformal Laplacian potential -s/c_m.

    Domination by the Hardy weight with strict inequality somewhere settles
    it; otherwise the capacity classifier takes over.
    """
    if subcriticality_state(model) != "subcritical":
        return "inconclusive"
    if grid is None:
        grid = np.logspace(-2, np.log10(30.0), 200)
    grid = np.asarray(grid, dtype=float)
    a_vals = -np.asarray(yp.s(grid), dtype=float) / yp.c_m
    chi = np.asarray(chi_general(model, grid), dtype=float)
    if np.all(a_vals <= chi + 1e-12) and np.any(a_vals < chi - 1e-12):
        return "subcritical"
    from .capacity import classify_criticality
    from .mesh import PotentialProfile, annulus_mesh
    V = PotentialProfile(lambda r: -np.asarray(yp.s(r), dtype=float) / yp.c_m)
    rungs = [annulus_mesh(model, 1.0, 2.0 * 2.0 ** j, 400, spacing="log")
             for j in range(7)]
    out = classify_criticality(rungs, V)["classification"]
    return "not" if out == "critical" else out


def run_prescribed_curvature(yp: YamabeProblem, meshes: Sequence[RadialMesh],
                             eps: float, lam: Tuple[float, float],
                             multi: int = 0) -> ConformalReport:
    """Solve the curvature-prescription problem on the ladder.

    With multi > 0 a shrinking-epsilon sequence is produced instead and the
    report carries the smallest solution (whose metric bound C2 shrinks
    with it).
    """
    coeffs, F = to_coefficients(yp)
    if multi > 0:
        reports = multi_solution_sequence(meshes, coeffs, F, k_max=multi,
                                          eps0=eps, lam=lam)
        rep = reports[-1]
    else:
        rep = run_pipeline(meshes, coeffs, F, eps, lam)
    u = rep.solution
    expo = 4.0 / (yp.m - 2.0)
    inf_u = float(np.min(u.values))
    sup_u = float(np.max(u.values))
    C1 = inf_u ** expo
    C2 = sup_u ** expo
    return ConformalReport(conformal_factor=u, C1=C1, C2=C2,
                           uniform_equivalence=inf_u > 0.0, solve_report=rep)
