"""Q_V-capacities, the boundary-flux formula and the criticality classifier.

The capacitor of (K, Omega) with datum g solves Q_V'(u) = 0 on the annulus
Omega \\ K with u = g on the inner edge and 0 on the outer; its energy is
the capacity.  Capacities decrease along an exhaustion, and whether they
stabilize above a floor or decay to zero is the ground-state alternative
in numerical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .mesh import DiscreteFunction, RadialMesh, qv_energy
from .solver import dirichlet_solve

Datum = Union[float, Tuple[Callable, Optional[Callable]]]


@dataclass(frozen=True)
class CapacityResult:
    value: float
    capacitor: DiscreteFunction
    flux_value: float
    domain: Tuple[float, float]
    datum_inner_value: float


def _datum_at(g: Datum, r: float) -> Tuple[float, float]:
    """Value and derivative of the supersolution datum at radius r."""
    if np.isscalar(g):
        return float(g), 0.0
    func, deriv = g
    val = float(func(r))
    if deriv is not None:
        return val, float(deriv(r))
    h = 1e-6 * (1.0 + abs(r))
    return val, (float(func(r + h)) - float(func(r - h))) / (2.0 * h)


def _edge_slope(nodes: np.ndarray, vals: np.ndarray) -> float:
    """Second-order one-sided derivative at the inner edge."""
    s1 = (vals[1] - vals[0]) / (nodes[1] - nodes[0])
    s2 = (vals[2] - vals[1]) / (nodes[2] - nodes[1])
    w = (nodes[1] - nodes[0]) / (nodes[2] - nodes[0])
    return s1 - w * (s2 - s1)


def capacitor_solve(mesh: RadialMesh, V, g: Datum = 1.0) -> CapacityResult:
    """Capacitor on the annulus mesh with inner datum g, outer value 0."""
    if mesh.kind != "annulus":
        raise ValueError("capacitors live on annulus meshes")
    p = mesh.model.p
    a, b = float(mesh.nodes[0]), float(mesh.nodes[-1])
    g_val, g_deriv = _datum_at(g, a)
    if g_val <= 0.0:
        raise ValueError("datum must be positive on the inner edge")
    u = dirichlet_solve(mesh, V, None, None, boundary=(g_val, 0.0))
    value = qv_energy(mesh, V, u)
    area = float(mesh.model.omega(a))  # area of the inner sphere
    du = _edge_slope(mesh.nodes, u.values)
    # outward normal to the inner region points in the +r direction
    flux_g = np.sign(g_deriv) * abs(g_deriv) ** (p - 1.0)
    flux_u = np.sign(du) * abs(du) ** (p - 1.0)
    flux_value = (area * g_val / p) * (flux_g - flux_u)
    return CapacityResult(value=float(value), capacitor=u, flux_value=float(flux_value),
                          domain=(a, b), datum_inner_value=g_val)


def global_capacity(meshes: Sequence[RadialMesh], V, g: Datum = 1.0) -> dict:
    """Non-increasing capacity sequence along a ladder of outer radii."""
    values: List[float] = []
    results: List[CapacityResult] = []
    for mesh in meshes:
        res = capacitor_solve(mesh, V, g)
        results.append(res)
        values.append(res.value)
    diffs = np.diff(values)
    monotone = bool(np.all(diffs <= 1e-9 * (1.0 + np.abs(values[:-1]))))
    return {"values": values, "estimate": values[-1], "monotone": monotone,
            "results": results}


def classify_criticality(meshes: Sequence[RadialMesh], V, g: Datum = 1.0,
                         floor_fraction: float = 1e-3,
                         stall_rel: float = 0.01,
                         decay_rel: float = 0.02) -> dict:
    """Ground-state alternative as a trend call on the capacity ladder.

    Stabilized above the floor: subcritical.  Persistent decay or a value
    below the floor: critical (the normalized capacitors then approximate
    the ground state).  Anything else: inconclusive.
    """
    ladder = global_capacity(meshes, V, g)
    values = ladder["values"]
    floor = floor_fraction * values[0]
    verdict = "inconclusive"
    if len(values) >= 2:
        last, prev = values[-1], values[-2]
        rel_change = abs(last - prev) / (abs(last) + 1e-300)
        decays = all(v2 < v1 * (1.0 - decay_rel) for v1, v2 in zip(values, values[1:]))
        if last <= floor or decays:
            verdict = "critical"
        elif rel_change < stall_rel and last > floor:
            verdict = "subcritical"
    ground_state = None
    if verdict == "critical":
        cap = ladder["results"][-1].capacitor
        ref = cap.values[len(cap.values) // 4]
        if ref != 0.0:
            ground_state = DiscreteFunction(cap.mesh, cap.values / ref)
    return {"classification": verdict, "values": values, "floor": floor,
            "ground_state": ground_state}
