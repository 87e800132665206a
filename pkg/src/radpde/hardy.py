"""Sharp Hardy weights on radial models.

The basic object is chi(r) = ((p-1)/p)^p [g(r)^alpha I_alpha(r)]^{-p} with
alpha = (m-1)/(p-1) and I_alpha(r) the tail integral of g^{-alpha}.  On
hyperbolic space alpha in {1, 2} admits closed forms and neighbouring
alphas are linked by a recursion; on flat space chi is the classical
weight ((m-p)/p)^p r^{-p}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .errors import (MassExceeded, NonPositiveQuotient, NotSubcritical,
                     UnsupportedAlpha, UnsupportedExponent)
from .geometry import (ModelManifold, WarpingFunction, flat_model,
                       hyperbolic_model)

# log-derivative scale above which the tail is treated as exponential
_EXP_TAIL_THRESHOLD = 20.0


def default_cutoff(warping: WarpingFunction) -> float:
    if warping.kappa is not None and warping.kappa > 0.0:
        return 50.0 / warping.kappa
    if warping.kappa == 0.0:
        return 1e4
    return warping.r_max


def _analytic_tail(warping: WarpingFunction, alpha: float, c: float) -> float:
    """Closed-form estimate of the tail of g^{-alpha} beyond the cutoff c.

    Exponential-type warpings use the log-derivative at c; power-like ones
    use the local power exponent.  A non-integrable tail raises.
    """
    g = float(warping.g(c))
    gp = float(warping.g_prime(c))
    if g <= 0.0 or gp <= 0.0:
        raise NotSubcritical("warping not increasing at the tail cutoff")
    q = c * gp / g
    if q > _EXP_TAIL_THRESHOLD:
        # g ~ const * e^{kr} with k = g'/g, so the tail integrates exactly
        return g ** (1.0 - alpha) / (alpha * gp)
    if alpha * q > 1.0 + 1e-9:
        # g ~ const * r^q
        return c * g ** (-alpha) / (alpha * q - 1.0)
    raise NotSubcritical(
        f"tail of g^-alpha decays like r^{-alpha * q:.3g} at the cutoff; not integrable")


def tail_integrals(warping: WarpingFunction, alpha: float, radii,
                   cutoff: Optional[float] = None) -> np.ndarray:
    """I_alpha(r) = int_r^inf g(s)^{-alpha} ds for each requested radius."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii <= 0.0):
        raise ValueError("radii must be positive")
    if cutoff is None:
        cutoff = default_cutoff(warping)

    def integrand(s):
        return float(warping.g(s)) ** (-alpha)

    order = np.argsort(radii)
    rs = radii[order]
    out = np.empty_like(rs)

    # breakpoints: the sorted radii below the cutoff, then geometric
    # subdivision up to the cutoff so no quad call spans many decades
    inside = rs[rs < cutoff]
    points = list(inside)
    last = points[-1] if points else cutoff
    while last * 10.0 < cutoff:
        last *= 10.0
        points.append(last)
    points.append(cutoff)

    acc = _analytic_tail(warping, alpha, cutoff)
    segment_sums = np.zeros(len(points))
    for j in range(len(points) - 2, -1, -1):
        val, _ = quad(integrand, points[j], points[j + 1], epsabs=0.0,
                      epsrel=1e-12, limit=200)
        segment_sums[j] = segment_sums[j + 1] + val

    n_inside = inside.size
    for k in range(rs.size):
        if rs[k] >= cutoff:
            out[k] = _analytic_tail(warping, alpha, rs[k])
        else:
            j = np.searchsorted(inside, rs[k])
            j = min(j, n_inside - 1)
            out[k] = acc + segment_sums[j]
    result = np.empty_like(out)
    result[order] = out
    return result


def chi_general(mm: ModelManifold, r, cutoff: Optional[float] = None):
    """Hardy weight ((p-1)/p)^p [g^alpha I_alpha]^{-p} on the model mm."""
    p, alpha = mm.p, mm.alpha
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    cp = ((p - 1.0) / p) ** p
    c = default_cutoff(mm.warping) if cutoff is None else cutoff
    chi = np.empty_like(r_arr)
    far = r_arr >= c
    if np.any(far):
        # in the pure-tail regime g^alpha * I collapses to g/(alpha g'),
        # which avoids overflow of the separate factors
        g = np.asarray(mm.warping.g(r_arr[far]), dtype=float)
        gp = np.asarray(mm.warping.g_prime(r_arr[far]), dtype=float)
        q = r_arr[far] * gp / g
        if np.any(q <= _EXP_TAIL_THRESHOLD):
            raise NotSubcritical("radii beyond the cutoff need an exponential tail")
        chi[far] = cp * (alpha * gp / g) ** p
    near = ~far
    if np.any(near):
        I = tail_integrals(mm.warping, alpha, r_arr[near], cutoff=c)
        g = np.asarray(mm.warping.g(r_arr[near]), dtype=float)
        chi[near] = cp * (g ** alpha * I) ** (-p)
    return chi if np.ndim(r) else float(chi[0])


def chi_flat_closed(m: int, p: float, r):
    if p >= m:
        raise UnsupportedExponent("flat closed form needs p < m")
    r = np.asarray(r, dtype=float)
    return ((m - p) / p) ** p * r ** (-p)


def chi_hyperbolic_closed(m: int, p: float, kappa: float, r):
    """Closed forms for alpha = (m-1)/(p-1) in {1, 2} on hyperbolic space."""
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    alpha = (m - 1) / (p - 1)
    r = np.asarray(r, dtype=float)
    if abs(alpha - 1.0) < 1e-12:
        s = np.sinh(kappa * r)
        # log((e^{kr}+1)/(e^{kr}-1)) written in a cancellation-free form
        log_term = 2.0 * np.arctanh(np.exp(-kappa * r))
        return ((m - 1) * kappa / m) ** m * (s * log_term) ** (-m)
    if abs(alpha - 2.0) < 1e-12:
        e = (m + 1) / 2.0
        return (2.0 * (m - 1) * kappa / (m + 1)) ** e * (1.0 - np.exp(-2.0 * kappa * r)) ** (-e)
    raise UnsupportedAlpha(f"alpha = {alpha:g} has no closed form; use chi_general")


def chi_limit(alpha: float, p: float, kappa: float) -> float:
    """Limit of chi at infinity on hyperbolic space."""
    return ((p - 1.0) / p) ** p * alpha ** p * kappa ** p


def chi_recursion_step(alpha: float, kappa: float, r: float,
                       chi_alpha_plus_2: float, p: float = 2.0) -> float:
    """Recover chi_alpha from chi_{alpha+2} via the hyperbolic recursion.

    alpha chi_alpha^{-1/p} = p coth(kappa r)/((p-1) kappa)
                             - (alpha+1)/(kappa^2 g_kappa(r)^2) chi_{alpha+2}^{-1/p}
    """
    if alpha <= 0.0 or chi_alpha_plus_2 <= 0.0:
        raise ValueError("alpha and chi_{alpha+2} must be positive")
    g2 = (math.sinh(kappa * r) / kappa) ** 2
    rhs = (p * math.cosh(kappa * r) / math.sinh(kappa * r) / ((p - 1.0) * kappa)
           - (alpha + 1.0) / (kappa ** 2 * g2) * chi_alpha_plus_2 ** (-1.0 / p))
    if rhs <= 0.0:
        raise NonPositiveQuotient("recursion right-hand side is not positive")
    return (rhs / alpha) ** (-p)


@dataclass(frozen=True)
class HardyWeight:
    """Hardy weight of a model together with its analytic markers."""

    chi: Callable
    alpha: float
    limit_at_infinity: Optional[float]
    origin_asymptotic: str  # "power" (p<m), "log-critical" (p=m), "bounded" (p>m)


def hardy_weight(mm: ModelManifold) -> HardyWeight:
    if mm.p < mm.m:
        origin = "power"
    elif mm.p == mm.m:
        origin = "log-critical"
    else:
        origin = "bounded"
    kappa = mm.warping.kappa
    limit = None
    if kappa is not None:
        limit = chi_limit(mm.alpha, mm.p, kappa) if kappa > 0.0 else 0.0
    return HardyWeight(chi=lambda r: chi_general(mm, r), alpha=mm.alpha,
                       limit_at_infinity=limit, origin_asymptotic=origin)


def space_form_distance(kind: str, kappa: float, x, y) -> float:
    """Geodesic distance between exponential-map coordinates x, y.

    Flat: Euclidean norm.  Hyperbolic: law of cosines on the hyperboloid,
    cosh(k d) = cosh(k|x|) cosh(k|y|) - sinh(k|x|) sinh(k|y|) cos(angle).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if kind == "flat":
        return float(np.linalg.norm(x - y))
    rx, ry = np.linalg.norm(x), np.linalg.norm(y)
    if rx == 0.0 or ry == 0.0:
        return abs(rx - ry)
    cos_angle = float(np.clip(np.dot(x, y) / (rx * ry), -1.0, 1.0))
    arg = (math.cosh(kappa * rx) * math.cosh(kappa * ry)
           - math.sinh(kappa * rx) * math.sinh(kappa * ry) * cos_angle)
    return math.acosh(max(arg, 1.0)) / kappa


def multipole_weight(space_form: str, m: int, p: float,
                     poles: Sequence[Tuple[np.ndarray, float]], x,
                     kappa: float = 1.0) -> float:
    """Superposition sum_j t_j chi(dist(x, y_j)) over a unit measure."""
    if space_form not in ("flat", "hyperbolic"):
        raise ValueError("space_form must be 'flat' or 'hyperbolic'")
    if space_form == "flat" and p >= m:
        raise UnsupportedExponent("flat multipole weights need p < m")
    masses = np.array([t for _, t in poles], dtype=float)
    if np.any(masses < 0.0):
        raise ValueError("pole masses must be nonnegative")
    if masses.sum() > 1.0 + 1e-12:
        raise MassExceeded(f"total mass {masses.sum():.12g} exceeds 1")
    mm = flat_model(m, p) if space_form == "flat" else hyperbolic_model(m, p, kappa)
    total = 0.0
    for point, t in poles:
        if t == 0.0:
            continue
        d = space_form_distance(space_form, kappa, x, point)
        total += t * chi_general(mm, d)
    return total


@dataclass(frozen=True)
class ZetaReport:
    grid: np.ndarray
    zeta: np.ndarray
    min_zeta: float
    ratio_origin: float
    ratio_infinity: float


def zeta_check(m: int, kappa: float, grid=None) -> ZetaReport:
    """Evaluate zeta(t) = m g'(t)/g(t) - sqrt(chi(t)) on a radial grid.

    zeta behaves like (m+2)/(2t) near the origin and tends to (m+1) kappa/2
    at infinity; the report carries the endpoint ratios against those
    asymptotics along with the grid minimum.
    """
    if grid is None:
        grid = np.logspace(-2, 2, 400)
    grid = np.asarray(grid, dtype=float)
    if kappa == 0.0:
        sqrt_chi = (m - 2.0) / (2.0 * grid) if m > 2 else np.zeros_like(grid)
        log_deriv = m / grid
        ratio_inf = math.nan
    else:
        mm = hyperbolic_model(m, 2.0, kappa)
        sqrt_chi = np.sqrt(chi_general(mm, grid))
        log_deriv = m * kappa * np.cosh(kappa * grid) / np.sinh(kappa * grid)
        zeta_last = log_deriv[-1] - sqrt_chi[-1]
        ratio_inf = float(zeta_last / ((m + 1) * kappa / 2.0))
    zeta = log_deriv - sqrt_chi
    ratio_origin = float(zeta[0] / ((m + 2.0) / (2.0 * grid[0])))
    return ZetaReport(grid=grid, zeta=zeta, min_zeta=float(zeta.min()),
                      ratio_origin=ratio_origin,
                      ratio_infinity=1.0 if kappa == 0.0 else ratio_inf)
