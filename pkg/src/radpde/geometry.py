"""Radially symmetric model geometries.

A model is determined by a warping function g solving the Jacobi equation
g'' = G g with g(0) = 0, g'(0) = 1, where -G is the radial sectional
curvature profile.  Constant profiles have closed forms (r for the flat
case, sinh(kappa r)/kappa for curvature -kappa^2); everything else is
integrated numerically.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq
from scipy.special import gamma

from .errors import InvalidStep, NonPositiveWarping, OutOfDomain


@dataclass(frozen=True)
class CurvatureProfile:
    """Profile G(r) entering the Jacobi equation g'' = G g."""

    kind: str  # "constant" | "tabulated" | "callback"
    kappa_sq: float = 0.0
    radii: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @classmethod
    def constant(cls, kappa_sq: float) -> "CurvatureProfile":
        if kappa_sq < 0.0:
            raise ValueError("constant profiles store kappa^2 >= 0")
        return cls(kind="constant", kappa_sq=float(kappa_sq))

    @classmethod
    def tabulated(cls, radii, values) -> "CurvatureProfile":
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.shape != values.shape:
            raise ValueError("tabulated profile needs matching 1-D arrays")
        if np.any(np.diff(radii) <= 0.0):
            raise ValueError("tabulated radii must be strictly increasing")
        return cls(kind="tabulated", radii=radii, values=values)

    @classmethod
    def from_callable(cls, func) -> "CurvatureProfile":
        return cls(kind="callback", func=func)

    @classmethod
    def from_csv(cls, path) -> "CurvatureProfile":
        radii, values = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                radii.append(float(row[0]))
                values.append(float(row[1]))
        return cls.tabulated(radii, values)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.full_like(r, self.kappa_sq)
        if self.kind == "tabulated":
            if np.any(r < self.radii[0] - 1e-12) or np.any(r > self.radii[-1] + 1e-12):
                raise OutOfDomain("radius outside the tabulated profile grid")
            return np.interp(r, self.radii, self.values)
        return np.asarray(self.func(r), dtype=float)


@dataclass(frozen=True)
class WarpingFunction:
    """Solution g of the Jacobi equation together with its derivative."""

    g: Callable
    g_prime: Callable
    positivity_radius: float
    kappa: Optional[float] = None  # set when g is a constant-curvature closed form
    r_max: float = math.inf

    def __call__(self, r):
        return self.g(r)


def flat_warping() -> WarpingFunction:
    return WarpingFunction(
        g=lambda r: np.asarray(r, dtype=float),
        g_prime=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        positivity_radius=math.inf,
        kappa=0.0,
    )


def hyperbolic_warping(kappa: float) -> WarpingFunction:
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    k = float(kappa)
    return WarpingFunction(
        g=lambda r: np.sinh(k * np.asarray(r, dtype=float)) / k,
        g_prime=lambda r: np.cosh(k * np.asarray(r, dtype=float)),
        positivity_radius=math.inf,
        kappa=k,
    )


def solve_jacobi(profile: CurvatureProfile, r_max: float, step: float = 1e-3,
                 require_positive: bool = False) -> WarpingFunction:
    """Integrate g'' = G g, g(0)=0, g'(0)=1 with a classical RK4 scheme.

    Constant profiles return the closed form instead of integrating.  The
    positivity radius is located by a grid sign change refined by bisection
    on the Hermite interpolant.
    """
    if step <= 0.0:
        raise InvalidStep("step must be positive")
    if r_max <= 0.0:
        raise ValueError("r_max must be positive")
    if profile.kind == "constant":
        if profile.kappa_sq == 0.0:
            return flat_warping()
        return hyperbolic_warping(math.sqrt(profile.kappa_sq))

    n = max(2, int(math.ceil(r_max / step)))
    rs = np.linspace(0.0, r_max, n + 1)
    h = rs[1] - rs[0]
    gs = np.empty(n + 1)
    dgs = np.empty(n + 1)
    gs[0], dgs[0] = 0.0, 1.0

    def rhs(r, y):
        return np.array([y[1], float(profile(r)) * y[0]])

    y = np.array([0.0, 1.0])
    for i in range(n):
        r = rs[i]
        k1 = rhs(r, y)
        k2 = rhs(r + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(r + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(r + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        gs[i + 1], dgs[i + 1] = y

    spline = CubicHermiteSpline(rs, gs, dgs)
    dspline = spline.derivative()

    pos_radius = math.inf
    bad = np.nonzero(gs[1:] <= 0.0)[0]
    if bad.size:
        i = bad[0] + 1
        lo, hi = rs[i - 1], rs[i]
        pos_radius = brentq(spline, lo, hi, xtol=1e-10)
        if require_positive:
            raise NonPositiveWarping(
                f"warping vanishes near r = {pos_radius:.6g} < r_max = {r_max:g}")

    return WarpingFunction(
        g=lambda r: np.asarray(spline(r), dtype=float),
        g_prime=lambda r: np.asarray(dspline(r), dtype=float),
        positivity_radius=pos_radius,
        kappa=None,
        r_max=float(r_max),
    )


def _zero_drift(r):
    return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class ModelManifold:
    """Dimension, exponent, drift and warping of a radial model."""

    m: int
    p: float
    warping: WarpingFunction
    f: Callable = field(default=_zero_drift)

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("dimension m must be >= 2")
        if self.p <= 1.0:
            raise ValueError("exponent p must be > 1")

    @property
    def alpha(self) -> float:
        return (self.m - 1) / (self.p - 1)

    @property
    def sphere_area(self) -> float:
        m = self.m
        return 2.0 * math.pi ** (m / 2.0) / gamma(m / 2.0)

    def omega(self, r):
        """Radial measure density sigma_{m-1} g(r)^{m-1} e^{-f(r)}."""
        r = np.asarray(r, dtype=float)
        return self.sphere_area * self.warping.g(r) ** (self.m - 1) * np.exp(-self.f(r))


def flat_model(m: int, p: float, f: Callable = _zero_drift) -> ModelManifold:
    return ModelManifold(m=m, p=p, warping=flat_warping(), f=f)


def hyperbolic_model(m: int, p: float, kappa: float, f: Callable = _zero_drift) -> ModelManifold:
    return ModelManifold(m=m, p=p, warping=hyperbolic_warping(kappa), f=f)


def radial_laplacian_coeff(mm: ModelManifold, r: float) -> float:
    """Coefficient (m-1) g'(r)/g(r) of the radial Laplacian drift term."""
    R = mm.warping.positivity_radius
    if not (0.0 < r < R) or (math.isfinite(mm.warping.r_max) and r > mm.warping.r_max):
        raise OutOfDomain(f"r = {r:g} outside (0, {R:g})")
    return (mm.m - 1) * float(mm.warping.g_prime(r)) / float(mm.warping.g(r))
