"""Radial Green kernels and subcriticality tests on models.

The transplanted kernel is G(r) = int_r^inf g(s)^{-(m-1)/(p-1)} ds; its
finiteness is the non-parabolicity (subcriticality) condition.  The kernel
also reproduces the Hardy weight through ((p-1)/p)^p |G'|^p / G^p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import Inconclusive, NotSubcritical
from .geometry import ModelManifold
from .hardy import default_cutoff, tail_integrals


def green_kernel(mm: ModelManifold, r, cutoff: Optional[float] = None):
    """G(r) = int_r^inf g^{-alpha} ds with alpha = (m-1)/(p-1)."""
    vals = tail_integrals(mm.warping, mm.alpha, r, cutoff=cutoff)
    return vals if np.ndim(r) else float(vals[0])


def subcriticality_state(mm: ModelManifold, cutoff: Optional[float] = None) -> str:
    """Tri-state integrability verdict for the kernel tail.

    Compares dyadic tail pieces int over [2^k R0, 2^{k+1} R0] of g^{-alpha};
    a ratio staying clearly below 1 means geometric decay (subcritical), a
    ratio at or above 1 means divergence (parabolic), and the borderline
    band is reported as inconclusive rather than guessed.
    """
    from scipy.integrate import quad

    c = default_cutoff(mm.warping) if cutoff is None else cutoff
    alpha = mm.alpha
    r0 = c / 64.0

    def integrand(s):
        return float(mm.warping.g(s)) ** (-alpha)

    pieces = []
    lo = r0
    for _ in range(6):
        val, _ = quad(integrand, lo, 2.0 * lo, epsabs=0.0, epsrel=1e-10, limit=200)
        pieces.append(val)
        lo *= 2.0
    ratios = []
    for a, b in zip(pieces, pieces[1:]):
        if a == 0.0:
            return "subcritical"  # tail already underflowed to zero
        ratios.append(b / a)
    tail_ratio = max(ratios[-3:])
    if tail_ratio <= 0.9:
        return "subcritical"
    if tail_ratio >= 0.98:
        return "parabolic"
    return "inconclusive"


def is_subcritical_model(mm: ModelManifold, cutoff: Optional[float] = None) -> bool:
    state = subcriticality_state(mm, cutoff=cutoff)
    if state == "inconclusive":
        raise Inconclusive("kernel tail decay is borderline at the configured cutoff")
    return state == "subcritical"


@dataclass(frozen=True)
class GreenKernel:
    G: Callable
    integrability_flag: bool
    asymptotic_class: str  # "power" (p<m) | "logarithmic" (p=m) | "bounded" (p>m)


def make_green_kernel(mm: ModelManifold, cutoff: Optional[float] = None) -> GreenKernel:
    flag = is_subcritical_model(mm, cutoff=cutoff)
    if not flag:
        raise NotSubcritical("model is p-parabolic; kernel diverges")
    if mm.p < mm.m:
        klass = "power"
    elif mm.p == mm.m:
        klass = "logarithmic"
    else:
        klass = "bounded"
    return GreenKernel(G=lambda r: green_kernel(mm, r, cutoff=cutoff),
                       integrability_flag=flag, asymptotic_class=klass)


def green_hardy_weight(mm: ModelManifold, r, cutoff: Optional[float] = None):
    """((p-1)/p)^p |G'|^p / G^p; coincides with the Hardy weight chi."""
    p, alpha = mm.p, mm.alpha
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    G = tail_integrals(mm.warping, alpha, r_arr, cutoff=cutoff)
    Gp = np.asarray(mm.warping.g(r_arr), dtype=float) ** (-alpha)  # |G'| = g^{-alpha}
    out = ((p - 1.0) / p) ** p * (Gp / G) ** p
    return out if np.ndim(r) else float(out[0])
