"""Radial P1 finite elements with the weighted measure.

Meshes discretize a ball (0, R) or an annulus (a, b) with piecewise-linear
elements and a 4-point Gauss rule per element.  On a ball the origin keeps
its degree of freedom: the measure omega(0) = 0 enforces the natural
boundary condition by itself.  All variational objects (Q_V energy and
residual, Lagrangian, Picone functional) are element-wise quadratures.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .errors import NonPositiveG, SingularPotential, UnboundedRatio
from .geometry import ModelManifold

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(4)


class RadialMesh:
    """Immutable P1 mesh over [nodes[0], nodes[-1]] with radial measure."""

    def __init__(self, model: ModelManifold, nodes, kind: str):
        nodes = np.asarray(nodes, dtype=float)
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if kind not in ("ball", "annulus"):
            raise ValueError("kind must be 'ball' or 'annulus'")
        if kind == "ball" and nodes[0] != 0.0:
            raise ValueError("ball meshes start at r = 0")
        if kind == "annulus" and nodes[0] <= 0.0:
            raise ValueError("annulus meshes start at r > 0")
        self.model = model
        self.nodes = nodes
        self.kind = kind
        self.h = np.diff(nodes)
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        half = 0.5 * self.h
        self.qp = mid[:, None] + half[:, None] * _GAUSS_X[None, :]   # (ne, 4)
        self.qw = half[:, None] * _GAUSS_W[None, :]                  # jacobian weights
        self.omega_q = model.omega(self.qp)
        self.wq = self.qw * self.omega_q                             # measure weights
        self.shape0 = 0.5 * (1.0 - _GAUSS_X)                         # value of left hat
        self.shape1 = 0.5 * (1.0 + _GAUSS_X)
        n = nodes.size
        if kind == "ball":
            self.essential = np.array([n - 1])
        else:
            self.essential = np.array([0, n - 1])
        mask = np.ones(n, dtype=bool)
        mask[self.essential] = False
        self.free = np.nonzero(mask)[0]

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def n_elements(self) -> int:
        return self.h.size

    # ---- quadrature helpers -------------------------------------------------

    def values_at_q(self, vals: np.ndarray) -> np.ndarray:
        return vals[:-1, None] * self.shape0[None, :] + vals[1:, None] * self.shape1[None, :]

    def slopes(self, vals: np.ndarray) -> np.ndarray:
        return np.diff(vals) / self.h

    def integrate(self, f_at_q: np.ndarray) -> float:
        """Integral against the radial measure of element-wise point values."""
        return float(np.sum(f_at_q * self.wq))

    def element_measure(self) -> np.ndarray:
        return np.sum(self.wq, axis=1)

    def accumulate(self, f_at_q: np.ndarray) -> np.ndarray:
        """Nodal vector with entries int f phi_i d mu for the hat basis."""
        c0 = np.sum(f_at_q * self.shape0[None, :] * self.wq, axis=1)
        c1 = np.sum(f_at_q * self.shape1[None, :] * self.wq, axis=1)
        out = np.zeros(self.n_nodes)
        np.add.at(out, np.arange(self.n_elements), c0)
        np.add.at(out, np.arange(1, self.n_nodes), c1)
        return out

    def accumulate_slope(self, s_at_e: np.ndarray) -> np.ndarray:
        """Nodal vector with entries int s phi_i' d mu for element values s."""
        we = self.element_measure()
        out = np.zeros(self.n_nodes)
        contrib = s_at_e * we / self.h
        np.add.at(out, np.arange(self.n_elements), -contrib)
        np.add.at(out, np.arange(1, self.n_nodes), contrib)
        return out


def ball_mesh(model: ModelManifold, radius: float, n: int,
              graded: bool = False, ratio: float = 0.7, levels: int = 25) -> RadialMesh:
    nodes = np.linspace(0.0, radius, n + 1)
    if graded:
        # subdivide the first element geometrically toward the origin so
        # weights that blow up like r^{-p} stay integrable under quadrature
        h0 = nodes[1]
        pieces = h0 * ratio ** np.arange(1, levels + 1)
        extra = np.sort(pieces)
        nodes = np.concatenate([[0.0], extra, nodes[1:]])
    return RadialMesh(model, nodes, "ball")


def annulus_mesh(model: ModelManifold, a: float, b: float, n: int,
                 spacing: str = "uniform") -> RadialMesh:
    if spacing == "log":
        nodes = a * (b / a) ** np.linspace(0.0, 1.0, n + 1)
        nodes[0], nodes[-1] = a, b
    else:
        nodes = np.linspace(a, b, n + 1)
    return RadialMesh(model, nodes, "annulus")


@dataclass(frozen=True)
class DiscreteFunction:
    mesh: RadialMesh
    values: np.ndarray

    @classmethod
    def from_callable(cls, mesh: RadialMesh, func: Callable) -> "DiscreteFunction":
        return cls(mesh=mesh, values=np.asarray(func(mesh.nodes), dtype=float))

    @classmethod
    def from_csv(cls, mesh: RadialMesh, path) -> "DiscreteFunction":
        rs, vs = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    r = float(row[0])
                except ValueError:  # header line
                    continue
                rs.append(r)
                vs.append(float(row[1]))
        return cls(mesh=mesh, values=np.interp(mesh.nodes, rs, vs))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r", "value"])
            for r, v in zip(self.mesh.nodes, self.values):
                writer.writerow([repr(float(r)), repr(float(v))])


def _vals(u) -> np.ndarray:
    return np.asarray(getattr(u, "values", u), dtype=float)


class PotentialProfile:
    """Radial potential V(r): constant, tabulated, callable or named weight."""

    def __init__(self, func: Callable, name: str = "potential"):
        self._func = func
        self.name = name

    @classmethod
    def constant(cls, c: float) -> "PotentialProfile":
        return cls(lambda r: np.full_like(np.asarray(r, dtype=float), c),
                   name=f"constant({c:g})")

    @classmethod
    def zero(cls) -> "PotentialProfile":
        return cls.constant(0.0)

    @classmethod
    def tabulated(cls, radii, values) -> "PotentialProfile":
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        return cls(lambda r: np.interp(np.asarray(r, dtype=float), radii, values),
                   name="tabulated")

    @classmethod
    def from_callable(cls, func: Callable, name: str = "callable") -> "PotentialProfile":
        return cls(func, name=name)

    @classmethod
    def hardy(cls, model: ModelManifold, scale: float = 1.0) -> "PotentialProfile":
        from .hardy import chi_general
        return cls(lambda r: scale * np.asarray(chi_general(model, r), dtype=float),
                   name=f"hardy(scale={scale:g})")

    def scaled(self, c: float) -> "PotentialProfile":
        return PotentialProfile(lambda r: c * self(r), name=f"{c:g}*{self.name}")

    def __call__(self, r):
        return np.asarray(self._func(r), dtype=float)


def _potential_at_q(mesh: RadialMesh, V) -> np.ndarray:
    if V is None:
        return np.zeros_like(mesh.qp)
    if np.isscalar(V):
        return np.full_like(mesh.qp, float(V))
    vq = np.asarray(V(mesh.qp), dtype=float)
    if not np.all(np.isfinite(vq)):
        raise SingularPotential(f"potential {getattr(V, 'name', '?')} is not finite "
                                "at interior quadrature points")
    return vq


def qv_energy(mesh: RadialMesh, V, phi) -> float:
    """Q_V(phi) = (1/p) [ int |phi'|^p - int V |phi|^p ] against d mu_f."""
    p = mesh.model.p
    u = _vals(phi)
    s = mesh.slopes(u)
    uq = mesh.values_at_q(u)
    vq = _potential_at_q(mesh, V)
    grad_term = float(np.sum(np.abs(s) ** p * mesh.element_measure()))
    pot_term = mesh.integrate(vq * np.abs(uq) ** p)
    return (grad_term - pot_term) / p


def qv_residual_vector(mesh: RadialMesh, V, w) -> np.ndarray:
    """Nodal weak residual Q_V'(w)[phi_i] for every hat function phi_i."""
    p = mesh.model.p
    u = _vals(w)
    s = mesh.slopes(u)
    uq = mesh.values_at_q(u)
    vq = _potential_at_q(mesh, V)
    flux = np.sign(s) * np.abs(s) ** (p - 1.0)
    res = mesh.accumulate_slope(flux)
    res -= mesh.accumulate(vq * np.sign(uq) * np.abs(uq) ** (p - 1.0))
    return res


def qv_residual(mesh: RadialMesh, V, w, phi) -> float:
    """Weak pairing Q_V'(w)[phi]; linear in phi, so a nodal dot product."""
    return float(np.dot(qv_residual_vector(mesh, V, w), _vals(phi)))


def residual_scale(mesh: RadialMesh, V, w) -> float:
    """Magnitude of the individual residual contributions, for scaling."""
    p = mesh.model.p
    u = _vals(w)
    s = mesh.slopes(u)
    uq = mesh.values_at_q(u)
    vq = _potential_at_q(mesh, V)
    a = mesh.accumulate_slope(np.abs(s) ** (p - 1.0))
    b = mesh.accumulate(np.abs(vq) * np.abs(uq) ** (p - 1.0))
    return float(np.max(np.abs(a) + np.abs(b))) + 1e-300


def _lagrangian_at_q(mesh: RadialMesh, phi_vals, g_vals) -> np.ndarray:
    """Pointwise Lagrangian density L(phi, g) at the quadrature points."""
    p = mesh.model.p
    pq = mesh.values_at_q(phi_vals)
    gq = mesh.values_at_q(g_vals)
    ps = mesh.slopes(phi_vals)[:, None]
    gs = mesh.slopes(g_vals)[:, None]
    ratio = pq / gq
    term1 = np.abs(ps) ** p
    term2 = (p - 1.0) * ratio ** p * np.abs(gs) ** p
    term3 = p * ratio ** (p - 1.0) * np.sign(gs) * np.abs(gs) ** (p - 1.0) * ps
    return term1 + term2 - term3


def lagrangian(mesh: RadialMesh, phi, g) -> float:
    """int L(phi, g) d mu with the nonnegative Lagrangian density.

    Vanishes exactly when phi is a constant multiple of g.
    """
    pv, gv = _vals(phi), _vals(g)
    if np.any(gv <= 0.0):
        raise NonPositiveG("g must be positive at every node")
    if np.any(pv < 0.0):
        raise ValueError("phi must be nonnegative")
    return mesh.integrate(_lagrangian_at_q(mesh, pv, gv))


def picone(mesh: RadialMesh, w, z, ratio_bound: float = 1e8) -> float:
    """Picone cross energy I(w, z); nonnegative, zero iff w = C z.

    I(w,z) pairs |w'|^{p-2} w' with the gradient of (w^p - z^p)/w^{p-1} and
    subtracts the symmetric term; pointwise it equals the sum of the two
    Lagrangian densities L(w,z) + L(z,w), which is the form integrated here.
    """
    wv, zv = _vals(w), _vals(z)
    if np.any(wv <= 0.0) or np.any(zv <= 0.0):
        raise UnboundedRatio("w and z must be positive at every node")
    q = wv / zv
    if q.max() > ratio_bound or (1.0 / q).max() > ratio_bound:
        raise UnboundedRatio("w/z or z/w exceeds the configured ratio bound")
    dens = _lagrangian_at_q(mesh, wv, zv) + _lagrangian_at_q(mesh, zv, wv)
    return mesh.integrate(dens)


# ---- p = 2 assembly ---------------------------------------------------------

def stiffness_matrix(mesh: RadialMesh) -> sp.csc_matrix:
    """Tridiagonal K with K_ij = int phi_i' phi_j' d mu."""
    we = mesh.element_measure()
    k_e = we / mesh.h ** 2
    n = mesh.n_nodes
    diag = np.zeros(n)
    diag[:-1] += k_e
    diag[1:] += k_e
    off = -k_e
    return sp.diags([off, diag, off], [-1, 0, 1], format="csc")


def mass_matrix(mesh: RadialMesh, weight=None) -> sp.csc_matrix:
    """Tridiagonal M with M_ij = int c(r) phi_i phi_j d mu."""
    cq = np.ones_like(mesh.qp) if weight is None else _potential_at_q(mesh, weight)
    w = cq * mesh.wq
    m00 = np.sum(w * mesh.shape0 ** 2, axis=1)
    m11 = np.sum(w * mesh.shape1 ** 2, axis=1)
    m01 = np.sum(w * mesh.shape0 * mesh.shape1, axis=1)
    n = mesh.n_nodes
    diag = np.zeros(n)
    diag[:-1] += m00
    diag[1:] += m11
    return sp.diags([m01, diag, m01], [-1, 0, 1], format="csc")
