"""Mesh assembly, energies, Picone/Lagrangian machinery and tones."""

import math

import numpy as np
import pytest

import radpde as rp
from radpde.errors import NonPositiveG, SingularPotential, UnboundedRatio
from radpde.mesh import PotentialProfile, qv_residual_vector


def test_ball_mesh_boundary_layout():
    mesh = rp.ball_mesh(rp.flat_model(3, 2), 2.0, 100)
    assert mesh.kind == "ball"
    # only the outer node carries the essential condition; the origin is
    # natural because the radial measure vanishes there
    assert list(mesh.essential) == [mesh.n_nodes - 1]
    assert 0 in mesh.free


def test_annulus_mesh_boundary_layout():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 50)
    assert sorted(mesh.essential) == [0, mesh.n_nodes - 1]


def test_integrate_ball_volume():
    mesh = rp.ball_mesh(rp.flat_model(3, 2), 1.0, 2000)
    vol = mesh.integrate(np.ones_like(mesh.qp))
    assert vol == pytest.approx(4.0 * math.pi / 3.0, rel=1e-8)


def test_discrete_function_csv_roundtrip(tmp_path):
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 40)
    f = rp.DiscreteFunction.from_callable(mesh, lambda r: np.cos(r))
    path = tmp_path / "f.csv"
    f.to_csv(path)
    g = rp.DiscreteFunction.from_csv(mesh, path)
    assert np.allclose(f.values, g.values, rtol=0, atol=1e-15)


def test_singular_potential_guard():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 20)
    V = PotentialProfile(lambda r: np.where(np.asarray(r) > 1.5, np.inf, 1.0))
    with pytest.raises(SingularPotential):
        rp.qv_energy(mesh, V, rp.DiscreteFunction.from_callable(mesh, lambda r: r))


def test_harmonic_residual_is_small():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 800)
    w = rp.DiscreteFunction.from_callable(mesh, lambda r: 1.0 / np.asarray(r, dtype=float))
    res = qv_residual_vector(mesh, None, w)
    assert np.max(np.abs(res[mesh.free])) <= 1e-6


def test_picone_properties_and_guards():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 300)
    w = rp.DiscreteFunction.from_callable(mesh, lambda r: 1.0 + np.sin(r) ** 2)
    z = rp.DiscreteFunction.from_callable(mesh, lambda r: 2.0 + np.cos(3.0 * r))
    assert rp.picone(mesh, w, z) >= -1e-12
    assert abs(rp.picone(mesh, w, w)) <= 1e-12
    with pytest.raises(UnboundedRatio):
        rp.picone(mesh, w, rp.DiscreteFunction(mesh, 1e-12 * w.values))


def test_lagrangian_guards_and_homogeneity():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 300)
    g = rp.DiscreteFunction.from_callable(mesh, lambda r: 1.0 + 0.2 * np.sin(r))
    assert abs(rp.lagrangian(mesh, rp.DiscreteFunction(mesh, 3.0 * g.values), g)) <= 1e-10
    with pytest.raises(NonPositiveG):
        rp.lagrangian(mesh, g, rp.DiscreteFunction(mesh, 0.0 * g.values))


def test_tone_shift_identity():
    # adding a constant c to the potential shifts the tone by exactly -c... no:
    # lambda_{V+c} = lambda_V - c for the Rayleigh quotient with weight 1
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 500)
    base = rp.fundamental_tone(mesh, None).lam
    shifted = rp.fundamental_tone(
        mesh, PotentialProfile(lambda r: 0.7 * np.ones_like(np.asarray(r, dtype=float)))).lam
    assert shifted == pytest.approx(base - 0.7, abs=1e-9)


def test_tone_p3_interval_oracle():
    # p-Laplacian tone of (0, L) with weight 1: (p-1) (pi_p / L)^p with
    # pi_p = 2 pi (p-1)^{1/p} / (p sin(pi/p)); the m = 2 annulus with a thin
    # shell is close to an interval, so only a coarse match is expected.
    p = 3.0
    mesh = rp.annulus_mesh(rp.flat_model(2, p), 100.0, 101.0, 400)
    pi_p = 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))
    ref = pi_p ** p
    tone = rp.fundamental_tone(mesh, None).lam
    assert tone == pytest.approx(ref, rel=2e-2)


def test_ap_consistency_check():
    mesh = rp.ball_mesh(rp.flat_model(3, 2), 4.0, 800)
    V = PotentialProfile(lambda r: 0.1 * np.exp(-np.asarray(r, dtype=float) ** 2))
    rep = rp.ap_consistency_check(mesh, V)
    assert rep["consistent"]
    assert rep["tone_nonneg"] and rep["positive_solution_found"]


def test_drift_transform_identity():
    # with g a positive solution, the energy of phi equals half the
    # weighted Dirichlet energy of phi/g with weight g^2
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 2000)
    V = PotentialProfile(lambda r: -0.5 * np.ones_like(np.asarray(r, dtype=float)))
    g = rp.dirichlet_solve(mesh, V, None, None, boundary=(1.0, 0.7))
    phi_vals = np.sin(math.pi * (mesh.nodes - 1.0)) ** 2
    phi_vals[mesh.essential] = 0.0
    q = phi_vals / g.values
    sq = mesh.slopes(q)
    g2_el = np.sum(mesh.values_at_q(g.values) ** 2 * mesh.wq, axis=1)
    lhs = 0.5 * float(np.sum(sq ** 2 * g2_el))
    rhs = rp.qv_energy(mesh, V, rp.DiscreteFunction(mesh, phi_vals))
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_chain_rule_refinement():
    # u = 1/r is harmonic in R^3, so the weak residual of alpha(u) = u^2
    # paired with a test function phi must converge to
    # -int 2 |u'|^2 phi omega dr at first order or better
    from scipy.integrate import quad
    mm = rp.flat_model(3, 2)

    def measure(ns):
        out = []
        for n in ns:
            mesh = rp.annulus_mesh(mm, 1.0, 2.0, n)
            u2 = (1.0 / mesh.nodes) ** 2
            phi = np.sin(math.pi * (mesh.nodes - 1.0)) ** 2
            phi[mesh.essential] = 0.0
            got = float(np.dot(qv_residual_vector(mesh, None, u2), phi))
            out.append(got)
        return np.array(out)

    ref, _ = quad(lambda r: -2.0 * r ** -4 * math.sin(math.pi * (r - 1.0)) ** 2
                  * 4.0 * math.pi * r ** 2, 1.0, 2.0, epsrel=1e-12)
    errs = np.abs(measure([100, 200, 400]) - ref)
    rates = np.log2(errs[:-1] / errs[1:])
    assert np.all(rates >= 1.0)


def test_yamabe_upper_bound_positive_and_finite():
    mesh = rp.ball_mesh(rp.flat_model(3, 2), 4.0, 500)
    val = rp.yamabe_invariant_upper_bound(mesh, None, 3)
    assert math.isfinite(val) and val > 0.0
