"""Dirichlet solves, the monotone scheme, obstacle problem and checks."""

import math

import numpy as np
import pytest

import radpde as rp
from radpde.errors import DeltaViolated, NotCoercive
from radpde.mesh import PotentialProfile
from radpde.verify import _smooth_bump


def _scenario():
    """Compact-support coefficients on flat R^3 with a small negative dip."""
    lam = (0.25, 1.0)
    a = _smooth_bump(*lam, 0.2)
    b = lambda r: _smooth_bump(2.0, 3.0, 0.3)(r) - _smooth_bump(*lam, 0.01)(r)
    return rp.CoefficientProfile(a=a, b=b, b_minus_window=lam), lam


def test_nonlinearity_contract():
    F = rp.Nonlinearity.power(3.0)
    F.validate(2.0)
    assert F.F(2.0) == pytest.approx(8.0)
    assert F.primitive(2.0) == pytest.approx(4.0)
    assert F.derivative(2.0) == pytest.approx(12.0)
    with pytest.raises(ValueError):
        rp.Nonlinearity.power(2.0).validate(3.0)  # t^2/t^2 is not increasing
    with pytest.raises(ValueError):
        rp.Nonlinearity.power(-1.0)


def test_coefficient_profile_decomposition():
    coeffs, _ = _scenario()
    r = np.linspace(0.0, 4.0, 200)
    assert np.allclose(coeffs.b_at(r), coeffs.b_plus(r) - coeffs.b_minus(r))
    assert np.all(coeffs.b_plus(r) >= 0.0) and np.all(coeffs.b_minus(r) >= 0.0)


def test_support_verification():
    coeffs = rp.CoefficientProfile(a=_smooth_bump(0.0, 1.0, 0.1),
                                   b=_smooth_bump(1.0, 2.0, 0.1),
                                   a_support=1.0, b_support=2.0)
    rep = coeffs.verify_supports(np.linspace(0.0, 5.0, 300))
    assert rep["a_nonpositive_outside"] and rep["b_zero_outside"]


def test_constant_solution():
    mesh = rp.ball_mesh(rp.flat_model(3, 2), 2.0, 200)
    z = rp.dirichlet_solve(mesh, 0.0, 0.0, None, 0.7)
    assert np.allclose(z.values, 0.7, atol=1e-12)


def test_dirichlet_positivity_and_residual():
    rng = np.random.default_rng(3)
    mesh = rp.annulus_mesh(rp.flat_model(4, 2), 1.0, 3.0, 400)
    vals = -0.3 + 0.2 * np.sin(rng.uniform(1.0, 4.0) * mesh.qp)
    A = PotentialProfile(lambda r, v=rng.uniform(1.0, 4.0): -0.3 + 0.2 * np.sin(v * np.asarray(r)))
    z = rp.dirichlet_solve(mesh, A, None, None, 1.0)
    assert np.all(z.values > 0.0)


def test_dirichlet_not_coercive():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 300)
    big = PotentialProfile(lambda r: 50.0 * np.ones_like(np.asarray(r, dtype=float)))
    with pytest.raises(NotCoercive):
        rp.dirichlet_solve(mesh, big, None, None, 1.0)


def test_exact_solution_family_shape():
    u1 = rp.hyperbolic_exact_solution(4, 1.0)
    c = (4.0 * 2.0 / 4.0) ** 0.5  # constant (m(m-2)/4)^{(m-2)/4} for m = 4
    r = np.linspace(0.0, 6.0, 50)
    assert np.allclose(u1(r), c, rtol=1e-12)
    u2 = rp.hyperbolic_exact_solution(4, 2.0)
    vals = u2(r)
    assert np.all(np.diff(vals) < 0.0)
    with pytest.raises(ValueError):
        rp.hyperbolic_exact_solution(4, 0.5)


def test_delta_guard():
    coeffs, lam = _scenario()
    model = rp.flat_model(3, 2)
    meshes = [rp.ball_mesh(model, 4.0, 600)]
    bad = rp.CoefficientProfile(a=coeffs.a,
                                b=lambda r: coeffs.b(r) - _smooth_bump(*lam, 5.0)(r),
                                b_minus_window=lam)
    with pytest.raises(DeltaViolated):
        rp.monotone_iteration(meshes[0], bad, rp.Nonlinearity.power(3.0), 0.5, lam)


def test_monotone_iteration_bracket():
    coeffs, lam = _scenario()
    model = rp.flat_model(3, 2)
    mesh = rp.ball_mesh(model, 6.0, 900)
    rep = rp.monotone_iteration(mesh, coeffs, rp.Nonlinearity.power(3.0), 0.5, lam)
    assert rep.iterations <= 200
    sol = rep.solution.values
    assert np.all(sol >= rep.phi_inf.values - 1e-8)
    assert np.all(sol <= rep.phi_0.values + 1e-8)
    for a, b in zip(rep.iterates, rep.iterates[1:]):
        assert np.all(b <= a + 1e-10)
    # trace of sup-norm steps is non-increasing
    assert all(s2 <= s1 * (1.0 + 1e-9) for s1, s2 in zip(rep.iteration_trace,
                                                         rep.iteration_trace[1:]))


def test_nonnegative_b_shortcut():
    lam = (0.25, 1.0)
    coeffs = rp.CoefficientProfile(a=_smooth_bump(*lam, 0.1),
                                   b=_smooth_bump(2.0, 3.0, 0.2))
    mesh = rp.ball_mesh(rp.flat_model(3, 2), 4.0, 600)
    rep = rp.monotone_iteration(mesh, coeffs, rp.Nonlinearity.power(3.0), 0.4, lam)
    assert rep.iterations == 0
    assert np.allclose(rep.solution.values, rep.phi_inf.values)


def test_compute_delta_formula_consistency():
    from radpde.solver import compute_delta_info
    coeffs, lam = _scenario()
    meshes = [rp.ball_mesh(rp.flat_model(3, 2), 4.0, 600)]
    F = rp.Nonlinearity.power(3.0)
    W = lambda r: np.ones_like(np.asarray(r, dtype=float))
    info = compute_delta_info(meshes, coeffs.a, F, 0.3, lam, W=W)
    assert info.min_W == pytest.approx(1.0)
    assert info.delta == pytest.approx(info.min_W * info.C / float(F.F(info.C)))
    assert 0.0 < info.C_bar <= info.C


def test_upper_bound_is_monotone_in_epsilon():
    from radpde.solver import compute_delta_info
    coeffs, lam = _scenario()
    meshes = [rp.ball_mesh(rp.flat_model(3, 2), 4.0, 600)]
    F = rp.Nonlinearity.power(3.0)
    C = [compute_delta_info(meshes, coeffs.a, F, eps, lam).C
         for eps in (0.8, 0.4, 0.2)]
    assert C[0] > C[1] > C[2]


def test_obstacle_inactive_when_obstacle_below():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 300)
    V = PotentialProfile(lambda r: -0.1 * np.ones_like(np.asarray(r, dtype=float)))
    free = rp.dirichlet_solve(mesh, V, None, None, (1.0, 0.5))
    u = rp.obstacle_solve(mesh, V, -1.0, (1.0, 0.5))
    assert np.allclose(u.values, free.values, atol=1e-9)


def test_obstacle_contact_set():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 4.0, 500)
    V = PotentialProfile(lambda r: -0.1 * np.ones_like(np.asarray(r, dtype=float)))
    psi = rp.DiscreteFunction.from_callable(
        mesh, lambda r: 0.6 * np.maximum(0.0, 1.0 - (np.asarray(r, dtype=float) - 2.5) ** 2))
    u = rp.obstacle_solve(mesh, V, psi, (1.0, 0.0))
    rep = rp.obstacle_complementarity(mesh, V, psi, u)
    assert rep["feasible"]
    assert rep["max_complementarity"] <= 1e-8
    assert np.any(np.abs(u.values - psi.values) < 1e-12)  # contact happens


def test_pasting_identical_inputs():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 200)
    w = rp.DiscreteFunction.from_callable(mesh, lambda r: 2.0 / np.asarray(r, dtype=float))
    rep = rp.pasting_min_check(mesh, None, w, w)
    assert rep["passed"]


def test_pasting_constant_and_harmonic():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 400)
    w1 = rp.DiscreteFunction(mesh, np.ones(mesh.n_nodes))
    w2 = rp.DiscreteFunction.from_callable(mesh, lambda r: 2.0 / np.asarray(r, dtype=float))
    assert rp.pasting_min_check(mesh, None, w1, w2)["passed"]


def test_necessary_condition_vacuous_and_active():
    coeffs, lam = _scenario()
    model = rp.flat_model(3, 2)
    mesh = rp.ball_mesh(model, 6.0, 900)
    F = rp.Nonlinearity.power(3.0)
    rep = rp.monotone_iteration(mesh, coeffs, F, 0.5, lam)
    out = rp.necessary_condition_check(mesh, coeffs, rep.solution, F)
    assert not out["vacuous"]
    assert out["final_nonneg"]
    assert out["bound_holds"]
    positive = rp.CoefficientProfile(a=coeffs.a, b=_smooth_bump(2.0, 3.0, 0.2))
    out2 = rp.necessary_condition_check(mesh, positive, rep.solution, F)
    assert not out2.get("vacuous", False) or out2["final_nonneg"]


def test_uniform_upper_bound_localization():
    coeffs, lam = _scenario()
    meshes = [rp.ball_mesh(rp.flat_model(3, 2), R, 900) for R in (4.0, 6.0)]
    F = rp.Nonlinearity.power(3.0)
    rep = rp.uniform_upper_bound_check(meshes, coeffs.a, coeffs.b_plus, F,
                                       0.5, lam, c=0.01)
    assert all(rep["localization_ok"])
    assert rep["alpha"] > 0.5
