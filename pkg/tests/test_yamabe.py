"""Prescribed-curvature front-end."""

import numpy as np
import pytest

import radpde as rp
from radpde.errors import DimensionTooLow


def _problem(amp=0.3):
    s = lambda r: -0.5 * np.exp(-np.asarray(r, dtype=float) ** 2)
    s_tilde = lambda r: amp * np.exp(-(np.asarray(r, dtype=float) - 2.0) ** 2)
    return rp.YamabeProblem(m=4, s=s, s_tilde=s_tilde)


def test_dimension_guard():
    with pytest.raises(DimensionTooLow):
        rp.YamabeProblem(m=2, s=lambda r: r, s_tilde=lambda r: r)


def test_coefficient_translation_roundtrip():
    yp = _problem()
    coeffs, F = rp.to_coefficients(yp)
    assert yp.c_m == pytest.approx(6.0)
    assert yp.sigma == pytest.approx(3.0)
    r = np.linspace(0.0, 4.0, 50)
    assert np.allclose(coeffs.a_at(r), -yp.s(r) / 6.0)
    s_back, st_back = rp.reconstruct_curvatures(yp, coeffs)
    assert np.allclose(s_back(r), yp.s(r))
    assert np.allclose(st_back(r), yp.s_tilde(r))
    assert F.F(2.0) == pytest.approx(8.0)


def test_subcriticality_verdict():
    yp = _problem()
    assert rp.conformal_laplacian_subcritical(yp, rp.flat_model(4, 2)) == "subcritical"


def test_prescribed_curvature_run():
    yp = _problem()
    meshes = [rp.ball_mesh(rp.flat_model(4, 2), R, 1000) for R in (4.0, 6.0)]
    rep = rp.run_prescribed_curvature(yp, meshes, eps=0.3, lam=(0.5, 3.5))
    assert rep.uniform_equivalence
    assert 0.0 < rep.C1 <= rep.C2
    u = rep.conformal_factor.values
    assert rep.C2 == pytest.approx(float(np.max(u)) ** 2.0)  # 4/(m-2) = 2


def test_prescribed_curvature_multi():
    yp = _problem(amp=0.05)
    meshes = [rp.ball_mesh(rp.flat_model(4, 2), R, 800) for R in (4.0, 6.0)]
    rep = rp.run_prescribed_curvature(yp, meshes, eps=0.3, lam=(0.5, 3.5), multi=2)
    assert rep.uniform_equivalence
