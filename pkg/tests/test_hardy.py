"""Hardy weights: closed forms, limits, recursion and the zeta check."""

import math

import numpy as np
import pytest

import radpde as rp
from radpde.errors import (MassExceeded, NotSubcritical, UnsupportedAlpha,
                           UnsupportedExponent)
from radpde.hardy import (chi_recursion_step, space_form_distance,
                          tail_integrals)


def test_flat_tail_integral_oracle():
    mm = rp.flat_model(3, 2)
    # int_r^inf s^-2 ds = 1/r
    vals = tail_integrals(mm.warping, 2.0, [0.5, 1.0, 4.0])
    assert np.allclose(vals, [2.0, 1.0, 0.25], rtol=1e-10)


def test_flat_closed_form_matches_general():
    for (m, p) in ((3, 2), (4, 2), (5, 3)):
        mm = rp.flat_model(m, p)
        r = np.array([0.1, 1.0, 10.0])
        assert np.allclose(rp.chi_general(mm, r), rp.chi_flat_closed(m, p, r),
                           rtol=1e-9)


def test_flat_closed_form_needs_p_below_m():
    with pytest.raises(UnsupportedExponent):
        rp.chi_flat_closed(2, 2, 1.0)


def test_parabolic_tail_raises():
    mm = rp.flat_model(2, 2)
    with pytest.raises(NotSubcritical):
        rp.chi_general(mm, 1.0)


def test_hyperbolic_closed_forms_against_quadrature():
    r = np.logspace(math.log10(0.05), math.log10(20.0), 50)
    for (m, p, kappa) in ((3, 2, 1.0), (2, 2, 1.0), (3, 2, 0.5)):
        mm = rp.hyperbolic_model(m, p, kappa)
        got = rp.chi_general(mm, r)
        ref = rp.chi_hyperbolic_closed(m, p, kappa, r)
        assert np.max(np.abs(got / ref - 1.0)) <= 1e-6


def test_closed_form_alpha_guard():
    with pytest.raises(UnsupportedAlpha):
        rp.chi_hyperbolic_closed(4, 2, 1.0, 1.0)  # alpha = 3


def test_limit_value():
    assert rp.chi_limit(2.0, 2.0, 1.0) == pytest.approx(1.0)
    assert rp.chi_limit(1.0, 2.0, 2.0) == pytest.approx(1.0)


def test_recursion_links_neighbouring_alphas():
    # chi_1 on H^2 from chi_3 on H^4, both from quadrature, p = 2
    kappa, r = 1.0, 1.7
    chi3 = float(rp.chi_general(rp.hyperbolic_model(4, 2, kappa), r))
    chi1 = float(rp.chi_general(rp.hyperbolic_model(2, 2, kappa), r))
    rebuilt = chi_recursion_step(1.0, kappa, r, chi3)
    assert rebuilt == pytest.approx(chi1, rel=1e-8)


def test_hardy_weight_markers():
    hw = rp.hardy_weight(rp.hyperbolic_model(3, 2, 1.0))
    assert hw.origin_asymptotic == "power"
    assert hw.limit_at_infinity == pytest.approx(0.25 * 4.0)
    assert float(hw.chi(30.0)) == pytest.approx(hw.limit_at_infinity, rel=1e-6)
    bounded = rp.hardy_weight(rp.hyperbolic_model(2, 3, 1.0))
    assert bounded.origin_asymptotic == "bounded"


def test_space_form_distance():
    x = np.array([1.0, 0.0])
    y = np.array([0.0, 1.0])
    assert space_form_distance("flat", 0.0, x, y) == pytest.approx(math.sqrt(2.0))
    # antipodal-direction points on H^2: distance is the sum of radii
    d = space_form_distance("hyperbolic", 1.0, x, -2.0 * x)
    assert d == pytest.approx(3.0, rel=1e-12)


def test_multipole_weight_superposition():
    poles = [(np.array([0.0, 0.0, 0.0]), 0.5), (np.array([3.0, 0.0, 0.0]), 0.5)]
    x = np.array([1.0, 0.0, 0.0])
    got = rp.multipole_weight("flat", 3, 2.0, poles, x)
    chi = lambda d: 0.25 / d ** 2
    assert got == pytest.approx(0.5 * chi(1.0) + 0.5 * chi(2.0), rel=1e-9)


def test_multipole_mass_guard():
    poles = [(np.zeros(3), 0.7), (np.ones(3), 0.7)]
    with pytest.raises(MassExceeded):
        rp.multipole_weight("flat", 3, 2.0, poles, np.array([1.0, 1.0, 0.0]))


def test_zeta_report_flat_and_hyperbolic():
    grid = np.logspace(-12, 2, 400)
    rep = rp.zeta_check(3, 1.0, grid=grid)
    assert rep.min_zeta > 0.0
    assert abs(rep.ratio_origin - 1.0) <= 0.01
    assert abs(rep.ratio_infinity - 1.0) <= 0.01
    flat = rp.zeta_check(4, 0.0, grid=grid)
    assert flat.min_zeta > 0.0
