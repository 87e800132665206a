"""Green kernels and the subcriticality tri-state."""

import math

import numpy as np
import pytest

import radpde as rp
from radpde.errors import NotSubcritical


def test_flat_kernel_oracles():
    assert rp.green_kernel(rp.flat_model(3, 2), 2.0) == pytest.approx(0.5, rel=1e-10)
    assert rp.green_kernel(rp.flat_model(4, 2), 1.0) == pytest.approx(0.5, rel=1e-10)


def test_hyperbolic_kernel_oracle():
    # int_1^inf ds / sinh s = ln(coth(1/2)) = ln((e+1)/(e-1))
    mm = rp.hyperbolic_model(2, 2, 1.0)
    ref = math.log((math.e + 1.0) / (math.e - 1.0))
    assert rp.green_kernel(mm, 1.0) == pytest.approx(ref, rel=1e-10)


def test_subcriticality_states():
    assert rp.subcriticality_state(rp.flat_model(3, 2)) == "subcritical"
    assert rp.subcriticality_state(rp.flat_model(2, 2)) == "parabolic"
    assert rp.subcriticality_state(rp.hyperbolic_model(2, 3, 1.0)) == "subcritical"
    assert rp.is_subcritical_model(rp.flat_model(3, 2)) is True
    assert rp.is_subcritical_model(rp.flat_model(2, 2)) is False


def test_kernel_class_and_monotonicity():
    k = rp.make_green_kernel(rp.flat_model(3, 2))
    assert k.asymptotic_class == "power"
    r = np.linspace(0.5, 10.0, 40)
    vals = np.array([k.G(x) for x in r])
    assert np.all(np.diff(vals) < 0.0)
    assert vals[-1] < 0.2
    assert rp.make_green_kernel(rp.hyperbolic_model(2, 3, 1.0)).asymptotic_class == "bounded"
    assert rp.make_green_kernel(rp.hyperbolic_model(3, 3, 1.0)).asymptotic_class == "logarithmic"


def test_parabolic_kernel_raises():
    with pytest.raises(NotSubcritical):
        rp.make_green_kernel(rp.flat_model(2, 2))


def test_green_hardy_weight_matches_chi():
    mm = rp.hyperbolic_model(3, 2, 1.0)
    r = np.array([0.3, 1.0, 5.0])
    assert np.allclose(rp.green_hardy_weight(mm, r), rp.chi_general(mm, r),
                       rtol=1e-10)
