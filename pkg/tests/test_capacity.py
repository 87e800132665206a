"""Capacitors, flux values, ladders and the criticality classifier."""

import math

import numpy as np
import pytest

import radpde as rp


def test_annulus_capacitor_closed_form():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 800)
    res = rp.capacitor_solve(mesh, 0.0)
    assert res.value == pytest.approx(4.0 * math.pi, rel=5e-3)
    assert abs(res.flux_value - res.value) <= 1e-3 * res.value
    # capacitor profile matches (1/r - 1/2)/(1 - 1/2)
    ref = (1.0 / mesh.nodes - 0.5) / 0.5
    assert np.max(np.abs(res.capacitor.values - ref)) <= 1e-6


def test_capacitor_bounds_and_datum():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 400)
    res = rp.capacitor_solve(mesh, 0.0, g=2.0)
    u = res.capacitor.values
    assert u[0] == pytest.approx(2.0) and abs(u[-1]) <= 1e-14
    assert np.all(u >= -1e-12) and np.all(u <= 2.0 + 1e-12)


def test_capacity_p_homogeneity():
    mesh = rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0, 400)
    v1 = rp.capacitor_solve(mesh, 0.0, g=1.0).value
    v3 = rp.capacitor_solve(mesh, 0.0, g=3.0).value
    assert v3 == pytest.approx(9.0 * v1, rel=1e-9)


def test_ladder_monotone_to_limit():
    meshes = [rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0 * 2.0 ** j, 600,
                              spacing="log") for j in range(9)]
    lad = rp.global_capacity(meshes, 0.0)
    assert lad["monotone"]
    assert lad["estimate"] == pytest.approx(2.0 * math.pi, rel=1e-2)


def test_log_decay_in_dimension_two():
    m2 = rp.flat_model(2, 2)
    for R in (8.0, 64.0, 512.0):
        mesh = rp.annulus_mesh(m2, 1.0, R, 600, spacing="log")
        val = rp.capacitor_solve(mesh, 0.0).value
        assert val == pytest.approx(math.pi / math.log(R), rel=2e-2)


def test_classifier_alternative():
    meshes3 = [rp.annulus_mesh(rp.flat_model(3, 2), 1.0, 2.0 * 2.0 ** j, 600,
                               spacing="log") for j in range(9)]
    assert rp.classify_criticality(meshes3, 0.0)["classification"] == "subcritical"
    meshes2 = [rp.annulus_mesh(rp.flat_model(2, 2), 1.0, 2.0 * 2.0 ** j, 600,
                               spacing="log") for j in range(9)]
    out = rp.classify_criticality(meshes2, 0.0)
    assert out["classification"] == "critical"
    # normalized capacitors approximate a ground state: positive, normalized
    gs = out["ground_state"]
    assert gs is not None and np.all(gs.values[:-1] >= 0.0)
