"""Smoke tests for the bifatlas python module."""

import math

import pytest

import bifatlas as ba


def test_hr_rhs_reference_point():
    p = ba.HRParams()
    p.b, p.I, p.eps = 3.0, 2.0, 0.01
    f = ba.hr_rhs((0.0, 0.0, 0.0), p)
    assert f[0] == pytest.approx(2.0)
    assert f[1] == pytest.approx(1.0)
    assert f[2] == pytest.approx(0.064)


def test_hr_jacobian_fixed_entries():
    j = ba.hr_jacobian((0.3, -1.0, 0.5), ba.HRParams())
    assert j[0][1] == 1.0
    assert j[2][2] == -ba.HRParams().eps


def test_fhn_origin_equilibrium():
    p = ba.FHNParams()
    assert list(ba.fhn_rhs((0.0, 0.0, 0.0), p)) == [0.0, 0.0, 0.0]


def test_equilibria_and_eigenvalues():
    eqs = ba.equilibria("hr", {"b": 3.0, "I": 5.4})
    assert len(eqs) == 1
    x, y, z = eqs[0]["state"]
    assert abs(x) < 1e-12 and abs(y - 1.0) < 1e-12 and abs(z - 6.4) < 1e-12
    assert len(eqs[0]["eigenvalues"]) == 3


def test_eigen3_diagonal():
    ev = ba.eigen3(((-1.0, 0.0, 0.0), (0.0, -2.0, 0.0), (0.0, 0.0, -3.0)))
    assert sorted(e.real for e in ev) == [-3.0, -2.0, -1.0]


def test_test_functions_hopf_case():
    # companion matrix of l^3 + l^2 + l + 1 has eigenvalues i, -i, -1
    tf = ba.test_functions(((0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (-1.0, -1.0, -1.0)))
    assert abs(tf["hopf"]) < 1e-12
    assert tf["hopf_admissible"]


def test_integrate_decay_and_determinism():
    cfg = ba.IntegratorConfig()
    tr1 = ba.integrate("hr", {"eps": 0.018}, (0.0, 0.0, 0.0), 50.0, cfg)
    tr2 = ba.integrate("hr", {"eps": 0.018}, (0.0, 0.0, 0.0), 50.0, cfg)
    assert tr1.status == "ok"
    assert tr1.t[-1] == 50.0
    assert tr1.states[-1] == tr2.states[-1]


def test_continue_curve_circle():
    res = ba.continue_curve(lambda u: [u[0] ** 2 + u[1] ** 2 - 1.0], 1, [1.0, 0.0], step=0.1)
    assert res["termination"] == "closed-loop"
    for pt in res["points"]:
        assert math.hypot(pt[0], pt[1]) == pytest.approx(1.0, abs=1e-8)


def test_small_sweep_and_boundary():
    cfg = ba.SCConfig()
    cfg.t_transient = 100.0
    cfg.t_observe = 150.0
    grid = ba.sc_sweep("hr", {"eps": 0.018}, "b", 2.9, 3.1, "I", 1.9, 2.1, 2, 2, cfg)
    assert grid.nx == 2 and grid.ny == 2
    for i in range(2):
        for j in range(2):
            assert grid.classification(i, j) in {
                "equilibrium",
                "periodic",
                "chaotic/unresolved",
                "blow-up",
            }


def test_gallery_morse_isola():
    mesh = ba.gallery_mesh("isola-plus", resolution=24)
    cps = ba.critical_points(mesh)
    assert len(cps) == 1
    assert cps[0]["kind"] == "max"
    assert cps[0]["class"] == "isola-type"


def test_slice_and_reeb_two_well():
    mesh = ba.gallery_mesh("two-well", resolution=32)
    assert len(ba.slice_level(mesh, -0.1)) == 2
    samples = [-0.34 + 0.53 * i / 18 for i in range(19)]
    topo = ba.reeb_topology(mesh, samples)
    assert topo["case"] == "II"


def test_cusp_root_counts():
    inside = ba.count_roots_line(0.0, -3.0)
    assert inside["count"] == 3
    outside = ba.count_roots_line(0.0, 3.0)
    assert outside["count"] == 1
