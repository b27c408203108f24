"""Glued approximate metric: cutoff, matching, error support and decay."""

import numpy as np
import pytest

from hitchlab import glue, painleve, rays
from hitchlab.painleve import rho_of


def test_cutoff_plateau_values():
    assert glue.cutoff(0.4) == 1.0
    assert glue.cutoff(0.5) == 1.0
    assert glue.cutoff(1.0) == 0.0
    assert glue.cutoff(1.3) == 0.0


def test_cutoff_midpoint_symmetry():
    assert glue.cutoff(0.75) == pytest.approx(0.5, abs=1e-14)
    r = np.linspace(0.5, 1.0, 101)
    vals = glue.cutoff(r)
    assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
    assert np.allclose(vals + glue.cutoff(1.5 - r), 1.0, atol=1e-12)


def test_cutoff_c2_junctions():
    # first and second derivatives vanish at both junctions
    for r in (0.5, 1.0):
        assert glue.cutoff_d1(r) == 0.0
        assert glue.cutoff_d2(r) == 0.0
    # interior derivative values finite and continuous by closed form
    eps = 1e-7
    for r in (0.5, 1.0):
        assert abs(glue.cutoff_d1(r + eps) - glue.cutoff_d1(r - eps)) < 1e-4
        assert abs(glue.cutoff_d2(r + eps) - glue.cutoff_d2(r - eps)) < 1e-3


def test_approx_metric_entry_regions():
    t, m, d = 4.0, 1, 0
    psi = painleve.psi_solution_for(1.0 / 3.0, rho_hi=rho_of(t, 1.0, m), rho_lo=rho_of(t, 1e-3, m))
    # chi = 1 region: model entry
    r = 0.3
    expected = r**0.5 * np.exp(float(psi(rho_of(t, r, m))))
    assert glue.approx_metric_entry(t, m, d, r) == pytest.approx(expected, rel=1e-12)
    # chi = 0 region: decoupled entry
    assert glue.approx_metric_entry(t, m, d, 1.5) == pytest.approx(1.5**0.5, rel=1e-14)
    # reciprocal pairing: determinant 1
    h = glue.approx_metric_entry(t, m, d, np.array([0.3, 0.7, 1.5]))
    assert np.allclose(h * (1.0 / h), 1.0)


def test_approx_metric_entry_c1_matching():
    t, m, d = 3.0, 1, 0
    for r0 in (0.5, 1.0):
        eps = 1e-6
        hm = glue.approx_metric_entry(t, m, d, r0 - eps)
        h0 = glue.approx_metric_entry(t, m, d, r0)
        hp = glue.approx_metric_entry(t, m, d, r0 + eps)
        left = (h0 - hm) / eps
        right = (hp - h0) / eps
        assert abs(left - right) < 1e-4 * max(1.0, abs(left))


def test_error_density_inner_region_at_solver_tolerance():
    tol = 1e-10
    f = glue.error_density(4.0, 1, 0, 0.3)
    assert abs(f) < 100 * tol


def test_error_density_outside_support():
    assert glue.error_density(4.0, 1, 0, 1.2) == 0.0
    assert glue.support_violation_max(4.0, 1, 0) == 0.0
    assert glue.support_violation_max(9.0, 3, 0) == 0.0


def test_error_density_zero_ray():
    r = np.linspace(0.2, 1.5, 17)
    assert np.max(np.abs(glue.error_density(5.0, 2, 1, r))) == 0.0


def test_error_density_collar_matches_fine_reference():
    # oracle: identical formula on a profile solved with a 10x finer mesh
    t, m, d = 4.0, 1, 0
    coarse = painleve.solve_psi(1.0 / 3.0, rho_max=20.0, n_nodes=2000)
    # the 10x mesh cannot push the Newton residual below its h^-2-amplified
    # roundoff floor (~2e-9); discretization accuracy is what the oracle needs
    fine = painleve.solve_psi(1.0 / 3.0, rho_max=20.0, n_nodes=20000, tol=3e-8)
    val = glue.error_density(t, m, d, 0.75, psi=coarse)
    ref = glue.error_density(t, m, d, 0.75, psi=fine)
    assert val != 0.0
    assert abs(val - ref) < 0.01 * abs(ref)


def test_error_density_consistent_with_ray_residual():
    # at chi = 1 the two diagnostics are the same numbers
    t, m, d = 3.0, 1, 0
    prof = rays.hitchin_residual_radial(t, m, d, window=(0.2, 0.5))
    vals = glue.error_density(t, m, d, prof.grid.nodes)
    assert np.allclose(vals, prof.values, rtol=0, atol=1e-18)


def test_sup_collar_error_strictly_decreasing():
    sups = [glue.sup_collar_error(t, 1, 0) for t in (2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0)]
    assert all(b < a for a, b in zip(sups, sups[1:]))


def test_error_decay_fit_m1():
    fit = glue.error_decay_fit(1, 0)
    assert fit.rate_predicted == pytest.approx(4.0 * 0.5**1.5 / 1.5)
    assert abs(fit.relative_gap) < 0.15
    assert fit.strictly_decreasing()


def test_error_decay_fit_m3():
    fit = glue.error_decay_fit(3, 0)
    assert fit.rate_predicted == pytest.approx(4.0 * 0.5**2.5 / 2.5)
    assert abs(fit.relative_gap) < 0.15


def test_error_decay_fit_zero_ray_guard():
    with pytest.raises(glue.NonPositiveRate):
        glue.error_decay_fit(2, 1)


def test_default_ladder_preconditions():
    for m in (1, 2, 3):
        ladder = glue.default_t_ladder(m)
        assert len(ladder) >= 5
        assert ladder[-1] / ladder[0] >= 3.0
