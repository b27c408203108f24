"""Model pairs, C0 distances, radial residuals, and ray decay fits."""

import math

import numpy as np
import pytest

from hitchlab import painleve, rays
from hitchlab.hecke import decoupled_residual
from hitchlab.painleve import RadialGrid
from hitchlab.rays import AnnulusSpec, c0_distance, limiting_pair, model_pair


GRID = RadialGrid.log_spaced(0.25, 1.0, 32)
K_HALF = AnnulusSpec(0.5, 1.0)


def test_model_pair_zero_branch():
    pair = model_pair(3.0, 2, 1, GRID)
    r = GRID.nodes
    assert np.max(np.abs(pair.a(r))) == 0.0
    # full entry moduli |e_plus z^d| = |e_minus z^{m-d}| = r
    assert np.allclose(pair.e_plus(r) * r**1, r)
    assert np.allclose(pair.e_minus(r) * r ** (2 - 1), r)


def test_limiting_pair_values():
    pair = limiting_pair(1, 0)
    r = GRID.nodes
    assert np.allclose(pair.a(r), 1.0 / 8.0)
    assert np.allclose(pair.e_plus(r), r**0.5)
    assert np.allclose(pair.e_minus(r), r**-0.5)
    assert np.max(np.abs(limiting_pair(2, 1).a(r))) == 0.0


def test_model_pair_recovers_limit():
    big_t = 40.0
    pair = model_pair(big_t, 1, 0, GRID)
    inf_pair = limiting_pair(1, 0)
    r = np.linspace(0.5, 1.0, 11)
    assert np.max(np.abs(pair.a(r) - inf_pair.a(r))) < 1e-6
    assert np.max(np.abs(pair.e_plus(r) - inf_pair.e_plus(r))) < 1e-6


def test_det_phi_identity():
    for pair in (model_pair(2.0, 1, 0, GRID), model_pair(3.0, 3, 1, GRID), limiting_pair(4, 1)):
        assert pair.det_phi_exponent_identity()
        r = GRID.nodes
        assert np.max(np.abs(pair.e_plus(r) * pair.e_minus(r) - 1.0)) < 1e-14
        assert pair.tr_phi_sq_coefficient() == 2.0


def test_trace_identity_between_scales():
    p_t = model_pair(2.0, 3, 0, GRID)
    p_inf = limiting_pair(3, 0)
    assert p_t.tr_phi_sq_coefficient() - p_inf.tr_phi_sq_coefficient() == 0.0


def test_c0_distance_identical_pairs():
    pair = model_pair(2.0, 1, 0, GRID)
    assert c0_distance(pair, pair, K_HALF) == 0.0


def test_c0_distance_positive_finite_and_decreasing():
    inf_pair = limiting_pair(1, 0)
    d4 = c0_distance(model_pair(4.0, 1, 0, GRID), inf_pair, K_HALF)
    d8 = c0_distance(model_pair(8.0, 1, 0, GRID), inf_pair, K_HALF)
    assert 0.0 < d8 < d4 < math.inf


def test_c0_distance_stratum_mismatch():
    with pytest.raises(rays.StratumMismatch):
        c0_distance(model_pair(2.0, 1, 0, GRID), limiting_pair(2, 0), K_HALF)


def test_limiting_pair_solves_decoupled_equations():
    # the decoupled pair is exact: residual is discretization error only
    res = decoupled_residual(1, 0, 0.5, 1.0, step=1e-3)
    assert res.max() < 1e-5


def test_hitchin_residual_exact_model():
    tol = 1e-10
    prof = rays.hitchin_residual_radial(4.0, 1, 0, window=(0.5, 1.0))
    assert prof.sup() < 100 * tol


def test_hitchin_residual_zero_branch():
    prof = rays.hitchin_residual_radial(4.0, 2, 1, window=(0.5, 1.0))
    assert prof.sup() == 0.0


def test_hitchin_residual_detects_wrong_scale():
    good = rays.hitchin_residual_radial(4.0, 1, 0, window=(0.5, 1.0))
    bad = rays.hitchin_residual_radial(4.0, 1, 0, window=(0.5, 1.0), profile_t=5.0)
    assert bad.sup() > 1e6 * good.sup()
    assert bad.sup() > 1e-2


def test_decay_fit_m1():
    fit = rays.decay_fit(1, 0, K_HALF)
    assert fit.rate_predicted == pytest.approx(4.0 * 0.5**1.5 / 1.5)
    assert abs(fit.relative_gap) < 0.10
    assert fit.strictly_decreasing()


def test_decay_fit_m2():
    fit = rays.decay_fit(2, 0, K_HALF)
    assert fit.rate_predicted == pytest.approx(0.5)
    assert abs(fit.relative_gap) < 0.10
    assert fit.strictly_decreasing()


def test_decay_fit_zero_ray_guard():
    with pytest.raises(rays.NonPositiveRate):
        rays.decay_fit(2, 1, K_HALF)


def test_decay_fit_ladder_preconditions():
    with pytest.raises(rays.LabError):
        rays.decay_fit(1, 0, K_HALF, t_list=(2, 3, 4))
    with pytest.raises(rays.LabError):
        rays.decay_fit(1, 0, K_HALF, t_list=(4, 5, 6, 7, 8))


def test_profile_window_guard():
    pair = model_pair(2.0, 1, 0, GRID)
    with pytest.raises(rays.NumericalFailure):
        pair.v(np.array([50.0]))


def test_hitchin_residual_accepts_grid_window():
    prof = rays.hitchin_residual_radial(4.0, 1, 0, window=RadialGrid(np.array([0.5, 1.0])))
    assert prof.sup() < 1e-8
    assert prof.grid.r_min >= 0.5 and prof.grid.r_max <= 1.0


def test_decay_rate_independent_of_d():
    # the substitution rho(t, r) does not involve d: fitted rates at fixed m agree
    f0 = rays.decay_fit(3, 0, K_HALF)
    f1 = rays.decay_fit(3, 1, K_HALF)
    assert f0.rate_predicted == f1.rate_predicted
    assert abs(f0.rate - f1.rate) / f0.rate < 0.04
