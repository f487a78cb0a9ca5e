"""Prior and pseudo-posterior log-densities, checked against log-gamma identities."""

import math

import numpy as np
import pytest
from scipy.special import gammaln

from gibbsrank.basis import ModelMask, SparseCoef
from gibbsrank.gibbs import (
    GibbsConfig,
    log_ball_volume,
    log_binomial,
    log_gibbs,
    log_prior,
    prior_size_distribution,
)


def unit_coef(d, active, M, norm=1.0):
    """Coefficient vector of the given norm supported on `active`."""
    values = np.zeros(len(active) * M)
    values[0] = norm
    return SparseCoef(mask=ModelMask.from_active(d, active), values=values)


def test_config_validation():
    with pytest.raises(ValueError):
        GibbsConfig(delta=0.0, d=5)
    with pytest.raises(ValueError):
        GibbsConfig(delta=1.0, d=5, beta=1.0)
    with pytest.raises(ValueError):
        GibbsConfig(delta=1.0, d=5, ball_radius=-1.0)
    with pytest.raises(ValueError):
        GibbsConfig(delta=1.0, d=5, norm_mode="exact")


def test_ball_volume_closed_forms():
    # dimension 1: interval of length 2r; dimension 2: pi r^2; dimension 3: 4/3 pi r^3
    r = 2.0
    assert log_ball_volume(0, r) == 0.0
    assert log_ball_volume(1, r) == pytest.approx(math.log(2 * r), abs=1e-12)
    assert log_ball_volume(2, r) == pytest.approx(math.log(math.pi * r**2), abs=1e-12)
    assert log_ball_volume(3, r) == pytest.approx(math.log(4.0 / 3.0 * math.pi * r**3), abs=1e-12)


def test_log_binomial_exact_small_values():
    assert log_binomial(5, 2) == pytest.approx(math.log(10), abs=1e-12)
    assert log_binomial(20, 0) == pytest.approx(0.0, abs=1e-12)


def test_empty_model_log_prior_is_zero():
    cfg = GibbsConfig(delta=1.0, d=5)
    theta = SparseCoef(mask=ModelMask.empty(5), values=np.zeros(0))
    assert log_prior(theta, cfg) == 0.0


def test_outside_ball_is_minus_infinity():
    cfg = GibbsConfig(delta=1.0, d=5, ball_radius=2.0)
    theta = unit_coef(5, [0], cfg.M, norm=2.5)
    assert log_prior(theta, cfg) == -math.inf


def test_dimension_mismatch_raises():
    cfg = GibbsConfig(delta=1.0, d=5)
    theta = unit_coef(4, [0], cfg.M)
    with pytest.raises(ValueError):
        log_prior(theta, cfg)


@pytest.mark.parametrize("norm_mode", ["coefficient", "covariate", "kernel"])
def test_log_prior_size_ratio_identity(norm_mode):
    """Moving from model size k to k+1 changes the log prior by
    M log(beta) + log C(d,k) - log C(d,k+1) minus the ball-volume increment."""
    d, M = 20, 13
    cfg = GibbsConfig(delta=1.0, d=d, beta=0.37, M=M, norm_mode=norm_mode)
    for k in range(1, d):
        lo = log_prior(unit_coef(d, list(range(k)), M), cfg)
        hi = log_prior(unit_coef(d, list(range(k + 1)), M), cfg)
        expected = (
            M * math.log(cfg.beta)
            + log_binomial(d, k)
            - log_binomial(d, k + 1)
        )
        if norm_mode != "kernel":
            expected -= log_ball_volume(cfg.ball_dim(k + 1), cfg.ball_radius)
            expected += log_ball_volume(cfg.ball_dim(k), cfg.ball_radius)
        assert hi - lo == pytest.approx(expected, abs=1e-10)


def test_ball_dim_by_mode():
    coeff = GibbsConfig(delta=1.0, d=5, norm_mode="coefficient")
    cov = GibbsConfig(delta=1.0, d=5, norm_mode="covariate")
    assert coeff.ball_dim(3) == 39
    assert cov.ball_dim(3) == 3


def test_log_gibbs_zero_risk_equals_prior():
    cfg = GibbsConfig(delta=4.0, d=5)
    theta = unit_coef(5, [1], cfg.M)
    assert log_gibbs(theta, 0.0, cfg) == log_prior(theta, cfg)


def test_log_gibbs_outside_ball():
    cfg = GibbsConfig(delta=4.0, d=5)
    theta = unit_coef(5, [1], cfg.M, norm=3.0)
    assert log_gibbs(theta, 0.1, cfg) == -math.inf


def test_log_gibbs_risk_difference():
    cfg = GibbsConfig(delta=10.0, d=5)
    theta = unit_coef(5, [1], cfg.M)
    diff = log_gibbs(theta, 0.2, cfg) - log_gibbs(theta, 0.3, cfg)
    assert diff == pytest.approx(1.0, abs=1e-12)


def test_prior_size_distribution_matches_direct_sum():
    cfg = GibbsConfig(delta=1.0, d=6, beta=0.8, M=3)
    dist = prior_size_distribution(cfg)
    # direct computation: the C(d,k) masks of size k each carry
    # C(d,k)^(-1) beta^(kM), so size k has unnormalized mass beta^(kM)
    raw = np.array([cfg.beta ** (k * cfg.M) for k in range(cfg.d + 1)])
    assert np.allclose(dist, raw / raw.sum(), atol=1e-14)
    assert dist.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(dist) < 0)


def test_large_delta_stays_finite():
    cfg = GibbsConfig(delta=1e7, d=5)
    theta = unit_coef(5, [0], cfg.M)
    value = log_gibbs(theta, 0.4, cfg)
    assert math.isfinite(value)


def test_gammaln_consistency_of_volume():
    # independent identity: V_d(r) = pi^(d/2) r^d / Gamma(d/2 + 1)
    for dim in (5, 13, 26):
        direct = 0.5 * dim * math.log(math.pi) + dim * math.log(2.0) - gammaln(dim / 2 + 1)
        assert log_ball_volume(dim, 2.0) == pytest.approx(direct, abs=1e-12)
