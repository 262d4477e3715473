import numpy as np
import pytest

from hyperfit import (
    MonomialBasis,
    bombieri_weights,
    custom_weights,
    euclidean_weights,
    fit_als,
    fit_als_known_sigma,
    fit_ols,
    psi_polynomial,
    reduce_covariance,
    sin_angle,
)
from hyperfit.transforms import composition_matrix

from conftest import CONIC_THETA, conic_points


def _circle(n=40, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    ang = rng.uniform(0, 2 * np.pi, n)
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    if noise:
        pts = pts + noise * rng.standard_normal(pts.shape)
    return pts


def test_weights():
    basis = MonomialBasis.triangular(2, 2)
    assert np.array_equal(bombieri_weights(basis).w, [1, 1, 1, 1, 0.5, 1])
    assert np.array_equal(euclidean_weights(4).w, np.ones(4))
    w = custom_weights([1.0, 2.0])
    assert np.array_equal(w.scaling(), [1.0, 1.0 / np.sqrt(2.0)])
    with pytest.raises(ValueError):
        custom_weights([1.0, 0.0])
    with pytest.raises(ValueError):
        custom_weights([1.0, -2.0])


def test_reduce_covariance_identity_and_diag():
    spec = reduce_covariance(np.eye(3))
    assert spec.is_identity and spec.rank == 3
    spec = reduce_covariance(np.diag([4.0, 1.0]))
    assert spec.rank == 2
    assert np.allclose(spec.k_factor, np.diag([2.0, 1.0]))
    spec = reduce_covariance(np.diag([0.0, 3.0]))
    assert spec.rank == 1
    j = np.zeros((2, 2))
    j[0, 0] = 1.0
    assert np.allclose(spec.k_factor @ j @ spec.k_factor.T, np.diag([0.0, 3.0]))


def test_reduce_covariance_general_and_errors():
    sigma0 = np.array([[4.0, 1.0], [1.0, 2.0]])
    spec = reduce_covariance(sigma0)
    j = np.diag([1.0, 1.0])
    assert np.allclose(spec.k_factor @ j @ spec.k_factor.T, sigma0, atol=1e-12)
    assert reduce_covariance([[1.0, 1.0], [1.0, 1.0]]).rank == 1
    with pytest.raises(ValueError):
        reduce_covariance([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        reduce_covariance([[1.0, 2.0], [2.0, 1.0]])  # indefinite
    with pytest.raises(ValueError):
        reduce_covariance(np.zeros((2, 2)))


def test_ols_noiseless_circle():
    basis = MonomialBasis.triangular(2, 2)
    fit = fit_ols(_circle(), basis)
    want = np.array([-1.0, 0.0, 0.0, 1.0, 0.0, 1.0])
    assert sin_angle(fit.theta, want) <= 1e-10
    assert fit.method == "ols"
    assert fit.sigma_sq_hat is None
    assert fit.diagnostics.smallest_eigenvalue == pytest.approx(0.0, abs=1e-10)


def test_quadratic_form_identity():
    # theta' Psi_0 theta equals the sum of squared polynomial values
    basis = MonomialBasis.triangular(2, 2)
    pts = _circle(25, noise=0.1, seed=3)
    fit = fit_ols(pts, basis)
    v = basis.vandermonde(pts)
    residuals = fit.theta @ v
    mats = psi_polynomial(pts, basis)
    quad = fit.theta @ mats[0] @ fit.theta
    assert quad == pytest.approx(np.sum(residuals**2), rel=1e-9)


def test_known_sigma_zero_equals_ols_bit_for_bit():
    basis = MonomialBasis.triangular(2, 2)
    pts = _circle(30, noise=0.05, seed=4)
    a = fit_ols(pts, basis)
    b = fit_als_known_sigma(pts, basis, sigma=0.0)
    assert np.array_equal(a.theta, b.theta)
    assert b.method == "als-sigma"


def test_als_estimates_noise_level():
    basis = MonomialBasis.triangular(2, 2)
    pts = _circle(4000, noise=0.05, seed=9)
    fit = fit_als(pts, basis)
    assert fit.method == "als"
    assert fit.sigma_sq_hat == pytest.approx(0.0025, rel=0.2)
    assert sin_angle(fit.theta, [-1, 0, 0, 1, 0, 1]) < 0.05
    assert fit.diagnostics.solver in ("linearization", "bisection")
    assert fit.diagnostics.residual <= 1e-9


def test_als_beats_ols_direction_on_noisy_conic():
    # bias correction wins once the sample is large enough for the
    # variance term to drop below the ordinary fit's bias
    basis = MonomialBasis.triangular(2, 2)
    base = conic_points(2000)
    ols_angles, als_angles = [], []
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        pts = base + 0.15 * rng.standard_normal(base.shape)
        ols_angles.append(sin_angle(fit_ols(pts, basis).theta, CONIC_THETA))
        als_angles.append(sin_angle(fit_als(pts, basis).theta, CONIC_THETA))
    assert np.mean(als_angles) < 0.7 * np.mean(ols_angles)


def test_subspace_noise_restricts_corrections():
    # noise confined to x: corrections only touch moments through x powers
    basis = MonomialBasis.triangular(2, 2)
    pts = _circle(20, seed=5)
    mats = psi_polynomial(pts, basis, noise=np.diag([1.0, 0.0]))
    full = psi_polynomial(pts, basis)
    assert len(mats) == 3 and len(full) == 3
    assert np.array_equal(mats[0], full[0])
    assert not np.allclose(mats[1], full[1])
    iy2 = basis.index_of((0, 2))
    i0 = basis.index_of((0, 0))
    # the pure-y entry picks up no correction when y carries no noise
    assert mats[1][iy2, i0] == 0.0
    assert full[1][iy2, i0] != 0.0


def test_general_covariance_matches_manual_transform():
    sigma0 = np.array([[4.0, 1.0], [1.0, 2.0]])
    basis = MonomialBasis.triangular(2, 2)
    pts = _circle(300, noise=0.0, seed=6)
    rng = np.random.default_rng(6)
    noise = 0.05 * rng.standard_normal(pts.shape) @ np.linalg.cholesky(sigma0).T
    noisy = pts + noise

    fit = fit_als(noisy, basis, noise=sigma0)

    spec = reduce_covariance(sigma0)
    k = spec.k_factor
    transformed = noisy @ np.linalg.inv(k).T
    manual = fit_als(transformed, basis)
    ck = composition_matrix(basis, k, np.zeros(2))
    mapped = np.linalg.solve(ck.T, manual.theta)

    assert fit.sigma_sq_hat == pytest.approx(manual.sigma_sq_hat, rel=1e-8)
    assert sin_angle(fit.theta, mapped) <= 1e-8


def test_input_validation():
    basis = MonomialBasis.triangular(2, 2)
    with pytest.raises(ValueError):
        fit_ols(np.zeros((4, 3)), basis)
    with pytest.raises(ValueError):
        fit_ols(np.zeros(4), basis)
    with pytest.raises(ValueError):
        fit_als_known_sigma(_circle(10), basis, sigma=-0.5)
    with pytest.raises(ValueError):
        fit_ols(_circle(10), basis, weights=custom_weights(np.ones(5)))
