import numpy as np
import pytest
from scipy.stats import norm

from esabc import (
    EnergyV,
    GaussLocationOracle,
    KlNn,
    MmdU,
    MmdV,
    Wasserstein,
    default_grid_axes,
    gauss_location_posterior,
    kde,
    limiting_discrepancy,
    limiting_pseudo_posterior_is,
    limiting_pseudo_posterior_rejection,
    rng_create,
    summarize,
)
from esabc.errors import DegenerateBandwidthError, DomainError, ShapeError


def test_summarize_two_points():
    s = summarize(np.array([[1.0], [3.0]]), (2.0,))
    assert s.mean[0] == 2.0
    assert s.median[0] == 2.0
    assert s.mae[0] == 1.0
    assert s.mse[0] == 1.0
    assert s.rmse[0] == 1.0
    assert s.M == 2


def test_summarize_asymmetric():
    s = summarize(np.array([[0.0], [0.0], [3.0]]), (0.0,))
    assert s.mean[0] == 1.0
    assert s.median[0] == 0.0
    assert s.mae[0] == 1.0
    assert s.mse[0] == 3.0
    assert s.rmse[0] == pytest.approx(np.sqrt(3.0), abs=1e-15)


def test_summarize_multivariate_and_errors():
    s = summarize(np.array([[1.0, -1.0], [3.0, 1.0]]), (0.0, 0.0))
    assert s.mean.tolist() == [2.0, 0.0]
    assert s.mse.tolist() == [5.0, 1.0]
    with pytest.raises(DomainError):
        summarize(np.empty((0, 1)), (0.0,))
    with pytest.raises(ShapeError):
        summarize(np.zeros((3, 2)), (0.0,))


def test_kde_recovers_standard_normal():
    rng = rng_create(5, 0)
    samples = rng.generator.standard_normal((4000, 1))
    grid = kde(samples)
    truth = norm.pdf(grid.axes[0])
    assert np.max(np.abs(grid.density - truth)) < 0.02
    mass = np.trapezoid(grid.density, grid.axes[0])
    assert mass == pytest.approx(1.0, abs=0.02)


def test_kde_symmetry():
    samples = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    ax = np.linspace(-4, 4, 401)
    grid = kde(samples, axes=(ax,))
    assert np.allclose(grid.density, grid.density[::-1], atol=1e-12)


def test_kde_two_dimensional_product_structure():
    rng = rng_create(6, 0)
    samples = rng.generator.standard_normal((500, 2))
    axes = (np.linspace(-3, 3, 61), np.linspace(-3, 3, 61))
    grid = kde(samples, axes=axes)
    assert grid.density.shape == (61, 61)
    assert np.all(grid.density >= 0)
    mass = np.trapezoid(np.trapezoid(grid.density, axes[1], axis=1), axes[0])
    assert mass == pytest.approx(1.0, abs=0.05)


def test_kde_error_paths():
    with pytest.raises(DomainError):
        kde(np.array([[1.0]]))
    with pytest.raises(ShapeError):
        kde(np.zeros((10, 3)))
    with pytest.raises(DegenerateBandwidthError):
        kde(np.ones((10, 1)))


def test_default_grid_axes_cover_sample():
    samples = np.array([[0.0], [1.0], [2.0], [5.0]])
    (ax,) = default_grid_axes(samples)
    assert ax[0] < 0.0 and ax[-1] > 5.0
    assert len(ax) == 256


def test_conjugate_posterior_hand_value():
    mean, var = gauss_location_posterior(2.0, 1, 1.0, 1.0)
    assert mean == 1.0
    assert var == 0.5
    mean, var = gauss_location_posterior(2.0, 100, 1.0, 1.0)
    assert mean == pytest.approx(200.0 / 101.0, abs=1e-15)
    assert var == pytest.approx(1.0 / 101.0, abs=1e-15)
    with pytest.raises(DomainError):
        gauss_location_posterior(0.0, 0, 1.0, 1.0)


def test_rejection_limit_is_truncated_prior():
    oracle = GaussLocationOracle(theta0=2.0, sigma2=1.0, tau2=1.0, eps=1.0)
    grid = np.linspace(-1, 4, 2001)
    density = limiting_pseudo_posterior_rejection(oracle, grid)
    inside = (grid >= 1.0) & (grid <= 3.0)
    assert np.all(density[~inside] == 0.0)
    mass = norm.cdf(3.0) - norm.cdf(1.0)
    assert density[np.searchsorted(grid, 2.0)] == pytest.approx(
        norm.pdf(2.0) / mass, abs=1e-9
    )
    interior = np.linspace(1.0, 3.0, 4001)
    inner = limiting_pseudo_posterior_rejection(oracle, interior)
    assert np.trapezoid(inner, interior) == pytest.approx(1.0, abs=1e-6)


def test_is_limit_hand_values():
    oracle = GaussLocationOracle(theta0=2.0, sigma2=1.0, tau2=1.0, eps=1.0)
    mean, var = limiting_pseudo_posterior_is(oracle)
    assert mean == 1.0
    assert var == 0.5
    small = GaussLocationOracle(theta0=2.0, sigma2=1.0, tau2=1.0, eps=1e-6)
    mean, var = limiting_pseudo_posterior_is(small)
    assert mean == pytest.approx(2.0, abs=1e-5)
    assert var == pytest.approx(1e-12, rel=1e-5)


def test_limiting_discrepancy_shapes():
    assert limiting_discrepancy(EnergyV(), 2.0, 0.5) == pytest.approx(2.25)
    assert limiting_discrepancy(KlNn(), 2.0, 0.5) == pytest.approx(2.25)
    assert limiting_discrepancy(MmdU(), 2.0, 0.5) == pytest.approx(1.5)
    assert limiting_discrepancy(MmdV(), 2.0, 0.5) == pytest.approx(1.5)
    assert limiting_discrepancy(Wasserstein(), 2.0, 0.5) == pytest.approx(1.5)
    assert limiting_discrepancy(EnergyV(), 1.0, 1.0) == 0.0


def test_oracle_validation():
    with pytest.raises(DomainError):
        GaussLocationOracle(theta0=0.0, sigma2=0.0, tau2=1.0, eps=1.0)
