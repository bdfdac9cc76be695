"""Posterior summaries, kernel density estimates, and closed-form
Gaussian-location oracles used to validate the sampler numerically."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .discrepancy import DiscrepancyKind, EnergyV, KlNn, MmdU, MmdV, Wasserstein
from .errors import DegenerateBandwidthError, DomainError, ShapeError

__all__ = [
    "PosteriorSummary",
    "KdeGrid",
    "GaussLocationOracle",
    "summarize",
    "kde",
    "default_grid_axes",
    "gauss_location_posterior",
    "limiting_pseudo_posterior_rejection",
    "limiting_pseudo_posterior_is",
    "limiting_discrepancy",
]


@dataclass(frozen=True)
class PosteriorSummary:
    mean: np.ndarray
    median: np.ndarray
    mae: np.ndarray
    mse: np.ndarray
    rmse: np.ndarray
    M: int
    theta0: np.ndarray


def summarize(samples, theta0) -> PosteriorSummary:
    """Coordinate-wise location and error summaries of a posterior sample.

    Mean absolute and mean squared errors are taken against the true
    parameter ``theta0``; the median uses the midpoint convention for
    even sample sizes.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise DomainError("cannot summarize an empty sample")
    theta0 = np.asarray(theta0, dtype=float).ravel()
    if theta0.size != samples.shape[1]:
        raise ShapeError(
            f"theta0 has {theta0.size} coordinates, samples have {samples.shape[1]}"
        )
    err = np.abs(samples - theta0)
    mse = np.mean(err**2, axis=0)
    return PosteriorSummary(
        mean=samples.mean(axis=0),
        median=np.median(samples, axis=0),
        mae=err.mean(axis=0),
        mse=mse,
        rmse=np.sqrt(mse),
        M=samples.shape[0],
        theta0=theta0,
    )


@dataclass(frozen=True)
class KdeGrid:
    axes: tuple  # one 1-D grid array per coordinate (d <= 2)
    density: np.ndarray  # (len(axes[0]),) or (len(axes[0]), len(axes[1]))
    bandwidths: np.ndarray


def _silverman_bandwidths(samples: np.ndarray) -> np.ndarray:
    m, d = samples.shape
    sd = samples.std(axis=0, ddof=1)
    if np.any(sd <= 0):
        raise DegenerateBandwidthError(
            "a sample coordinate has zero variance; no bandwidth exists"
        )
    return sd * (4.0 / ((d + 2) * m)) ** (1.0 / (d + 4))


def default_grid_axes(samples, num: int = 256, pad_bandwidths: float = 4.0):
    """Per-coordinate grids spanning the sample range plus a bandwidth pad."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    h = _silverman_bandwidths(samples)
    axes = []
    for j in range(samples.shape[1]):
        lo = samples[:, j].min() - pad_bandwidths * h[j]
        hi = samples[:, j].max() + pad_bandwidths * h[j]
        axes.append(np.linspace(lo, hi, num))
    return tuple(axes)


def kde(samples, axes=None) -> KdeGrid:
    """Gaussian product-kernel density on a grid, Silverman bandwidths.

    ``axes`` is one grid vector per coordinate; defaults to
    :func:`default_grid_axes`.  Supports d in {1, 2}.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    m, d = samples.shape
    if m < 2:
        raise DomainError("KDE needs at least 2 samples")
    if d > 2:
        raise ShapeError(f"KDE supports at most 2 coordinates, got {d}")
    if axes is None:
        axes = default_grid_axes(samples)
    axes = tuple(np.asarray(ax, dtype=float) for ax in axes)
    if len(axes) != d:
        raise ShapeError(f"expected {d} grid axes, got {len(axes)}")
    h = _silverman_bandwidths(samples)
    # per-coordinate kernel matrices, combined by product across coordinates
    kmats = [
        norm.pdf((ax[:, None] - samples[None, :, j]) / h[j]) / h[j]
        for j, ax in enumerate(axes)
    ]
    if d == 1:
        density = kmats[0].mean(axis=1)
    else:
        density = np.einsum("ik,jk->ij", kmats[0], kmats[1]) / m
    return KdeGrid(axes=axes, density=density, bandwidths=h)


@dataclass(frozen=True)
class GaussLocationOracle:
    theta0: float
    sigma2: float
    tau2: float
    eps: float

    def __post_init__(self):
        if not (self.sigma2 > 0 and self.tau2 > 0 and self.eps > 0):
            raise DomainError("sigma2, tau2, and eps must all be positive")


def gauss_location_posterior(xbar: float, n: int, sigma2: float, tau2: float):
    """Conjugate-normal posterior (mean, variance) for the location model."""
    if n < 1 or sigma2 <= 0 or tau2 <= 0:
        raise DomainError("need n >= 1 and positive variances")
    mean = n * xbar / (n + sigma2 / tau2)
    var = 1.0 / (1.0 / tau2 + n / sigma2)
    return mean, var


def limiting_pseudo_posterior_rejection(oracle: GaussLocationOracle, grid) -> np.ndarray:
    """Large-sample rejection pseudo-posterior density on ``grid``.

    The zero-mean prior truncated to [theta0 - eps, theta0 + eps],
    normalized on the truncation interval.
    """
    grid = np.asarray(grid, dtype=float)
    tau = math.sqrt(oracle.tau2)
    lo, hi = oracle.theta0 - oracle.eps, oracle.theta0 + oracle.eps
    mass = norm.cdf(hi / tau) - norm.cdf(lo / tau)
    if mass <= 0:
        raise DomainError("truncation interval carries no prior mass")
    density = norm.pdf(grid / tau) / tau / mass
    density[(grid < lo) | (grid > hi)] = 0.0
    return density


def limiting_pseudo_posterior_is(oracle: GaussLocationOracle):
    """Large-sample Gaussian pseudo-posterior (mean, variance) for the
    Gaussian-parameterized kernel weight."""
    mean = oracle.theta0 / (1.0 + oracle.eps**2 / oracle.tau2)
    var = 1.0 / (1.0 / oracle.tau2 + 1.0 / oracle.eps**2)
    return mean, var


def limiting_discrepancy(kind: DiscrepancyKind, theta0: float, theta: float) -> float:
    """Large-sample discrepancy between location models at theta0 and theta
    (up to a proportionality constant): quadratic for the energy and KL
    estimators, absolute for the MMD and second-order Wasserstein."""
    gap = theta0 - theta
    if isinstance(kind, (EnergyV, KlNn)):
        return gap * gap
    if isinstance(kind, (MmdU, MmdV, Wasserstein)):
        return abs(gap)
    raise TypeError(f"unknown discrepancy kind {kind!r}")
