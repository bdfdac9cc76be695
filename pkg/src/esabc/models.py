"""Benchmark generative models: prior samplers and forward simulators.

Each model couples independent coordinate-wise priors with a simulator
that maps a parameter vector to an (m, d) matrix of observations.
Parameter layouts:

* ``gauss_mix``      -- (p, mu0_x, mu0_y, mu1_x, mu1_y), 2-D mixture draws
* ``ma2``            -- (theta1, theta2), rows are length-10 series
* ``bivariate_beta`` -- (theta1..theta5), 2-D draws on (0, 1)^2
* ``gandk``          -- (A, B, g, k, rho), 5-D quantile-transformed normals
* ``gauss_location`` -- (theta,), scalar normals with known variance
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType

import numpy as np

from .errors import DomainError, ShapeError
from .rng import (
    MultiNormal,
    RngState,
    Uniform,
    cholesky_factor,
    sample,
)

__all__ = [
    "ModelSpec",
    "MODEL_IDS",
    "make_model",
    "prior_sample",
    "simulate",
    "gk_quantile",
]

MODEL_IDS = ("gauss_mix", "ma2", "bivariate_beta", "gandk", "gauss_location")

MA2_SERIES_LENGTH = 10
MA2_INNOVATION_DOF = 5.0
GK_SKEW_SCALE = 0.8  # conventional c constant in the quantile transform

GAUSS_MIX_COV0 = ((0.5, -0.3), (-0.3, 0.5))
GAUSS_MIX_COV1 = ((0.25, 0.0), (0.0, 0.25))


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    true_theta: tuple
    prior: tuple  # one DistSpec per parameter coordinate
    obs_dim: int
    fixed: MappingProxyType

    def __post_init__(self):
        if self.model_id not in MODEL_IDS:
            raise DomainError(f"unknown model id {self.model_id!r}")
        if len(self.true_theta) != theta_dim(self):
            raise DomainError(
                f"{self.model_id}: true_theta has {len(self.true_theta)} "
                f"coordinates, expected {theta_dim(self)}"
            )


def theta_dim(model: ModelSpec) -> int:
    return sum(spec.dim for spec in model.prior)


def _fixed(**kwargs) -> MappingProxyType:
    return MappingProxyType(dict(kwargs))


def gandk_covariance(rho: float, d: int = 5) -> np.ndarray:
    cov = np.eye(d)
    idx = np.arange(d - 1)
    cov[idx, idx + 1] = rho
    cov[idx + 1, idx] = rho
    return cov


def make_model(model_id: str, true_theta=None, **fixed_overrides) -> ModelSpec:
    """Build a model spec with its benchmark defaults.

    ``fixed_overrides`` tweaks model constants (``sigma2``/``tau2`` for the
    Gaussian location model, covariances for the mixture).
    """
    if model_id == "gauss_mix":
        fixed = {
            "cov0": fixed_overrides.pop("cov0", GAUSS_MIX_COV0),
            "cov1": fixed_overrides.pop("cov1", GAUSS_MIX_COV1),
        }
        prior = (
            Uniform(0.0, 1.0),  # mixing weight
            Uniform(-1.0, 1.0),
            Uniform(-1.0, 1.0),
            Uniform(-1.0, 1.0),
            Uniform(-1.0, 1.0),
        )
        default_theta = (0.3, 0.7, 0.7, -0.7, -0.7)
        obs_dim = 2
    elif model_id == "ma2":
        fixed = {"series_length": MA2_SERIES_LENGTH, "dof": MA2_INNOVATION_DOF}
        prior = (Uniform(-2.0, 2.0), Uniform(-1.0, 1.0))
        default_theta = (0.6, 0.2)
        obs_dim = MA2_SERIES_LENGTH
    elif model_id == "bivariate_beta":
        fixed = {}
        prior = tuple(Uniform(0.0, 5.0) for _ in range(5))
        default_theta = (1.0, 1.0, 1.0, 1.0, 1.0)
        obs_dim = 2
    elif model_id == "gandk":
        fixed = {"obs_dim": 5}
        prior = (
            Uniform(0.0, 4.0),  # A
            Uniform(0.0, 4.0),  # B
            Uniform(0.0, 4.0),  # g
            Uniform(0.0, 4.0),  # k
            Uniform(-0.5, 0.5),  # rho
        )
        default_theta = (3.0, 1.0, 2.0, 0.5, -0.3)
        obs_dim = 5
    elif model_id == "gauss_location":
        sigma2 = float(fixed_overrides.pop("sigma2", 1.0))
        tau2 = float(fixed_overrides.pop("tau2", 1.0))
        fixed = {"sigma2": sigma2, "tau2": tau2}
        prior = (MultiNormal((0.0,), ((tau2,),)),)
        default_theta = (2.0,)
        obs_dim = 1
    else:
        raise DomainError(f"unknown model id {model_id!r}")
    if fixed_overrides:
        raise DomainError(
            f"{model_id}: unknown fixed constants {sorted(fixed_overrides)}"
        )
    theta = tuple(float(v) for v in (default_theta if true_theta is None else true_theta))
    return ModelSpec(model_id, theta, prior, obs_dim, _fixed(**fixed))


@lru_cache(maxsize=None)
def _uniform_prior_bounds(prior):
    if all(isinstance(spec, Uniform) for spec in prior):
        lo = np.array([spec.a for spec in prior])
        span = np.array([spec.b - spec.a for spec in prior])
        return lo, span
    return None


def prior_sample(model: ModelSpec, rng: RngState) -> np.ndarray:
    """One parameter vector drawn coordinate-wise from the independent priors."""
    bounds = _uniform_prior_bounds(model.prior)
    if bounds is not None:
        lo, span = bounds
        return lo + span * rng.generator.random(len(lo))
    parts = [sample(rng, spec, 1).ravel() for spec in model.prior]
    return np.concatenate(parts)


def check_support(model: ModelSpec, theta: np.ndarray) -> None:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (theta_dim(model),):
        raise DomainError(
            f"{model.model_id}: theta has shape {theta.shape}, "
            f"expected ({theta_dim(model)},)"
        )
    if not np.all(np.isfinite(theta)):
        raise DomainError(f"{model.model_id}: theta has non-finite coordinates")
    if model.model_id == "gauss_mix":
        p = theta[0]
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"gauss_mix: mixing weight {p} outside [0, 1]")
    elif model.model_id == "ma2":
        if not (-2.0 <= theta[0] <= 2.0 and -1.0 <= theta[1] <= 1.0):
            raise DomainError(f"ma2: theta {theta} outside prior support")
    elif model.model_id == "bivariate_beta":
        if not np.all((theta > 0.0) & (theta <= 5.0)):
            raise DomainError(f"bivariate_beta: theta {theta} outside (0, 5]")
    elif model.model_id == "gandk":
        a, b, g, k, rho = theta
        if not (b > 0.0 and k > -0.5):
            raise DomainError(f"gandk: requires B > 0 and k > -0.5, got B={b}, k={k}")
        if not (-0.5 <= rho <= 0.5):
            raise DomainError(f"gandk: rho {rho} outside [-0.5, 0.5]")


def gk_quantile(z, a: float, b: float, g: float, k: float):
    """Quantile transform of a standard-normal score for the g-and-k law.

    ``a`` locates, ``b`` scales, ``g`` skews, and ``k`` fattens the tails;
    finite for every finite ``z``.
    """
    z = np.asarray(z, dtype=float)
    skew = 1.0 + GK_SKEW_SCALE * (1.0 - np.exp(-g * z)) / (1.0 + np.exp(-g * z))
    out = a + b * skew * (1.0 + z * z) ** k * z
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def _cholesky_cached(cov_rows):
    return cholesky_factor(np.asarray(cov_rows, dtype=float))


def _gauss_mix_draw(model, theta, m, gen):
    p, mu0x, mu0y, mu1x, mu1y = theta
    labels = gen.random(m) >= p  # False -> component 0
    z = gen.standard_normal((m, 2))
    l0 = _cholesky_cached(model.fixed["cov0"])
    l1 = _cholesky_cached(model.fixed["cov1"])
    x0 = z @ l0.T + (mu0x, mu0y)
    x1 = z @ l1.T + (mu1x, mu1y)
    return np.where(labels[:, None], x1, x0), labels


def simulate_gauss_mix_with_labels(model, theta, m, rng):
    """Mixture draws plus their component labels (verification hook)."""
    theta = np.asarray(theta, dtype=float)
    check_support(model, theta)
    draws, labels = _gauss_mix_draw(model, theta, int(m), rng.generator)
    return draws, labels.astype(int)


def _simulate_gauss_mix_spec(model, theta, m, gen):
    return _gauss_mix_draw(model, theta, m, gen)[0]


def _simulate_ma2(model, theta, m, gen):
    t1, t2 = theta
    dof = model.fixed["dof"]
    length = model.fixed["series_length"]
    # two pre-samples so the first series entry has fully defined lags
    z = gen.standard_normal((m, length + 2))
    c = gen.chisquare(dof, size=(m, length + 2))
    z = z / np.sqrt(c / dof)
    return z[:, 2:] + t1 * z[:, 1:-1] + t2 * z[:, :-2]


def _simulate_bivariate_beta(model, theta, m, gen):
    u = gen.gamma(np.asarray(theta), 1.0, size=(m, 5))
    v1 = (u[:, 0] + u[:, 2]) / (u[:, 4] + u[:, 3])
    v2 = (u[:, 1] + u[:, 3]) / (u[:, 4] + u[:, 2])
    return np.column_stack((v1 / (1.0 + v1), v2 / (1.0 + v2)))


def _simulate_gandk(model, theta, m, gen):
    a, b, g, k, rho = theta
    d = model.fixed["obs_dim"]
    lower = cholesky_factor(gandk_covariance(rho, d))
    z = gen.standard_normal((m, d)) @ lower.T
    return gk_quantile(z, a, b, g, k)


def _simulate_gauss_location(model, theta, m, gen):
    sd = np.sqrt(model.fixed["sigma2"])
    return (theta[0] + sd * gen.standard_normal(m)).reshape(m, 1)


_SIMULATORS = {
    "gauss_mix": _simulate_gauss_mix_spec,
    "ma2": _simulate_ma2,
    "bivariate_beta": _simulate_bivariate_beta,
    "gandk": _simulate_gandk,
    "gauss_location": _simulate_gauss_location,
}


def simulate(model: ModelSpec, theta, m: int, rng: RngState) -> np.ndarray:
    """Forward-simulate m observations at ``theta``; returns an (m, d) matrix."""
    if m < 1:
        raise ShapeError(f"m must be positive, got {m}")
    theta = np.asarray(theta, dtype=float)
    check_support(model, theta)
    values = _SIMULATORS[model.model_id](model, theta, int(m), rng.generator)
    return values
