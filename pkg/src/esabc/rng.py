"""Deterministic, splittable random-number streams and sampling primitives.

Every simulator in the package draws from an :class:`RngState`, a thin
wrapper over a counter-based Philox generator keyed by
``(master_seed, stream_id)``.  Identical keys reproduce the identical draw
sequence on every platform; distinct stream ids give statistically
independent streams, which is what makes replicate-parallel runs
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CovarianceError, DomainError

__all__ = [
    "RngState",
    "StdNormal",
    "Uniform",
    "Gamma",
    "StudentT",
    "MultiNormal",
    "DistSpec",
    "rng_create",
    "sample",
]


class RngState:
    """A single independent random stream.

    Single-owner: never share an instance across threads.  Parallel work
    should create sibling streams via distinct ``stream_id`` values.
    """

    __slots__ = ("master_seed", "stream_id", "generator")

    def __init__(self, master_seed: int, stream_id: int):
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        key = np.array(
            [self.master_seed % (1 << 64), self.stream_id % (1 << 64)],
            dtype=np.uint64,
        )
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self):
        return f"RngState(master_seed={self.master_seed}, stream_id={self.stream_id})"


def rng_create(master_seed: int, stream_id: int) -> RngState:
    """Open the stream identified by ``(master_seed, stream_id)``."""
    return RngState(master_seed, stream_id)


@dataclass(frozen=True)
class StdNormal:
    """Standard normal scalars."""

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"Uniform requires a < b, got ({self.a}, {self.b})")

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Gamma:
    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.shape > 0:
            raise DomainError(f"Gamma requires shape > 0, got {self.shape}")
        if not self.scale > 0:
            raise DomainError(f"Gamma requires scale > 0, got {self.scale}")

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class StudentT:
    dof: float

    def __post_init__(self):
        if not self.dof > 0:
            raise DomainError(f"StudentT requires dof > 0, got {self.dof}")

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class MultiNormal:
    mean: tuple
    cov: tuple  # row tuples; kept hashable so specs stay frozen

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DomainError("MultiNormal mean/cov shapes are inconsistent")
        if not np.allclose(cov, cov.T):
            raise DomainError("MultiNormal covariance must be symmetric")
        object.__setattr__(self, "mean", tuple(float(v) for v in mean))
        object.__setattr__(self, "cov", tuple(tuple(float(v) for v in row) for row in cov))

    @property
    def dim(self) -> int:
        return len(self.mean)


DistSpec = StdNormal | Uniform | Gamma | StudentT | MultiNormal


def cholesky_factor(cov: np.ndarray) -> np.ndarray:
    """Lower-triangular factor of ``cov``; CovarianceError if none exists."""
    try:
        return np.linalg.cholesky(np.asarray(cov, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise CovarianceError(f"covariance admits no factorization: {exc}") from exc


def sample(rng: RngState, spec: DistSpec, count: int) -> np.ndarray:
    """Draw ``count`` independent variates; returns a (count, dim) matrix."""
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    gen = rng.generator
    if isinstance(spec, StdNormal):
        return gen.standard_normal((count, 1))
    if isinstance(spec, Uniform):
        return spec.a + (spec.b - spec.a) * gen.random((count, 1))
    if isinstance(spec, Gamma):
        return gen.gamma(spec.shape, spec.scale, size=(count, 1))
    if isinstance(spec, StudentT):
        # normal / sqrt(chi-square / dof), an exact construction
        z = gen.standard_normal(count)
        c = gen.chisquare(spec.dof, size=count)
        return (z / np.sqrt(c / spec.dof)).reshape(count, 1)
    if isinstance(spec, MultiNormal):
        mean = np.asarray(spec.mean)
        lower = cholesky_factor(np.asarray(spec.cov))
        z = gen.standard_normal((count, mean.size))
        return mean + z @ lower.T
    raise TypeError(f"unknown distribution spec: {spec!r}")
