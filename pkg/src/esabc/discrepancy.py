"""Two-sample discrepancies between data sets viewed as empirical measures.

Implemented estimators:

* energy V-statistic with a Euclidean-power metric (plus an exact
  sort/prefix-sum fast path for univariate data),
* Gaussian-kernel maximum mean discrepancy, both the unbiased U-statistic
  and the non-negative V-statistic,
* a 1-nearest-neighbour Kullback--Leibler estimator,
* an assignment-based Wasserstein distance (exact sorted matching in one
  dimension, pairwise-swap local search otherwise).

Every estimator also exposes a "prepared" form that caches the
observed-sample side, so a fixed reference sample can be compared against
many simulated sets cheaply.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import DomainError, InsufficientSampleError, ShapeError, SizeError

__all__ = [
    "EnergyV",
    "MmdU",
    "MmdV",
    "KlNn",
    "Wasserstein",
    "DiscrepancyKind",
    "DiscrepancyValue",
    "energy_vstat",
    "energy_vstat_1d_fast",
    "mmd_ustat",
    "mmd_vstat",
    "kl_knn",
    "wasserstein",
    "compute",
    "prepare",
    "kind_from_name",
]

log = logging.getLogger(__name__)

KL_TIE_FLOOR_FACTOR = 1e-12  # relative to the largest absolute coordinate


@dataclass(frozen=True)
class EnergyV:
    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.beta <= 2.0:
            raise DomainError(f"energy exponent must lie in (0, 2], got {self.beta}")
        if self.beta == 2.0:
            log.warning(
                "energy exponent 2 is degenerate: the statistic vanishes "
                "whenever the two sample means agree"
            )


@dataclass(frozen=True)
class MmdU:
    bandwidth_scale: float = 1.0

    def __post_init__(self):
        if not self.bandwidth_scale > 0:
            raise DomainError("bandwidth_scale must be positive")


@dataclass(frozen=True)
class MmdV:
    bandwidth_scale: float = 1.0

    def __post_init__(self):
        if not self.bandwidth_scale > 0:
            raise DomainError("bandwidth_scale must be positive")


@dataclass(frozen=True)
class KlNn:
    pass


@dataclass(frozen=True)
class Wasserstein:
    p: float = 2.0
    max_sweeps: int = 200

    def __post_init__(self):
        if not self.p >= 1.0:
            raise DomainError(f"Wasserstein order must be >= 1, got {self.p}")
        if self.max_sweeps < 1:
            raise DomainError("max_sweeps must be >= 1")


DiscrepancyKind = EnergyV | MmdU | MmdV | KlNn | Wasserstein


@dataclass(frozen=True)
class DiscrepancyValue:
    value: float
    estimator_kind: DiscrepancyKind


_KIND_NAMES = {
    "energy": EnergyV,
    "mmd_u": MmdU,
    "mmd_v": MmdV,
    "kl": KlNn,
    "wasserstein": Wasserstein,
}


def kind_from_name(name: str, **params) -> DiscrepancyKind:
    """Build a discrepancy kind from its config-file name."""
    try:
        cls = _KIND_NAMES[name]
    except KeyError:
        raise DomainError(
            f"unknown discrepancy {name!r}; expected one of {sorted(_KIND_NAMES)}"
        ) from None
    return cls(**params)


def kind_name(kind: DiscrepancyKind) -> str:
    for name, cls in _KIND_NAMES.items():
        if isinstance(kind, cls):
            return name
    raise TypeError(f"unknown discrepancy kind {kind!r}")


def _as_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"data must be an (n, d) matrix, got shape {arr.shape}")
    return arr


def _check_pair(x: np.ndarray, y: np.ndarray):
    if x.shape[1] != y.shape[1]:
        raise ShapeError(
            f"dimension mismatch: {x.shape[1]} vs {y.shape[1]} columns"
        )


# ---------------------------------------------------------------------------
# energy statistic


def _pairwise_power(x, y, beta):
    d = cdist(x, y)
    return d if beta == 1.0 else d**beta


def energy_vstat(x, y, beta: float = 1.0) -> float:
    """Energy V-statistic with the Euclidean-power metric ||.||^beta."""
    kind = EnergyV(beta)  # validates the exponent
    x, y = _as_matrix(x), _as_matrix(y)
    _check_pair(x, y)
    cross = _pairwise_power(x, y, kind.beta).mean()
    xx = _pairwise_power(x, x, kind.beta).mean()
    yy = _pairwise_power(y, y, kind.beta).mean()
    return 2.0 * cross - xx - yy


def _sorted_self_distance_mean(xs: np.ndarray) -> float:
    # ordered-pair sum of |x_i - x_j| over a sorted vector, divided by n^2
    n = xs.size
    prefix = np.concatenate(([0.0], np.cumsum(xs)))
    idx = np.arange(n)
    total = 2.0 * np.sum(idx * xs - prefix[:-1])
    return total / (n * n)


def _cross_distance_mean(xs: np.ndarray, ys: np.ndarray, ys_prefix: np.ndarray) -> float:
    # mean of |x_i - y_j| for sorted ys with prefix sums
    m = ys.size
    pos = np.searchsorted(ys, xs)
    below = xs * pos - ys_prefix[pos]
    above = (ys_prefix[m] - ys_prefix[pos]) - xs * (m - pos)
    return float(np.sum(below + above)) / (xs.size * m)


def energy_vstat_1d_fast(x, y) -> float:
    """Sort/prefix-sum evaluation of the univariate energy V-statistic."""
    x, y = _as_matrix(x), _as_matrix(y)
    if x.shape[1] != 1 or y.shape[1] != 1:
        raise ShapeError("fast path requires univariate data")
    xs = np.sort(x.ravel())
    ys = np.sort(y.ravel())
    ys_prefix = np.concatenate(([0.0], np.cumsum(ys)))
    cross = _cross_distance_mean(xs, ys, ys_prefix)
    return 2.0 * cross - _sorted_self_distance_mean(xs) - _sorted_self_distance_mean(ys)


# ---------------------------------------------------------------------------
# maximum mean discrepancy


def _kernel_sum(x, y, scale):
    return float(np.exp(-cdist(x, y, "sqeuclidean") / scale).sum())


def mmd_ustat(x, y, bandwidth_scale: float = 1.0) -> float:
    """Unbiased MMD^2 estimate with the Gaussian kernel; may be negative."""
    kind = MmdU(bandwidth_scale)
    x, y = _as_matrix(x), _as_matrix(y)
    _check_pair(x, y)
    n, m = x.shape[0], y.shape[0]
    if n < 2 or m < 2:
        raise InsufficientSampleError("U-statistic needs at least 2 points per sample")
    s = kind.bandwidth_scale
    xx = (_kernel_sum(x, x, s) - n) / (n * (n - 1))
    yy = (_kernel_sum(y, y, s) - m) / (m * (m - 1))
    cross = _kernel_sum(x, y, s) / (n * m)
    return xx + yy - 2.0 * cross


def mmd_vstat(x, y, bandwidth_scale: float = 1.0) -> float:
    """Biased (non-negative) MMD^2 estimate with the Gaussian kernel."""
    kind = MmdV(bandwidth_scale)
    x, y = _as_matrix(x), _as_matrix(y)
    _check_pair(x, y)
    n, m = x.shape[0], y.shape[0]
    s = kind.bandwidth_scale
    return (
        _kernel_sum(x, x, s) / (n * n)
        + _kernel_sum(y, y, s) / (m * m)
        - 2.0 * _kernel_sum(x, y, s) / (n * m)
    )


# ---------------------------------------------------------------------------
# nearest-neighbour Kullback--Leibler


def _floor_distances(dist: np.ndarray, scale: float) -> np.ndarray:
    floor = KL_TIE_FLOOR_FACTOR * scale if scale > 0 else KL_TIE_FLOOR_FACTOR
    return np.maximum(dist, floor)


def kl_knn(x, y) -> float:
    """1-nearest-neighbour Kullback--Leibler estimate of KL(X || Y).

    Not symmetric.  Exact coincidences are floored at a tiny multiple of
    the data scale before taking logs, so degenerate simulations stay
    finite.
    """
    x, y = _as_matrix(x), _as_matrix(y)
    _check_pair(x, y)
    n, m = x.shape[0], y.shape[0]
    if n < 2:
        raise InsufficientSampleError("KL estimator needs at least 2 reference points")
    d = x.shape[1]
    rho = cKDTree(x).query(x, k=2)[0][:, 1]
    nu = cKDTree(y).query(x, k=1)[0]
    scale = max(np.abs(x).max(), np.abs(y).max())
    rho = _floor_distances(rho, scale)
    nu = _floor_distances(nu, scale)
    return (d / n) * float(np.sum(np.log(nu / rho))) + math.log(m / (n - 1))


# ---------------------------------------------------------------------------
# Wasserstein distance


@numba.njit(cache=True)
def _swap_pass(cost, assign):  # pragma: no cover - jitted
    n = cost.shape[0]
    changed = False
    for i in range(n - 1):
        ai = assign[i]
        ci = cost[i, ai]
        for j in range(i + 1, n):
            aj = assign[j]
            if cost[i, aj] + cost[j, ai] < ci + cost[j, aj]:
                assign[i] = aj
                assign[j] = ai
                ai = aj
                ci = cost[i, ai]
                changed = True
    return changed


MAX_COORDINATE_STARTS = 3


def _swap_starts(x: np.ndarray, y: np.ndarray):
    """Deterministic initial assignments: identity plus rank matchings.

    Rank-matching on single coordinates and on the coordinate sum gives
    the local search several basins to descend from, which keeps it
    reliably close to the optimal assignment.
    """
    n, d = x.shape
    starts = [np.arange(n, dtype=np.int64)]
    keys = [(x[:, j], y[:, j]) for j in range(min(d, MAX_COORDINATE_STARTS))]
    keys.append((x.sum(axis=1), y.sum(axis=1)))
    for kx, ky in keys:
        init = np.empty(n, dtype=np.int64)
        init[np.argsort(kx, kind="stable")] = np.argsort(ky, kind="stable")
        starts.append(init)
    return starts


def _swap_descend(cost: np.ndarray, assign: np.ndarray, max_sweeps: int):
    # each accepted swap strictly lowers the cost, so this terminates
    n = cost.shape[0]
    sweep_costs = []
    for _ in range(max_sweeps):
        changed = _swap_pass(cost, assign)
        sweep_costs.append(float(cost[np.arange(n), assign].sum()))
        if not changed:
            break
    return sweep_costs


def _swap_assignment(cost: np.ndarray, max_sweeps: int, x=None, y=None):
    """Pairwise-swap local search; best of several deterministic starts.

    Returns the winning assignment and its sweep-end costs (the latter
    are non-increasing by construction).
    """
    n = cost.shape[0]
    if x is None:
        starts = [np.arange(n, dtype=np.int64)]
    else:
        starts = _swap_starts(x, y)
    best_assign, best_costs = None, None
    for assign in starts:
        sweep_costs = _swap_descend(cost, assign, max_sweeps)
        if best_costs is None or sweep_costs[-1] < best_costs[-1]:
            best_assign, best_costs = assign, sweep_costs
    return best_assign, best_costs


def _swap_distance(x, y, p, max_sweeps) -> float:
    """Swap-heuristic assignment distance for multivariate pairs.

    The two samples are put in a canonical order first, so the local
    search explores the same cost matrix whichever way the caller passes
    them; the distance is symmetric by construction.
    """
    diff = np.flatnonzero(x.ravel() != y.ravel())
    if diff.size and x.ravel()[diff[0]] > y.ravel()[diff[0]]:
        x, y = y, x
    cost = cdist(x, y) ** p
    _, sweep_costs = _swap_assignment(cost, max_sweeps, x, y)
    return float((sweep_costs[-1] / x.shape[0]) ** (1.0 / p))


def wasserstein(x, y, p: float = 2.0, max_sweeps: int = 200) -> float:
    """Assignment Wasserstein distance between equal-size samples.

    Univariate pairs are matched exactly by sorting; multivariate pairs
    use the pairwise-swap heuristic, an upper bound on the optimal
    assignment cost.
    """
    kind = Wasserstein(p, max_sweeps)
    x, y = _as_matrix(x), _as_matrix(y)
    _check_pair(x, y)
    n = x.shape[0]
    if n != y.shape[0]:
        raise SizeError(f"equal sample sizes required, got {n} and {y.shape[0]}")
    if x.shape[1] == 1:
        diff = np.abs(np.sort(x.ravel()) - np.sort(y.ravel()))
        return float(np.mean(diff**kind.p) ** (1.0 / kind.p))
    return _swap_distance(x, y, kind.p, kind.max_sweeps)


# ---------------------------------------------------------------------------
# dispatch and prepared evaluation
#
# A prepared discrepancy caches everything that depends only on the fixed
# reference sample, so one observed data set can be scored against many
# simulated sets without redundant work.


class _PreparedEnergyFast:
    def __init__(self, kind, x):
        self.kind = kind
        self._xs = np.sort(x.ravel())
        self._xs_prefix = np.concatenate(([0.0], np.cumsum(self._xs)))
        self._x_self = _sorted_self_distance_mean(self._xs)

    def evaluate(self, y):
        y = _as_matrix(y)
        if y.shape[1] != 1:
            raise ShapeError("dimension mismatch: expected univariate data")
        ys = np.sort(y.ravel())
        cross = _cross_distance_mean(ys, self._xs, self._xs_prefix)
        return 2.0 * cross - self._x_self - _sorted_self_distance_mean(ys)


class _PreparedEnergy:
    def __init__(self, kind, x):
        self.kind = kind
        self._x = x
        self._x_self = _pairwise_power(x, x, kind.beta).mean()

    def evaluate(self, y):
        y = _as_matrix(y)
        _check_pair(self._x, y)
        cross = _pairwise_power(self._x, y, self.kind.beta).mean()
        yy = _pairwise_power(y, y, self.kind.beta).mean()
        return 2.0 * cross - self._x_self - yy


class _PreparedMmd:
    def __init__(self, kind, x):
        self.kind = kind
        self.unbiased = isinstance(kind, MmdU)
        n = x.shape[0]
        if self.unbiased and n < 2:
            raise InsufficientSampleError(
                "U-statistic needs at least 2 points per sample"
            )
        self._x = x
        s = kind.bandwidth_scale
        if self.unbiased:
            self._x_self = (_kernel_sum(x, x, s) - n) / (n * (n - 1))
        else:
            self._x_self = _kernel_sum(x, x, s) / (n * n)

    def evaluate(self, y):
        y = _as_matrix(y)
        _check_pair(self._x, y)
        n, m = self._x.shape[0], y.shape[0]
        s = self.kind.bandwidth_scale
        cross = _kernel_sum(self._x, y, s) / (n * m)
        if self.unbiased:
            if m < 2:
                raise InsufficientSampleError(
                    "U-statistic needs at least 2 points per sample"
                )
            yy = (_kernel_sum(y, y, s) - m) / (m * (m - 1))
        else:
            yy = _kernel_sum(y, y, s) / (m * m)
        return self._x_self + yy - 2.0 * cross


class _PreparedKl:
    def __init__(self, kind, x):
        self.kind = kind
        if x.shape[0] < 2:
            raise InsufficientSampleError(
                "KL estimator needs at least 2 reference points"
            )
        self._x = x
        self._rho_raw = cKDTree(x).query(x, k=2)[0][:, 1]
        self._x_scale = float(np.abs(x).max())

    def evaluate(self, y):
        y = _as_matrix(y)
        _check_pair(self._x, y)
        n, d = self._x.shape
        m = y.shape[0]
        nu = cKDTree(y).query(self._x, k=1)[0]
        scale = max(self._x_scale, float(np.abs(y).max()))
        rho = _floor_distances(self._rho_raw, scale)
        nu = _floor_distances(nu, scale)
        return (d / n) * float(np.sum(np.log(nu / rho))) + math.log(m / (n - 1))


class _PreparedWasserstein:
    def __init__(self, kind, x):
        self.kind = kind
        self._x = x
        if x.shape[1] == 1:
            self._xs = np.sort(x.ravel())

    def evaluate(self, y):
        y = _as_matrix(y)
        _check_pair(self._x, y)
        n = self._x.shape[0]
        if y.shape[0] != n:
            raise SizeError(
                f"equal sample sizes required, got {n} and {y.shape[0]}"
            )
        p = self.kind.p
        if self._x.shape[1] == 1:
            diff = np.abs(self._xs - np.sort(y.ravel()))
            return float(np.mean(diff**p) ** (1.0 / p))
        return _swap_distance(self._x, y, p, self.kind.max_sweeps)


def prepare(kind: DiscrepancyKind, x):
    """Bind a reference sample to ``kind`` for repeated evaluation."""
    x = _as_matrix(x)
    if isinstance(kind, EnergyV):
        if kind.beta == 1.0 and x.shape[1] == 1:
            return _PreparedEnergyFast(kind, x)
        return _PreparedEnergy(kind, x)
    if isinstance(kind, (MmdU, MmdV)):
        return _PreparedMmd(kind, x)
    if isinstance(kind, KlNn):
        return _PreparedKl(kind, x)
    if isinstance(kind, Wasserstein):
        return _PreparedWasserstein(kind, x)
    raise TypeError(f"unknown discrepancy kind {kind!r}")


def compute(kind: DiscrepancyKind, x, y) -> DiscrepancyValue:
    """Evaluate ``kind`` between two data sets."""
    return DiscrepancyValue(float(prepare(kind, x).evaluate(y)), kind)
