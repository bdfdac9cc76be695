"""Importance-sampling ABC core: the simulate-measure loop, weight
functions, threshold selection, and weighted posterior estimation.

A run draws N parameter vectors from the prior, forward-simulates a data
set for each, and records the discrepancy against the fixed observed
sample.  Record k consumes its own random stream, so results are
independent of execution order and worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discrepancy import DiscrepancyKind, kind_from_name, kind_name, prepare
from .errors import DomainError, EmptyAcceptanceError, ShapeError
from .models import ModelSpec, make_model, prior_sample, simulate, theta_dim
from .rng import rng_create

__all__ = [
    "Rejection",
    "Kernel",
    "WeightFn",
    "Epsilon",
    "AbcRun",
    "weight",
    "run_isabc",
    "select_epsilon",
    "posterior_estimate",
    "accepted_sample",
]


@dataclass(frozen=True)
class Rejection:
    """Hard accept/reject: weight 1 when d < eps, else 0."""


@dataclass(frozen=True)
class Kernel:
    """Smooth weights exp(-d^q / eps), or exp(-d^2 / (2 eps^2)) in the
    Gaussian parameterization."""

    q: float = 2.0
    parameterization: str = "plain"  # "plain" or "gauss"

    def __post_init__(self):
        if not self.q > 0:
            raise DomainError(f"kernel exponent q must be positive, got {self.q}")
        if self.parameterization not in ("plain", "gauss"):
            raise DomainError(
                f"unknown kernel parameterization {self.parameterization!r}"
            )


WeightFn = Rejection | Kernel


def weight(fn: WeightFn, d, eps: float):
    """Importance weight of discrepancy ``d`` at threshold ``eps``.

    Accepts scalars or arrays.  Negative discrepancies (possible for the
    MMD U-statistic) pass through unchanged under rejection and are
    clamped at zero under kernel weights, which keeps the weight
    monotone decreasing and well-defined for fractional exponents.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    d = np.asarray(d, dtype=float)
    if isinstance(fn, Rejection):
        out = (d < eps).astype(float)
    elif isinstance(fn, Kernel):
        dd = np.maximum(d, 0.0)
        if fn.parameterization == "gauss":
            out = np.exp(-(dd * dd) / (2.0 * eps * eps))
        else:
            out = np.exp(-(dd**fn.q) / eps)
    else:
        raise TypeError(f"unknown weight function {fn!r}")
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Epsilon:
    value: float
    keep_fraction: float


@dataclass(frozen=True)
class AbcRun:
    thetas: np.ndarray  # (N, p)
    discrepancies: np.ndarray  # (N,)
    model: ModelSpec
    observed_hash: str
    master_seed: int
    m: int
    kind: DiscrepancyKind

    @property
    def n_records(self) -> int:
        return self.thetas.shape[0]


def dataset_digest(data: np.ndarray) -> str:
    data = np.ascontiguousarray(np.asarray(data, dtype=float))
    h = hashlib.sha256()
    h.update(str(data.shape).encode())
    h.update(data.tobytes())
    return h.hexdigest()


def _compute_records(model, prepared, master_seed, m, k_range):
    p = theta_dim(model)
    thetas = np.empty((len(k_range), p))
    disc = np.empty(len(k_range))
    for i, k in enumerate(k_range):
        rng = rng_create(master_seed, k)
        theta = prior_sample(model, rng)
        try:
            y = simulate(model, theta, m, rng)
            d = prepared.evaluate(y)
        except Exception as exc:
            raise RuntimeError(
                f"record k={k} failed (theta={theta.tolist()}): {exc}"
            ) from exc
        if not math.isfinite(d):
            raise RuntimeError(
                f"record k={k} produced non-finite discrepancy (theta={theta.tolist()})"
            )
        thetas[i] = theta
        disc[i] = d
    return thetas, disc


def run_isabc(
    model: ModelSpec,
    observed,
    N: int,
    m: int,
    kind: DiscrepancyKind,
    master_seed: int,
    workers: int = 1,
) -> AbcRun:
    """Run the simulate-measure loop for N prior draws.

    Record k draws its parameter and simulated data from stream k of
    ``master_seed``, so the output is a pure function of the arguments
    and identical for any ``workers`` count.
    """
    observed = np.asarray(observed, dtype=float)
    if observed.ndim == 1:
        observed = observed.reshape(-1, 1)
    if observed.shape[1] != model.obs_dim:
        raise ShapeError(
            f"observed data has {observed.shape[1]} columns, "
            f"model {model.model_id} expects {model.obs_dim}"
        )
    if N < 1 or m < 1:
        raise DomainError("N and m must be positive")
    prepared = prepare(kind, observed)
    if workers <= 1:
        thetas, disc = _compute_records(model, prepared, master_seed, m, range(N))
    else:
        chunks = [range(lo, min(lo + max(1, N // workers + 1), N))
                  for lo in range(0, N, max(1, N // workers + 1))]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda ks: _compute_records(model, prepared, master_seed, m, ks),
                    chunks,
                )
            )
        thetas = np.concatenate([p[0] for p in parts])
        disc = np.concatenate([p[1] for p in parts])
    return AbcRun(
        thetas=thetas,
        discrepancies=disc,
        model=model,
        observed_hash=dataset_digest(observed),
        master_seed=int(master_seed),
        m=int(m),
        kind=kind,
    )


def select_epsilon(run: AbcRun, keep_fraction: float) -> Epsilon:
    """Threshold at the keep_fraction empirical quantile of the run.

    The k-th smallest discrepancy is nudged up by one ulp so that exactly
    ceil(keep_fraction * N) records satisfy d < eps (absent exact ties).
    """
    if not 0.0 < keep_fraction <= 1.0:
        raise DomainError(f"keep_fraction must lie in (0, 1], got {keep_fraction}")
    n = run.n_records
    m_keep = math.ceil(keep_fraction * n)
    kth = np.partition(run.discrepancies, m_keep - 1)[m_keep - 1]
    return Epsilon(value=float(np.nextafter(kth, np.inf)), keep_fraction=keep_fraction)


def accepted_sample(run: AbcRun, eps: Epsilon) -> np.ndarray:
    """All parameter draws with discrepancy below the threshold, in order."""
    return run.thetas[run.discrepancies < eps.value]


def posterior_estimate(run: AbcRun, fn: WeightFn, eps: Epsilon, g=None) -> np.ndarray:
    """Self-normalized weighted estimate of E[g(theta) | observed].

    ``g`` maps a parameter vector to a real vector; the default is the
    identity, giving the pseudo-posterior mean.
    """
    w = weight(fn, run.discrepancies, eps.value)
    total = w.sum()
    if total <= 0.0:
        raise EmptyAcceptanceError(
            "all importance weights are zero; raise the threshold"
        )
    if g is None:
        gvals = run.thetas
    else:
        gvals = np.asarray([np.atleast_1d(g(t)) for t in run.thetas], dtype=float)
    return (w[:, None] * gvals).sum(axis=0) / total


# ---------------------------------------------------------------------------
# serialization: columnar CSV plus a JSON header


def _kind_to_json(kind: DiscrepancyKind) -> dict:
    params = {k: v for k, v in vars(kind).items()}
    return {"name": kind_name(kind), "params": params}


def _kind_from_json(obj: dict) -> DiscrepancyKind:
    return kind_from_name(obj["name"], **obj["params"])


def save_run(run: AbcRun, csv_path, json_path) -> None:
    """Write records as CSV and provenance as JSON.

    Floats are encoded with shortest round-trip decimals, so a load
    reproduces the arrays bit-exactly.
    """
    p = run.thetas.shape[1]
    header = ["k"] + [f"theta_{i}" for i in range(p)] + ["discrepancy"]
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(header) + "\r\n")
        for k in range(run.n_records):
            cells = [str(k)]
            cells += [repr(float(v)) for v in run.thetas[k]]
            cells.append(repr(float(run.discrepancies[k])))
            fh.write(",".join(cells) + "\r\n")
    meta = {
        "model_id": run.model.model_id,
        "true_theta": list(run.model.true_theta),
        "observed_hash": run.observed_hash,
        "master_seed": run.master_seed,
        "N": run.n_records,
        "m": run.m,
        "discrepancy": _kind_to_json(run.kind),
    }
    with open(json_path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def load_run(csv_path, json_path) -> AbcRun:
    with open(json_path) as fh:
        meta = json.load(fh)
    rows = np.genfromtxt(csv_path, delimiter=",", skip_header=1)
    rows = np.atleast_2d(rows)
    thetas = rows[:, 1:-1].copy()
    disc = rows[:, -1].copy()
    model = make_model(meta["model_id"], true_theta=meta["true_theta"])
    return AbcRun(
        thetas=thetas,
        discrepancies=disc,
        model=model,
        observed_hash=meta["observed_hash"],
        master_seed=meta["master_seed"],
        m=meta["m"],
        kind=_kind_from_json(meta["discrepancy"]),
    )
