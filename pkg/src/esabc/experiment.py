"""Benchmark experiment driver: config parsing, replicated runs, report
aggregation, timing sweeps, and CSV artifact emission.

A config describes one model plus a list of discrepancies.  Each
replication draws fresh observed data, runs the sampler once per
discrepancy, and writes the accepted sample, its summary, and marginal
KDE grids.  Per-coordinate statistics are averaged across replications
into a report whose rows are (parameter, discrepancy) cells.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, engine
from .discrepancy import DiscrepancyKind, kind_from_name, kind_name
from .errors import ConfigError
from .models import MODEL_IDS, ModelSpec, make_model, simulate
from .rng import rng_create

__all__ = [
    "ExperimentConfig",
    "BenchReport",
    "run_experiment",
    "bench_timing",
]

DEFAULT_N_OBS = {
    "gauss_mix": 500,
    "ma2": 200,
    "bivariate_beta": 500,
    "gandk": 200,
    "gauss_location": 100,
}
DEFAULT_ITERATIONS = 100_000
DEFAULT_KEEP = 0.0005
DEFAULT_REPLICATIONS = 10

OBSERVED_STREAM_BASE = 1 << 62  # observed-data streams never collide with record streams

STAT_COLUMNS = ("mean", "median", "mae", "rmse")


@dataclass(frozen=True)
class ExperimentConfig:
    model_id: str
    true_theta: tuple | None = None
    n: int | None = None
    m: int | None = None  # defaults to n
    iterations: int = DEFAULT_ITERATIONS  # prior draws per run (N)
    keep_fraction: float = DEFAULT_KEEP
    master_seed: int = 1
    replications: int = DEFAULT_REPLICATIONS
    discrepancies: tuple = (("energy", {}),)  # (name, params) pairs
    weight_fn: engine.WeightFn = engine.Rejection()
    out_dir: str = "results"
    workers: int = 1

    def resolved_n(self) -> int:
        return self.n if self.n is not None else DEFAULT_N_OBS[self.model_id]

    def resolved_m(self) -> int:
        return self.m if self.m is not None else self.resolved_n()

    def model(self) -> ModelSpec:
        return make_model(self.model_id, true_theta=self.true_theta)

    def kinds(self) -> list[DiscrepancyKind]:
        return [kind_from_name(name, **params) for name, params in self.discrepancies]

    def scaled(self, scale: int) -> "ExperimentConfig":
        """Divide the iteration count by ``scale`` and widen the keep
        fraction to hold the accepted-sample size fixed."""
        if scale < 1:
            raise ConfigError([f"scale must be >= 1, got {scale}"])
        cfg = config_replace(self, iterations=self.iterations // scale,
                             keep_fraction=min(1.0, self.keep_fraction * scale))
        return cfg


def config_replace(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    from dataclasses import replace

    return replace(cfg, **changes)


def _parse_weight(obj) -> engine.WeightFn:
    if obj is None or obj == {} or obj.get("kind") == "rejection":
        return engine.Rejection()
    if obj.get("kind") == "kernel":
        return engine.Kernel(
            q=float(obj.get("q", 2.0)),
            parameterization=obj.get("parameterization", "plain"),
        )
    raise ValueError(f"unknown weight function {obj!r}")


def _parse_discrepancies(items) -> tuple:
    out = []
    for item in items:
        if isinstance(item, str):
            out.append((item, {}))
        elif isinstance(item, dict):
            params = {k: v for k, v in item.items() if k != "kind"}
            out.append((item["kind"], params))
        else:
            raise ValueError(f"bad discrepancy entry {item!r}")
        kind_from_name(*out[-1][:1], **out[-1][1])  # validates eagerly
    return tuple(out)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON config; reports every problem at once."""
    with open(path) as fh:
        raw = json.load(fh)
    problems = []
    model_id = raw.get("model")
    if model_id not in MODEL_IDS:
        problems.append(f"model must be one of {MODEL_IDS}, got {model_id!r}")
    fields = {}
    for key, default, conv, check, desc in (
        ("n", None, int, lambda v: v is None or v >= 1, "n must be >= 1"),
        ("m", None, int, lambda v: v is None or v >= 1, "m must be >= 1"),
        ("N", DEFAULT_ITERATIONS, int, lambda v: v >= 1, "N must be >= 1"),
        ("keep_fraction", DEFAULT_KEEP, float, lambda v: 0 < v <= 1,
         "keep_fraction must lie in (0, 1]"),
        ("master_seed", 1, int, lambda v: True, ""),
        ("replications", DEFAULT_REPLICATIONS, int, lambda v: v >= 1,
         "replications must be >= 1"),
        ("workers", 1, int, lambda v: v >= 1, "workers must be >= 1"),
    ):
        value = raw.get(key, default)
        try:
            value = default if value is None else conv(value)
        except (TypeError, ValueError):
            problems.append(f"{key} must be numeric, got {value!r}")
            continue
        if not check(value):
            problems.append(desc)
        fields[key] = value
    try:
        discs = _parse_discrepancies(raw.get("discrepancies", ["energy"]))
    except Exception as exc:
        problems.append(str(exc))
        discs = ()
    try:
        wfn = _parse_weight(raw.get("weight"))
    except Exception as exc:
        problems.append(str(exc))
        wfn = engine.Rejection()
    true_theta = raw.get("true_theta")
    if problems:
        raise ConfigError(problems)
    cfg = ExperimentConfig(
        model_id=model_id,
        true_theta=tuple(true_theta) if true_theta is not None else None,
        n=fields["n"],
        m=fields["m"],
        iterations=fields["N"],
        keep_fraction=fields["keep_fraction"],
        master_seed=fields["master_seed"],
        replications=fields["replications"],
        discrepancies=discs,
        weight_fn=wfn,
        out_dir=raw.get("out_dir", "results"),
        workers=fields["workers"],
    )
    if cfg.keep_fraction * cfg.iterations < 1:
        raise ConfigError(["keep_fraction * N must be at least 1"])
    return cfg


def derive_run_seed(master_seed: int, replication: int, kind_index: int) -> int:
    """Deterministic, collision-free seed for one (replication, kind) run."""
    ss = np.random.SeedSequence(
        entropy=int(master_seed) % (1 << 64),
        spawn_key=(int(replication), int(kind_index)),
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class CellResult:
    kind: str
    replication: int
    summary: analysis.PosteriorSummary | None
    error: str | None = None


@dataclass
class BenchReport:
    model_id: str
    parameter_names: list
    # stats[(kind, param_index, stat)] -> (mean across reps, std across reps)
    stats: dict
    failures: list  # (kind, replication, message)


def _parameter_names(model: ModelSpec) -> list:
    names = {
        "gauss_mix": ["p", "mu0_x", "mu0_y", "mu1_x", "mu1_y"],
        "ma2": ["theta1", "theta2"],
        "bivariate_beta": ["theta1", "theta2", "theta3", "theta4", "theta5"],
        "gandk": ["A", "B", "g", "k", "rho"],
        "gauss_location": ["theta"],
    }
    return names[model.model_id]


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _emit_accepted(path: Path, accepted: np.ndarray, names):
    _write_csv(path, names, [[repr(float(v)) for v in row] for row in accepted])


def _emit_summary(path: Path, summary: analysis.PosteriorSummary, names):
    header = ["parameter", "true_value", "mean", "median", "mae", "mse", "rmse", "M"]
    rows = [
        [
            names[j],
            repr(float(summary.theta0[j])),
            repr(float(summary.mean[j])),
            repr(float(summary.median[j])),
            repr(float(summary.mae[j])),
            repr(float(summary.mse[j])),
            repr(float(summary.rmse[j])),
            summary.M,
        ]
        for j in range(len(names))
    ]
    _write_csv(path, header, rows)


def _emit_kde(path: Path, accepted: np.ndarray, names):
    rows = []
    for j, name in enumerate(names):
        coord = accepted[:, j : j + 1]
        try:
            grid = analysis.kde(coord)
        except Exception:
            continue  # degenerate coordinate; other marginals still useful
        rows += [
            [name, repr(float(g)), repr(float(dens))]
            for g, dens in zip(grid.axes[0], grid.density)
        ]
    _write_csv(path, ["parameter", "grid", "density"], rows)


def run_experiment(config: ExperimentConfig, out_dir=None) -> BenchReport:
    """Replicated benchmark run; emits artifacts and aggregates a report.

    Per replication: fresh observed data, then one sampler run per
    discrepancy on that shared data set.  Per-cell failures are recorded
    and the remaining cells continue.
    """
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = config.model()
    names = _parameter_names(model)
    n, m = config.resolved_n(), config.resolved_m()
    theta0 = np.asarray(model.true_theta)
    cells = []
    for r in range(config.replications):
        obs_rng = rng_create(config.master_seed, OBSERVED_STREAM_BASE + r)
        observed = simulate(model, theta0, n, obs_rng)
        for j, kind in enumerate(config.kinds()):
            kname = kind_name(kind)
            tag = f"{config.model_id}_{kname}_rep{r}"
            try:
                run = engine.run_isabc(
                    model, observed, config.iterations, m, kind,
                    derive_run_seed(config.master_seed, r, j),
                    workers=config.workers,
                )
                eps = engine.select_epsilon(run, config.keep_fraction)
                accepted = engine.accepted_sample(run, eps)
                summary = analysis.summarize(accepted, theta0)
                _emit_accepted(out / f"{tag}_accepted.csv", accepted, names)
                _emit_summary(out / f"{tag}_summary.csv", summary, names)
                _emit_kde(out / f"{tag}_kde.csv", accepted, names)
                cells.append(CellResult(kname, r, summary))
            except Exception as exc:
                cells.append(CellResult(kname, r, None, error=str(exc)))
    report = _aggregate(config, names, cells)
    _emit_report(out / f"{config.model_id}_report.csv", report)
    return report


def _aggregate(config, names, cells) -> BenchReport:
    stats = {}
    failures = [(c.kind, c.replication, c.error) for c in cells if c.error]
    for kname in {c.kind for c in cells}:
        summaries = [c.summary for c in cells if c.kind == kname and c.summary]
        if not summaries:
            continue
        for j in range(len(names)):
            for stat in STAT_COLUMNS:
                vals = np.array([getattr(s, stat)[j] for s in summaries])
                stats[(kname, j, stat)] = (float(vals.mean()), float(vals.std(ddof=0)))
    return BenchReport(
        model_id=config.model_id,
        parameter_names=names,
        stats=stats,
        failures=failures,
    )


def _emit_report(path: Path, report: BenchReport):
    header = ["parameter", "discrepancy"]
    for stat in STAT_COLUMNS:
        header += [stat, f"sd_{stat}"]
    rows = []
    kinds = sorted({k for (k, _, _) in report.stats})
    for j, name in enumerate(report.parameter_names):
        for kname in kinds:
            row = [name, kname]
            for stat in STAT_COLUMNS:
                mean, sd = report.stats[(kname, j, stat)]
                row += [repr(mean), repr(sd)]
            rows.append(row)
    _write_csv(path, header, rows)


def bench_timing(config: ExperimentConfig, n_list, out_path=None):
    """Wall-clock seconds per discrepancy per sample size.

    Times the simulate-plus-evaluate loop only; observed-data generation
    is excluded.  Returns a list of (discrepancy, n, seconds) rows and
    optionally writes them as CSV.
    """
    n_list = list(n_list)
    if n_list != sorted(n_list):
        raise ConfigError(["n_list must be ascending"])
    model = config.model()
    theta0 = np.asarray(model.true_theta)
    rows = []
    for j, kind in enumerate(config.kinds()):
        kname = kind_name(kind)
        for i, n in enumerate(n_list):
            obs_rng = rng_create(config.master_seed, OBSERVED_STREAM_BASE + i)
            observed = simulate(model, theta0, n, obs_rng)
            seed = derive_run_seed(config.master_seed, i, j)
            start = time.perf_counter()
            engine.run_isabc(model, observed, config.iterations, n, kind, seed)
            rows.append((kname, n, time.perf_counter() - start))
    if out_path is not None:
        _write_csv(
            Path(out_path),
            ["discrepancy", "n", "seconds"],
            [[k, n, repr(t)] for k, n, t in rows],
        )
    return rows
