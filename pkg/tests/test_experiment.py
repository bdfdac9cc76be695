import csv
import json

import pytest

from esabc import ExperimentConfig, bench_timing, run_experiment
from esabc.errors import ConfigError
from esabc.experiment import derive_run_seed, load_config


def write_config(path, **overrides):
    raw = {
        "model": "gauss_location",
        "n": 30,
        "N": 400,
        "keep_fraction": 0.05,
        "master_seed": 11,
        "replications": 2,
        "discrepancies": ["energy"],
    }
    raw.update(overrides)
    path.write_text(json.dumps(raw))
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_load_config_defaults(tmp_path):
    cfg = load_config(write_config(tmp_path / "c.json"))
    assert cfg.model_id == "gauss_location"
    assert cfg.resolved_n() == 30
    assert cfg.resolved_m() == 30
    assert cfg.iterations == 400
    assert cfg.discrepancies == (("energy", {}),)


def test_load_config_collects_every_problem(tmp_path):
    path = write_config(
        tmp_path / "bad.json",
        model="nonsense",
        n=0,
        keep_fraction=2.0,
        replications=0,
        discrepancies=["nonsense_metric"],
    )
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    text = str(exc.value)
    assert "model" in text
    assert "n must be >= 1" in text
    assert "keep_fraction" in text
    assert "replications" in text
    assert "nonsense_metric" in text


def test_load_config_rejects_tiny_acceptance(tmp_path):
    path = write_config(tmp_path / "c.json", N=100, keep_fraction=0.001)
    with pytest.raises(ConfigError):
        load_config(path)


def test_scaled_holds_accepted_count(tmp_path):
    cfg = load_config(write_config(tmp_path / "c.json", N=10000, keep_fraction=0.001))
    scaled = cfg.scaled(10)
    assert scaled.iterations == 1000
    assert scaled.keep_fraction == pytest.approx(0.01)
    assert scaled.iterations * scaled.keep_fraction == pytest.approx(
        cfg.iterations * cfg.keep_fraction
    )
    with pytest.raises(ConfigError):
        cfg.scaled(0)


def test_derive_run_seed_distinct():
    seeds = {derive_run_seed(7, r, k) for r in range(20) for k in range(4)}
    assert len(seeds) == 80
    assert derive_run_seed(7, 3, 1) == derive_run_seed(7, 3, 1)


def test_run_experiment_artifacts_and_counts(tmp_path):
    cfg = ExperimentConfig(
        model_id="gauss_location",
        n=30,
        iterations=400,
        keep_fraction=0.05,
        master_seed=11,
        replications=2,
        discrepancies=(("energy", {}), ("wasserstein", {})),
    )
    report = run_experiment(cfg, out_dir=tmp_path)
    assert report.failures == []
    assert report.parameter_names == ["theta"]
    for kname in ("energy", "wasserstein"):
        for r in range(2):
            tag = f"gauss_location_{kname}_rep{r}"
            accepted = read_csv(tmp_path / f"{tag}_accepted.csv")
            assert len(accepted) - 1 == 20  # keep_fraction * N rows
            assert (tmp_path / f"{tag}_summary.csv").exists()
            kde_rows = read_csv(tmp_path / f"{tag}_kde.csv")
            assert len(kde_rows) > 1
        assert ("energy", 0, "mean") in report.stats
    report_rows = read_csv(tmp_path / "gauss_location_report.csv")
    assert len(report_rows) == 1 + 2  # header + one row per discrepancy


def test_run_experiment_deterministic(tmp_path):
    cfg = ExperimentConfig(
        model_id="ma2",
        n=25,
        iterations=200,
        keep_fraction=0.1,
        master_seed=5,
        replications=1,
        discrepancies=(("kl", {}),),
    )
    a = run_experiment(cfg, out_dir=tmp_path / "a")
    b = run_experiment(cfg, out_dir=tmp_path / "b")
    assert a.stats == b.stats
    assert read_csv(tmp_path / "a" / "ma2_kl_rep0_accepted.csv") == read_csv(
        tmp_path / "b" / "ma2_kl_rep0_accepted.csv"
    )


def test_run_experiment_estimates_are_sane(tmp_path):
    cfg = ExperimentConfig(
        model_id="gauss_location",
        n=100,
        iterations=2000,
        keep_fraction=0.01,
        master_seed=2,
        replications=3,
        discrepancies=(("energy", {}),),
    )
    report = run_experiment(cfg, out_dir=tmp_path)
    mean, sd = report.stats[("energy", 0, "mean")]
    assert abs(mean - 2.0) < 0.5


def test_bench_timing_rows(tmp_path):
    cfg = ExperimentConfig(
        model_id="gauss_location",
        iterations=50,
        keep_fraction=0.1,
        master_seed=3,
        discrepancies=(("energy", {}),),
    )
    out = tmp_path / "timing.csv"
    rows = bench_timing(cfg, [16, 32], out_path=out)
    assert [(k, n) for k, n, _ in rows] == [("energy", 16), ("energy", 32)]
    assert all(t > 0 for _, _, t in rows)
    loaded = read_csv(out)
    assert loaded[0] == ["discrepancy", "n", "seconds"]
    assert len(loaded) == 3
    with pytest.raises(ConfigError):
        bench_timing(cfg, [32, 16])
