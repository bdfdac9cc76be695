import csv
import json

from click.testing import CliRunner

from esabc.cli import main


def write_config(path, **overrides):
    raw = {
        "model": "gauss_location",
        "n": 25,
        "N": 300,
        "keep_fraction": 0.05,
        "master_seed": 9,
        "replications": 1,
        "discrepancies": ["energy"],
    }
    raw.update(overrides)
    path.write_text(json.dumps(raw))
    return str(path)


def test_run_command(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    out = tmp_path / "results"
    result = CliRunner().invoke(main, ["run", cfg, "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "theta" in result.output
    assert "energy" in result.output
    assert (out / "gauss_location_energy_rep0_accepted.csv").exists()


def test_run_command_scale(tmp_path):
    cfg = write_config(tmp_path / "c.json", N=600, keep_fraction=0.05)
    out = tmp_path / "results"
    result = CliRunner().invoke(main, ["run", cfg, "--scale", "2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    with open(out / "gauss_location_energy_rep0_accepted.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) - 1 == 30  # same accepted count as the unscaled config


def test_bench_command(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    out = tmp_path / "timing.csv"
    result = CliRunner().invoke(
        main, ["bench", cfg, "--n-list", "16,32", "--iterations", "40", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["discrepancy", "n", "seconds"]
    assert len(rows) == 3


def test_oracle_command(tmp_path):
    out = tmp_path / "oracle.csv"
    result = CliRunner().invoke(
        main,
        ["oracle", "--theta0", "2.0", "--tau", "1.0", "--eps", "0.5",
         "--eps", "1.0", "--grid-points", "101", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "eps", "theta", "rejection_density", "is_density", "is_mean", "is_variance",
    ]
    assert len(rows) == 1 + 2 * 101
    values = [[float(v) for v in row] for row in rows[1:]]
    # rejection curve vanishes outside [theta0 - eps, theta0 + eps]
    for eps, theta, rej, *_ in values:
        if abs(theta - 2.0) > eps:
            assert rej == 0.0
    # IS mean for eps=1: theta0 / (1 + eps^2/tau^2) = 1
    eps1 = [row for row in values if row[0] == 1.0]
    assert abs(eps1[0][4] - 1.0) < 1e-12
    assert abs(eps1[0][5] - 0.5) < 1e-12


def test_run_command_bad_config(tmp_path):
    cfg = write_config(tmp_path / "c.json", model="nope")
    result = CliRunner().invoke(main, ["run", cfg])
    assert result.exit_code != 0
