"""Command-line entry point.

Verbs:

* ``run CONFIG``    -- replicated benchmark experiment from a JSON config
* ``bench CONFIG``  -- wall-clock timing sweep over sample sizes
* ``oracle``        -- closed-form Gaussian-location pseudo-posterior curves

Exit code is 0 only when every experiment cell succeeds.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import analysis, experiment

__all__ = ["main"]


@click.group()
def main():
    """Likelihood-free inference benchmarks with summary-free discrepancies."""


@main.command("run")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--scale", type=int, default=1, show_default=True,
              help="Divide N and widen the keep fraction by this factor, "
                   "holding the accepted-sample size fixed.")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Output directory (overrides the config).")
def run_cmd(config_path, scale, out):
    """Run the replicated experiment described by CONFIG_PATH."""
    config = experiment.load_config(config_path)
    if scale != 1:
        config = config.scaled(scale)
    report = experiment.run_experiment(config, out_dir=out)
    for j, name in enumerate(report.parameter_names):
        for (kname, jj, stat), (mean, sd) in sorted(report.stats.items()):
            if jj == j and stat == "mean":
                click.echo(f"{name:>10s} {kname:<12s} mean={mean:+.4f} sd={sd:.4f}")
    for kname, rep, msg in report.failures:
        click.echo(f"FAILED {kname} replication {rep}: {msg}", err=True)
    if report.failures:
        sys.exit(1)


@main.command("bench")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n-list", default="128,256,512", show_default=True,
              help="Comma-separated ascending sample sizes.")
@click.option("--iterations", type=int, default=1000, show_default=True,
              help="Sampler iterations per timing cell.")
@click.option("--out", type=click.Path(dir_okay=False), default="timing.csv",
              show_default=True)
def bench_cmd(config_path, n_list, iterations, out):
    """Time each discrepancy over increasing sample sizes."""
    config = experiment.load_config(config_path)
    config = experiment.config_replace(config, iterations=iterations)
    sizes = [int(v) for v in n_list.split(",")]
    rows = experiment.bench_timing(config, sizes, out_path=out)
    for kname, n, seconds in rows:
        click.echo(f"{kname:<12s} n={n:<6d} {seconds:.3f}s")


@main.command("oracle")
@click.option("--theta0", type=float, default=2.0, show_default=True)
@click.option("--tau", type=float, default=1.0, show_default=True)
@click.option("--eps", "eps_list", type=float, multiple=True, required=True,
              help="Threshold value; repeat for several curves.")
@click.option("--grid-points", type=int, default=401, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="oracle.csv",
              show_default=True)
def oracle_cmd(theta0, tau, eps_list, grid_points, out):
    """Emit closed-form limiting pseudo-posterior curves as CSV."""
    tau2 = tau * tau
    span = 4.0 * tau + abs(theta0) + max(eps_list)
    grid = np.linspace(-span, span, grid_points)
    with open(Path(out), "w", newline="") as fh:
        fh.write("eps,theta,rejection_density,is_density,is_mean,is_variance\r\n")
        for eps in eps_list:
            oracle = analysis.GaussLocationOracle(theta0, 1.0, tau2, eps)
            rejection = analysis.limiting_pseudo_posterior_rejection(oracle, grid)
            mean, var = analysis.limiting_pseudo_posterior_is(oracle)
            is_density = np.exp(-((grid - mean) ** 2) / (2 * var)) / np.sqrt(
                2 * np.pi * var
            )
            for t, rd, sd in zip(grid, rejection, is_density):
                fh.write(
                    f"{eps!r},{float(t)!r},{float(rd)!r},{float(sd)!r},"
                    f"{mean!r},{var!r}\r\n"
                )
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
