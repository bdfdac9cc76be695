"""Likelihood-free Bayesian inference with summary-free data discrepancies.

The package couples an importance-sampling ABC engine with two-sample
discrepancy estimators (energy statistic, Gaussian-kernel MMD,
nearest-neighbour Kullback--Leibler, assignment Wasserstein), benchmark
simulators, posterior analysis tooling, and closed-form Gaussian-location
oracles for numerical validation.
"""

from .analysis import (
    GaussLocationOracle,
    KdeGrid,
    PosteriorSummary,
    default_grid_axes,
    gauss_location_posterior,
    kde,
    limiting_discrepancy,
    limiting_pseudo_posterior_is,
    limiting_pseudo_posterior_rejection,
    summarize,
)
from .discrepancy import (
    DiscrepancyKind,
    DiscrepancyValue,
    EnergyV,
    KlNn,
    MmdU,
    MmdV,
    Wasserstein,
    compute,
    energy_vstat,
    energy_vstat_1d_fast,
    kl_knn,
    mmd_ustat,
    mmd_vstat,
    wasserstein,
)
from .engine import (
    AbcRun,
    Epsilon,
    Kernel,
    Rejection,
    WeightFn,
    accepted_sample,
    posterior_estimate,
    run_isabc,
    select_epsilon,
    weight,
)
from .experiment import BenchReport, ExperimentConfig, bench_timing, run_experiment
from .models import (
    ModelSpec,
    gk_quantile,
    make_model,
    prior_sample,
    simulate,
)
from .rng import (
    DistSpec,
    Gamma,
    MultiNormal,
    RngState,
    StdNormal,
    StudentT,
    Uniform,
    rng_create,
    sample,
)

__version__ = "0.1.0"
