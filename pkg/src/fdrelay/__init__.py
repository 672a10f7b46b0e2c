"""Capacity of the Gaussian two-hop full-duplex relay channel with
worst-case linear residual self-interference: solvers, benchmarks, an
analytic lower bound, link-budget conversion and Monte Carlo oracles.
"""

from .benchmarks import (
    BenchmarkSuite,
    conventional_fd_rate,
    conventional_hd_rate,
    ideal_fd_capacity,
    run_benchmarks,
)
from .config import ConfigError, RunConfig, SweepSpec, load_config
from .distributions import (
    BernoulliGaussian,
    DiscreteDistribution,
    GaussianInput,
    RelayInputDistribution,
)
from .linkbudget import (
    LinkScenario,
    NormalizedChannel,
    normalize_scenario,
    path_loss_gain,
    rate_to_bps,
)
from .lowerbound import LowerBoundResult, lb_mi_relay_destination, lb_mi_source_relay, solve_lowerbound
from .mcoracle import McConfig, McEstimate, mc_entropy, mc_mi_relay_destination, mc_mi_source_relay
from .numerics import (
    GaussianMixture,
    NonConvergenceError,
    QuadratureSpec,
    bisect_root,
    erf,
    gauss_expectation,
    mixture_entropy,
)
from .relay_opt import (
    CapacityResult,
    KktReport,
    RegimeTest,
    SolverConfig,
    SolverError,
    capacity,
    capacity_gaussian_regime,
    check_gaussian_regime,
    hd_capacity,
    kkt_certificate,
    mi_relay_destination,
    solve_discrete_capacity,
)
from .source_policy import (
    SourcePolicy,
    mi_source_relay,
    solve_xth,
    solve_xth_discrete,
    solve_xth_gaussian,
    source_power,
)
from .sweeps import PointReport, evaluate_point, sweep_rows

__version__ = "0.1.0"

__all__ = [
    "BenchmarkSuite",
    "BernoulliGaussian",
    "CapacityResult",
    "ConfigError",
    "DiscreteDistribution",
    "GaussianInput",
    "GaussianMixture",
    "KktReport",
    "LinkScenario",
    "LowerBoundResult",
    "McConfig",
    "McEstimate",
    "NonConvergenceError",
    "NormalizedChannel",
    "PointReport",
    "QuadratureSpec",
    "RegimeTest",
    "RelayInputDistribution",
    "RunConfig",
    "SolverConfig",
    "SolverError",
    "SourcePolicy",
    "SweepSpec",
    "bisect_root",
    "capacity",
    "capacity_gaussian_regime",
    "check_gaussian_regime",
    "conventional_fd_rate",
    "conventional_hd_rate",
    "erf",
    "evaluate_point",
    "gauss_expectation",
    "hd_capacity",
    "ideal_fd_capacity",
    "kkt_certificate",
    "lb_mi_relay_destination",
    "lb_mi_source_relay",
    "load_config",
    "mc_entropy",
    "mc_mi_relay_destination",
    "mc_mi_source_relay",
    "mi_relay_destination",
    "mi_source_relay",
    "mixture_entropy",
    "normalize_scenario",
    "path_loss_gain",
    "rate_to_bps",
    "run_benchmarks",
    "solve_discrete_capacity",
    "solve_lowerbound",
    "solve_xth",
    "solve_xth_discrete",
    "solve_xth_gaussian",
    "source_power",
    "sweep_rows",
]
