"""Random dive Metropolis-Hastings toolkit.

A multiplicative-proposal MH sampler on the punctured real line (and R^k),
random walk and Langevin baselines, kernel and chain diagnostics, a Bayesian
skewed-t share-price model, and a batch experiment harness.
"""

from .rng import RngStream, sample_beta, sample_cauchy, sample_normal, uniform01
from .targets import (
    TargetDensity,
    bimodal_example1,
    needle_example2,
    thick_tailed,
    thick_tailed_cdf,
)
from .proposals import (
    MultiplierProposal,
    beta_mixture,
    multiplier_log_density,
    proposal_from_spec,
    regularity_witness,
    sample_multiplier,
    uniform_y,
)
from .samplers import (
    INNER,
    OUTER,
    ChainConfig,
    DiveOutcome,
    InvalidStateError,
    Trace,
    dive_outcome,
    lmh_step,
    rdmh_accept_log,
    rdmh_componentwise_sweep,
    rdmh_step,
    rdmh_step_multivariate,
    run_chain,
    rwmh_step,
)
from .diagnostics import (
    DiagnosticsReport,
    acf,
    ergodic_mean,
    kolmogorov_pvalue,
    ks_distance,
    normality_tests,
    proposal_kernel_density,
    rejection_prob_estimate,
)
from .shareprice import (
    HyperParams,
    PriceSeries,
    SkewTParams,
    load_prices,
    log_posterior,
    posterior_target,
    run_shareprice_analysis,
    shareprice_proposals,
    synthetic_price_series,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    emit_csv,
    emit_summary,
    run_experiment,
)

__version__ = "0.1.0"
