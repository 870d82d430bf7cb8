"""Bayesian order selection and estimation for GARMA count time series.

Per-coefficient reversible-jump MCMC over Poisson, binomial, and negative
binomial GARMA(p,q) models, with posterior diagnostics and a Monte Carlo
harness for simulation studies.
"""

__version__ = "0.1.0"

from .diagnostics import (CoefficientSummary, PosteriorSummary, burn,
                          classify_model, effective_sample_size, geweke_z,
                          hpd_interval, quantile_interval, summarize, thin)
from .harness import (Scenario, ScenarioReport, compare_reports,
                      load_scenario, parse_scenario, run_scenario,
                      write_report_csv, write_report_text)
from .model import (CountSeries, EvaluationError, Family, MuPath, ParamState,
                    PriorSpec, clip, log_likelihood, log_prior, mu_path)
from .rng import Rng, derive_seed
from .sampler import (ChainOutput, SamplerConfig, make_model_context,
                      posterior_model_probs, rj_toggle_step, run_chain,
                      rw_update_step)
from .simulate import GenerationError, SimSpec, simulate_garma

__all__ = [
    "__version__",
    "CountSeries", "Family", "ParamState", "MuPath", "PriorSpec",
    "EvaluationError", "clip", "mu_path", "log_likelihood", "log_prior",
    "SimSpec", "GenerationError", "simulate_garma",
    "SamplerConfig", "ChainOutput", "run_chain", "posterior_model_probs",
    "rj_toggle_step", "rw_update_step", "make_model_context",
    "burn", "thin", "hpd_interval", "quantile_interval",
    "effective_sample_size", "geweke_z", "summarize", "classify_model",
    "CoefficientSummary", "PosteriorSummary",
    "Scenario", "ScenarioReport", "run_scenario", "compare_reports",
    "parse_scenario", "load_scenario", "write_report_csv", "write_report_text",
    "Rng", "derive_seed",
]
