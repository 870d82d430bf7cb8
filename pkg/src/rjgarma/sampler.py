"""Reversible-jump MCMC over the union space of GARMA submodels.

Each toggleable coefficient carries an inclusion indicator.  One iteration
is a jump sweep followed by a within-model random-walk sweep, both in
freshly shuffled coefficient order:

* Jump step: the proposed inclusion state of the coefficient is drawn
  with probability 1/2 each way (a symmetric move proposal, so the move
  probabilities cancel in the acceptance ratio).  Proposing the current
  state is a no-op.  A birth draws the new value from Normal(0,
  rj_scale^2) and accepts with

      min{1, L(cand)/L(cur) * prior(v) * inc_prob/(1 - inc_prob) / N(v; 0, rj_scale^2)}

  (identity dimension map, unit Jacobian); a death uses the reciprocal
  ratio.  All ratios live in log space and a uniform is consumed for
  every attempted move, so accept/reject sequences are invariant to
  adding a constant to the log-likelihood.
* Random-walk step: symmetric Normal(0, rw_scale^2) increment on each
  currently included coefficient, accepted on the log-posterior ratio.

The chain starts from the all-zero state with every toggleable
coefficient excluded.  `run_chain` drives a jitted kernel; the module
also exposes the two steps as plain functions operating on ParamState,
and a slow reference runner used by the tests to pin the kernel to them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._kernels import _chain_kernel, _garma_path, _lognorm
from .model import (CountSeries, Family, ParamState, PriorSpec, check_model,
                    _pmf_logconst)
from .rng import Rng

_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class SamplerConfig:
    """Everything run_chain needs besides the data."""

    p_max: int = 3
    q_max: int = 3
    priors: PriorSpec = field(default_factory=PriorSpec)
    rj_scale: float = 5.0
    rw_scale: float = 0.1
    iters: int = 30000
    seed: int = 0
    always_included: frozenset = frozenset({"alpha"})

    def __post_init__(self):
        if self.p_max < 0 or self.q_max < 0:
            raise ValueError("p_max and q_max must be nonnegative")
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        if not self.rj_scale > 0 or not self.rw_scale > 0:
            raise ValueError("proposal scales must be positive")
        object.__setattr__(self, "always_included",
                           frozenset(self.always_included) | {"alpha"})


def coef_names(series: CountSeries, config: SamplerConfig) -> tuple[str, ...]:
    """Packed coefficient names: alpha, beta_<x>..., phi_i..., theta_j..."""
    return (("alpha",)
            + tuple(f"beta_{x}" for x in series.x_names)
            + tuple(f"phi_{j + 1}" for j in range(config.p_max))
            + tuple(f"theta_{j + 1}" for j in range(config.q_max)))


@dataclass
class ChainOutput:
    """Posterior draws over the union model space.

    `draws` records the packed coefficient vector at every iteration with
    excluded coefficients stored as exact zeros; `indicators` the matching
    inclusion bits for the toggleable coefficients.  `n_burn` and
    `thin_lag` track post-processing already applied.
    """

    draws: np.ndarray
    indicators: np.ndarray
    coef_names: tuple[str, ...]
    toggleable_names: tuple[str, ...]
    accept_rj: dict
    accept_rw: dict
    propose_rj: dict
    propose_rw: dict
    config: SamplerConfig
    n_burn: int = 0
    thin_lag: int = 1

    @property
    def n_draws(self) -> int:
        return int(self.draws.shape[0])

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, self.coef_names.index(name)]

    def indicator_column(self, name: str) -> np.ndarray:
        return self.indicators[:, self.toggleable_names.index(name)]


def _log_inc_odds(inc_prob: float) -> float:
    if inc_prob <= 0.0:
        return -math.inf
    if inc_prob >= 1.0:
        return math.inf
    return math.log(inc_prob) - math.log1p(-inc_prob)


def _prior_sd_vector(series: CountSeries, config: SamplerConfig) -> np.ndarray:
    pr = config.priors
    return np.concatenate(([pr.sd_alpha],
                           np.full(series.r, pr.sd_beta),
                           np.full(config.p_max, pr.sd_phi),
                           np.full(config.q_max, pr.sd_theta)))


def _toggle_indices(names: tuple[str, ...], config: SamplerConfig) -> np.ndarray:
    unknown = config.always_included - set(names)
    if unknown:
        raise ValueError(f"always_included names not in model: {sorted(unknown)}")
    return np.array([i for i, nm in enumerate(names)
                     if nm not in config.always_included], dtype=np.int64)


@dataclass
class ModelContext:
    """Bundles data, priors, and the log-likelihood for the step functions."""

    series: CountSeries
    family: Family
    config: SamplerConfig
    names: tuple[str, ...]
    prior_sd: np.ndarray
    log_inc_odds: float
    loglik: Callable[[ParamState], float]

    def locate(self, coeff: str) -> int:
        try:
            return self.names.index(coeff)
        except ValueError:
            raise ValueError(f"unknown coefficient {coeff!r}") from None


def make_model_context(series: CountSeries, family: Family,
                       config: SamplerConfig,
                       loglik: Callable[[ParamState], float] | None = None
                       ) -> ModelContext:
    check_model(ParamState.zeros(series.r, config.p_max, config.q_max),
                series, family)
    names = coef_names(series, config)
    if loglik is None:
        yf = series.y.astype(np.float64)
        logystar = series.log_ystar()
        logconst = _pmf_logconst(series.y, family)
        eta = np.empty(series.n)
        resid = np.empty(series.n)
        xb = np.empty(series.n)

        def loglik(params: ParamState) -> float:
            ll, err = _garma_path(params.to_vector(), series.r, config.p_max,
                                  config.q_max, yf, logystar, logconst,
                                  series.X, family.code, family.param,
                                  eta, resid, xb)
            return -math.inf if err >= 0 else float(ll)

    return ModelContext(series=series, family=family, config=config,
                        names=names,
                        prior_sd=_prior_sd_vector(series, config),
                        log_inc_odds=_log_inc_odds(config.priors.inc_prob),
                        loglik=loglik)


def _split_index(ctx: ModelContext, j: int) -> tuple[str, int]:
    """Packed index -> (vector name, offset within it)."""
    r = ctx.series.r
    p = ctx.config.p_max
    if j == 0:
        return "alpha", 0
    if j <= r:
        return "beta", j - 1
    if j <= r + p:
        return "phi", j - 1 - r
    return "theta", j - 1 - r - p


def _get_coeff(state: ParamState, kind: str, off: int) -> tuple[float, bool]:
    if kind == "alpha":
        return state.alpha, True
    return float(getattr(state, kind)[off]), bool(getattr(state, f"inc_{kind}")[off])


def _with_coeff(state: ParamState, kind: str, off: int, value: float,
                included: bool) -> ParamState:
    new = state.copy()
    if kind == "alpha":
        new.alpha = value
        return new
    getattr(new, kind)[off] = value
    getattr(new, f"inc_{kind}")[off] = 1 if included else 0
    return new


def rj_toggle_step(state: ParamState, coeff: str, ctx: ModelContext,
                   rng: Rng) -> tuple[ParamState, bool]:
    """One jump proposal for a single toggleable coefficient.

    Draws the proposed inclusion state (probability 1/2 each); proposing
    the current state is a no-op.  Returns the next state and whether the
    attempted birth/death was accepted.
    """
    j = ctx.locate(coeff)
    if coeff in ctx.config.always_included:
        raise ValueError(f"{coeff} is not toggleable")
    kind, off = _split_index(ctx, j)
    value, included = _get_coeff(state, kind, off)
    propose_in = rng.u01() < 0.5
    if propose_in == included:
        return state, False
    cur_ll = ctx.loglik(state)
    psd = float(ctx.prior_sd[j])
    if propose_in:
        v = rng.normal() * ctx.config.rj_scale
        cand = _with_coeff(state, kind, off, v, True)
        cand_ll = ctx.loglik(cand)
        logr = (cand_ll - cur_ll) + _lognorm(v, psd) + ctx.log_inc_odds \
            - _lognorm(v, ctx.config.rj_scale)
    else:
        v = value
        cand = _with_coeff(state, kind, off, 0.0, False)
        cand_ll = ctx.loglik(cand)
        logr = (cand_ll - cur_ll) - _lognorm(v, psd) - ctx.log_inc_odds \
            + _lognorm(v, ctx.config.rj_scale)
    u = rng.u01()
    if math.log(u) < logr:
        return cand, True
    return state, False


def rw_update_step(state: ParamState, coeff: str, ctx: ModelContext,
                   rng: Rng) -> tuple[ParamState, bool]:
    """Symmetric random-walk update of one currently included coefficient."""
    j = ctx.locate(coeff)
    kind, off = _split_index(ctx, j)
    value, included = _get_coeff(state, kind, off)
    if not included:
        raise ValueError(f"{coeff} is not currently included")
    cur_ll = ctx.loglik(state)
    psd = float(ctx.prior_sd[j])
    new_v = value + rng.normal() * ctx.config.rw_scale
    cand = _with_coeff(state, kind, off, new_v, True)
    cand_ll = ctx.loglik(cand)
    logr = (cand_ll - cur_ll) + _lognorm(new_v, psd) - _lognorm(value, psd)
    u = rng.u01()
    if math.log(u) < logr:
        return cand, True
    return state, False


def run_chain(series: CountSeries, family: Family, config: SamplerConfig,
              _ll_shift: float = 0.0) -> ChainOutput:
    """Run the full sampler; deterministic given (series, family, config).

    The chain never aborts on rejected proposals: candidates whose
    likelihood is non-finite are rejected and counted like any other
    rejection.
    """
    check_model(ParamState.zeros(series.r, config.p_max, config.q_max),
                series, family)
    names = coef_names(series, config)
    toggle_idx = _toggle_indices(names, config)
    d = len(names)
    included0 = np.zeros(d, dtype=np.uint8)
    for i, nm in enumerate(names):
        if nm in config.always_included:
            included0[i] = 1

    draws, indicators, acc_rj, acc_rw, prop_rj, prop_rw = _chain_kernel(
        series.y.astype(np.float64), series.log_ystar(),
        _pmf_logconst(series.y, family), series.X, family.code, family.param,
        config.p_max, config.q_max, _prior_sd_vector(series, config),
        _log_inc_odds(config.priors.inc_prob), config.rj_scale,
        config.rw_scale, config.iters, np.uint64(config.seed & _MASK64),
        toggle_idx, included0, float(_ll_shift))

    tog_names = tuple(names[i] for i in toggle_idx)
    return ChainOutput(
        draws=draws, indicators=indicators, coef_names=names,
        toggleable_names=tog_names,
        accept_rj={nm: int(acc_rj[i]) for i, nm in enumerate(names)},
        accept_rw={nm: int(acc_rw[i]) for i, nm in enumerate(names)},
        propose_rj={nm: int(prop_rj[i]) for i, nm in enumerate(names)},
        propose_rw={nm: int(prop_rw[i]) for i, nm in enumerate(names)},
        config=config)


def _run_chain_python(series: CountSeries, family: Family,
                      config: SamplerConfig) -> ChainOutput:
    """Reference runner built from the step functions; mirrors the kernel's
    RNG consumption exactly so tests can require bitwise-equal draws."""
    ctx = make_model_context(series, family, config)
    names = ctx.names
    toggle_idx = _toggle_indices(names, config)
    d = len(names)
    state = ParamState.zeros(series.r, config.p_max, config.q_max)
    for i, nm in enumerate(names):
        if nm in config.always_included and nm != "alpha":
            kind, off = _split_index(ctx, i)
            getattr(state, f"inc_{kind}")[off] = 1

    rng = Rng(config.seed)
    order = toggle_idx.copy()
    draws = np.empty((config.iters, d))
    indicators = np.empty((config.iters, len(toggle_idx)), np.uint8)

    def is_included(idx: int) -> bool:
        kind, off = _split_index(ctx, idx)
        return _get_coeff(state, kind, off)[1]

    for it in range(config.iters):
        rng.shuffle(order)
        for j in order:
            state, _ = rj_toggle_step(state, names[j], ctx, rng)
        inc_order = np.array([j for j in range(d) if is_included(j)],
                             dtype=np.int64)
        rng.shuffle(inc_order)
        for j in inc_order:
            state, _ = rw_update_step(state, names[j], ctx, rng)
        draws[it] = state.to_vector()
        for c, j in enumerate(toggle_idx):
            indicators[it, c] = 1 if is_included(j) else 0

    tog_names = tuple(names[i] for i in toggle_idx)
    zero = {nm: 0 for nm in names}
    return ChainOutput(draws=draws, indicators=indicators, coef_names=names,
                       toggleable_names=tog_names, accept_rj=dict(zero),
                       accept_rw=dict(zero), propose_rj=dict(zero),
                       propose_rw=dict(zero), config=config)


def posterior_model_probs(chain: ChainOutput, burn: int = 0) -> dict:
    """Relative frequency of each inclusion pattern after burn-in.

    Keys are tuples of 0/1 bits in `chain.toggleable_names` order; values
    sum to one.
    """
    if not 0 <= burn < chain.n_draws:
        raise ValueError("burn must satisfy 0 <= burn < number of draws")
    rows = chain.indicators[burn:]
    counts: dict = {}
    for row in rows:
        key = tuple(int(b) for b in row)
        counts[key] = counts.get(key, 0) + 1
    total = rows.shape[0]
    probs = {k: v / total for k, v in counts.items()}
    return dict(sorted(probs.items(), key=lambda kv: (-kv[1], kv[0])))
