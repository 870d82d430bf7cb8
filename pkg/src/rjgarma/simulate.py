"""Synthetic GARMA(p,q) count series generation.

The generator iterates the same predictor recursion used for fitting,
drawing y_t from the conditional family at each step, then discards the
first `warmup` points (the data-generation warmup is distinct from MCMC
burn-in).  Draws come from numpy's PCG64 generator seeded with the spec's
seed, so an identical spec yields an identical series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BINOMIAL, POISSON, CountSeries, Family, ParamState

_MASK64 = 0xFFFFFFFFFFFFFFFF


class GenerationError(RuntimeError):
    """The recursion produced a non-finite or unusable mean while generating."""

    def __init__(self, step: int, detail: str = "non-finite conditional mean"):
        self.step = step
        super().__init__(f"{detail} at generation step {step}")


@dataclass(frozen=True)
class SimSpec:
    """Recipe for one simulated series."""

    family: Family
    params: ParamState
    n: int
    warmup: int = 100
    c: float = 0.3
    seed: int = 0
    X: np.ndarray | None = None  # optional (warmup + n, r) covariate window

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        if not 0.0 < self.c < 1.0:
            raise ValueError("clipping constant must lie in (0, 1)")


def simulate_garma(spec: SimSpec) -> CountSeries:
    """Generate a CountSeries of length n from a GARMA(p,q) process."""
    params, family = spec.params, spec.family
    total = spec.warmup + spec.n
    r = params.beta.shape[0]
    if spec.X is not None:
        X = np.asarray(spec.X, dtype=np.float64)
        if X.shape != (total, r):
            raise ValueError("X must cover the full warmup + n window")
    else:
        if r:
            raise ValueError("params carry covariate coefficients but no X given")
        X = np.zeros((total, 0))

    rng = np.random.default_rng(spec.seed & _MASK64)
    p, q = params.p_max, params.q_max
    xb = X @ params.beta if r else np.zeros(total)
    y = np.zeros(total, dtype=np.int64)
    logystar = np.zeros(total)
    resid = np.zeros(total)

    for t in range(total):
        eta = params.alpha + xb[t]
        for j in range(p):
            s = t - j - 1
            if s >= 0 and params.phi[j] != 0.0:
                eta += params.phi[j] * (logystar[s] - xb[s])
        for j in range(q):
            s = t - j - 1
            if s >= 0 and params.theta[j] != 0.0:
                eta += params.theta[j] * resid[s]
        if not math.isfinite(eta):
            raise GenerationError(t + 1)
        if family.tag == POISSON:
            mu = math.exp(eta)
            logmu = eta
            if not math.isfinite(mu):
                raise GenerationError(t + 1)
            try:
                y[t] = rng.poisson(mu)
            except ValueError as exc:
                raise GenerationError(t + 1, str(exc)) from exc
        elif family.tag == BINOMIAL:
            pt = 1.0 / (1.0 + math.exp(-eta)) if eta >= 0 else \
                math.exp(eta) / (1.0 + math.exp(eta))
            logmu = math.log(family.m) + (
                -math.log1p(math.exp(-eta)) if eta >= 0
                else eta - math.log1p(math.exp(eta)))
            y[t] = rng.binomial(family.m, pt)
        else:
            mu = math.exp(eta)
            logmu = eta
            if not math.isfinite(mu):
                raise GenerationError(t + 1)
            pt = family.k / (mu + family.k)
            y[t] = rng.negative_binomial(family.k, pt)
        logystar[t] = math.log(max(y[t], spec.c))
        resid[t] = logystar[t] - logmu

    keep = slice(spec.warmup, total)
    return CountSeries(y=y[keep], X=X[keep], c=spec.c)
