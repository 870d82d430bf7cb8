"""GARMA model core: count-series container, conditional families, the
clipped log-link predictor recursion, and exact log-likelihood / log-prior
evaluation.

The linear predictor is

    eta_t = alpha + x_t'beta
            + sum_j phi_j * (log(Y*_{t-j}) - x_{t-j}'beta)
            + sum_j theta_j * r_{t-j}

with Y*_t = max(Y_t, c) for a clipping constant 0 < c < 1, working
residuals r_t = log(Y*_t) - log(mu_t), and every term whose time index
falls before the first observation contributing zero.  The inverse link is
exp(eta) for Poisson and negative binomial and m * logistic(eta) for
binomial, so the binomial mean stays inside (0, m).

Log-likelihoods include all normalizing constants, so values are
comparable across families and can be checked against textbook pmfs.
All operations are pure functions; nothing here holds mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import _garma_path, _lognorm

POISSON = "poisson"
BINOMIAL = "binomial"
NEGBINOMIAL = "negbinomial"

_FAMILY_CODES = {POISSON: 0, BINOMIAL: 1, NEGBINOMIAL: 2}


class EvaluationError(ValueError):
    """The predictor recursion produced a non-finite eta_t or mu_t.

    `t` is the offending time index, 1-based to match the series convention.
    """

    def __init__(self, t: int):
        self.t = t
        super().__init__(f"non-finite linear predictor or mean at t={t}")


def clip(y: int, c: float) -> float:
    """Floor a count at the clipping constant: max(y, c), always positive."""
    if not 0.0 < c < 1.0:
        raise ValueError("clipping constant must lie in (0, 1)")
    if y < 0:
        raise ValueError("counts must be nonnegative")
    return float(max(y, c))


@dataclass(frozen=True)
class Family:
    """Conditional count distribution with its fixed hyperparameter."""

    tag: str
    m: int | None = None
    k: float | None = None

    def __post_init__(self):
        if self.tag not in _FAMILY_CODES:
            raise ValueError(f"unknown family {self.tag!r}")
        if self.tag == BINOMIAL:
            if self.m is None or self.m < 1 or self.m != int(self.m):
                raise ValueError("binomial family requires integer m >= 1")
            if self.k is not None:
                raise ValueError("k is only meaningful for the negative binomial")
        elif self.tag == NEGBINOMIAL:
            if self.k is None or not self.k > 0:
                raise ValueError("negative binomial family requires k > 0")
            if self.m is not None:
                raise ValueError("m is only meaningful for the binomial")
        else:
            if self.m is not None or self.k is not None:
                raise ValueError("poisson family takes no hyperparameter")

    @staticmethod
    def poisson() -> "Family":
        return Family(POISSON)

    @staticmethod
    def binomial(m: int) -> "Family":
        return Family(BINOMIAL, m=int(m))

    @staticmethod
    def negbinomial(k: float) -> "Family":
        return Family(NEGBINOMIAL, k=float(k))

    @property
    def code(self) -> int:
        return _FAMILY_CODES[self.tag]

    @property
    def param(self) -> float:
        """m or k as a float; 0.0 for Poisson (unused by the kernels)."""
        if self.tag == BINOMIAL:
            return float(self.m)
        if self.tag == NEGBINOMIAL:
            return float(self.k)
        return 0.0


@dataclass(frozen=True)
class CountSeries:
    """Observed counts plus exogenous covariates and the clipping constant."""

    y: np.ndarray
    X: np.ndarray = None  # (n, r); defaults to zero covariates
    c: float = 0.3
    x_names: tuple[str, ...] = ()

    def __post_init__(self):
        y = np.asarray(self.y)
        if y.ndim != 1:
            raise ValueError("y must be one-dimensional")
        if y.size and (np.any(y < 0) or np.any(y != np.floor(y))):
            raise ValueError("y must contain nonnegative integers")
        object.__setattr__(self, "y", y.astype(np.int64))
        X = self.X
        if X is None:
            X = np.zeros((y.shape[0], 0))
        X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError("X must have one row per observation")
        if X.size and not np.isfinite(X).all():
            raise ValueError("covariates must be finite")
        object.__setattr__(self, "X", X)
        if not 0.0 < self.c < 1.0:
            raise ValueError("clipping constant must lie in (0, 1)")
        names = tuple(self.x_names) if self.x_names else tuple(
            f"x{i + 1}" for i in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ValueError("x_names length must match covariate count")
        object.__setattr__(self, "x_names", names)

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def r(self) -> int:
        return int(self.X.shape[1])

    def log_ystar(self) -> np.ndarray:
        """log(max(y, c)) elementwise."""
        return np.log(np.maximum(self.y, self.c))


@dataclass
class ParamState:
    """One point in the union model space: full coefficient vectors plus
    per-coefficient inclusion indicators (alpha is always in the model)."""

    alpha: float = 0.0
    beta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    phi: np.ndarray = field(default_factory=lambda: np.zeros(0))
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    inc_beta: np.ndarray = None
    inc_phi: np.ndarray = None
    inc_theta: np.ndarray = None

    def __post_init__(self):
        self.alpha = float(self.alpha)
        for name in ("beta", "phi", "theta"):
            vec = np.asarray(getattr(self, name), dtype=np.float64).ravel()
            setattr(self, name, vec)
            inc_name = f"inc_{name}"
            inc = getattr(self, inc_name)
            if inc is None:
                inc = (vec != 0.0)
            inc = np.asarray(inc).astype(np.uint8).ravel()
            if inc.shape != vec.shape:
                raise ValueError(f"{inc_name} length must match {name}")
            if np.any((inc == 0) & (vec != 0.0)):
                raise ValueError(f"excluded {name} coefficients must be 0")
            setattr(self, inc_name, inc)

    @staticmethod
    def zeros(r: int = 0, p_max: int = 0, q_max: int = 0) -> "ParamState":
        return ParamState(0.0, np.zeros(r), np.zeros(p_max), np.zeros(q_max))

    @property
    def p_max(self) -> int:
        return int(self.phi.shape[0])

    @property
    def q_max(self) -> int:
        return int(self.theta.shape[0])

    def to_vector(self) -> np.ndarray:
        """Pack as [alpha, beta..., phi..., theta...]."""
        return np.concatenate(([self.alpha], self.beta, self.phi, self.theta))

    def copy(self) -> "ParamState":
        return ParamState(self.alpha, self.beta.copy(), self.phi.copy(),
                          self.theta.copy(), self.inc_beta.copy(),
                          self.inc_phi.copy(), self.inc_theta.copy())


@dataclass(frozen=True)
class MuPath:
    """Linear predictors, conditional means, and working residuals."""

    eta: np.ndarray
    mu: np.ndarray
    resid: np.ndarray


@dataclass(frozen=True)
class PriorSpec:
    """Independent zero-mean normal priors plus the per-coefficient prior
    inclusion probability."""

    sd_alpha: float = 0.3
    sd_phi: float = 0.2
    sd_theta: float = 0.2
    sd_beta: float = 1.0
    inc_prob: float = 0.5

    def __post_init__(self):
        for name in ("sd_alpha", "sd_phi", "sd_theta", "sd_beta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.inc_prob <= 1.0:
            raise ValueError("inc_prob must lie in [0, 1]")


def check_model(params: ParamState, series: CountSeries, family: Family) -> None:
    """Validate that params, series, and family fit together."""
    if params.beta.shape[0] != series.r:
        raise ValueError("beta length must match the covariate count")
    if family.tag == BINOMIAL and series.n and int(series.y.max()) > family.m:
        raise ValueError("binomial data requires all y <= m")


def _pmf_logconst(y: np.ndarray, family: Family) -> np.ndarray:
    """Per-observation normalizing constants of the log-pmf."""
    yf = y.astype(np.float64)
    lgam = np.vectorize(math.lgamma, otypes=[np.float64])
    if family.tag == POISSON:
        return -lgam(yf + 1.0) if y.size else np.zeros(0)
    if family.tag == BINOMIAL:
        m = float(family.m)
        return (lgam(np.full_like(yf, m + 1.0)) - lgam(yf + 1.0)
                - lgam(m - yf + 1.0)) if y.size else np.zeros(0)
    k = float(family.k)
    if not y.size:
        return np.zeros(0)
    return lgam(k + yf) - lgam(yf + 1.0) - math.lgamma(k) + k * math.log(k)


def _run_path(params: ParamState, series: CountSeries, family: Family):
    check_model(params, series, family)
    n = series.n
    yf = series.y.astype(np.float64)
    eta = np.empty(n)
    resid = np.empty(n)
    xb = np.empty(n)
    ll, err = _garma_path(params.to_vector(), series.r, params.p_max,
                          params.q_max, yf, series.log_ystar(),
                          _pmf_logconst(series.y, family), series.X,
                          family.code, family.param, eta, resid, xb)
    return ll, err, eta, resid


def mu_path(params: ParamState, series: CountSeries, family: Family) -> MuPath:
    """Run the predictor recursion over the whole series.

    Raises EvaluationError if any eta_t or mu_t is non-finite.
    """
    _, err, eta, resid = _run_path(params, series, family)
    if err >= 0:
        raise EvaluationError(err + 1)
    if family.tag == BINOMIAL:
        with np.errstate(over="ignore"):
            mu = float(family.m) / (1.0 + np.exp(-eta))
    else:
        mu = np.exp(eta)
    return MuPath(eta=eta, mu=mu, resid=resid)


def log_likelihood(params: ParamState, series: CountSeries, family: Family) -> float:
    """Exact log of the partial likelihood, normalizing constants included.

    Returns -inf (rather than raising) when some pmf term underflows to
    zero; raises EvaluationError when the recursion itself breaks down.
    """
    ll, err, _, _ = _run_path(params, series, family)
    if err >= 0:
        raise EvaluationError(err + 1)
    return float(ll)


def log_prior(params: ParamState, priors: PriorSpec) -> float:
    """Joint normal log-prior over alpha and the included coefficients only.

    Excluded coefficients are not part of the current model's parameter
    space and contribute nothing.
    """
    total = _lognorm(params.alpha, priors.sd_alpha)
    for vec, inc, sd in ((params.beta, params.inc_beta, priors.sd_beta),
                         (params.phi, params.inc_phi, priors.sd_phi),
                         (params.theta, params.inc_theta, priors.sd_theta)):
        for v, i in zip(vec, inc):
            if i:
                total += _lognorm(float(v), sd)
    return float(total)
