"""Chain post-processing and posterior diagnostics.

Summaries are computed over the mixed marginal that includes the exact
zeros recorded while a coefficient is excluded; that is what makes the
reported means comparable to spike-and-slab style tables where rarely
included coefficients show near-zero means.

Spectral variances (for ESS and the Geweke z-score) come from an
autoregressive fit: Yule-Walker coefficients with the order chosen by AIC
over 0..min(n - 1, floor(10 * log10(n))), and S(0) = v_p / (1 - sum(ar))^2.
Zero-variance samples get ESS = 0 and an undefined (NaN) Geweke score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import ParamState
from .sampler import ChainOutput


def burn(chain: ChainOutput, n_burn: int) -> ChainOutput:
    """Drop the first n_burn recorded iterations."""
    if not 0 <= n_burn < chain.n_draws:
        raise ValueError("n_burn must satisfy 0 <= n_burn < number of draws")
    if n_burn == 0:
        return chain
    return replace(chain, draws=chain.draws[n_burn:].copy(),
                   indicators=chain.indicators[n_burn:].copy(),
                   n_burn=chain.n_burn + n_burn)


def thin(chain: ChainOutput, lag: int) -> ChainOutput:
    """Keep rows 1, 1 + lag, 1 + 2*lag, ..."""
    if lag < 1:
        raise ValueError("thinning lag must be >= 1")
    if lag == 1:
        return chain
    return replace(chain, draws=chain.draws[::lag].copy(),
                   indicators=chain.indicators[::lag].copy(),
                   thin_lag=chain.thin_lag * lag)


def hpd_interval(sample, level: float) -> tuple[float, float]:
    """Shortest window holding ceil(level * n) sorted sample points.

    Ties go to the smallest lower endpoint.  The small subtraction guards
    against ceil() picking up one extra point from float noise when
    level * n is an exact integer.
    """
    s = np.sort(np.asarray(sample, dtype=np.float64))
    n = s.shape[0]
    if n == 0:
        raise ValueError("empty sample")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    w = max(1, math.ceil(level * n - 1e-9))
    widths = s[w - 1:] - s[:n - w + 1]
    i = int(np.argmin(widths))
    return float(s[i]), float(s[i + w - 1])


def quantile_interval(sample, level: float) -> tuple[float, float]:
    """Equal-tail interval from linear-interpolation (type 7) quantiles."""
    s = np.asarray(sample, dtype=np.float64)
    if s.shape[0] == 0:
        raise ValueError("empty sample")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    lo, hi = np.quantile(s, [(1.0 - level) / 2.0, 1.0 - (1.0 - level) / 2.0])
    return float(lo), float(hi)


def _ar_spectrum_zero(x: np.ndarray) -> float:
    """AR-fit estimate of the spectral density at frequency zero."""
    n = x.shape[0]
    xd = x - x.mean()
    kmax = min(n - 1, int(10.0 * math.log10(n)))
    acvf = np.empty(kmax + 1)
    for lag in range(kmax + 1):
        acvf[lag] = float(xd[:n - lag] @ xd[lag:]) / n
    if acvf[0] <= 0.0:
        return 0.0

    # Levinson-Durbin up to kmax, tracking prediction variance per order
    best_order = 0
    best_aic = n * math.log(acvf[0])
    best_coef_sum = 0.0
    best_v = acvf[0]
    coefs = np.zeros(kmax + 1)
    prev = np.zeros(kmax + 1)
    v = acvf[0]
    for p in range(1, kmax + 1):
        num = acvf[p]
        for j in range(1, p):
            num -= prev[j] * acvf[p - j]
        kp = num / v
        coefs[p] = kp
        for j in range(1, p):
            coefs[j] = prev[j] - kp * prev[p - j]
        v = v * (1.0 - kp * kp)
        if v <= 0.0:
            break
        aic = n * math.log(v) + 2.0 * p
        if aic < best_aic:
            best_aic = aic
            best_order = p
            best_coef_sum = float(coefs[1:p + 1].sum())
            best_v = v
        prev[:p + 1] = coefs[:p + 1]
    if best_order == 0:
        return float(acvf[0])
    denom = (1.0 - best_coef_sum) ** 2
    if denom == 0.0:
        return math.inf
    return best_v / denom


def effective_sample_size(sample) -> float:
    """ESS = n * Var(sample) / S(0) with the AR spectral estimate above."""
    x = np.asarray(sample, dtype=np.float64)
    n = x.shape[0]
    if n < 10:
        raise ValueError("need at least 10 draws for an ESS estimate")
    var = float(x.var(ddof=1))
    if var == 0.0:
        return 0.0
    s0 = _ar_spectrum_zero(x)
    if s0 == 0.0 or math.isinf(s0):
        return 0.0
    return n * var / s0


def geweke_z(sample, frac_first: float = 0.1, frac_last: float = 0.5) -> float:
    """z-score comparing the means of the first and last chain segments.

    |z| < 1.96 is the usual 95% convergence call.  Returns NaN when either
    segment has zero variance (the score is undefined there, not an error).
    """
    x = np.asarray(sample, dtype=np.float64)
    n = x.shape[0]
    if not (0.0 < frac_first < 1.0 and 0.0 < frac_last < 1.0
            and frac_first + frac_last <= 1.0):
        raise ValueError("segment fractions must be positive and sum to <= 1")
    n_a = int(frac_first * n)
    n_b = int(frac_last * n)
    if n_a < 10 or n_b < 10:
        raise ValueError("both segments need at least 10 draws")
    a = x[:n_a]
    b = x[n - n_b:]
    if float(a.var()) == 0.0 or float(b.var()) == 0.0:
        return math.nan
    denom = math.sqrt(_ar_spectrum_zero(a) / n_a + _ar_spectrum_zero(b) / n_b)
    if denom == 0.0:
        return math.nan
    return float((a.mean() - b.mean()) / denom)


@dataclass(frozen=True)
class CoefficientSummary:
    name: str
    mean: float
    median: float
    sd: float
    hpd_lo: float
    hpd_hi: float
    q_lo: float
    q_hi: float
    ess: float
    geweke_z: float
    incl_freq: float


@dataclass(frozen=True)
class PosteriorSummary:
    """Per-coefficient posterior summaries at a fixed credible level."""

    level: float
    coef_names: tuple[str, ...]
    toggleable_names: tuple[str, ...]
    rows: tuple[CoefficientSummary, ...]

    def __getitem__(self, name: str) -> CoefficientSummary:
        return self.rows[self.coef_names.index(name)]

    CSV_HEADER = "name,mean,median,sd,hpd_lo,hpd_hi,q_lo,q_hi,ess,geweke_z,incl_freq"

    def to_csv(self, fh) -> None:
        fh.write(self.CSV_HEADER + "\n")
        for row in self.rows:
            fields = [row.name] + [repr(float(v)) for v in
                                   (row.mean, row.median, row.sd, row.hpd_lo,
                                    row.hpd_hi, row.q_lo, row.q_hi, row.ess,
                                    row.geweke_z, row.incl_freq)]
            fh.write(",".join(fields) + "\n")


def summarize(chain: ChainOutput, level: float = 0.95) -> PosteriorSummary:
    """Summaries over all recorded draws, zeros from excluded iterations
    included."""
    if chain.n_draws == 0:
        raise ValueError("empty chain")
    rows = []
    n = chain.n_draws
    for i, name in enumerate(chain.coef_names):
        col = chain.draws[:, i]
        sd = float(col.std(ddof=1)) if n >= 2 else 0.0
        hpd_lo, hpd_hi = hpd_interval(col, level)
        q_lo, q_hi = quantile_interval(col, level)
        try:
            ess = effective_sample_size(col)
        except ValueError:
            ess = math.nan
        try:
            gz = geweke_z(col)
        except ValueError:
            gz = math.nan
        if name in chain.toggleable_names:
            incl = float(chain.indicator_column(name).mean())
        else:
            incl = 1.0
        rows.append(CoefficientSummary(
            name=name, mean=float(col.mean()), median=float(np.median(col)),
            sd=sd, hpd_lo=hpd_lo, hpd_hi=hpd_hi, q_lo=q_lo, q_hi=q_hi,
            ess=ess, geweke_z=gz, incl_freq=incl))
    return PosteriorSummary(level=level, coef_names=chain.coef_names,
                            toggleable_names=chain.toggleable_names,
                            rows=tuple(rows))


def classify_model(summary: PosteriorSummary, truth: ParamState,
                   interval: str = "hpd") -> bool:
    """True iff every toggleable coefficient's credible interval calls its
    significance correctly against the data-generating truth.

    A nonzero truth must be excluded from the interval; a zero truth must
    be covered by it.  Degenerate (0, 0) intervals cover zero.
    """
    if interval not in ("hpd", "quantile"):
        raise ValueError("interval must be 'hpd' or 'quantile'")
    truth_vec = truth.to_vector()
    if truth_vec.shape[0] != len(summary.coef_names):
        raise ValueError("truth dimensions do not match the summary")
    for name in summary.toggleable_names:
        row = summary[name]
        true_val = float(truth_vec[summary.coef_names.index(name)])
        lo, hi = ((row.hpd_lo, row.hpd_hi) if interval == "hpd"
                  else (row.q_lo, row.q_hi))
        covers_zero = lo <= 0.0 <= hi
        if (true_val != 0.0) == covers_zero:
            return False
    return True
