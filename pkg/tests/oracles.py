"""Brute-force reference implementations used to check the fast paths.

Everything here is written independently of the package internals: plain
Python floats, a naive double loop for the predictor recursion (working
residuals recomputed inline from the mean path, never cached), and scipy
pmfs for the likelihood terms.
"""

import math

from scipy import stats


def oracle_paths(alpha, beta, phi, theta, y, X, c, family):
    """Naive recursion; returns (etas, mus) as Python lists."""
    tag = family[0]
    n = len(y)
    etas, mus = [], []
    for t in range(n):
        e = alpha
        for i in range(len(beta)):
            e += X[t][i] * beta[i]
        for j in range(len(phi)):
            s = t - j - 1
            if s >= 0:
                xb_s = sum(X[s][i] * beta[i] for i in range(len(beta)))
                e += phi[j] * (math.log(max(y[s], c)) - xb_s)
        for j in range(len(theta)):
            s = t - j - 1
            if s >= 0:
                e += theta[j] * (math.log(max(y[s], c)) - math.log(mus[s]))
        if tag == "binomial":
            m = family[1]
            mu = m * math.exp(e) / (1.0 + math.exp(e))
        else:
            mu = math.exp(e)
        etas.append(e)
        mus.append(mu)
    return etas, mus


def oracle_loglik(alpha, beta, phi, theta, y, X, c, family):
    """Sum of scipy log-pmfs along the oracle mean path."""
    tag = family[0]
    _, mus = oracle_paths(alpha, beta, phi, theta, y, X, c, family)
    total = 0.0
    for t in range(len(y)):
        mu = mus[t]
        if tag == "poisson":
            total += float(stats.poisson.logpmf(y[t], mu))
        elif tag == "binomial":
            m = family[1]
            total += float(stats.binom.logpmf(y[t], m, mu / m))
        else:
            k = family[1]
            total += float(stats.nbinom.logpmf(y[t], k, k / (mu + k)))
    return total


def random_case(rng, families=("poisson", "binomial", "negbinomial"),
                max_n=50, with_covariates=True):
    """One random (model, series) pair for cross-checking.

    Draws are rejected until the predictor path stays inside |eta| <= 10;
    an unstable MA recursion inflates the mean until the log-likelihood
    magnitude swamps a 1e-10 comparison (and eventually overflows).
    """
    while True:
        n = int(rng.integers(1, max_n + 1))
        p = int(rng.integers(0, 4))
        q = int(rng.integers(0, 4))
        r = int(rng.integers(0, 3)) if with_covariates else 0
        alpha = float(rng.uniform(-1.0, 1.0))
        beta = [float(v) for v in rng.uniform(-0.5, 0.5, r)]
        phi = [float(v) for v in rng.uniform(-0.6, 0.6, p)]
        theta = [float(v) for v in rng.uniform(-0.6, 0.6, q)]
        y = [int(v) for v in rng.integers(0, 13, n)]
        X = [[float(v) for v in rng.normal(0.0, 1.0, r)] for _ in range(n)]
        c = float(rng.uniform(0.05, 0.95))
        tag = families[int(rng.integers(0, len(families)))]
        if tag == "poisson":
            family = ("poisson",)
        elif tag == "binomial":
            family = ("binomial", int(rng.integers(13, 25)))
        else:
            family = ("negbinomial", float(rng.uniform(0.5, 10.0)))
        try:
            etas, _ = oracle_paths(alpha, beta, phi, theta, y, X, c, family)
        except (ValueError, OverflowError):
            continue
        if max(abs(e) for e in etas) <= 10.0:
            return alpha, beta, phi, theta, y, X, c, family
