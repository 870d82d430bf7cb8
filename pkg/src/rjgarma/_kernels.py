"""Jitted numerical kernels: RNG primitives, the GARMA linear-predictor
recursion with its log-likelihood, and the full reversible-jump sweep.

Everything here is deliberately free of Python objects so the whole MCMC
iteration runs inside one nopython region.  The Python-facing modules
(`model`, `sampler`) wrap these with validation and dataclasses.

Family codes: 0 = Poisson, 1 = Binomial(m), 2 = NegBinomial(k); `fampar`
carries m or k (unused for Poisson).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S12 = np.uint64(12)

_LOG_SQRT_2PI = 0.9189385332046727


@njit(cache=True)
def _mix64(x):
    z = x + _GOLDEN
    z = (z ^ (z >> _S30)) * _MIX_A
    z = (z ^ (z >> _S27)) * _MIX_B
    return z ^ (z >> _S31)


@njit(cache=True)
def _next_u64(state):
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX_A
    z = (z ^ (z >> _S27)) * _MIX_B
    return z ^ (z >> _S31)


@njit(cache=True)
def _u01(state):
    # strictly inside (0,1): safe under log() and floor-based index draws
    return (float(_next_u64(state) >> _S12) + 0.5) * (2.0 ** -52)


@njit(cache=True)
def _normal(state):
    u1 = _u01(state)
    u2 = _u01(state)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@njit(cache=True)
def _shuffle_prefix(state, arr, m):
    for i in range(m - 1, 0, -1):
        j = int(_u01(state) * (i + 1))
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@njit(cache=True)
def _lognorm(x, sd):
    return -0.5 * (x / sd) ** 2 - math.log(sd) - _LOG_SQRT_2PI


@njit(cache=True)
def _logsig(x):
    if x >= 0.0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


@njit(cache=True)
def _garma_path(value, r, p_max, q_max, yf, logystar, logconst, X, fam, fampar,
                eta, resid, xb):
    """Run the linear-predictor recursion and accumulate the log-likelihood.

    `value` is the packed coefficient vector [alpha, beta..., phi..., theta...].
    Fills `eta` and `resid` in place; returns (loglik, err_t) where err_t is
    the first 0-based index with a non-finite predictor or mean (-1 if none).
    Terms whose time index falls before the sample start contribute zero.
    """
    n = yf.shape[0]
    alpha = value[0]
    for t in range(n):
        acc = 0.0
        for j in range(r):
            acc += X[t, j] * value[1 + j]
        xb[t] = acc
    if fam == 1:
        logm = math.log(fampar)
    else:
        logm = 0.0
    ll = 0.0
    for t in range(n):
        e = alpha + xb[t]
        for j in range(p_max):
            cj = value[1 + r + j]
            if cj != 0.0:
                s = t - j - 1
                if s >= 0:
                    e += cj * (logystar[s] - xb[s])
        for j in range(q_max):
            cj = value[1 + r + p_max + j]
            if cj != 0.0:
                s = t - j - 1
                if s >= 0:
                    e += cj * resid[s]
        eta[t] = e
        if not math.isfinite(e):
            return -np.inf, t
        if fam == 1:
            ls = _logsig(e)
            logmu = logm + ls
            term = logconst[t] + yf[t] * ls + (fampar - yf[t]) * (ls - e)
        elif fam == 0:
            mu = math.exp(e)
            if mu == np.inf:
                return -np.inf, t
            logmu = e
            term = logconst[t] + yf[t] * e - mu
        else:
            mu = math.exp(e)
            if mu == np.inf:
                return -np.inf, t
            logmu = e
            term = logconst[t] + yf[t] * e - (fampar + yf[t]) * math.log(mu + fampar)
        resid[t] = logystar[t] - logmu
        ll += term
    if math.isnan(ll):
        return -np.inf, -1
    return ll, -1


@njit(cache=True)
def _chain_kernel(yf, logystar, logconst, X, fam, fampar, p_max, q_max,
                  prior_sd, log_inc_odds, rj_scale, rw_scale, iters, seed,
                  toggle_idx, included0, ll_shift):
    """One full reversible-jump chain.

    Per iteration: a jump sweep over the toggleable coefficients in
    shuffled order (each proposes its inclusion state with probability 1/2
    and, on a state change, a birth at Normal(0, rj_scale^2) or the matching
    death), then a random-walk sweep over the currently included
    coefficients in shuffled order.  `ll_shift` is added to every
    log-likelihood evaluation; it exists so tests can verify that accept /
    reject decisions depend only on log-ratios.
    """
    n = yf.shape[0]
    r = X.shape[1]
    d = 1 + r + p_max + q_max
    n_tog = toggle_idx.shape[0]

    value = np.zeros(d)
    included = included0.copy()
    state = np.empty(1, np.uint64)
    state[0] = seed

    eta = np.empty(n)
    resid = np.empty(n)
    xb = np.empty(n)

    draws = np.empty((iters, d))
    indicators = np.empty((iters, n_tog), np.uint8)
    acc_rj = np.zeros(d, np.int64)
    acc_rw = np.zeros(d, np.int64)
    prop_rj = np.zeros(d, np.int64)
    prop_rw = np.zeros(d, np.int64)

    cur_ll, err = _garma_path(value, r, p_max, q_max, yf, logystar, logconst,
                              X, fam, fampar, eta, resid, xb)
    if err >= 0:
        cur_ll = -np.inf
    cur_ll = cur_ll + ll_shift

    order = toggle_idx.copy()
    inc_order = np.empty(d, np.int64)

    for it in range(iters):
        _shuffle_prefix(state, order, n_tog)
        for oi in range(n_tog):
            j = order[oi]
            propose_in = _u01(state) < 0.5
            if propose_in == (included[j] == 1):
                continue
            if propose_in:
                v = _normal(state) * rj_scale
                value[j] = v
                cand_ll, err = _garma_path(value, r, p_max, q_max, yf,
                                           logystar, logconst, X, fam, fampar,
                                           eta, resid, xb)
                if err >= 0:
                    cand_ll = -np.inf
                cand_ll = cand_ll + ll_shift
                logr = (cand_ll - cur_ll) + _lognorm(v, prior_sd[j]) \
                    + log_inc_odds - _lognorm(v, rj_scale)
                prop_rj[j] += 1
                u = _u01(state)
                if math.log(u) < logr:
                    included[j] = 1
                    cur_ll = cand_ll
                    acc_rj[j] += 1
                else:
                    value[j] = 0.0
            else:
                v = value[j]
                value[j] = 0.0
                cand_ll, err = _garma_path(value, r, p_max, q_max, yf,
                                           logystar, logconst, X, fam, fampar,
                                           eta, resid, xb)
                if err >= 0:
                    cand_ll = -np.inf
                cand_ll = cand_ll + ll_shift
                logr = (cand_ll - cur_ll) - _lognorm(v, prior_sd[j]) \
                    - log_inc_odds + _lognorm(v, rj_scale)
                prop_rj[j] += 1
                u = _u01(state)
                if math.log(u) < logr:
                    included[j] = 0
                    cur_ll = cand_ll
                    acc_rj[j] += 1
                else:
                    value[j] = v

        m_inc = 0
        for j in range(d):
            if included[j] == 1:
                inc_order[m_inc] = j
                m_inc += 1
        _shuffle_prefix(state, inc_order, m_inc)
        for oi in range(m_inc):
            j = inc_order[oi]
            old = value[j]
            value[j] = old + _normal(state) * rw_scale
            cand_ll, err = _garma_path(value, r, p_max, q_max, yf, logystar,
                                       logconst, X, fam, fampar, eta, resid,
                                       xb)
            if err >= 0:
                cand_ll = -np.inf
            cand_ll = cand_ll + ll_shift
            logr = (cand_ll - cur_ll) + _lognorm(value[j], prior_sd[j]) \
                - _lognorm(old, prior_sd[j])
            prop_rw[j] += 1
            u = _u01(state)
            if math.log(u) < logr:
                cur_ll = cand_ll
                acc_rw[j] += 1
            else:
                value[j] = old

        for j in range(d):
            draws[it, j] = value[j]
        for c in range(n_tog):
            indicators[it, c] = included[toggle_idx[c]]

    return draws, indicators, acc_rj, acc_rw, prop_rj, prop_rw
