"""Chi-square distribution functions for the block-correlation test.

The central cdf is the regularized lower incomplete gamma function; the
noncentral cdf is its Poisson mixture, truncated once the neglected Poisson
mass drops below 1e-10.  Weights are accumulated in log space so large
noncentrality parameters do not underflow.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .graphs import GraphCorrError

_TAIL_MASS = 1e-10


def chi2_cdf(x: float, df: int) -> float:
    """P(X <= x) for a central chi-square with df degrees of freedom."""
    if df < 1:
        raise GraphCorrError("degrees of freedom must be at least 1")
    if x < 0:
        raise GraphCorrError("chi-square argument must be nonnegative")
    return float(special.gammainc(df / 2.0, x / 2.0))


def chi2_quantile(p: float, df: int) -> float:
    """Inverse of :func:`chi2_cdf` in its first argument."""
    if df < 1:
        raise GraphCorrError("degrees of freedom must be at least 1")
    if not (0.0 < p < 1.0):
        raise GraphCorrError("quantile level must lie in (0, 1)")
    return float(2.0 * special.gammaincinv(df / 2.0, p))


def noncentral_chi2_cdf(x: float, df: int, mu: float) -> float:
    """P(X <= x) for a noncentral chi-square with noncentrality mu.

    Evaluates ``sum_j Pois(j; mu/2) * chi2_cdf(x, df + 2j)`` with enough terms
    that the truncated Poisson tail is below 1e-10.
    """
    if df < 1:
        raise GraphCorrError("degrees of freedom must be at least 1")
    if x < 0:
        raise GraphCorrError("chi-square argument must be nonnegative")
    if mu < 0:
        raise GraphCorrError("noncentrality must be nonnegative")
    if mu == 0.0:
        return chi2_cdf(x, df)
    lam = mu / 2.0
    jmax = int(np.ceil(lam + 12.0 * np.sqrt(lam + 1.0) + 50.0))
    j = np.arange(jmax + 1)
    logw = -lam + j * np.log(lam) - special.gammaln(j + 1)
    w = np.exp(logw)
    while 1.0 - w.sum() > _TAIL_MASS:
        jmax *= 2
        j = np.arange(jmax + 1)
        logw = -lam + j * np.log(lam) - special.gammaln(j + 1)
        w = np.exp(logw)
    val = float(np.sum(w * special.gammainc(df / 2.0 + j, x / 2.0)))
    return min(max(val, 0.0), 1.0)


def sbm_noncentrality(K: int, n: int, r: float) -> float:
    """Limit noncentrality for the uniform-membership blockmodel design.

    With K balanced blocks and block correlations ``r * (1 - |k - l| / K)``
    the block-weighted sum of squared correlations tends to
    ``r^2 * ((K^2 + 1) / (4 K^2) * n^2 - n / 2)``.
    """
    if K < 1:
        raise GraphCorrError("K must be at least 1")
    if n < 2:
        raise GraphCorrError("n must be at least 2")
    return r * r * ((K * K + 1.0) / (4.0 * K * K) * n * n - n / 2.0)


def sbm_theoretical_power(K: int, n: int, r: float, alpha: float) -> float:
    """Limiting rejection probability of the block chi-square test.

    Computes ``1 - F(q; df, mu)`` where ``q`` is the (1 - alpha) central
    quantile, ``df = K(K+1)/2`` and ``mu`` is :func:`sbm_noncentrality`.
    At r = 0 this returns alpha exactly.
    """
    if not (0.0 < alpha < 1.0):
        raise GraphCorrError("alpha must lie in (0, 1)")
    df = K * (K + 1) // 2
    crit = chi2_quantile(1.0 - alpha, df)
    mu = sbm_noncentrality(K, n, r)
    return 1.0 - noncentral_chi2_cdf(crit, df, mu)
