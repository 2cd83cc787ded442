"""Test statistics and calibration for the edge-correlation null hypothesis.

The null states that every pairwise edge correlation is zero.  Four test
families are provided: the low-rank union-indicator statistics for shared and
distinct marginals (calibrated by a parametric bootstrap), the block
chi-square statistic for stochastic blockmodels (calibrated by its limiting
distribution), and the top-eigenvalue statistic for homogeneous marginals.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graphs import GraphCorrError, GraphPair, hadamard, union_indicator
from .samplers import sample_pair
from .spectral import UsvtConfig, _top_components, lambda1, usvt
from .statdist import chi2_cdf, chi2_quantile

METHOD_GRAPHON_SAME = "GraphonSame"
METHOD_GRAPHON_DIFF = "GraphonDiff"
METHOD_SBM_CHI2 = "SbmChi2"
METHOD_LAMBDA1 = "Lambda1"
_BOOTSTRAP_METHODS = (METHOD_GRAPHON_SAME, METHOD_GRAPHON_DIFF, METHOD_LAMBDA1)


class DegenerateBlockWarning(RuntimeWarning):
    """A clustering block had constant edges in one graph; it contributes 0."""


@dataclass(frozen=True)
class TestReport:
    """Outcome of one hypothesis test.

    The decision always compares the statistic against the stored critical
    value (strictly, so ties never reject): the bootstrap percentile for the
    resampling methods, the distribution quantile for the chi-square method.
    At the default calibration (m = 99 null draws, alpha = 0.05) this
    coincides with ``p_value < alpha``.
    """

    statistic: float
    p_value: float | None
    reject: bool
    alpha: float
    method: str
    m: int | None = None
    seed: int | None = None
    critical_value: float | None = None

    def __post_init__(self):
        if self.critical_value is not None:
            expected = self.statistic > self.critical_value
        elif self.p_value is not None:
            expected = self.p_value < self.alpha
        else:
            return
        if self.reject != expected:
            raise GraphCorrError("reject flag inconsistent with calibration rule")

    def to_json(self) -> str:
        """Serialize with the fixed wire field names."""
        return json.dumps(
            {
                "statistic": self.statistic,
                "p_value": self.p_value,
                "reject": bool(self.reject),
                "alpha": self.alpha,
                "method": self.method,
                "m": self.m,
                "seed": self.seed,
            }
        )


def _frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, "fro"))


def graphon_stat_same(pair: GraphPair, cfg: UsvtConfig = UsvtConfig()) -> float:
    """Union-indicator discrepancy statistic when both marginals coincide.

    With ``Phat`` the average of the two per-graph estimates and ``Hhat`` the
    estimate from the union indicator, returns
    ``|| Hhat - 2 Phat + Phat o Phat ||_F``, which targets zero under
    independence.
    """
    return _stat_same_with_estimates(pair, cfg)[0]


def _stat_same_with_estimates(pair, cfg):
    p1 = usvt(pair.a, cfg)
    p2 = usvt(pair.b, cfg)
    phat = (p1 + p2) / 2.0
    hhat = usvt(union_indicator(pair.a, pair.b), cfg)
    return _frobenius(hhat - 2.0 * phat + phat * phat), phat


def graphon_stat_diff(pair: GraphPair, cfg: UsvtConfig = UsvtConfig()) -> float:
    """Union-indicator discrepancy statistic for distinct marginals.

    Returns ``|| Hhat - Phat - Qhat + Phat o Qhat ||_F``; the union mean
    exceeds the independence prediction exactly by the correlation term, so
    this vanishes under the null.
    """
    return _stat_diff_with_estimates(pair, cfg)[0]


def _stat_diff_with_estimates(pair, cfg):
    phat = usvt(pair.a, cfg)
    qhat = usvt(pair.b, cfg)
    hhat = usvt(union_indicator(pair.a, pair.b), cfg)
    return _frobenius(hhat - phat - qhat + phat * qhat), phat, qhat


def max_degree(adj: np.ndarray) -> float:
    return float(np.max(adj.sum(axis=1))) if adj.shape[0] else 0.0


def normalized_stat(
    t_tilde: float, pair: GraphPair, alpha_exp: float, log_factor: bool = True
) -> float:
    """Scale a raw statistic by the smoothness-dependent degree factor.

    Divides by ``Delta**alpha_exp * sqrt(log n)`` where ``Delta`` is the
    average of the two maximum degrees.  ``log_factor=False`` gives the
    smooth-link variant that drops the logarithmic factor.
    """
    if not (0.0 < alpha_exp < 1.0):
        raise GraphCorrError("exponent must lie in (0, 1)")
    delta = (max_degree(pair.a) + max_degree(pair.b)) / 2.0
    if delta <= 0:
        raise GraphCorrError("both graphs are empty; degree normalization undefined")
    denom = delta**alpha_exp
    if log_factor:
        denom *= math.sqrt(math.log(pair.n))
    return t_tilde / denom


def bootstrap_pvalue(statistic: float, null_stats: np.ndarray, m: int) -> float:
    """Mid-rank bootstrap p-value ``(t - 0.5) / m`` with ``t`` the count of
    null draws at least as large as the statistic, plus one, capped at m."""
    t = min(int(np.sum(null_stats >= statistic)) + 1, m)
    return (t - 0.5) / m


def bootstrap_critical_value(null_stats: np.ndarray, m: int, alpha: float) -> float:
    """The ceil((1 - alpha) m)-th smallest null draw."""
    order = np.sort(null_stats)
    idx = int(np.ceil((1.0 - alpha) * m)) - 1
    return float(order[min(max(idx, 0), m - 1)])


def _bootstrap_report(method, statistic, null_stats, m, alpha, seed):
    null_stats = np.asarray(null_stats)
    p = bootstrap_pvalue(statistic, null_stats, m)
    crit = bootstrap_critical_value(null_stats, m, alpha)
    return TestReport(
        statistic=float(statistic),
        p_value=float(p),
        reject=bool(statistic > crit),
        alpha=alpha,
        method=method,
        m=m,
        seed=seed,
        critical_value=crit,
    )


def bootstrap_test_same(
    pair: GraphPair,
    cfg: UsvtConfig = UsvtConfig(),
    m: int = 99,
    alpha: float = 0.05,
    seed: int = 0,
) -> TestReport:
    """Shared-marginal union statistic calibrated by a parametric bootstrap.

    Null replicate ``s`` redraws an independent pair from the pooled marginal
    estimate with seed ``seed + s`` and recomputes the statistic through the
    same pipeline; the p-value is the mid-rank of the observed statistic.
    """
    if m < 1:
        raise GraphCorrError("bootstrap sample count m must be at least 1")
    if not (0.0 < alpha < 1.0):
        raise GraphCorrError("alpha must lie in (0, 1)")
    statistic, phat = _stat_same_with_estimates(pair, cfg)
    marginal = np.clip(np.array(phat), 0.0, 1.0)
    np.fill_diagonal(marginal, 0.0)
    null_stats = np.empty(m)
    for s in range(1, m + 1):
        resampled = sample_pair(marginal, None, 0.0, seed + s)
        null_stats[s - 1] = graphon_stat_same(resampled, cfg)
    return _bootstrap_report(METHOD_GRAPHON_SAME, statistic, null_stats, m, alpha, seed)


def bootstrap_test_diff(
    pair: GraphPair,
    cfg: UsvtConfig = UsvtConfig(),
    m: int = 99,
    seed: int = 0,
    alpha: float = 0.05,
) -> TestReport:
    """Distinct-marginal union statistic calibrated by a parametric bootstrap."""
    if m < 1:
        raise GraphCorrError("bootstrap sample count m must be at least 1")
    if not (0.0 < alpha < 1.0):
        raise GraphCorrError("alpha must lie in (0, 1)")
    statistic, phat, qhat = _stat_diff_with_estimates(pair, cfg)
    pm = np.clip(np.array(phat), 0.0, 1.0)
    qm = np.clip(np.array(qhat), 0.0, 1.0)
    np.fill_diagonal(pm, 0.0)
    np.fill_diagonal(qm, 0.0)
    null_stats = np.empty(m)
    for s in range(1, m + 1):
        resampled = sample_pair(pm, qm, 0.0, seed + s)
        null_stats[s - 1] = graphon_stat_diff(resampled, cfg)
    return _bootstrap_report(METHOD_GRAPHON_DIFF, statistic, null_stats, m, alpha, seed)


def _kmeans_once(X, K, rng):
    n = X.shape[0]
    centers = np.empty((K, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    for j in range(1, K):
        d2 = np.min(((X[:, None, :] - centers[None, :j, :]) ** 2).sum(-1), axis=1)
        total = d2.sum()
        if total <= 0:
            centers[j] = X[rng.integers(n)]
        else:
            centers[j] = X[rng.choice(n, p=d2 / total)]
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(300):
        dists = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
        new_labels = np.argmin(dists, axis=1)
        for j in range(K):
            mask = new_labels == j
            if np.any(mask):
                centers[j] = X[mask].mean(axis=0)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    inertia = float(((X - centers[labels]) ** 2).sum())
    return labels, inertia


def spectral_cluster(C: np.ndarray, K: int, seed: int, restarts: int = 20) -> np.ndarray:
    """Cluster vertices from the top-K spectral embedding of an adjacency matrix.

    The embedding is the top-K eigenvectors (by absolute eigenvalue) scaled by
    the square root of the absolute eigenvalues, clustered with k-means++ over
    the given number of seeded restarts; the lowest-inertia run wins, ties
    going to the earliest restart.  Labels take values in 1..K.
    """
    C = np.asarray(C, dtype=np.float64)
    n = C.shape[0]
    if K < 1:
        raise GraphCorrError("K must be at least 1")
    if K > n:
        raise GraphCorrError(f"cannot split {n} vertices into {K} communities")
    if K == 1:
        return np.ones(n, dtype=np.int64)
    w, V = _top_components(C, K)
    X = V * np.sqrt(np.abs(w))
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        labels, inertia = _kmeans_once(X, K, rng)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels + 1


class BlockCorrelations(NamedTuple):
    """Per-block Pearson edge correlations with pair counts and degeneracy flags."""

    rho: np.ndarray
    counts: np.ndarray
    degenerate: np.ndarray


def block_correlations(pair: GraphPair, labels: np.ndarray, K: int) -> BlockCorrelations:
    """Pearson correlation of paired edge indicators within each block pair.

    Counts follow the block sizes: ``n_k (n_k - 1) / 2`` on the diagonal and
    ``n_k n_l`` off it.  Blocks with no pairs or constant edges in either
    graph are flagged degenerate and get correlation 0.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n = pair.n
    if labels.shape != (n,):
        raise GraphCorrError("labels must assign one block per vertex")
    if np.any(labels < 1) or np.any(labels > K):
        raise GraphCorrError("labels must take values in 1..K")
    iu = np.triu_indices(n, 1)
    a, b = pair.a[iu], pair.b[iu]
    lo_lab = np.minimum(labels[iu[0]], labels[iu[1]])
    hi_lab = np.maximum(labels[iu[0]], labels[iu[1]])
    sizes = np.bincount(labels, minlength=K + 1)
    rho = np.zeros((K, K))
    counts = np.zeros((K, K), dtype=np.int64)
    degenerate = np.zeros((K, K), dtype=bool)
    for k in range(1, K + 1):
        for l in range(k, K + 1):
            cnt = (
                sizes[k] * (sizes[k] - 1) // 2 if k == l else int(sizes[k]) * sizes[l]
            )
            counts[k - 1, l - 1] = counts[l - 1, k - 1] = cnt
            if cnt == 0:
                degenerate[k - 1, l - 1] = degenerate[l - 1, k - 1] = True
                continue
            mask = (lo_lab == k) & (hi_lab == l)
            av, bv = a[mask], b[mask]
            va = av.var()
            vb = bv.var()
            if va <= 0.0 or vb <= 0.0:
                degenerate[k - 1, l - 1] = degenerate[l - 1, k - 1] = True
                continue
            cov = float(np.mean((av - av.mean()) * (bv - bv.mean())))
            val = cov / math.sqrt(va * vb)
            rho[k - 1, l - 1] = rho[l - 1, k - 1] = val
    return BlockCorrelations(rho, counts, degenerate)


def sbm_chi2_test(
    pair: GraphPair, K: int, alpha: float = 0.05, seed: int = 0
) -> TestReport:
    """Block chi-square independence test for blockmodel pairs.

    Clusters the union indicator into K communities, computes the count-
    weighted sum of squared block correlations, and compares it to the
    chi-square distribution with K(K+1)/2 degrees of freedom.
    """
    if not (0.0 < alpha < 1.0):
        raise GraphCorrError("alpha must lie in (0, 1)")
    labels = spectral_cluster(union_indicator(pair.a, pair.b), K, seed)
    blocks = block_correlations(pair, labels, K)
    nonempty_degenerate = blocks.degenerate & (blocks.counts > 0)
    if np.any(np.triu(nonempty_degenerate)):
        warnings.warn(
            "constant-edge blocks contribute 0 to the statistic",
            DegenerateBlockWarning,
        )
    tri = np.triu_indices(K)
    statistic = float(np.sum(blocks.counts[tri] * blocks.rho[tri] ** 2))
    df = K * (K + 1) // 2
    crit = chi2_quantile(1.0 - alpha, df)
    p = 1.0 - chi2_cdf(statistic, df)
    return TestReport(
        statistic=statistic,
        p_value=float(p),
        reject=bool(statistic > crit),
        alpha=alpha,
        method=METHOD_SBM_CHI2,
        m=None,
        seed=seed,
        critical_value=float(crit),
    )


def pooled_density(pair: GraphPair) -> float:
    """Edge frequency pooled over both graphs: mean of ``a_ij + b_ij`` halves."""
    n = pair.n
    iu = np.triu_indices(n, 1)
    return float((pair.a[iu] + pair.b[iu]).sum() / (n * (n - 1)))


def lambda1_statistic(pair: GraphPair) -> float:
    """Top-eigenvalue discrepancy ``| lambda1(A o B) - n * phat^2 |``."""
    s = hadamard(pair.a, pair.b)
    phat = pooled_density(pair)
    return abs(lambda1(s) - pair.n * phat * phat)


def lambda1_test(
    pair: GraphPair,
    alpha: float = 0.05,
    m: int = 99,
    seed: int = 0,
    threshold: float | None = None,
) -> TestReport:
    """Top-eigenvalue test for homogeneous marginals.

    With an explicit ``threshold`` the decision is a straight comparison and
    no p-value is produced.  Otherwise the null is calibrated by a parametric
    bootstrap of independent homogeneous pairs at the pooled density.
    """
    if not (0.0 < alpha < 1.0):
        raise GraphCorrError("alpha must lie in (0, 1)")
    statistic = lambda1_statistic(pair)
    if threshold is not None:
        return TestReport(
            statistic=statistic,
            p_value=None,
            reject=bool(statistic > threshold),
            alpha=alpha,
            method=METHOD_LAMBDA1,
            m=None,
            seed=seed,
            critical_value=float(threshold),
        )
    if m < 1:
        raise GraphCorrError("bootstrap sample count m must be at least 1")
    n = pair.n
    phat = pooled_density(pair)
    marginal = np.full((n, n), phat)
    np.fill_diagonal(marginal, 0.0)
    null_stats = np.empty(m)
    for s in range(1, m + 1):
        resampled = sample_pair(marginal, None, 0.0, seed + s)
        null_stats[s - 1] = lambda1_statistic(resampled)
    return _bootstrap_report(METHOD_LAMBDA1, statistic, null_stats, m, alpha, seed)


class SecondMoment(NamedTuple):
    """Log-scale value and (possibly overflowing) plain value of the product."""

    log_value: float
    product: float


def second_moment(R: np.ndarray) -> SecondMoment:
    """Likelihood-ratio second moment ``prod_{i<j} (1 + R_ij^2)``.

    Returned on the log scale as ``sum log(1 + R_ij^2)`` together with the
    exponentiated product, which may overflow to infinity for large matrices.
    """
    R = np.asarray(R, dtype=np.float64)
    iu = np.triu_indices(R.shape[0], 1)
    log_value = float(np.sum(np.log1p(R[iu] ** 2)))
    try:
        product = math.exp(log_value)
    except OverflowError:
        product = math.inf
    return SecondMoment(log_value, product)
