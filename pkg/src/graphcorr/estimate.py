"""Pairwise correlation estimation and the hold-out link-prediction harness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import GraphCorrError, GraphPair, as_adjacency, union_indicator
from .hyptest import block_correlations
from .spectral import UsvtConfig, usvt


class DegenerateTruthError(GraphCorrError):
    """All held-out pairs share one label, so ranking quality is undefined."""


def estimate_R(p_hat: np.ndarray, q_hat: np.ndarray, h_hat: np.ndarray) -> np.ndarray:
    """Recover pairwise correlations from marginal and union-mean estimates.

    Inverts the union-mean identity: the estimate is
    ``(p + q - pq - h) / sqrt(p(1-p)q(1-q))`` clamped into [-1, 1], and 0
    wherever either marginal estimate is exactly 0 or 1.
    """
    p = np.asarray(p_hat, dtype=np.float64)
    q = np.asarray(q_hat, dtype=np.float64)
    h = np.asarray(h_hat, dtype=np.float64)
    if p.shape != q.shape or p.shape != h.shape:
        raise GraphCorrError("estimates must share one shape")
    num = p + q - p * q - h
    var = p * (1.0 - p) * q * (1.0 - q)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(var > 0.0, num / np.sqrt(var), 0.0)
    r = np.clip(r, -1.0, 1.0)
    r = (r + r.T) / 2.0
    np.fill_diagonal(r, 0.0)
    return r


def _block_masks(labels: np.ndarray, n: int, K: int):
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise GraphCorrError("labels must assign one block per vertex")
    if np.any(labels < 1) or np.any(labels > K):
        raise GraphCorrError("labels must take values in 1..K")
    iu = np.triu_indices(n, 1)
    lo = np.minimum(labels[iu[0]], labels[iu[1]])
    hi = np.maximum(labels[iu[0]], labels[iu[1]])
    return iu, lo, hi


def block_mean_R(r_hat: np.ndarray, labels: np.ndarray, K: int) -> np.ndarray:
    """Average estimated correlation per block pair; empty blocks are NaN."""
    r_hat = np.asarray(r_hat, dtype=np.float64)
    n = r_hat.shape[0]
    iu, lo, hi = _block_masks(labels, n, K)
    vals = r_hat[iu]
    out = np.full((K, K), np.nan)
    for k in range(1, K + 1):
        for l in range(k, K + 1):
            mask = (lo == k) & (hi == l)
            if np.any(mask):
                out[k - 1, l - 1] = out[l - 1, k - 1] = float(vals[mask].mean())
    return out


def naive_block_pearson(pair: GraphPair, labels: np.ndarray, K: int) -> np.ndarray:
    """Plain Pearson correlation of binary edges per block pair (NaN if degenerate)."""
    blocks = block_correlations(pair, labels, K)
    out = blocks.rho.copy()
    out[blocks.degenerate] = np.nan
    return out


@dataclass(frozen=True)
class HoldoutMask:
    """A set of held-out vertex pairs, stored as rows (i, j) with i < j."""

    pairs: np.ndarray
    fraction: float

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise GraphCorrError("pairs must be a (k, 2) array")
        if np.any(pairs[:, 0] >= pairs[:, 1]):
            raise GraphCorrError("pairs must satisfy i < j")
        if len({(int(i), int(j)) for i, j in pairs}) != pairs.shape[0]:
            raise GraphCorrError("pairs must be distinct")
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        pairs.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)

    @property
    def size(self) -> int:
        return int(self.pairs.shape[0])

    def indices(self):
        return self.pairs[:, 0], self.pairs[:, 1]


def holdout_mask(n: int, fraction: float, seed: int) -> HoldoutMask:
    """Choose ``round(fraction * n(n-1)/2)`` vertex pairs uniformly at random."""
    if not (0.0 < fraction < 1.0):
        raise GraphCorrError("fraction must lie strictly between 0 and 1")
    npairs = n * (n - 1) // 2
    size = int(round(fraction * npairs))
    if size < 1:
        raise GraphCorrError(f"fraction {fraction} selects no pairs for n={n}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(npairs, size=size, replace=False)
    iu = np.triu_indices(n, 1)
    pairs = np.column_stack((iu[0][chosen], iu[1][chosen]))
    return HoldoutMask(pairs, fraction)


def apply_mask(g: np.ndarray, mask: HoldoutMask) -> np.ndarray:
    """Zero the masked entries (symmetrically); all other entries are untouched."""
    g = as_adjacency(g)
    out = np.array(g)
    i, j = mask.indices()
    out[i, j] = 0.0
    out[j, i] = 0.0
    return as_adjacency(out)


@dataclass(frozen=True)
class RocCurve:
    """A step ROC curve with its trapezoidal area.

    Points run from (0, 0) to (1, 1) and are nondecreasing in both
    coordinates; the area equals the Mann-Whitney statistic with ties
    counted one half.
    """

    points: np.ndarray
    auc: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise GraphCorrError("points must be a (k, 2) array with k >= 2")
        if not (np.allclose(pts[0], [0.0, 0.0]) and np.allclose(pts[-1], [1.0, 1.0])):
            raise GraphCorrError("curve must run from (0,0) to (1,1)")
        if np.any(np.diff(pts, axis=0) < -1e-12):
            raise GraphCorrError("curve coordinates must be nondecreasing")
        area = float(np.trapezoid(pts[:, 1], pts[:, 0]))
        if abs(area - self.auc) > 1e-10:
            raise GraphCorrError("stored area does not match the curve")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def roc_curve(scores: np.ndarray, truth: np.ndarray) -> RocCurve:
    """Sweep a decision threshold over every distinct score.

    ``truth`` holds binary labels; prediction at threshold t is ``score > t``.
    Raises :class:`DegenerateTruthError` when only one label is present.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.float64).ravel()
    if scores.shape != truth.shape or scores.size == 0:
        raise GraphCorrError("scores and truth must be equal-length and nonempty")
    pos = float(truth.sum())
    neg = float(truth.size - pos)
    if pos == 0 or neg == 0:
        raise DegenerateTruthError("held-out truth contains a single class")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    t = truth[order]
    distinct = np.flatnonzero(np.diff(s)) if s.size > 1 else np.array([], dtype=int)
    cut = np.concatenate((distinct, [s.size - 1]))
    tp = np.cumsum(t)[cut]
    fp = np.cumsum(1.0 - t)[cut]
    tpr = np.concatenate(([0.0], tp / pos))
    fpr = np.concatenate(([0.0], fp / neg))
    pts = np.column_stack((fpr, tpr))
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(pts, auc)


def predict_links(
    masked_a: np.ndarray,
    aux: np.ndarray | None,
    mask: HoldoutMask,
    truth: np.ndarray,
    cfg: UsvtConfig = UsvtConfig(),
    exact_conditional: bool = False,
):
    """Score held-out pairs of a graph, optionally helped by a correlated graph.

    Single mode (``aux is None``) scores a pair by its estimated edge
    probability from the masked target graph.  Joint mode estimates the
    auxiliary marginal and the pairwise correlations from masked copies of
    both graphs, then adjusts each score by the auxiliary graph's observed
    entry: ``p + r * (b - p)``, or the exact conditional-probability variant
    ``p + r * sqrt(p(1-p)q(1-q)) * (b - q) / (q(1-q))`` when requested.
    The auxiliary entries on the mask are observable at prediction time, so
    the raw auxiliary graph is used for scoring while estimation only sees
    its masked copy.

    Returns ``(scores, RocCurve)`` with scores aligned to ``mask.pairs``.
    """
    masked_a = as_adjacency(masked_a)
    if mask.size == 0:
        raise GraphCorrError("mask is empty")
    i, j = mask.indices()
    truth = as_adjacency(truth)
    truth_vals = truth[i, j]
    p_sub = usvt(masked_a, cfg)
    if aux is None:
        scores = p_sub[i, j]
        return scores, roc_curve(scores, truth_vals)
    aux = as_adjacency(aux)
    masked_b = apply_mask(aux, mask)
    q_sub = usvt(masked_b, cfg)
    h_sub = usvt(union_indicator(masked_a, masked_b), cfg)
    r_sub = estimate_R(p_sub, q_sub, h_sub)
    p = p_sub[i, j]
    q = q_sub[i, j]
    r = r_sub[i, j]
    b = aux[i, j]
    if exact_conditional:
        var_q = q * (1.0 - q)
        with np.errstate(divide="ignore", invalid="ignore"):
            adj = np.where(
                var_q > 0.0,
                r * np.sqrt(p * (1.0 - p) * var_q) * (b - q) / var_q,
                0.0,
            )
        scores = p + adj
    else:
        scores = p + r * (b - p)
    return scores, roc_curve(scores, truth_vals)
