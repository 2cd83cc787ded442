"""Exact joint edge distributions and samplers for correlated graph pairs.

Every generator takes an explicit 64-bit ``seed`` and is a pure function of
its arguments, so replicate ``r`` of an experiment can use ``base_seed + r``
and results are independent of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import (
    GraphCorrError,
    GraphPair,
    abs_diff,
    as_adjacency,
    as_corr_matrix,
    as_prob_matrix,
)

PMF_TOL = 1e-12


class InvalidCorrelationError(GraphCorrError):
    """A (p, q, r) triple has no valid bivariate Bernoulli distribution."""


@dataclass(frozen=True)
class JointEdgeDistribution:
    """The four-outcome pmf of one edge pair ``(A_ij, B_ij)``.

    Outcomes are ordered (1,1), (1,0), (0,1), (0,0).
    """

    p11: float
    p10: float
    p01: float
    p00: float

    def __post_init__(self):
        probs = (self.p11, self.p10, self.p01, self.p00)
        if any(p < -PMF_TOL or p > 1 + PMF_TOL for p in probs):
            raise InvalidCorrelationError(f"outcome probability outside [0,1]: {probs}")
        if abs(sum(probs) - 1.0) > PMF_TOL:
            raise InvalidCorrelationError(f"outcome probabilities sum to {sum(probs)}")

    @property
    def marginal_a(self) -> float:
        return self.p11 + self.p10

    @property
    def marginal_b(self) -> float:
        return self.p11 + self.p01

    @property
    def correlation(self) -> float:
        """Pearson correlation of the two indicator variables (0 if degenerate)."""
        p, q = self.marginal_a, self.marginal_b
        var = p * (1 - p) * q * (1 - q)
        if var <= 0:
            return 0.0
        return (self.p11 - p * q) / np.sqrt(var)

    def as_tuple(self) -> tuple:
        return (self.p11, self.p10, self.p01, self.p00)


def joint_pmf(p: float, q: float, r: float) -> JointEdgeDistribution:
    """Bivariate Bernoulli pmf with marginals (p, q) and Pearson correlation r.

    The four outcomes are ``pq + r*s``, ``p(1-q) - r*s``, ``(1-p)q - r*s`` and
    ``(1-p)(1-q) + r*s`` with ``s = sqrt(p(1-p)q(1-q))``.  Degenerate marginals
    (p or q in {0, 1}) force ``s = 0`` and only ``r = 0`` is accepted, since
    the correlation is undefined there.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise InvalidCorrelationError(f"marginals must lie in [0,1], got ({p}, {q})")
    if not (-1.0 <= r <= 1.0):
        raise InvalidCorrelationError(f"correlation must lie in [-1,1], got {r}")
    degenerate = p in (0.0, 1.0) or q in (0.0, 1.0)
    if degenerate and r != 0.0:
        raise InvalidCorrelationError(
            f"degenerate marginal ({p}, {q}) admits only r=0, got r={r}"
        )
    s = float(np.sqrt(p * (1 - p) * q * (1 - q)))
    rs = r * s
    probs = (p * q + rs, p * (1 - q) - rs, (1 - p) * q - rs, (1 - p) * (1 - q) + rs)
    if any(v < -PMF_TOL or v > 1 + PMF_TOL for v in probs):
        lo, hi = correlation_bounds(p, q)
        raise InvalidCorrelationError(
            f"r={r} outside valid range [{lo:.6g}, {hi:.6g}] for marginals ({p}, {q})"
        )
    clipped = tuple(min(max(v, 0.0), 1.0) for v in probs)
    return JointEdgeDistribution(*clipped)


def correlation_bounds(p: float, q: float) -> tuple:
    """Exact interval of correlations r for which ``joint_pmf(p, q, r)`` is valid.

    Returns ``(lo, hi)`` with
    ``lo = -min(sqrt(pq/((1-p)(1-q))), sqrt((1-p)(1-q)/(pq)))`` and
    ``hi = min(sqrt(p(1-q)/(q(1-p))), sqrt(q(1-p)/(p(1-q))))``.
    Marginals at 0 or 1 return ``(0.0, 0.0)`` by convention.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise InvalidCorrelationError(f"marginals must lie in [0,1], got ({p}, {q})")
    if p in (0.0, 1.0) or q in (0.0, 1.0):
        return (0.0, 0.0)
    odds_p = p / (1 - p)
    odds_q = q / (1 - q)
    lo = -min(np.sqrt(odds_p * odds_q), np.sqrt(1.0 / (odds_p * odds_q)))
    hi = min(np.sqrt(odds_p / odds_q), np.sqrt(odds_q / odds_p))
    return (float(lo), float(hi))


def _outcome_arrays(p, q, r):
    """Vectorized outcome probabilities; returns (p11, p10, p01, invalid mask)."""
    s = np.sqrt(np.maximum(p * (1 - p) * q * (1 - q), 0.0))
    rs = r * s
    p11 = p * q + rs
    p10 = p * (1 - q) - rs
    p01 = (1 - p) * q - rs
    p00 = (1 - p) * (1 - q) + rs
    invalid = np.zeros(p.shape, dtype=bool)
    for arr in (p11, p10, p01, p00):
        invalid |= (arr < -PMF_TOL) | (arr > 1 + PMF_TOL)
    # degenerate marginals admit only r == 0
    invalid |= ((p == 0) | (p == 1) | (q == 0) | (q == 1)) & (r != 0)
    return p11, p10, p01, invalid


def correlation_bounds_arrays(p, q):
    """Vectorized :func:`correlation_bounds`; degenerate entries get (0, 0)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    interior = (p > 0) & (p < 1) & (q > 0) & (q < 1)
    lo = np.zeros_like(p)
    hi = np.zeros_like(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        op = np.where(interior, p / (1 - p), 1.0)
        oq = np.where(interior, q / (1 - q), 1.0)
        lo[interior] = -np.minimum(np.sqrt(op * oq), np.sqrt(1.0 / (op * oq)))[interior]
        hi[interior] = np.minimum(np.sqrt(op / oq), np.sqrt(oq / op))[interior]
    return lo, hi


def sample_pair(P, Q, R, seed: int) -> GraphPair:
    """Draw an edge-correlated graph pair with the given marginals.

    Upper-triangular edge pairs are drawn independently from the joint pmf of
    ``(P_ij, Q_ij, R_ij)`` and mirrored.  Scalar ``R`` broadcasts; when
    ``Q is None`` both graphs share the marginal ``P``.
    """
    return _sample_pair_rng(P, Q, R, np.random.default_rng(seed))


def _sample_pair_rng(P, Q, R, rng) -> GraphPair:
    P = as_prob_matrix(P)
    n = P.shape[0]
    Q = P if Q is None else as_prob_matrix(Q)
    if np.isscalar(R):
        Rm = np.full((n, n), float(R))
        np.fill_diagonal(Rm, 0.0)
        R = Rm
    R = as_corr_matrix(R)
    if Q.shape != P.shape or R.shape != P.shape:
        raise GraphCorrError("P, Q and R must share the same shape")

    iu = np.triu_indices(n, 1)
    p, q, r = P[iu], Q[iu], R[iu]
    p11, p10, p01, invalid = _outcome_arrays(p, q, r)
    if np.any(invalid):
        k = int(np.flatnonzero(invalid)[0])
        i, j = int(iu[0][k]), int(iu[1][k])
        raise InvalidCorrelationError(
            f"invalid (p, q, r)=({p[k]:.6g}, {q[k]:.6g}, {r[k]:.6g}) at pair ({i}, {j})"
        )

    u = rng.random(p.shape[0])
    c1 = u < p11
    c2 = u < p11 + p10
    c3 = u < p11 + p10 + p01
    a_vals = np.where(c2, 1.0, 0.0)  # (1,1) or (1,0)
    b_vals = np.where(c1, 1.0, np.where(c2, 0.0, np.where(c3, 1.0, 0.0)))
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    a[iu] = a_vals
    b[iu] = b_vals
    return GraphPair(a + a.T, b + b.T)


@dataclass(frozen=True)
class SbmSpec:
    """A pair of correlated stochastic blockmodels with shared memberships.

    Block-level marginals are ``rho * theta_p`` and ``rho * theta_q``; block
    correlations are ``theta_r``.  Memberships ``tau`` (values 1..K) may be
    given explicitly, or left ``None`` with ``n`` set, in which case each
    vertex is assigned uniformly at random when sampling.
    """

    K: int
    theta_p: np.ndarray
    theta_q: np.ndarray
    theta_r: np.ndarray
    rho: float = 1.0
    tau: np.ndarray | None = None
    n: int | None = None

    def __post_init__(self):
        for name in ("theta_p", "theta_q", "theta_r"):
            m = np.asarray(getattr(self, name), dtype=np.float64)
            if m.shape != (self.K, self.K):
                raise GraphCorrError(f"{name} must be {self.K}x{self.K}")
            if not np.allclose(m, m.T):
                raise GraphCorrError(f"{name} must be symmetric")
            object.__setattr__(self, name, m)
        if np.any(self.theta_p < 0) or np.any(self.theta_p > 1):
            raise GraphCorrError("theta_p entries must lie in [0, 1]")
        if np.any(self.theta_q < 0) or np.any(self.theta_q > 1):
            raise GraphCorrError("theta_q entries must lie in [0, 1]")
        if np.any(np.abs(self.theta_r) > 1):
            raise GraphCorrError("theta_r entries must lie in [-1, 1]")
        if not (0.0 <= self.rho <= 1.0):
            raise GraphCorrError("rho must lie in [0, 1]")
        if (self.tau is None) == (self.n is None):
            raise GraphCorrError("exactly one of tau and n must be given")
        if self.tau is not None:
            tau = np.asarray(self.tau, dtype=np.int64)
            if tau.ndim != 1 or np.any(tau < 1) or np.any(tau > self.K):
                raise GraphCorrError("tau values must lie in 1..K")
            object.__setattr__(self, "tau", tau)
        elif self.n < 1:
            raise GraphCorrError("n must be positive")
        # every block pair must define a valid joint pmf
        bp = self.rho * self.theta_p
        bq = self.rho * self.theta_q
        lo, hi = correlation_bounds_arrays(bp, bq)
        bad = (self.theta_r < lo - PMF_TOL) | (self.theta_r > hi + PMF_TOL)
        if np.any(bad):
            k, l = np.argwhere(bad)[0]
            raise InvalidCorrelationError(
                f"block ({k + 1}, {l + 1}): correlation {self.theta_r[k, l]:.6g} "
                f"outside [{lo[k, l]:.6g}, {hi[k, l]:.6g}]"
            )

    @property
    def size(self) -> int:
        return int(self.n) if self.tau is None else int(self.tau.shape[0])


def random_memberships(n: int, K: int, seed: int) -> np.ndarray:
    """Assign each of n vertices to one of K blocks uniformly at random."""
    return np.random.default_rng(seed).integers(1, K + 1, size=n)


def sbm_matrices(spec: SbmSpec, tau: np.ndarray | None = None):
    """Expand an :class:`SbmSpec` into full (P, Q, R) matrices."""
    if tau is None:
        if spec.tau is None:
            raise GraphCorrError("spec has no memberships; pass tau explicitly")
        tau = spec.tau
    idx = np.asarray(tau, dtype=np.int64) - 1
    P = spec.rho * spec.theta_p[np.ix_(idx, idx)]
    Q = spec.rho * spec.theta_q[np.ix_(idx, idx)]
    R = spec.theta_r[np.ix_(idx, idx)].copy()
    np.fill_diagonal(R, 0.0)
    return P, Q, R


def sample_sbm_pair(spec: SbmSpec, seed: int) -> GraphPair:
    """Sample a correlated SBM pair; memberships are drawn first if random."""
    rng = np.random.default_rng(seed)
    if spec.tau is None:
        tau = rng.integers(1, spec.K + 1, size=spec.size)
    else:
        tau = spec.tau
    P, Q, R = sbm_matrices(spec, tau)
    return _sample_pair_rng(P, Q, R, rng)


def cosine_link(X: np.ndarray) -> np.ndarray:
    """Absolute cosine similarity halved: entries ``|x_i . x_j| / (2 |x_i||x_j|)``."""
    G = X @ X.T
    norms = np.sqrt(np.diag(G))
    P = np.abs(G) / (2.0 * np.outer(norms, norms))
    np.fill_diagonal(P, 0.0)
    return P


def gaussian_link(X: np.ndarray) -> np.ndarray:
    """Gaussian kernel halved: entries ``exp(-|x_i - x_j|^2) / 2``."""
    sq = np.sum(X**2, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X @ X.T), 0.0)
    P = np.exp(-d2) / 2.0
    np.fill_diagonal(P, 0.0)
    return P


_LINKS = {"cosine": cosine_link, "gaussian": gaussian_link}


@dataclass(frozen=True)
class GraphonSpec:
    """Latent-position model for a correlated pair.

    The first marginal is ``rho * h(X_i, X_j)`` with ``X_i`` iid standard
    normal in dimension ``d`` and ``h`` a named link ("cosine" or "gaussian")
    or a precomputed n-by-n table.  When ``q_link`` is set the second graph
    gets its own marginal ``q_rho * h2(Y_i, Y_j)`` from an independent latent
    collection in dimension ``d2``; otherwise both share the first marginal.
    Correlations are ``gamma * g`` where ``g`` is a constant or an n-by-n
    table.  With ``clamp_correlation`` the correlation is clamped pairwise
    into its exact valid interval; otherwise invalid pairs raise.
    """

    n: int
    link: str | np.ndarray = "cosine"
    d: int = 2
    rho: float = 1.0
    q_link: str | np.ndarray | None = None
    d2: int = 2
    q_rho: float | None = None
    g: float | np.ndarray = 0.0
    gamma: float = 1.0
    clamp_correlation: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise GraphCorrError("n must be at least 2")
        if self.d < 1 or self.d2 < 1:
            raise GraphCorrError("latent dimensions must be positive")
        if not (0.0 <= self.rho <= 1.0):
            raise GraphCorrError("rho must lie in [0, 1]")
        for name in ("link", "q_link"):
            v = getattr(self, name)
            if isinstance(v, str) and v not in _LINKS:
                raise GraphCorrError(f"unknown link {v!r}; choose from {sorted(_LINKS)}")

    def _marginal(self, kind, scale, dim, rng):
        if isinstance(kind, str):
            X = rng.standard_normal((self.n, dim))
            return scale * _LINKS[kind](X)
        table = as_prob_matrix(np.asarray(kind, dtype=np.float64) * scale)
        if table.shape[0] != self.n:
            raise GraphCorrError("link table size does not match n")
        return np.array(table)

    def build_matrices(self, seed: int):
        """Draw latents and return the induced (P, Q, R) for one replicate."""
        return self._build_matrices_rng(np.random.default_rng(seed))

    def _build_matrices_rng(self, rng):
        P = self._marginal(self.link, self.rho, self.d, rng)
        if self.q_link is None:
            Q = P
        else:
            q_rho = self.rho if self.q_rho is None else self.q_rho
            Q = self._marginal(self.q_link, q_rho, self.d2, rng)
        if np.isscalar(self.g):
            R = np.full((self.n, self.n), self.gamma * float(self.g))
        else:
            R = self.gamma * np.asarray(self.g, dtype=np.float64)
        np.fill_diagonal(R, 0.0)
        if self.clamp_correlation:
            lo, hi = correlation_bounds_arrays(P, Q)
            R = np.clip(R, lo, hi)
            np.fill_diagonal(R, 0.0)
        return P, Q, R


def sample_graphon_pair(spec: GraphonSpec, seed: int) -> GraphPair:
    """Sample a latent-position pair; latents are redrawn per call from seed."""
    rng = np.random.default_rng(seed)
    P, Q, R = spec._build_matrices_rng(rng)
    return _sample_pair_rng(P, Q, R, rng)


def sample_planted_clique(n: int, p: float, s0: int, seed: int):
    """ER(n, p) graph with a uniformly chosen s0-clique forced complete.

    Returns ``(adjacency, clique)`` where ``clique`` is a sorted integer array
    of the planted vertices.
    """
    if not (0 <= s0 <= n):
        raise GraphCorrError(f"clique size {s0} outside [0, {n}]")
    if not (0.0 <= p <= 1.0):
        raise GraphCorrError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    s = np.zeros((n, n))
    s[iu] = (rng.random(iu[0].shape[0]) < p).astype(np.float64)
    clique = np.sort(rng.choice(n, size=s0, replace=False))
    if s0 >= 2:
        ix = np.ix_(clique, clique)
        s[ix] = 1.0
        s = np.triu(s, 1)
    s = s + s.T
    return as_adjacency(s), clique


def planted_clique_to_pair(S: np.ndarray, seed: int) -> GraphPair:
    """Map a planted-clique instance to a correlated ER(1/2) pair.

    Where ``S_ij = 0`` both graphs copy one fair coin (perfect agreement);
    where ``S_ij = 1`` exactly one of the two graphs gets the edge, each with
    probability 1/2 (perfect disagreement).  Both marginals are ER(1/2).
    """
    S = as_adjacency(S)
    n = S.shape[0]
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    s = S[iu]
    coin = (rng.random(s.shape[0]) < 0.5).astype(np.float64)
    a_vals = coin
    b_vals = np.where(s == 0, coin, 1.0 - coin)
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    a[iu] = a_vals
    b[iu] = b_vals
    return GraphPair(a + a.T, b + b.T)


def pair_to_clique_instance(pair: GraphPair) -> np.ndarray:
    """Collapse a pair to the entrywise disagreement graph ``|A - B|``."""
    return abs_diff(pair.a, pair.b)


def rademacher_R(n: int, eps: float, seed: int) -> np.ndarray:
    """Symmetric hollow matrix with iid entries ``+eps`` or ``-eps``.

    Its squared Frobenius norm is exactly ``eps^2 * n * (n - 1)`` while the
    outcome distribution of a p=1/2 pair sampled with it is indistinguishable
    from independence.
    """
    if not (0.0 <= eps <= 1.0):
        raise GraphCorrError("eps must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    signs = np.where(rng.random(iu[0].shape[0]) < 0.5, eps, -eps)
    m = np.zeros((n, n))
    m[iu] = signs
    return as_corr_matrix(m + m.T)
