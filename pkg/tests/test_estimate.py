"""Correlation recovery, hold-out masking, and ROC/AUC machinery."""

import numpy as np
import pytest

from graphcorr import (
    DegenerateTruthError,
    GraphCorrError,
    GraphPair,
    UsvtConfig,
    apply_mask,
    block_mean_R,
    estimate_R,
    holdout_mask,
    naive_block_pearson,
    predict_links,
    roc_curve,
    sample_pair,
)


def flat(n, p):
    m = np.full((n, n), float(p))
    np.fill_diagonal(m, 0.0)
    return m


def exact_union_mean(P, Q, R):
    return P + Q - P * Q - R * np.sqrt(P * (1 - P) * Q * (1 - Q))


class TestEstimateR:
    def test_independence_identity_gives_zero(self):
        rng = np.random.default_rng(1)
        P = rng.uniform(0.2, 0.8, size=(10, 10))
        P = (P + P.T) / 2
        Q = rng.uniform(0.2, 0.8, size=(10, 10))
        Q = (Q + Q.T) / 2
        H = P + Q - P * Q
        assert np.allclose(estimate_R(P, Q, H), 0.0)

    def test_half_half_quarter_combination(self):
        P = flat(5, 0.5) + np.eye(5) * 0.5
        H = np.full((5, 5), 0.5)
        r = estimate_R(P, P, H)
        iu = np.triu_indices(5, 1)
        # numerator 0.75 - 0.5, denominator 0.25
        assert np.allclose(r[iu], 1.0)

    def test_round_trip_through_union_mean(self):
        """Noiseless inversion recovers the correlation over a (p, q, r) grid."""
        from graphcorr import correlation_bounds

        rng = np.random.default_rng(2)
        for _ in range(100):
            p, q = rng.uniform(0.05, 0.95, size=2)
            lo, hi = correlation_bounds(p, q)
            r = rng.uniform(lo, hi)
            P, Q = flat(4, p), flat(4, q)
            R = flat(4, r)
            H = exact_union_mean(P, Q, R)
            got = estimate_R(P + np.eye(4) * p, Q + np.eye(4) * q, H)
            iu = np.triu_indices(4, 1)
            assert np.allclose(got[iu], r, atol=1e-10)

    def test_degenerate_marginals_give_zero(self):
        P = np.ones((4, 4))
        Q = flat(4, 0.5)
        H = np.ones((4, 4))
        assert np.all(estimate_R(P, Q, H) == 0)

    def test_output_clamped(self):
        P = flat(4, 0.5)
        Q = flat(4, 0.5)
        H = np.zeros((4, 4))  # implies correlation beyond 1
        r = estimate_R(P, Q, H)
        assert r.min() >= -1.0 and r.max() <= 1.0


class TestBlockSummaries:
    def test_constant_matrix_all_blocks_equal(self):
        r_hat = flat(8, 0.3)
        labels = np.array([1, 1, 1, 1, 2, 2, 2, 2])
        out = block_mean_R(r_hat, labels, 2)
        assert np.allclose(out, 0.3)

    def test_single_block_is_grand_mean(self):
        rng = np.random.default_rng(3)
        r_hat = rng.uniform(-1, 1, size=(6, 6))
        r_hat = (r_hat + r_hat.T) / 2
        np.fill_diagonal(r_hat, 0)
        labels = np.ones(6, dtype=np.int64)
        iu = np.triu_indices(6, 1)
        assert block_mean_R(r_hat, labels, 1)[0, 0] == pytest.approx(
            r_hat[iu].mean()
        )

    def test_hand_labeled_toy(self):
        r_hat = np.zeros((5, 5))
        vals = {(0, 1): 0.5, (0, 2): 0.1, (1, 2): 0.3, (3, 4): -0.2,
                (0, 3): 0.7, (0, 4): 0.7, (1, 3): 0.7, (1, 4): 0.9,
                (2, 3): 0.8, (2, 4): 0.6}
        for (i, j), v in vals.items():
            r_hat[i, j] = r_hat[j, i] = v
        labels = np.array([1, 1, 1, 2, 2])
        out = block_mean_R(r_hat, labels, 2)
        assert out[0, 0] == pytest.approx((0.5 + 0.1 + 0.3) / 3)
        assert out[1, 1] == pytest.approx(-0.2)
        assert out[0, 1] == pytest.approx((0.7 + 0.7 + 0.7 + 0.9 + 0.8 + 0.6) / 6)

    def test_empty_block_is_nan(self):
        r_hat = flat(4, 0.2)
        labels = np.array([1, 1, 1, 1])
        out = block_mean_R(r_hat, labels, 2)
        assert np.isnan(out[1, 1]) and np.isnan(out[0, 1])

    def test_naive_pearson_identical_graphs(self):
        pair = sample_pair(flat(20, 0.5), None, 0.0, seed=4)
        same = GraphPair(pair.a, pair.a)
        labels = np.ones(20, dtype=np.int64)
        out = naive_block_pearson(same, labels, 1)
        assert out[0, 0] == pytest.approx(1.0)

    def test_naive_pearson_degenerate_is_nan(self):
        z = np.zeros((6, 6))
        out = naive_block_pearson(GraphPair(z, z), np.ones(6, dtype=np.int64), 1)
        assert np.isnan(out[0, 0])


class TestHoldout:
    def test_mask_size_rounds(self):
        mask = holdout_mask(20, 0.1, seed=5)
        assert mask.size == 19  # round(0.1 * 190)

    def test_single_pair_masked_symmetrically(self):
        n = 4
        mask = holdout_mask(n, 0.17, seed=6)  # round(0.17 * 6) = 1
        assert mask.size == 1
        g = np.ones((n, n)) - np.eye(n)
        masked = apply_mask(g, mask)
        i, j = mask.pairs[0]
        assert masked[i, j] == 0 and masked[j, i] == 0
        assert g.sum() - masked.sum() == 2

    def test_fraction_domain(self):
        with pytest.raises(GraphCorrError):
            holdout_mask(10, 0.0, seed=7)
        with pytest.raises(GraphCorrError):
            holdout_mask(10, 1.0, seed=7)
        with pytest.raises(GraphCorrError):
            holdout_mask(30, 0.001, seed=7)  # rounds to zero pairs

    def test_unmasked_entries_untouched(self):
        rng = np.random.default_rng(8)
        g = np.triu((rng.random((15, 15)) < 0.5).astype(float), 1)
        g = g + g.T
        mask = holdout_mask(15, 0.2, seed=9)
        masked = apply_mask(g, mask)
        i, j = mask.indices()
        assert np.all(masked[i, j] == 0)
        untouched = np.ones_like(g, dtype=bool)
        untouched[i, j] = untouched[j, i] = False
        assert np.array_equal(masked[untouched], g[untouched])

    def test_mask_pairs_distinct_and_ordered(self):
        mask = holdout_mask(12, 0.3, seed=10)
        assert np.all(mask.pairs[:, 0] < mask.pairs[:, 1])
        assert len({tuple(p) for p in mask.pairs}) == mask.size


def mann_whitney_auc(scores, truth):
    """Probability a random positive outranks a random negative, ties half."""
    pos = [s for s, t in zip(scores, truth) if t == 1]
    neg = [s for s, t in zip(scores, truth) if t == 0]
    total = 0.0
    for sp in pos:
        for sn in neg:
            total += 1.0 if sp > sn else (0.5 if sp == sn else 0.0)
    return total / (len(pos) * len(neg))


class TestRoc:
    def test_perfect_scores(self):
        truth = np.array([0, 1, 0, 1, 1])
        roc = roc_curve(truth.astype(float), truth)
        assert roc.auc == pytest.approx(1.0)

    def test_constant_scores_give_half(self):
        truth = np.array([0, 1, 0, 1])
        roc = roc_curve(np.full(4, 0.7), truth)
        assert roc.auc == pytest.approx(0.5)
        assert roc.points.shape[0] == 2  # one threshold step

    def test_auc_equals_mann_whitney_enumeration(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            k = int(rng.integers(4, 20))
            truth = rng.integers(0, 2, size=k)
            if truth.min() == truth.max():
                truth[0] = 1 - truth[0]
            scores = rng.choice([0.1, 0.3, 0.5, 0.7], size=k)  # force ties
            roc = roc_curve(scores, truth)
            assert roc.auc == pytest.approx(
                mann_whitney_auc(scores, truth), abs=1e-10
            )

    def test_curve_endpoints_and_monotonicity(self):
        rng = np.random.default_rng(12)
        scores = rng.random(50)
        truth = rng.integers(0, 2, size=50)
        roc = roc_curve(scores, truth)
        assert np.allclose(roc.points[0], [0, 0])
        assert np.allclose(roc.points[-1], [1, 1])
        assert np.all(np.diff(roc.points, axis=0) >= -1e-12)

    def test_single_class_truth_flagged(self):
        with pytest.raises(DegenerateTruthError):
            roc_curve(np.array([0.1, 0.2]), np.array([1, 1]))


class TestPredictLinks:
    def make_correlated(self, n, r, seed):
        return sample_pair(flat(n, 0.3), flat(n, 0.3), r, seed=seed)

    def test_single_mode_scores_are_estimates(self):
        pair = self.make_correlated(60, 0.0, seed=13)
        mask = holdout_mask(60, 0.1, seed=14)
        masked = apply_mask(pair.a, mask)
        scores, roc = predict_links(masked, None, mask, pair.a, UsvtConfig())
        assert scores.shape == (mask.size,)
        assert 0.0 <= roc.auc <= 1.0

    def test_joint_mode_uses_auxiliary_entries(self):
        """With perfectly correlated graphs the auxiliary entry pins down the
        held-out edge, so the joint score must rank (near) perfectly."""
        pair = self.make_correlated(80, 0.99, seed=15)
        mask = holdout_mask(80, 0.1, seed=16)
        masked = apply_mask(pair.a, mask)
        _, roc_single = predict_links(masked, None, mask, pair.a, UsvtConfig())
        _, roc_joint = predict_links(masked, pair.b, mask, pair.a, UsvtConfig())
        assert roc_joint.auc > 0.9
        assert roc_joint.auc > roc_single.auc

    def test_exact_conditional_variant_runs(self):
        pair = self.make_correlated(60, 0.5, seed=17)
        mask = holdout_mask(60, 0.1, seed=18)
        masked = apply_mask(pair.a, mask)
        scores, roc = predict_links(
            masked, pair.b, mask, pair.a, UsvtConfig(), exact_conditional=True
        )
        assert np.all(np.isfinite(scores))
        assert 0.0 <= roc.auc <= 1.0

    def test_exact_conditional_matches_displayed_form_on_equal_marginals(self):
        """When the two marginal estimates coincide the conditional reduces to
        the displayed adjustment, scores included."""
        pair = self.make_correlated(50, 0.5, seed=19)
        mask = holdout_mask(50, 0.1, seed=20)
        masked = apply_mask(pair.a, mask)
        s1, _ = predict_links(masked, masked, mask, pair.a, UsvtConfig())
        s2, _ = predict_links(
            masked, masked, mask, pair.a, UsvtConfig(), exact_conditional=True
        )
        np.testing.assert_allclose(s1, s2, atol=1e-10)
