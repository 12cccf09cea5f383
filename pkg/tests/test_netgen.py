"""Dissimilarity matrix and probit tie generation."""

import numpy as np
import pytest

from helpers import normal_cdf
from peerbias.netgen import pairwise_difference, probit_ties, tie_probability
from peerbias.rng import derive_stream


class TestPairwiseDifference:
    def test_two_actors(self):
        d = pairwise_difference([52.0, 47.0])
        assert d[0, 1] == d[1, 0] == -5.0
        assert d[0, 0] == d[1, 1] == 0.0

    def test_identical_traits_give_zero_matrix(self):
        assert not pairwise_difference([3.0, 3.0, 3.0]).any()

    def test_three_actors(self):
        d = pairwise_difference([50.0, 60.0, 35.0])
        assert d[0, 1] == -10.0
        assert d[0, 2] == -15.0
        assert d[1, 2] == -25.0

    def test_symmetric_nonpositive_zero_diagonal(self):
        y = derive_stream(0, 0, 0).normal(50, 10, 40)
        d = pairwise_difference(y)
        assert np.array_equal(d, d.T)
        assert (d <= 0).all()
        assert np.diagonal(d).sum() == 0.0

    def test_single_value_rejected(self):
        with pytest.raises(ValueError):
            pairwise_difference([1.0])


class TestTieProbability:
    # Expected values computed with the mpmath high-precision CDF oracle.
    @pytest.mark.parametrize(
        "d_ij,eta0,eta1",
        [
            (0.0, 0.0, 123.0),
            (-11.28, -2.75, 0.05),
            (0.0, -2.5, 0.05),
            (0.0, 1.85, 0.0),
            (-5.0, 0.3, 0.02),
        ],
    )
    def test_matches_high_precision_oracle(self, d_ij, eta0, eta1):
        expected = normal_cdf(eta0 + eta1 * d_ij)
        assert tie_probability(d_ij, eta0, eta1) == pytest.approx(expected, rel=1e-12)

    def test_zero_index_is_half(self):
        assert tie_probability(0.0, 0.0, 5.0) == pytest.approx(0.5)

    def test_nonincreasing_in_dissimilarity(self):
        diffs = -np.linspace(0, 50, 200)
        probs = tie_probability(diffs, -2.5, 0.05)
        assert (np.diff(probs) <= 0).all()

    def test_constant_when_no_homophily(self):
        probs = tie_probability(-np.linspace(0, 50, 50), -2.5, 0.0)
        assert np.ptp(probs) == 0.0


class TestProbitTies:
    def _network(self, n, eta0, eta1, seed=1, y=None, **kwargs):
        rng = derive_stream(seed, 0, 0)
        if y is None:
            y = rng.normal(50, 10, n)
        return probit_ties(pairwise_difference(y), eta0, eta1, rng, **kwargs)

    def test_empirical_rate_without_homophily(self):
        # 1001 * 1000 > 1e6 ordered pairs; one Bernoulli(Phi(-2.75)) each.
        n = 1001
        net = self._network(n, -2.75, 0.0)
        p = normal_cdf(-2.75)
        pairs = n * (n - 1)
        se = np.sqrt(p * (1 - p) / pairs)
        assert abs(net.sum() / pairs - p) < 3 * se

    def test_high_retention_intercept_rate(self):
        # Phi(1.85) ~ 0.9678, the very-low-attrition retention level.
        n = 600
        net = self._network(n, 1.85, 0.0)
        p = normal_cdf(1.85)
        assert p == pytest.approx(0.9678, abs=5e-4)
        pairs = n * (n - 1)
        se = np.sqrt(p * (1 - p) / pairs)
        assert abs(net.sum() / pairs - p) < 3 * se

    def test_no_self_ties(self):
        net = self._network(200, 2.0, 0.05)
        assert not np.diagonal(net).any()

    def test_asymmetric_pairs_occur(self):
        net = self._network(300, 0.0, 0.0)
        assert (net != net.T).any()

    def test_deterministic_given_stream(self):
        a = self._network(100, -1.0, 0.05, seed=9)
        b = self._network(100, -1.0, 0.05, seed=9)
        assert np.array_equal(a, b)

    def test_network_ignores_traits_without_homophily(self):
        # With eta1 = 0 the tie draw cannot depend on the trait labels.
        rng = derive_stream(3, 0, 0)
        y = rng.normal(50, 10, 80)
        a = probit_ties(pairwise_difference(y), -0.5, 0.0, derive_stream(5, 0, 0))
        permuted = np.random.default_rng(0).permutation(y)
        b = probit_ties(pairwise_difference(permuted), -0.5, 0.0, derive_stream(5, 0, 0))
        assert np.array_equal(a, b)

    def test_expected_out_degree_without_homophily(self):
        n = 500
        p = normal_cdf(-2.0)
        degrees = []
        for rep in range(20):
            rng = derive_stream(11, 0, rep)
            y = rng.normal(50, 10, n)
            degrees.append(
                probit_ties(pairwise_difference(y), -2.0, 0.0, rng).sum(1).mean()
            )
        expected = (n - 1) * p
        se = np.sqrt((n - 1) * p * (1 - p) / (20 * n))
        assert abs(np.mean(degrees) - expected) < 3 * se

    def test_negative_eta1_rejected(self):
        with pytest.raises(ValueError):
            self._network(10, 0.0, -0.01)

    def test_draw_mask_matches_masked_full_draw(self):
        rng = derive_stream(21, 0, 0)
        y = rng.normal(50, 10, 120)
        d = pairwise_difference(y)
        mask = probit_ties(d, -1.0, 0.0, derive_stream(22, 0, 0))
        full = probit_ties(d, 0.2, 0.05, derive_stream(23, 0, 0), center=True, center_mask=mask)
        masked = probit_ties(
            d, 0.2, 0.05, derive_stream(23, 0, 0), center=True,
            center_mask=mask, draw_mask=mask,
        )
        assert np.array_equal(masked, full & mask)

    def test_centering_raises_tie_rate_under_homophily(self):
        # Centered index has zero mean where raw is always <= eta0, so
        # homophily raises density instead of collapsing it.
        raw = self._network(400, -2.5, 0.05, seed=31)
        centered = self._network(400, -2.5, 0.05, seed=31, center=True)
        assert centered.sum() > raw.sum()
