from __future__ import annotations

import random
from statistics import NormalDist, fmean

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haggle.sampling import Bounds, SamplerConfig, sample_price, truncated_normal, update_bounds


class TestUpdateBounds:
    def test_initial_interval_is_bottom_to_list(self, product):
        bounds = update_bounds(product, [], None)
        assert (bounds.lower, bounds.upper) == (20000, 25000)
        assert bounds.concession_index == 0

    def test_buyer_offer_lifts_lower_bound(self, product):
        bounds = update_bounds(product, [23000], 21000)
        assert (bounds.lower, bounds.upper) == (21000, 23000)
        assert bounds.concession_index == 1

    def test_lowball_keeps_bottom_floor(self, product):
        bounds = update_bounds(product, [23000], 15000)
        assert bounds.lower == 20000

    def test_offer_above_standing_collapses(self, product):
        bounds = update_bounds(product, [23000], 26000)
        assert (bounds.lower, bounds.upper) == (23000, 23000)


class TestSamplePrice:
    def test_degenerate_interval_returns_bound(self):
        rng = random.Random(0)
        bounds = Bounds(lower=10000, upper=10000)
        assert sample_price(bounds, SamplerConfig(), rng) == 10000

    def test_samples_stay_in_bounds(self):
        rng = random.Random(1)
        config = SamplerConfig()
        bounds = Bounds(lower=8000, upper=10000)
        for _ in range(2000):
            assert 8000 <= sample_price(bounds, config, rng) <= 10000

    def test_seeded_stream_is_reproducible(self):
        config = SamplerConfig(centroid_gamma0=0.8, gamma_decay=0.85, delta_beta=0.15)
        bounds = Bounds(lower=20000, upper=25000)
        first = [sample_price(bounds, config, random.Random(7)) for _ in range(1)]
        second = [sample_price(bounds, config, random.Random(7)) for _ in range(1)]
        assert first == second

    def test_golden_value_seed_7(self):
        # frozen from a seed-7 reference run of this sampler
        config = SamplerConfig(centroid_gamma0=0.8, gamma_decay=0.85, delta_beta=0.15)
        bounds = Bounds(lower=20000, upper=25000)
        value = sample_price(bounds, config, random.Random(7))
        assert value == GOLDEN_SEED_7

    def test_whole_unit_rounding(self):
        rng = random.Random(3)
        config = SamplerConfig(rounding="whole_unit")
        bounds = Bounds(lower=20050, upper=24950)
        for _ in range(200):
            value = sample_price(bounds, config, rng)
            assert 20050 <= value <= 24950
            # interior samples land on whole units; only clamping may not
            if 20100 <= value <= 24900:
                assert value % 100 == 0

    def test_gamma_decays_with_concessions(self):
        config = SamplerConfig(centroid_gamma0=0.8, gamma_decay=0.5, gamma_min=0.1)
        assert config.gamma(0) == pytest.approx(0.8)
        assert config.gamma(1) == pytest.approx(0.4)
        assert config.gamma(5) == pytest.approx(0.1)  # floored


class TestTruncatedNormalCore:
    def test_symmetric_case_mean(self):
        rng = random.Random(42)
        values = [truncated_normal(0.0, 1.0, 0.5, 0.15, rng) for _ in range(100_000)]
        assert abs(fmean(values) - 0.5) < 0.01

    def test_asymmetric_case_matches_analytic_mean(self):
        # analytic truncated-normal mean: mu + sigma * (phi(a) - phi(b)) / (Phi(b) - Phi(a))
        mu, sigma, lo, hi = 0.8, 0.15, 0.0, 1.0
        nd = NormalDist()
        a, b = (lo - mu) / sigma, (hi - mu) / sigma
        phi = lambda z: nd.pdf(z)
        analytic = mu + sigma * (phi(a) - phi(b)) / (nd.cdf(b) - nd.cdf(a))
        rng = random.Random(9)
        values = [truncated_normal(lo, hi, mu, sigma, rng) for _ in range(100_000)]
        assert abs(fmean(values) - analytic) < 0.01

    @settings(max_examples=200, deadline=None)
    @given(
        lower=st.floats(min_value=-100, max_value=100, allow_nan=False),
        width=st.floats(min_value=0.0, max_value=50),
        gamma=st.floats(min_value=0.0, max_value=1.0),
        beta=st.floats(min_value=0.01, max_value=2.0),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_truncation_property(self, lower, width, gamma, beta, seed):
        upper = lower + width
        mean = lower + gamma * width
        value = truncated_normal(lower, upper, mean, beta * width, random.Random(seed))
        assert lower <= value <= upper


class TestConcessionChain:
    def test_repeated_counters_never_increase(self, product):
        config = SamplerConfig()
        rng = random.Random(5)
        offers: list[int] = []
        buyer = 20500
        for _ in range(12):
            bounds = update_bounds(product, offers, buyer)
            offers.append(sample_price(bounds, config, rng))
        assert all(b <= a for a, b in zip(offers, offers[1:]))
        assert min(offers) >= product.bottom_price


# frozen output of sample_price(Bounds(20000, 25000), gamma0=0.8,
# decay=0.85, beta=0.15, rng=Random(7)) at the time the sampler was built
GOLDEN_SEED_7 = 23600
