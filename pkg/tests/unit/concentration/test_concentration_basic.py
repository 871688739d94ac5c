import math
from fractions import Fraction

import numpy as np
import pytest

from odolab.core.concentration import (
    DEFAULT_EPSILONS,
    exact_profile,
    levy_table,
    mc_profile,
    sample_batch,
    sample_uniform_perm,
    uniformity_pvalue,
)
from odolab.core.errors import RangeError
from odolab.core.permutation import Permutation


class TestSampling:
    def test_size_one_is_identity(self):
        assert sample_uniform_perm(1, 123).is_identity()

    def test_same_seed_same_permutation(self):
        assert sample_uniform_perm(4, 42) == sample_uniform_perm(4, 42)

    def test_rows_are_permutations(self):
        batch = sample_batch(9, 500, seed=3)
        assert batch.shape == (500, 9)
        assert (np.sort(batch, axis=1) == np.arange(9)).all()

    def test_worker_count_does_not_change_output(self):
        serial = sample_batch(6, 1000, seed=8, streams=4)
        threaded = sample_batch(6, 1000, seed=8, streams=4, workers=4)
        np.testing.assert_array_equal(serial, threaded)

    @pytest.mark.parametrize("n, samples", [(0, 10), (3, 0)])
    def test_bad_sizes(self, n, samples):
        with pytest.raises(RangeError):
            sample_batch(n, samples, seed=0)

    def test_uniform_on_s4(self):
        assert uniformity_pvalue(4, 24000, seed=2024) > 0.001


class TestExactProfile:
    def test_n3_distribution(self):
        profile = exact_profile(3)
        assert profile.distribution == {
            Fraction(0): Fraction(1, 6),
            Fraction(2, 3): Fraction(1, 3),
            Fraction(4, 3): Fraction(1, 2),
        }
        assert profile.median == Fraction(2, 3)
        assert profile.samples == "exact"

    def test_n2_distribution(self):
        assert exact_profile(2).distribution == {Fraction(0): Fraction(1, 2), Fraction(1): Fraction(1, 2)}

    @pytest.mark.parametrize("n", [1, 4, 6])
    def test_probabilities_sum_to_one(self, n):
        assert sum(exact_profile(n, "hamming").distribution.values()) == 1

    def test_alpha_non_increasing_and_vanishes(self):
        profile = exact_profile(5, epsilons=["0", "1/5", "1", "3", "5"])
        assert all(a >= b for a, b in zip(profile.alpha, profile.alpha[1:]))
        assert profile.alpha_at(5) == 0
        assert profile.alpha_at(Fraction(3)) == 0

    def test_fixed_point_functional_matches_identity(self):
        tau = Permutation(images=(2, 0, 3, 1))
        fixed = exact_profile(4, "l1", "fixed", tau=tau)
        assert fixed.distribution == exact_profile(4, "l1").distribution

    def test_too_large(self):
        with pytest.raises(RangeError):
            exact_profile(9)

    def test_to_rows_and_dataset(self):
        profile = exact_profile(3, epsilons=[0.1, 0.5])
        rows = profile.to_rows()
        assert [r["epsilon"] for r in rows] == ["1/10", "1/2"]
        assert set(rows[0]) == {"n", "metric", "functional", "epsilon", "alpha", "ci_halfwidth", "samples"}
        ds = profile.to_dataset()
        assert list(ds.coords["epsilon"].values) == [0.1, 0.5]
        assert ds.attrs["median"] == "2/3"


class TestMonteCarloProfile:
    def test_agrees_with_exact(self):
        exact = exact_profile(6, "l1")
        samples = 20000
        mc = mc_profile(6, "l1", samples=samples, seed=11, center=exact.median)
        assert mc.epsilons == DEFAULT_EPSILONS
        for p_exact, p_mc in zip(exact.alpha, mc.alpha):
            p = float(p_exact)
            assert abs(p_mc - p) <= 4 * math.sqrt(p * (1 - p) / samples) + 1e-12

    def test_single_sample_is_degenerate(self):
        mc = mc_profile(5, samples=1, seed=0)
        assert set(mc.alpha) <= {0.0, 1.0}
        assert mc.alpha[0] == 0.0

    def test_seeded(self):
        assert mc_profile(7, samples=200, seed=5) == mc_profile(7, samples=200, seed=5)

    def test_hamming_trend(self):
        profiles = levy_table([16, 64, 256], "hamming", Fraction(1, 10), samples=4000, seed=1)
        alphas = [p.alpha[0] for p in profiles]
        assert all(a >= b for a, b in zip(alphas, alphas[1:]))
        assert alphas[0] > alphas[-1]

    def test_levy_table_order_independent_of_workers(self):
        serial = levy_table([5, 7], samples=300, seed=2)
        threaded = levy_table([5, 7], samples=300, seed=2, workers=2)
        assert [p.n for p in threaded] == [5, 7]
        assert serial == threaded


@pytest.mark.slow
class TestMonteCarloAtScale:
    def test_hundred_thousand_samples(self):
        exact = exact_profile(7, "l1")
        samples = 100_000
        mc = mc_profile(7, "l1", samples=samples, seed=3, center=exact.median, streams=4)
        for p_exact, p_mc, ci in zip(exact.alpha, mc.alpha, mc.ci_halfwidth):
            p = float(p_exact)
            assert abs(p_mc - p) <= 4 * math.sqrt(p * (1 - p) / samples) + 1e-12
            assert ci <= 0.01
