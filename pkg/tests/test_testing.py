import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import stats

from sgbounds.distributions import Bernoulli, Categorical, Gaussian, Sample, make_rng, draw
from sgbounds.errors import (
    EnumerationSizeError,
    FamilyMismatchError,
    SupportError,
    UnsupportedError,
    ValidationError,
)
from sgbounds.testing import (
    CHUNK,
    BinaryTestConfig,
    EmpiricalCounts,
    classify_mary,
    confusion_matrix,
    count_states,
    empirical_counts,
    enumerate_counts,
    exact_binary,
    half_width,
    lrt_statistic,
    phi,
    simulate_binary,
)

B5, B6 = Bernoulli(0.5), Bernoulli(0.6)


def binomial_oracle(p0, p1, n, c):
    """Reject iff k ln(p1/p0) + (n-k) ln(q1/q0) > c n, summed over k."""
    k = np.arange(n + 1)
    stat = (k * math.log(p1 / p0) + (n - k) * math.log((1 - p1) / (1 - p0))) / n
    rej = stat > c + 1e-12 * max(1.0, c)
    return stats.binom.pmf(k, n, p0)[rej].sum(), stats.binom.pmf(k, n, p1)[~rej].sum()


class TestConfig:
    def test_c_prime(self):
        assert BinaryTestConfig(0.1, 5).c_prime == pytest.approx(math.exp(0.5))

    @pytest.mark.parametrize("c,n", [(-0.1, 1), (0.0, 0), (0.0, 2.5), (math.nan, 1)])
    def test_invalid(self, c, n):
        with pytest.raises(ValidationError):
            BinaryTestConfig(c, n)


class TestStatistic:
    def test_identical(self):
        assert lrt_statistic(Sample([0, 1, 1, 0]), B5, B5) == 0.0

    def test_value(self):
        got = lrt_statistic(Sample([1, 1, 0]), B5, B6)
        assert got == pytest.approx((2 * math.log(1.2) + math.log(0.8)) / 3, rel=1e-14)
        assert got == pytest.approx(0.047165, abs=2e-6)  # 0.0471665 truncated

    def test_zero_mass_under_alternative(self):
        p0, p1 = Categorical((0.5, 0.5)), Categorical((1.0, 0.0))
        assert lrt_statistic(Sample([0, 1]), p0, p1) == -math.inf
        assert phi(Sample([0, 1]), p0, p1, BinaryTestConfig(0, 2)) == 0

    def test_zero_mass_under_null(self):
        p0, p1 = Categorical((1.0, 0.0)), Categorical((0.5, 0.5))
        assert lrt_statistic(Sample([1]), p0, p1) == math.inf
        assert phi(Sample([1]), p0, p1, BinaryTestConfig(1e9, 1)) == 1

    def test_outside_both_supports(self):
        p0, p1 = Categorical((0.5, 0.5, 0.0)), Categorical((0.2, 0.8, 0.0))
        with pytest.raises(SupportError):
            lrt_statistic(Sample([2]), p0, p1)

    def test_gaussian(self):
        x = Sample([0.2, -1.0, 2.5])
        want = np.mean(stats.norm.logpdf(x.values, 1, 1) - stats.norm.logpdf(x.values, 0, 1))
        assert lrt_statistic(x, Gaussian(0, 1), Gaussian(1, 1)) == pytest.approx(want, rel=1e-13)

    def test_mixed_families(self):
        with pytest.raises(FamilyMismatchError):
            lrt_statistic(Sample([0.0]), B5, Gaussian(0, 1))

    def test_counts(self):
        ec = empirical_counts(Sample([2, 0, 2]), 3)
        assert ec == EmpiricalCounts((1, 0, 2)) and ec.n == 3
        with pytest.raises(ValidationError):
            empirical_counts(Sample([3]), 3)


class TestPhi:
    def test_strict_at_zero(self):
        assert phi(Sample([0, 1]), B5, B5, BinaryTestConfig(0, 2)) == 0

    def test_rejects(self):
        assert phi(Sample([1, 1, 0]), B5, B6, BinaryTestConfig(0, 3)) == 1

    def test_large_threshold(self):
        assert phi(Sample([1, 1, 1]), B5, B6, BinaryTestConfig(1e6, 3)) == 0

    def test_boundary_accepts(self):
        # one 1 and one 0 under Bern(0.4) vs Bern(0.6): statistic is exactly 0
        assert phi(Sample([1, 0]), Bernoulli(0.4), B6, BinaryTestConfig(0, 2)) == 0

    def test_sample_size_mismatch(self):
        with pytest.raises(ValidationError):
            phi(Sample([1, 0]), B5, B6, BinaryTestConfig(0, 3))

    @settings(max_examples=150, deadline=None)
    @given(
        st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3),
        st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3),
        st.lists(st.integers(0, 2), min_size=1, max_size=15),
        st.sampled_from([0.0, 0.01, 0.05, 0.1]),
    )
    def test_ratio_form(self, w0, w1, xs, c):
        p0 = Categorical(tuple(np.array(w0) / sum(w0)))
        p1 = Categorical(tuple(np.array(w1) / sum(w1)))
        n = len(xs)
        ratio = np.prod([p1.probs[x] / p0.probs[x] for x in xs])
        assume(abs(math.log(ratio) - c * n) > 1e-9)
        assert phi(Sample(xs), p0, p1, BinaryTestConfig(c, n)) == int(ratio > math.exp(c * n))


class TestEnumeration:
    @pytest.mark.parametrize("K,n", [(2, 5), (3, 4), (5, 3), (1, 6)])
    def test_count_vectors(self, K, n):
        counts = enumerate_counts(K, n)
        assert counts.shape == (count_states(K, n), K)
        assert np.all(counts.sum(axis=1) == n) and np.all(counts >= 0)
        assert len({tuple(r) for r in counts}) == counts.shape[0]

    def test_cap(self):
        with pytest.raises(EnumerationSizeError):
            enumerate_counts(6, 60)


class TestExact:
    def test_hand_instance(self):
        r = exact_binary(B5, B6, BinaryTestConfig(0, 3))
        assert r.alpha == 0.5 and r.beta == pytest.approx(0.352, abs=1e-15)
        assert r.mode == "exact" and r.trials == 0 and r.half_width == 0

    def test_identical(self):
        r = exact_binary(B6, B6, BinaryTestConfig(0, 4))
        assert (r.alpha, r.beta) == (0.0, 1.0)

    def test_unreachable_threshold(self):
        r = exact_binary(B5, B6, BinaryTestConfig(1, 3))
        assert (r.alpha, r.beta) == (0.0, 1.0)

    @pytest.mark.parametrize(
        "p0,p1,n,c",
        [(0.1, 0.9, 7, 0.0), (0.3, 0.2, 12, 0.05), (0.5, 0.8, 9, 0.1), (0.4, 0.6, 10, 0.0)],
    )
    def test_binomial_oracle(self, p0, p1, n, c):
        r = exact_binary(Bernoulli(p0), Bernoulli(p1), BinaryTestConfig(c, n))
        a, b = binomial_oracle(p0, p1, n, c)
        assert r.alpha == pytest.approx(a, abs=1e-13)
        assert r.beta == pytest.approx(b, abs=1e-13)

    def test_categorical_matches_brute_force(self):
        import itertools

        p0, p1 = Categorical((0.2, 0.5, 0.3)), Categorical((0.4, 0.1, 0.5))
        n, c = 4, 0.02
        a = b = 0.0
        for xs in itertools.product(range(3), repeat=n):
            w0 = np.prod([p0.probs[x] for x in xs])
            w1 = np.prod([p1.probs[x] for x in xs])
            if phi(Sample(list(xs)), p0, p1, BinaryTestConfig(c, n)):
                a += w0
            else:
                b += w1
        r = exact_binary(p0, p1, BinaryTestConfig(c, n))
        assert r.alpha == pytest.approx(a, abs=1e-14) and r.beta == pytest.approx(b, abs=1e-14)

    def test_monotone_in_c(self):
        p0, p1 = Categorical((0.2, 0.5, 0.3)), Categorical((0.4, 0.1, 0.5))
        prev = None
        for c in np.linspace(0, 0.6, 25):
            r = exact_binary(p0, p1, BinaryTestConfig(c, 8))
            if prev is not None:
                assert r.alpha <= prev.alpha + 1e-15
                assert r.beta >= prev.beta - 1e-15
            prev = r

    def test_gaussian_unsupported(self):
        with pytest.raises(UnsupportedError):
            exact_binary(Gaussian(0, 1), Gaussian(1, 1), BinaryTestConfig(0, 2))

    def test_state_cap(self):
        with pytest.raises(EnumerationSizeError):
            exact_binary(Categorical((0.2,) * 5), Categorical((0.2,) * 5), BinaryTestConfig(0, 200))


class TestSimulation:
    def test_identical(self):
        r = simulate_binary(B5, B5, BinaryTestConfig(0, 3), 5000, seed=1)
        assert (r.alpha, r.beta) == (0.0, 1.0)
        assert r.alpha_half_width == pytest.approx(1.96 / 5000)

    def test_half_width(self):
        assert half_width(0.5, 100) == pytest.approx(1.96 * 0.05)
        assert half_width(0.0, 100) == half_width(1.0, 100) == pytest.approx(0.0196)
        with pytest.raises(ValidationError):
            half_width(0.5, 0)

    def test_gaussian_tail(self):
        n = 10
        r = simulate_binary(Gaussian(0, 1), Gaussian(1, 1), BinaryTestConfig(0, n), 100_000, seed=3)
        exact = stats.norm.sf(math.sqrt(n) / 2)
        assert abs(r.alpha - exact) <= 3 * r.alpha_half_width
        assert abs(r.beta - exact) <= 3 * r.beta_half_width

    def test_partition_invariance(self):
        trials = 3 * CHUNK + 17
        cfg = BinaryTestConfig(0.01, 5)
        runs = [simulate_binary(B5, B6, cfg, trials, seed=9, jobs=j) for j in (1, 2, 3, 8)]
        assert all(r == runs[0] for r in runs)

    def test_seed_matters(self):
        cfg = BinaryTestConfig(0, 3)
        assert simulate_binary(B5, B6, cfg, 20_000, 1) != simulate_binary(B5, B6, cfg, 20_000, 2)

    @pytest.mark.parametrize("trials", [0, -5, 2.5])
    def test_bad_trials(self, trials):
        with pytest.raises(ValidationError):
            simulate_binary(B5, B6, BinaryTestConfig(0, 3), trials, seed=0)

    def test_agrees_with_exact_on_random_grid(self):
        rng = np.random.default_rng(77)
        grid = [round(0.1 * i, 1) for i in range(1, 10)]
        misses = 0
        for k in range(12):
            p0, p1 = rng.choice(grid, 2, replace=False)
            n = int(rng.integers(1, 13))
            c = float(rng.choice([0.0, 0.01, 0.05, 0.1]))
            cfg = BinaryTestConfig(c, n)
            ex = exact_binary(Bernoulli(p0), Bernoulli(p1), cfg)
            mc = simulate_binary(Bernoulli(p0), Bernoulli(p1), cfg, 100_000, seed=k)
            misses += abs(mc.alpha - ex.alpha) > 3 * mc.alpha_half_width
            misses += abs(mc.beta - ex.beta) > 3 * mc.beta_half_width
        assert misses == 0


PEAKED = [Categorical(tuple(0.7 if j == i else 0.15 for j in range(3))) for i in range(3)]


class TestClassify:
    def test_dominant(self):
        d = classify_mary(Sample([1, 1, 1]), [Bernoulli(0.1), Bernoulli(0.9)])
        assert (d.index, d.tie) == (1, False)

    def test_duplicates_tie(self):
        d = classify_mary(Sample([1, 0]), [Bernoulli(0.3), Bernoulli(0.7), Bernoulli(0.7)])
        assert d.tie and d.index == 0  # 0.3*0.7 == 0.7*0.3

    def test_duplicate_argmax(self):
        d = classify_mary(Sample([1, 1]), [Bernoulli(0.3), Bernoulli(0.7), Bernoulli(0.7)])
        assert (d.index, d.tie) == (1, True)

    @pytest.mark.parametrize("i", [0, 1, 2])
    def test_peaked(self, i):
        assert classify_mary(Sample([i, i]), PEAKED).index == i

    def test_no_support(self):
        hyps = [Categorical((1.0, 0.0, 0.0)), Categorical((0.0, 1.0, 0.0))]
        with pytest.raises(SupportError):
            classify_mary(Sample([2]), hyps)

    def test_single_hypothesis(self):
        with pytest.raises(ValidationError):
            classify_mary(Sample([0]), [B5])

    def test_gaussian(self):
        hyps = [Gaussian(-2, 1), Gaussian(0, 1), Gaussian(2, 1)]
        assert classify_mary(Sample([1.9, 2.2]), hyps).index == 2


class TestConfusionMatrix:
    def test_identical_exact(self):
        cm = confusion_matrix([B6, B6, B6], n=3)
        np.testing.assert_allclose(cm.matrix, [[1, 0, 0]] * 3, atol=1e-15)
        np.testing.assert_allclose(cm.alpha_vector, [0, 1, 1], atol=1e-15)
        np.testing.assert_allclose(cm.tie_rate, 1.0)

    def test_binary_reduction(self):
        cm = confusion_matrix([B5, B6], n=3)
        r = exact_binary(B5, B6, BinaryTestConfig(0, 3))
        assert cm.matrix[0, 1] == pytest.approx(r.alpha, abs=1e-15)
        assert cm.matrix[1, 0] == pytest.approx(r.beta, abs=1e-15)

    def test_rows_sum_exact(self):
        cm = confusion_matrix(PEAKED, n=6)
        np.testing.assert_allclose(cm.matrix.sum(axis=1), 1.0, atol=1e-9)

    def test_rows_sum_monte_carlo(self):
        cm = confusion_matrix(PEAKED, n=6, trials=10_001, seed=2)
        np.testing.assert_array_equal(cm.matrix.sum(axis=1), 1.0)
        assert cm.mode == "monte-carlo" and cm.tie_count.shape == (3,)

    def test_exact_vs_monte_carlo(self):
        ex = confusion_matrix(PEAKED, n=4)
        mc = confusion_matrix(PEAKED, n=4, trials=100_000, seed=5)
        hw = 1.96 * np.sqrt(ex.matrix * (1 - ex.matrix) / 100_000) + 1.96 / 100_000
        assert np.all(np.abs(mc.matrix - ex.matrix) <= 3 * hw)

    def test_partition_invariance(self):
        runs = [confusion_matrix(PEAKED, 3, trials=2 * CHUNK + 5, seed=4, jobs=j) for j in (1, 4)]
        np.testing.assert_array_equal(runs[0].matrix, runs[1].matrix)
        np.testing.assert_array_equal(runs[0].tie_count, runs[1].tie_count)

    def test_gaussian_monte_carlo(self):
        cm = confusion_matrix([Gaussian(0, 1), Gaussian(1, 1)], n=4, trials=50_000, seed=8)
        exact = stats.norm.sf(1.0)  # midpoint at 0.5, sd 1/2
        assert abs(cm.matrix[0, 1] - exact) <= 3 * half_width(exact, 50_000)

    def test_gaussian_exact_unsupported(self):
        with pytest.raises(UnsupportedError):
            confusion_matrix([Gaussian(0, 1), Gaussian(1, 1)], n=2)

    def test_bad_n(self):
        with pytest.raises(ValidationError):
            confusion_matrix(PEAKED, n=0)


def test_draw_matches_stream_layout():
    # chunk j of hypothesis h uses make_rng(seed, h, j); check the first chunk by hand
    x = draw(B6, make_rng(7, 1, 0), (CHUNK, 3))
    stat = x.sum(axis=1)  # Bern(.5) vs Bern(.6), n=3, c=0: reject iff two or more ones
    accepted = np.count_nonzero(stat < 2)
    r = simulate_binary(B5, B6, BinaryTestConfig(0, 3), CHUNK, seed=7)
    assert r.beta == accepted / CHUNK
