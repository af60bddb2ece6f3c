import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlynar.distribution import (
    FaceCount,
    Probability,
    cdf,
    mean,
    mean_exact,
    modes,
    moments,
    pmf_exact,
    pmf_explicit,
    pmf_ratio,
    pmf_recursive,
    survival_sum,
    truncation_index,
    variance,
    variance_exact,
)
from mlynar.errors import (
    FullTableTooLarge,
    InvalidEpsilon,
    InvalidFaceCount,
    OutOfSupport,
    TooLargeForExact,
)

# Path counts over the 6**5 throw sequences, frozen from the itertools oracle.
COUNTS_6 = [1296, 2160, 2160, 1440, 600, 120]
PMF_6 = [Fraction(c, 7776) for c in COUNTS_6]


def test_frozen_counts_match_oracle(oracle_pmf):
    assert oracle_pmf(6) == PMF_6
    assert PMF_6 == [Fraction(1, 6), Fraction(5, 18), Fraction(5, 18),
                     Fraction(5, 27), Fraction(25, 324), Fraction(5, 324)]


class TestFaceCount:
    @pytest.mark.parametrize("bad", [0, -3, 10**15 + 1, True, 2.5, "6"])
    def test_rejects(self, bad):
        with pytest.raises(InvalidFaceCount):
            FaceCount(bad)

    def test_accepts_integral_float(self):
        assert FaceCount(1e10) == 10**10
        assert FaceCount(10**15) == 10**15


class TestPmfRecursive:
    def test_n6(self):
        table = pmf_recursive(6, 0.0)
        np.testing.assert_allclose(table.probs, [float(p) for p in PMF_6], rtol=1e-14)
        assert table.truncation_K == 6 and not table.truncated and table.tail_mass == 0

    def test_n1(self):
        table = pmf_recursive(1, 0.0)
        assert table.probs.tolist() == [1.0]
        assert table.total() == 1.0

    def test_truncation_n_1e10(self):
        table = pmf_recursive(10**10, 1e-16)
        assert table.truncated
        assert table.truncation_K <= 850_000
        # truncation is relative to the running first-moment sum
        assert table.tail_mass < 1e-16 * mean(10**10)
        assert abs(1 - table.total() - table.tail_mass) < 1e-12
        assert np.all(np.isfinite(table.log_probs))

    def test_read_only(self):
        table = pmf_recursive(25)
        with pytest.raises(ValueError):
            table.probs[0] = 0.5

    def test_errors(self):
        with pytest.raises(FullTableTooLarge):
            pmf_recursive(10**7 + 1, 0.0)
        with pytest.raises(InvalidEpsilon):
            pmf_recursive(6, 1.0)
        with pytest.raises(InvalidEpsilon):
            pmf_recursive(6, -1e-3)

    @pytest.mark.slow
    def test_full_table_1e7_normalised(self):
        table = pmf_recursive(10**7, 0.0)
        assert len(table) == 10**7
        assert abs(table.total() - 1) < 1e-12
        # values underflow deep in the tail, logs stay finite
        assert table.probs[-1] == 0.0
        assert np.all(np.isfinite(table.log_probs))

    @pytest.mark.parametrize("n", [2, 7, 100, 999, 10**4, 123_457, 10**6])
    def test_full_table_normalised(self, n):
        assert abs(pmf_recursive(n, 0.0).total() - 1) < 1e-12


class TestPmfExplicit:
    def test_examples(self):
        assert pmf_explicit(1, 6).value == pytest.approx(1 / 6, rel=1e-15)
        assert pmf_explicit(6, 6).value == pytest.approx(5 / 324, rel=1e-14)

    def test_mode_of_n25_is_max(self):
        values = [pmf_explicit(k, 25).value for k in range(1, 26)]
        assert int(np.argmax(values)) + 1 == 5

    def test_out_of_support(self):
        for k in (0, 7):
            with pytest.raises(OutOfSupport):
                pmf_explicit(k, 6)

    def test_huge_n_no_overflow(self):
        p = pmf_explicit(3 * 10**7, 10**15)
        assert 0 < p.value < 1
        assert math.exp(p.log_value) == pytest.approx(p.value, rel=1e-15)

    @given(st.integers(1, 10**4), st.data())
    @settings(max_examples=60, deadline=None)
    def test_form_equivalence(self, n, data):
        table = pmf_recursive(n, 0.0)
        k = data.draw(st.integers(1, n))
        explicit = pmf_explicit(k, n)
        assert abs(table.probs[k - 1] - explicit.value) <= 1e-12 * explicit.value + 1e-300
        assert table.log_probs[k - 1] == pytest.approx(explicit.log_value, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("n", [10, 1000, 10**5, 10**7])
    def test_agrees_with_recursion(self, n):
        table = pmf_recursive(n, 1e-18)
        ks = np.unique(np.linspace(1, len(table), 40).astype(int))
        for k in ks:
            assert pmf_explicit(int(k), n).value == pytest.approx(table.probs[k - 1], rel=1e-10)


class TestPmfExact:
    def test_examples(self):
        assert pmf_exact(1) == [Fraction(1)]
        assert pmf_exact(2) == [Fraction(1, 2), Fraction(1, 2)]
        assert pmf_exact(6) == PMF_6

    @pytest.mark.parametrize("n", [1, 3, 17, 64, 250, 500])
    def test_normalised(self, n):
        probs = pmf_exact(n)
        assert sum(probs) == 1
        assert all(p > 0 for p in probs)

    def test_matches_formula(self):
        n = 40
        probs = pmf_exact(n)
        for k in (1, 5, 40):
            expected = Fraction(k * math.factorial(n - 1), n**k * math.factorial(n - k))
            assert probs[k - 1] == expected

    def test_too_large(self):
        with pytest.raises(TooLargeForExact):
            pmf_exact(501)
        with pytest.raises(TooLargeForExact):
            mean_exact(501)


class TestCdf:
    def test_examples(self):
        assert cdf(0.5, 6).value == 0.0
        assert cdf(6, 6).value == 1.0
        assert cdf(2.7, 6).value == pytest.approx(4 / 9, rel=1e-15)
        assert cdf(-math.inf, 6).value == 0.0
        assert cdf(math.inf, 6).value == 1.0

    def test_right_continuous_steps(self):
        assert cdf(2, 6).value == pytest.approx(4 / 9, rel=1e-15)
        assert cdf(np.nextafter(2, 0), 6).value == pytest.approx(1 / 6, rel=1e-15)

    def test_nan(self):
        with pytest.raises(ValueError):
            cdf(math.nan, 6)

    def test_large_chi_uses_exact_log_gamma(self):
        # 5e6 factors exceeds the direct-summation limit
        n, x = 10**14, 5 * 10**6
        with mpmath.workdps(30):
            tail = mpmath.exp(mpmath.loggamma(n) - x * mpmath.log(n) - mpmath.loggamma(n - x))
        assert cdf(x, n).value == pytest.approx(float(1 - tail), rel=1e-12)

    @given(st.integers(1, 5000), st.floats(-10, 6000), st.floats(0, 50))
    @settings(max_examples=100, deadline=None)
    def test_monotone_and_bounded(self, n, x, dx):
        a, b = cdf(x, n), cdf(x + dx, n)
        assert 0.0 <= a.value <= b.value <= 1.0
        assert a.log_value <= 0.0


class TestSurvival:
    def test_examples(self):
        assert survival_sum(1, 123).value == 1.0
        assert survival_sum(6, 6).value == pytest.approx(5 / 324, rel=1e-14)
        assert survival_sum(2, 6).value == pytest.approx(5 / 6, rel=1e-15)

    def test_support(self):
        with pytest.raises(OutOfSupport):
            survival_sum(0, 6)

    @given(st.integers(1, 10**4), st.data())
    @settings(max_examples=80, deadline=None)
    def test_consistent_with_cdf(self, n, data):
        k = data.draw(st.integers(1, n))
        assert abs(survival_sum(k, n).value + cdf(k - 1, n).value - 1) <= 1e-12

    def test_matches_exact_tail(self):
        probs = pmf_exact(30)
        for k in range(1, 31):
            assert survival_sum(k, 30).value == pytest.approx(float(sum(probs[k - 1:])), rel=1e-13)


class TestModes:
    def test_examples(self):
        assert modes(6).modes == (2, 3) and modes(6).bimodal
        assert modes(25).modes == (5,) and not modes(25).bimodal
        assert modes(1).modes == (1,) and not modes(1).bimodal
        assert modes(2).modes == (1, 2)

    def test_argmax_up_to_1e4(self):
        for n in range(1, 10**4 + 1):
            m = modes(n)
            logs = pmf_recursive(n, 0.0).log_probs
            top = logs.max()
            argmax = tuple(int(k) + 1 for k in np.flatnonzero(logs >= top - 1e-12))
            assert argmax == m.modes, n
            assert m.bimodal == (len(m.modes) == 2)

    def test_large_pronic_n(self):
        m = 31_622_777
        assert modes(m * (m - 1)).modes == (m - 1, m)
        assert modes(m * (m - 1) - 1).modes == (m - 1,)
        assert modes(m * (m - 1) + 1).modes == (m,)

    def test_ratio_strictly_decreasing(self):
        for n in range(2, 1001):
            prev = None
            for k in range(2, n + 1):
                # exact cross-multiplication of consecutive ratios
                num, den = n * k - (k - 1) * k, n * k - n
                if prev is not None:
                    assert num * prev[1] < prev[0] * den
                prev = (num, den)
        assert pmf_ratio(3, 6) == 1


class TestMoments:
    def test_mean_examples(self):
        assert round(mean(6), 4) == 2.7747
        assert mean(1) == 1.0
        assert mean(2) == 1.5

    def test_mean_exact(self):
        assert mean_exact(1) == 1
        assert mean_exact(2) == Fraction(3, 2)
        assert mean_exact(6) == Fraction(899, 324)
        assert round(float(mean_exact(6)), 4) == 2.7747

    def test_mean_against_exact(self):
        for n in range(1, 501):
            exact = float(mean_exact(n))
            assert abs(mean(n) - exact) <= 1e-12 * exact, n

    def test_double_sum_rearrangement(self):
        # sum_k k p_k == sum_k sum_{i>=k} p_i, exactly
        for n in (3, 10, 57):
            probs = pmf_exact(n)
            double = sum(sum(probs[k - 1:]) for k in range(1, n + 1))
            assert double == mean_exact(n)

    @pytest.mark.parametrize("n", [1, 2, 5, 17, 60, 150, 400])
    def test_incomplete_gamma_identity(self, n):
        with mpmath.workdps(50):
            ref = mpmath.e**n * mpmath.mpf(n) ** (-n) * mpmath.gammainc(n + 1, n) - 1
        assert mean(n) == pytest.approx(float(ref), rel=1e-13)

    def test_variance_examples(self):
        assert variance(1) == 0.0
        assert variance(2) == 0.25
        assert variance(6) == pytest.approx(float(variance_exact(6)), rel=1e-12)
        assert round(variance(6), 4) == 1.5264

    def test_variance_identity_exact(self):
        for n in range(1, 501):
            g = mean_exact(n)
            assert 2 * n - g - g * g == variance_exact(n)

    def test_moments_report(self):
        r = moments(6)
        assert r.method == "survival-sum"
        assert r.scaled_mean == pytest.approx(r.mean / math.sqrt(6))
        e = moments(6, exact=True)
        assert e.method == "exact-rational"
        assert e.variance == pytest.approx(r.variance, rel=1e-12)

    def test_huge_n_finite(self):
        g = mean(10**13)
        assert math.isfinite(g) and 0 < variance(10**13)


class TestTruncation:
    @pytest.mark.parametrize("e", [2, 4, 6, 8, 10, 12, 14])
    def test_bound(self, e):
        n = 10**e
        assert truncation_index(n, 1e-18) <= 8.5 * math.sqrt(n)

    def test_zero_epsilon_is_full(self):
        assert truncation_index(1000, 0.0) == 1000

    def test_table_shares_index(self):
        assert len(pmf_recursive(10**6, 1e-18)) == truncation_index(10**6, 1e-18)


class TestProbability:
    @given(st.floats(-700, 0))
    def test_log_agreement(self, log_value):
        p = Probability.from_log(log_value)
        assert 0 <= p.value <= 1
        assert math.log(p.value) == pytest.approx(log_value, rel=1e-15, abs=1e-15)

    def test_complement(self):
        p = Probability.complement_of_log(math.log(0.25))
        assert p.value == pytest.approx(0.75)
        assert p.log_value == pytest.approx(math.log(0.75))
        assert float(Probability.complement_of_log(0.0)) == 0.0
