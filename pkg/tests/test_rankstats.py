import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from oracles import kendall_hand, perm_pvalue, spearman_hand
from xlgap.errors import DegenerateInputError, DomainError, UnsupportedSizeError
from xlgap.rankstats import average_ranks, exact_perm_pvalue, kendall_tau_b, spearman


class TestSpearman:
    def test_perfect_monotone(self):
        r = spearman([1, 2, 3, 4], [10, 20, 30, 40])
        assert r.coefficient == pytest.approx(1.0, abs=1e-15)
        assert r.p_value == pytest.approx(2 / 24, abs=1e-15)
        assert (r.method, r.p_method, r.n) == ("spearman", "exact_permutation", 4)

    def test_perfect_anti(self):
        assert spearman([1, 2, 3], [3, 2, 1]).coefficient == pytest.approx(-1.0, abs=1e-15)

    def test_n6_permutation_oracle(self, rng):
        x, y = rng.normal(size=6), rng.normal(size=6)
        r = spearman(x, y)
        assert r.coefficient == pytest.approx(spearman_hand(list(x), list(y)), abs=1e-12)
        assert r.p_value == perm_pvalue(spearman_hand, list(x), list(y))

    def test_ties_average_ranks(self):
        np.testing.assert_array_equal(average_ranks([3, 1, 3, 2]), [3.5, 1, 3.5, 2])
        assert spearman([1, 2, 2, 3], [1, 3, 2, 4]).coefficient == pytest.approx(
            stats.spearmanr([1, 2, 2, 3], [1, 3, 2, 4]).statistic, abs=1e-12
        )

    def test_asymptotic_matches_scipy(self, rng):
        x, y = rng.normal(size=40), rng.normal(size=40)
        r = spearman(x, y)
        assert r.p_method == "asymptotic"
        ref = stats.spearmanr(x, y)
        assert r.coefficient == pytest.approx(ref.statistic, abs=1e-12)
        assert r.p_value == pytest.approx(ref.pvalue, rel=1e-9)

    @pytest.mark.parametrize("x, y", [([1, 2, 3], [1, 2]), ([1, 2], [1, 2])])
    def test_length_errors(self, x, y):
        with pytest.raises(DomainError):
            spearman(x, y)

    def test_constant(self):
        with pytest.raises(DegenerateInputError):
            spearman([1, 2, 3, 4], [5, 5, 5, 5])


class TestKendall:
    def test_concordant(self):
        assert kendall_tau_b([1, 2, 3, 4], [2, 4, 6, 8]).coefficient == 1.0

    def test_hand_count(self):
        assert kendall_tau_b([1, 2, 3, 4], [1, 3, 2, 4]).coefficient == pytest.approx(4 / 6, abs=1e-3)

    def test_n6_permutation_oracle(self, rng):
        x, y = rng.normal(size=6), rng.normal(size=6)
        r = kendall_tau_b(x, y)
        assert r.coefficient == pytest.approx(kendall_hand(list(x), list(y)), abs=1e-12)
        assert r.p_value == perm_pvalue(kendall_hand, list(x), list(y))

    def test_tau_b_ties_match_scipy(self):
        x, y = [1, 1, 2, 3, 3, 4], [2, 1, 1, 3, 4, 4]
        assert kendall_tau_b(x, y).coefficient == pytest.approx(stats.kendalltau(x, y).statistic, abs=1e-12)

    def test_asymptotic_variance_matches_scipy_without_correction(self, rng):
        # our p adds a continuity correction; undo it by comparing z-scores
        x = rng.integers(0, 5, size=30).astype(float)
        y = x + rng.integers(0, 4, size=30)
        r = kendall_tau_b(x, y)
        assert r.p_method == "asymptotic"
        assert r.coefficient == pytest.approx(stats.kendalltau(x, y).statistic, abs=1e-12)
        assert r.p_value >= stats.kendalltau(x, y, method="asymptotic").pvalue

    def test_constant(self):
        with pytest.raises(DegenerateInputError):
            kendall_tau_b([1, 1, 1], [1, 2, 3])


class TestExactPermutation:
    def test_n3_monotone(self):
        assert exact_perm_pvalue("spearman", [1, 2, 3], [4, 5, 9]) == pytest.approx(2 / 6)

    def test_constant_y(self):
        with pytest.raises(DegenerateInputError):
            exact_perm_pvalue("spearman", [1, 2, 3], [0, 0, 0])

    def test_size_limit(self):
        with pytest.raises(UnsupportedSizeError):
            exact_perm_pvalue("kendall", range(11), range(11))

    def test_shuffled_order_bit_identical(self, rng):
        x, y = rng.normal(size=7), rng.normal(size=7)
        for stat_name, oracle in (("spearman", spearman_hand), ("kendall", kendall_hand)):
            p = exact_perm_pvalue(stat_name, x, y)
            assert p == exact_perm_pvalue(stat_name, x, y, chunk=37)
            perms = list(itertools.permutations(range(7)))
            order = rng.permutation(len(perms))
            observed = abs(oracle(list(x), list(y)))
            hits = sum(
                1 for k in order if abs(oracle(list(x), [y[i] for i in perms[k]])) >= observed - 1e-12
            )
            assert p == hits / len(perms)

    def test_with_ties_matches_oracle(self):
        x, y = [1, 2, 2, 3, 4, 5], [2, 1, 4, 4, 3, 6]
        assert exact_perm_pvalue("spearman", x, y) == perm_pvalue(spearman_hand, x, y)
        assert exact_perm_pvalue("kendall", x, y) == perm_pvalue(kendall_hand, x, y)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 9))
def test_rank_invariance_and_antisymmetry(seed, n):
    g = np.random.default_rng(seed)
    x, y = g.normal(size=n), g.normal(size=n)
    for fn in (spearman, kendall_tau_b):
        base = fn(x, y, p_method="asymptotic").coefficient
        assert fn(np.exp(x), y**3, p_method="asymptotic").coefficient == pytest.approx(base, abs=1e-12)
        assert fn(x, -y, p_method="asymptotic").coefficient == pytest.approx(-base, abs=1e-12)
        assert -1 <= base <= 1
