import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lagfpt.special import (
    bell_partial,
    falling_binom,
    falling_factorial,
    laguerre,
    partition_poly_G,
    rising_factorial,
)


def _binom_general(x, m):
    return falling_factorial(x, m) / math.factorial(m)


def laguerre_binomial_sum(k, alpha, t):
    """Independent oracle: the defining binomial sum.

    Evaluated in exact rational arithmetic; the alternating terms grow like
    t^k / k! and cancel far below the double-precision noise floor, so a
    float evaluation of the same sum could not back a 1e-12 comparison.
    """
    alpha, t = Fraction(alpha), Fraction(t)
    total = Fraction(0)
    for i in range(k + 1):
        binom = Fraction(1)
        for r in range(k - i):
            binom *= (k + alpha - r) / (k - i - r)
        total += binom * (-t) ** i / math.factorial(i)
    return float(total)


def set_partitions(items):
    """All partitions of a list into blocks (test oracle)."""
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1 :]
        yield [[head]] + part


def bell_enumerated(n, j, x):
    """B_{n,j} by brute-force enumeration of set partitions (n <= 8)."""
    total = 0.0
    for part in set_partitions(list(range(n))):
        if len(part) == j:
            prod = 1.0
            for block in part:
                prod *= x[len(block) - 1]
            total += prod
    return total


class TestLaguerre:
    def test_degree_zero_is_one(self):
        for alpha in (-0.5, 0.0, 3.2):
            for t in (0.0, 1.0, 17.5):
                assert laguerre(0, alpha, t) == 1.0

    def test_degree_one(self):
        assert laguerre(1, 2.0, 3.0) == pytest.approx(0.0, abs=1e-15)
        assert laguerre(1, 0.7, 0.2) == pytest.approx(1.5)

    def test_degree_two_direct_sum(self):
        expected = sum(math.comb(2, 2 - i) * (-1.0) ** i / math.factorial(i) for i in range(3))
        assert laguerre(2, 0.0, 1.0) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.5])
    def test_recurrence_matches_binomial_sum(self, alpha):
        for k in range(21):
            for t in np.linspace(0.0, 50.0, 11):
                ref = laguerre_binomial_sum(k, alpha, t)
                got = laguerre(k, alpha, t)
                assert got == pytest.approx(ref, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.5])
    def test_orthogonality(self, alpha):
        for n in range(9):
            for m in range(n, 9):
                val, _ = quad(
                    lambda t: t**alpha * math.exp(-t) * laguerre(n, alpha, t) * laguerre(m, alpha, t),
                    0.0,
                    np.inf,
                )
                expected = math.gamma(n + alpha + 1) / math.factorial(n) if n == m else 0.0
                assert val == pytest.approx(expected, abs=1e-8)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            laguerre(3, -1.0, 1.0)
        with pytest.raises(ValueError):
            laguerre(-1, 0.0, 1.0)


class TestBellPartial:
    def test_single_block(self):
        x = [2.0, 3.0, 5.0, 7.0]
        for n in range(1, 5):
            assert bell_partial(n, 1, x) == pytest.approx(x[n - 1])

    def test_b32(self):
        x1, x2 = 1.7, -0.3
        assert bell_partial(3, 2, [x1, x2]) == pytest.approx(3 * x1 * x2)

    @pytest.mark.parametrize("n,j", [(n, j) for n in range(1, 8) for j in range(1, n + 1)])
    def test_matches_enumeration(self, n, j):
        rng = np.random.default_rng(n * 31 + j)
        x = rng.normal(size=n - j + 1)
        assert bell_partial(n, j, x) == pytest.approx(bell_enumerated(n, j, x), rel=1e-12, abs=1e-12)

    @given(
        n=st.integers(2, 8),
        p=st.floats(0.2, 3.0),
        q=st.floats(0.2, 3.0),
        seed=st.integers(0, 1000),
    )
    @settings(max_examples=60, deadline=None)
    def test_scaling_property(self, n, p, q, seed):
        # B_{n,j}(p q x1, p q^2 x2, ...) = p^j q^n B_{n,j}(x1, x2, ...)
        rng = np.random.default_rng(seed)
        x = rng.normal(size=n)
        for j in range(1, n + 1):
            scaled = [p * q ** (k + 1) * x[k] for k in range(n - j + 1)]
            lhs = bell_partial(n, j, scaled)
            rhs = p**j * q**n * bell_partial(n, j, x)
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)

    def test_rejects_bad_indices(self):
        with pytest.raises(ValueError):
            bell_partial(3, 0, [1.0])
        with pytest.raises(ValueError):
            bell_partial(3, 4, [1.0, 1.0, 1.0])


class TestPartitionPoly:
    def test_n1(self):
        assert partition_poly_G(1, 2.5, [1.3]) == pytest.approx(2.5 * 1.3)

    def test_n2_unit(self):
        # enumerating partitions of {1,2}: one pair + one split
        assert partition_poly_G(2, 1.0, [1.0, 1.0]) == pytest.approx(2.0)

    def test_n3_singletons_only(self):
        assert partition_poly_G(3, 2.0, [1.0, 0.0, 0.0]) == pytest.approx(8.0)

    def test_matches_bell_sum(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=6)
        y = 0.8
        expected = sum(y**j * bell_partial(6, j, x) for j in range(1, 7))
        assert partition_poly_G(6, y, x) == pytest.approx(expected, rel=1e-12)


class TestFallingBinom:
    def test_diagonal_is_one(self):
        for alpha in (-0.5, 0.0, 4.2):
            for j in range(6):
                assert falling_binom(alpha, j, j) == 1.0

    def test_direct_product(self):
        assert falling_binom(2.5, 3, 1) == pytest.approx(5.5 * 4.5 / 2)

    def test_integer_case(self):
        assert falling_binom(0.0, 4, 0) == pytest.approx(1.0)
        assert falling_binom(2.0, 5, 2) == pytest.approx(math.comb(7, 3))

    def test_rejects_k_above_j(self):
        with pytest.raises(ValueError):
            falling_binom(1.0, 2, 3)


class TestFactorials:
    def test_falling(self):
        assert falling_factorial(0.5, 3) == pytest.approx(0.5 * (-0.5) * (-1.5))
        assert falling_factorial(4.0, 0) == 1.0

    def test_rising_matches_gamma_ratio(self):
        alpha = 1.3
        for k in range(8):
            assert rising_factorial(alpha + 1, k) == pytest.approx(
                math.gamma(alpha + 1 + k) / math.gamma(alpha + 1), rel=1e-12
            )
