"""Combinatorial and special-function kernels.

Generalized Laguerre polynomials, partial exponential Bell polynomials,
partition polynomials and factorial-type coefficients.  Everything here is a
pure function of scalars/sequences and safe to call concurrently.
"""
from __future__ import annotations

import math
from typing import Sequence


def falling_factorial(x: float, k: int) -> float:
    """x (x-1) ... (x-k+1), with the empty product equal to 1."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 1.0
    for i in range(k):
        out *= x - i
    return out


def rising_factorial(x: float, k: int) -> float:
    """x (x+1) ... (x+k-1), with the empty product equal to 1.

    rising_factorial(alpha + 1, k) equals the falling factorial
    (alpha + k)(alpha + k - 1) ... (alpha + 1) and, for alpha > -1, the
    gamma ratio Gamma(alpha + 1 + k) / Gamma(alpha + 1).  Computed as a
    running product on purpose: gamma-function calls overflow for
    arguments beyond ~170 while the coefficients built from this helper
    stay representable.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 1.0
    for i in range(k):
        out *= x + i
    return out


def laguerre(k: int, alpha: float, t: float) -> float:
    """Generalized Laguerre polynomial L_k^{(alpha)}(t), alpha > -1.

    Evaluated through the three-term recurrence
    (k+1) L_{k+1} = (2k+1+alpha-t) L_k - (k+alpha) L_{k-1},
    which is stable where the direct binomial sum cancels badly.
    """
    if alpha <= -1:
        raise ValueError(f"alpha must be > -1, got {alpha}")
    if k < 0:
        raise ValueError(f"polynomial degree must be nonnegative, got {k}")
    if k == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + alpha - t
    for i in range(1, k):
        prev, cur = cur, ((2 * i + 1 + alpha - t) * cur - (i + alpha) * prev) / (i + 1)
    return cur


def falling_binom(alpha: float, j: int, k: int) -> float:
    """Binomial-type coefficient C(alpha + j, j - k) for 0 <= k <= j.

    Equal to 1 when j == k, otherwise
    (alpha+j)(alpha+j-1)...(alpha+k+1) / (j-k)!.  Built as an iterative
    product rather than a ratio of gamma functions so large j never
    overflows.
    """
    if k < 0 or k > j:
        raise ValueError(f"need 0 <= k <= j, got k={k}, j={j}")
    out = 1.0
    for i in range(k + 1, j + 1):
        out *= (alpha + i) / (i - k)
    return out


def _bell_row(n: int, x: Sequence[float]) -> list[float]:
    """All partial Bell polynomials B_{n,j}(x_1, ..., x_{n-j+1}), j = 0..n."""
    # table[m][i] = B_{m,i}; built bottom-up via
    # B_{m,i} = sum_r C(m-1, r-1) x_r B_{m-r, i-1}
    # entries x_r with r > n-j+1 never reach B_{n,j}; padding with zeros
    # keeps the intermediate rows of the table well defined
    x = list(x) + [0.0] * max(0, n - len(x))
    table: list[list[float]] = [[1.0]]
    for m in range(1, n + 1):
        row = [0.0]
        for i in range(1, m + 1):
            acc = 0.0
            for r in range(1, m - i + 2):
                acc += math.comb(m - 1, r - 1) * x[r - 1] * table[m - r][i - 1]
            row.append(acc)
        table.append(row)
    return table[n]


def bell_partial(n: int, j: int, x: Sequence[float]) -> float:
    """Partial exponential Bell polynomial B_{n,j}(x_1, ..., x_{n-j+1})."""
    if j < 1 or j > n:
        raise ValueError(f"need 1 <= j <= n, got j={j}, n={n}")
    if len(x) < n - j + 1:
        raise ValueError(f"need at least {n - j + 1} arguments, got {len(x)}")
    return _bell_row(n, x)[j]


def partition_poly_G(n: int, y: float, x: Sequence[float]) -> float:
    """Partition polynomial G_n(y; x) = sum_{j=1}^n y^j B_{n,j}(x)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if len(x) < n:
        raise ValueError(f"need at least {n} arguments, got {len(x)}")
    row = _bell_row(n, x)
    acc = 0.0
    yj = 1.0
    for j in range(1, n + 1):
        yj *= y
        acc += yj * row[j]
    return acc
