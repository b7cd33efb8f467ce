"""Geometric Brownian motion model, its inverse-Gaussian first-passage law
and the moment/cumulant pipelines.

Three independent routes to the IG moments are provided (finite sum,
three-term recursion, partition-polynomial form); they must agree and the
tests hold them to that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import falling_factorial, partition_poly_G

#: Moment/cumulant orders beyond this are meaningless in double precision.
MAX_ORDER = 64


class InvalidModelError(ValueError):
    """Raised when model parameters violate the upward-drift regime."""


@dataclass(frozen=True)
class GbmModel:
    """Geometric Brownian motion with start y0 below a constant threshold.

    mu: drift (1/time), sigma: volatility (1/sqrt(time)).  The constraint
    mu > sigma^2/2 keeps the first passage through the threshold almost
    surely finite; models outside that regime are rejected.
    """

    mu: float
    sigma: float
    y0: float
    threshold: float

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise InvalidModelError(f"sigma must be positive, got {self.sigma}")
        if not 0 < self.y0 < self.threshold:
            raise InvalidModelError(
                f"need 0 < y0 < threshold, got y0={self.y0}, threshold={self.threshold}"
            )
        if self.mu <= self.sigma**2 / 2:
            raise InvalidModelError(
                f"need mu > sigma^2/2 (got mu={self.mu}, sigma^2/2={self.sigma**2 / 2}); "
                "below that the passage time has a defective distribution"
            )

    @property
    def log_ratio(self) -> float:
        """ln(threshold) - ln(y0), the log-distance to the barrier."""
        return math.log(self.threshold) - math.log(self.y0)


@dataclass(frozen=True)
class IgParams:
    """Inverse-Gaussian law IG(a, b): a = shape, b = mean."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0:
            raise InvalidModelError(f"IG parameters must be positive, got a={self.a}, b={self.b}")

    @property
    def variance(self) -> float:
        return self.b**3 / self.a


def ig_from_gbm(model: GbmModel) -> IgParams:
    """Parameters of the first-passage-time law of a GBM through its threshold."""
    s = model.log_ratio
    a = s**2 / model.sigma**2
    b = s / (model.mu - model.sigma**2 / 2)
    return IgParams(a=a, b=b)


def ig_pdf(p: IgParams, t):
    """Inverse-Gaussian density; 0 for t <= 0 by continuous extension.

    Accepts scalars or arrays.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = np.sqrt(p.a / (2 * np.pi * tp**3)) * np.exp(
        -p.a * (tp - p.b) ** 2 / (2 * p.b**2 * tp)
    )
    if out.ndim == 0:
        return float(out)
    return out


def ig_mode(p: IgParams) -> float:
    """Mode of the IG(a, b) density."""
    r = 3 * p.b / (2 * p.a)
    return p.b * (math.sqrt(1 + r**2) - r)


def ig_cumulants(p: IgParams, n_max: int) -> np.ndarray:
    """Cumulants c_n = (2n-3)!! b^{2n-1} / a^{n-1}, n = 1..n_max.

    Returned as an array c with c[n] the n-th cumulant (c[0] unused, 0).
    Computed by the recursion c_n = (2n-3) b^2/a * c_{n-1} with c_1 = b,
    which absorbs the (-1)!! = 1 convention at n = 1.
    """
    _check_order(n_max)
    c = np.zeros(n_max + 1)
    c[1] = p.b
    for n in range(2, n_max + 1):
        c[n] = (2 * n - 3) * p.b**2 / p.a * c[n - 1]
    return c


def ig_moments_recursive(p: IgParams, n_max: int) -> np.ndarray:
    """Moments E[T^m], m = 0..n_max, via the Bessel-free recursion
    E[T^{n+1}] = (2n-1) b^2/a E[T^n] + b^2 E[T^{n-1}].
    """
    _check_order(n_max)
    m = np.zeros(n_max + 1)
    m[0] = 1.0
    if n_max >= 1:
        m[1] = p.b
    for n in range(1, n_max):
        m[n + 1] = (2 * n - 1) * p.b**2 / p.a * m[n] + p.b**2 * m[n - 1]
    return m


def ig_moments_finite_sum(p: IgParams, n: int) -> float:
    """E[T^n] = b^n sum_{k=0}^{n-1} (n-1+k)!/(k!(n-1-k)!) (b/(2a))^k.

    Terms accumulated through incremental ratios, never raw factorials.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    _check_order(n)
    ratio = p.b / (2 * p.a)
    term = 1.0
    acc = 1.0
    for k in range(n - 1):
        term *= (n + k) * (n - 1 - k) / (k + 1) * ratio
        acc += term
    return p.b**n * acc


def ig_moments_bell(p: IgParams, n: int) -> float:
    """E[T^n] through the partition-polynomial closed form
    (-2 b^2/a)^n G_n(-a/b; (1/2)_1, (1/2)_2, ...),
    with (1/2)_k the falling factorial of 1/2.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    _check_order(n)
    x = [falling_factorial(0.5, k) for k in range(1, n + 1)]
    return (-2 * p.b**2 / p.a) ** n * partition_poly_G(n, -p.a / p.b, x)


def moments_from_cumulants(c: np.ndarray, n_max: int) -> np.ndarray:
    """Moments E[T^m], m = 0..n_max, from cumulants c[1..n_max] via
    E[T^{n+1}] = c_{n+1} + sum_{k=1}^n C(n, k-1) c_k E[T^{n+1-k}].
    """
    _check_order(n_max)
    if len(c) < n_max + 1:
        raise ValueError(f"need cumulants through order {n_max}, got {len(c) - 1}")
    m = np.zeros(n_max + 1)
    m[0] = 1.0
    for n in range(n_max):
        acc = c[n + 1]
        for k in range(1, n + 1):
            acc += math.comb(n, k - 1) * c[k] * m[n + 1 - k]
        m[n + 1] = acc
    return m


def _check_order(n: int) -> None:
    if n > MAX_ORDER:
        raise ValueError(f"moment/cumulant order capped at {MAX_ORDER}, got {n}")
