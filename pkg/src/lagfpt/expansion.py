"""Laguerre-Gamma approximation engine.

A target density on (0, inf) is expanded against a gamma reference
f_{alpha,beta}(t) = beta (beta t)^alpha e^{-beta t} / Gamma(alpha+1) in the
generalized Laguerre basis.  The degree-n truncation is

    ghat_n(t) = f_{alpha,beta}(t) * p_n(t)

where p_n is kept in rearranged power form with coefficients h_{n,k}, which
makes nested (Horner-like) evaluation and O(n) degree extension possible.
The exact normalization identity on the h table doubles as the numerical
stability detector that drives adaptive degree selection.
"""
from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .special import falling_binom, rising_factorial

#: Degree cap for adaptive construction; past ~40 the normalization
#: diagnostic has always tripped in the limit-case regime.
DEFAULT_N_CAP = 64

#: Default tolerance for the normalization-drift stopping criterion.
DEFAULT_EPSILON = 1e-6


class AdmissibilityError(ValueError):
    """Raised when a gamma reference cannot be formed."""


@dataclass(frozen=True)
class GammaReference:
    """Gamma reference density f_{alpha,beta}; alpha > -1, beta > 0 (1/time)."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.alpha <= -1:
            raise AdmissibilityError(f"alpha must be > -1, got {self.alpha}")
        if self.beta <= 0:
            raise AdmissibilityError(f"beta must be positive, got {self.beta}")

    @property
    def mean(self) -> float:
        return (self.alpha + 1) / self.beta

    @property
    def variance(self) -> float:
        return (self.alpha + 1) / self.beta**2


class Admissibility(enum.Enum):
    STRICT = "strict"
    LIMIT = "limit"
    VIOLATED = "violated"


def gamma_pdf(ref: GammaReference, t):
    """Gamma reference density, evaluated through its log form.

    For alpha in (-1, 0) the density diverges at 0, so t = 0 is rejected
    there; for alpha >= 0 the continuous extension at t <= 0 is used.
    """
    t = np.asarray(t, dtype=float)
    if ref.alpha < 0 and np.any(t == 0):
        raise ValueError("gamma density diverges at t = 0 for alpha < 0")
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    log_f = (
        math.log(ref.beta)
        + ref.alpha * (math.log(ref.beta) + np.log(tp))
        - ref.beta * tp
        - math.lgamma(ref.alpha + 1)
    )
    out[pos] = np.exp(log_f)
    if out.ndim == 0:
        return float(out)
    return out


def default_reference(c1: float, c2: float) -> GammaReference:
    """Reference matching the target's first two moments:
    alpha = c1^2/c2 - 1, beta = c1/c2.
    """
    if c1 <= 0 or c2 <= 0:
        raise AdmissibilityError(f"need positive c1, c2; got c1={c1}, c2={c2}")
    return GammaReference(alpha=c1**2 / c2 - 1, beta=c1 / c2)


def check_beta_admissible(
    ref: GammaReference, c1: float, c2: float, rel_tol: float = 1e-12
) -> Admissibility:
    """Classify beta against the convergence bound beta <= c1/c2.

    The bound with equality (the default reference) is the limit regime,
    where the mean-square convergence rate guarantees weaken.  A violated
    bound is reported with a warning, not an error: the expansion remains
    usable in the Abel-summed sense.
    """
    bound = c1 / c2
    if abs(ref.beta - bound) <= rel_tol * bound:
        return Admissibility.LIMIT
    if ref.beta < bound:
        return Admissibility.STRICT
    warnings.warn(
        f"beta={ref.beta} exceeds the admissibility bound c1/c2={bound}; the "
        "series is only Abel-summable and the truncation may behave poorly",
        stacklevel=2,
    )
    return Admissibility.VIOLATED


def coeff_B_direct(ref: GammaReference, moments: Sequence[float], k: int) -> float:
    """Expansion coefficient B_k = 1 + sum_{j=1}^k C(k,j) (-beta)^j E[T^j] / (alpha+j)_j."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if len(moments) < k + 1:
        raise ValueError(f"need moments through order {k}")
    acc = 1.0
    for j in range(1, k + 1):
        acc += (
            math.comb(k, j)
            * (-ref.beta) ** j
            * moments[j]
            / rising_factorial(ref.alpha + 1, j)
        )
    return acc


def coeff_B_recursive(ref: GammaReference, moments: Sequence[float], k_max: int) -> np.ndarray:
    """All coefficients B_0..B_{k_max} via
    B_k = sum_{j=1}^k C(k,j) (-1)^{j+1} B_{k-j} + (-beta)^k E[T^k] / (alpha+k)_k.
    """
    if len(moments) < k_max + 1:
        raise ValueError(f"need moments through order {k_max}")
    b = np.zeros(k_max + 1)
    b[0] = 1.0
    for k in range(1, k_max + 1):
        acc = (-ref.beta) ** k * moments[k] / rising_factorial(ref.alpha + 1, k)
        for j in range(1, k + 1):
            acc += math.comb(k, j) * (-1) ** (j + 1) * b[k - j]
        b[k] = acc
    return b


def h_from_B(b_coeffs: Sequence[float], alpha: float) -> np.ndarray:
    """Rearranged coefficients h_{n,k} = sum_{j=k}^n B_j C(alpha+j, j-k)."""
    n = len(b_coeffs) - 1
    h = np.zeros(n + 1)
    for j in range(n + 1):
        # C(alpha+j, j-k) for k = j..0 by a running product
        coef = 1.0
        h[j] += b_coeffs[j]
        for k in range(j - 1, -1, -1):
            coef *= (alpha + k + 1) / (j - k)
            h[k] += b_coeffs[j] * coef
    return h


@dataclass(frozen=True)
class LaguerreExpansion:
    """Degree-n truncated expansion against a gamma reference.

    b_coeffs holds B_0..B_n (B_0 = 1); h holds the power-form coefficients
    h_{n,0}..h_{n,n}.  stop_reason is set by adaptive construction
    ("criterion" or "cap"), None for fixed-degree builds.
    """

    ref: GammaReference
    b_coeffs: np.ndarray
    h: np.ndarray
    stop_reason: str | None = None

    @property
    def n(self) -> int:
        return len(self.h) - 1

    @property
    def h_hat(self) -> float:
        """Normalization diagnostic; 1 in exact arithmetic."""
        return normalization_check(self)


def build_expansion(ref: GammaReference, moments: Sequence[float], n: int) -> LaguerreExpansion:
    """Fixed-degree expansion from moments known through order n."""
    b = coeff_B_recursive(ref, moments, n)
    return LaguerreExpansion(ref=ref, b_coeffs=b, h=h_from_B(b, ref.alpha))


def extend_expansion(exp: LaguerreExpansion, b_next: float) -> LaguerreExpansion:
    """Degree n -> n+1 update: h_{n+1,n+1} = B_{n+1} and
    h_{n+1,i} = h_{n,i} + B_{n+1} C(alpha+n+1, n+1-i) for i <= n.
    """
    n1 = exp.n + 1
    h = np.zeros(n1 + 1)
    h[n1] = b_next
    # running product over C(alpha+n1, n1-i), i = n..0
    coef = 1.0
    for i in range(exp.n, -1, -1):
        coef *= (exp.ref.alpha + i + 1) / (n1 - i)
        h[i] = exp.h[i] + b_next * coef
    return LaguerreExpansion(
        ref=exp.ref,
        b_coeffs=np.append(exp.b_coeffs, b_next),
        h=h,
        stop_reason=exp.stop_reason,
    )


def eval_pn(exp: LaguerreExpansion, t):
    """Polynomial factor p_n(t) by nested evaluation
    d_i = h_{n,i-1} - (beta t / i) d_{i+1}, seeded with d_{n+1} = h_{n,n}.
    """
    t = np.asarray(t, dtype=float)
    bt = exp.ref.beta * t
    d = np.full_like(bt, exp.h[exp.n])
    for i in range(exp.n, 0, -1):
        d = exp.h[i - 1] - bt / i * d
    if d.ndim == 0:
        return float(d)
    return d


def ghat_eval(exp: LaguerreExpansion, t):
    """Approximated density ghat_n(t) = f_{alpha,beta}(t) p_n(t), t > 0.

    May be negative pointwise; it still integrates to 1 exactly.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("ghat is defined for t > 0")
    out = gamma_pdf(exp.ref, t) * eval_pn(exp, t)
    if np.ndim(out) == 0:
        return float(out)
    return out


def normalization_check(exp: LaguerreExpansion) -> float:
    """h_{n,0} + sum_i (-1)^i/i! h_{n,i} (alpha+i)_i; exactly 1 in
    infinite precision, so the drift from 1 measures accumulated error.
    """
    alpha = exp.ref.alpha
    acc = exp.h[0]
    coef = 1.0  # (-1)^i (alpha+i)_i / i!
    for i in range(1, exp.n + 1):
        coef *= -(alpha + i) / i
        acc += coef * exp.h[i]
    return float(acc)


def moment_of_ghat(exp: LaguerreExpansion, m: int) -> float:
    """Closed-form m-th moment of ghat_n; equals the target's E[T^m] for m <= n."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    alpha = exp.ref.alpha
    coef = rising_factorial(alpha + 1, m)  # (-1)^k (alpha+1)_{k+m} / k! at k=0
    acc = coef * exp.h[0]
    for k in range(1, exp.n + 1):
        coef *= -(alpha + k + m) / k
        acc += coef * exp.h[k]
    return float(acc) / exp.ref.beta**m


def build_adaptive(
    ref: GammaReference,
    moments: Sequence[float],
    epsilon: float = DEFAULT_EPSILON,
    n_cap: int = DEFAULT_N_CAP,
) -> LaguerreExpansion:
    """Grow the expansion until the normalization drift exceeds epsilon.

    Returns the expansion at the smallest n for which |h_hat_{n+1} - 1|
    first exceeds epsilon (stop_reason "criterion"), or at n_cap
    (stop_reason "cap"; never silent).  Moments must be available through
    order n_cap.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    b = coeff_B_recursive(ref, moments, n_cap)
    exp = LaguerreExpansion(ref=ref, b_coeffs=b[:1].copy(), h=np.array([1.0]))
    while exp.n < n_cap:
        candidate = extend_expansion(exp, b[exp.n + 1])
        if abs(candidate.h_hat - 1.0) > epsilon:
            return dataclasses.replace(exp, stop_reason="criterion")
        exp = candidate
    return dataclasses.replace(exp, stop_reason="cap")


def successive_l2_difference(prev: LaguerreExpansion, cur: LaguerreExpansion) -> float:
    """Weighted L2 distance ||p_n - p_{n-1}||_{alpha,beta} between successive
    truncations, in closed form via orthogonality.

    Diagnostic only: the matching stopping rule is numerically unstable
    and is never the default.
    """
    if prev.ref != cur.ref:
        raise ValueError("expansions must share the same reference")
    alpha = cur.ref.alpha
    acc = 0.0
    for k in range(prev.n + 1, cur.n + 1):
        norm_sq = rising_factorial(alpha + 1, k) / math.factorial(k)
        acc += cur.b_coeffs[k] ** 2 * norm_sq
    return math.sqrt(acc)


def diagnostic_grid(mean: float, variance: float, points: int = 2048) -> np.ndarray:
    """Uniform evaluation grid on (0, mean + 10 sd], covering bulk and right tail."""
    t_max = mean + 10 * math.sqrt(variance)
    return np.linspace(t_max / points, t_max, points)


def negativity_count(exp: LaguerreExpansion, t) -> int:
    """Number of grid points where ghat_n is negative (reported, never clipped)."""
    return int(np.count_nonzero(np.asarray(ghat_eval(exp, t)) < 0))
