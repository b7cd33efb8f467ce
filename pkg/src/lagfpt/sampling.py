"""First-passage-time sample generation and cumulant estimation.

Trajectories are simulated with the Milstein scheme and crossings recorded
at grid resolution with linear interpolation between the bracketing points
(no bridge correction; discrete monitoring has a known positive bias).
An exact inverse-Gaussian sampler serves as discretization-free oracle.
Cumulants are estimated by k-statistics: symmetric functions of the sample
whose expectation equals the corresponding cumulant exactly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .expansion import (
    DEFAULT_EPSILON,
    DEFAULT_N_CAP,
    LaguerreExpansion,
    build_adaptive,
    default_reference,
)
from .gbm import GbmModel, IgParams, ig_from_gbm, moments_from_cumulants

#: k-statistics beyond this order are estimation noise at realistic sample sizes.
MAX_KSTAT_ORDER = 10

DEFAULT_DT = 1e-3
MAX_CENSOR_FRACTION = 0.01


class CensoringError(RuntimeError):
    """Raised when too many paths fail to cross before the time horizon."""


class DegenerateSampleError(ValueError):
    """Raised when the sample is too small for the requested statistic."""


@dataclass
class FptSample:
    """Nonnegative FPT observations plus provenance."""

    times: np.ndarray
    source: str = "file"  # milstein | exact-ig | file
    seed: int | None = None
    dt: float | None = None
    censored: int = 0

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size < 1:
            raise DegenerateSampleError("sample must contain at least one observation")
        if np.any(self.times <= 0):
            raise DegenerateSampleError("all passage times must be positive")

    @property
    def size(self) -> int:
        return int(self.times.size)


def default_horizon(p: IgParams) -> float:
    """Simulation horizon: mean plus twenty standard deviations of the FPT law."""
    return p.b + 20 * math.sqrt(p.variance)


def simulate_gbm_fpt(
    model: GbmModel,
    n_paths: int,
    dt: float = DEFAULT_DT,
    t_max: float | None = None,
    seed: int | None = 0,
    max_censor_fraction: float = MAX_CENSOR_FRACTION,
) -> FptSample:
    """Simulate GBM paths with the Milstein update
    Y_{k+1} = Y_k + mu Y_k dt + sigma Y_k dW + 0.5 sigma^2 Y_k (dW^2 - dt)
    and record the first grid crossing of the threshold, linearly
    interpolated between the bracketing grid points.

    Paths still below the threshold at t_max are censored and excluded;
    more than max_censor_fraction of them is an error (horizon too short).
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be positive, got {n_paths}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_max is None:
        t_max = default_horizon(ig_from_gbm(model))
    rng = np.random.default_rng(seed)

    mu, sigma, s = model.mu, model.sigma, model.threshold
    sqrt_dt = math.sqrt(dt)
    n_steps = int(math.ceil(t_max / dt))

    times = np.full(n_paths, np.nan)
    y = np.full(n_paths, float(model.y0))
    active = np.arange(n_paths)
    for step in range(n_steps):
        if active.size == 0:
            break
        dw = rng.normal(0.0, sqrt_dt, size=active.size)
        y_old = y[active]
        y_new = y_old * (1.0 + mu * dt + sigma * dw + 0.5 * sigma**2 * (dw * dw - dt))
        crossed = y_new >= s
        hit = active[crossed]
        if hit.size:
            frac = (s - y_old[crossed]) / (y_new[crossed] - y_old[crossed])
            times[hit] = (step + frac) * dt
        y[active] = y_new
        active = active[~crossed]

    censored = int(active.size)
    if censored > max_censor_fraction * n_paths:
        raise CensoringError(
            f"{censored}/{n_paths} paths did not cross by t_max={t_max}; increase t_max"
        )
    return FptSample(
        times=times[~np.isnan(times)], source="milstein", seed=seed, dt=dt, censored=censored
    )


def sample_ig_exact(p: IgParams, n: int, seed: int | None = 0) -> FptSample:
    """Exact IG(a, b) draws via the Michael-Schucany-Haas transformation:
    a chi-square variate selects between the two roots of the defining
    quadratic, with the acceptance probability b/(b + root).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    mean, shape = p.b, p.a
    y = rng.standard_normal(n) ** 2
    root = mean + mean**2 * y / (2 * shape) - mean / (2 * shape) * np.sqrt(
        4 * mean * shape * y + (mean * y) ** 2
    )
    u = rng.uniform(size=n)
    times = np.where(u <= mean / (mean + root), root, mean**2 / root)
    return FptSample(times=times, source="exact-ig", seed=seed)


# -- k-statistics -----------------------------------------------------------
#
# The estimator of c_r is assembled from augmented monomial symmetric
# functions: for a partition sigma with parts (s_1, ..., s_l),
# m~_sigma = sum over distinct indices i_1 != ... != i_l of prod T_{i_j}^{s_j},
# whose expectation is N(N-1)...(N-l+1) * prod E[T^{s_j}].  Augmented
# monomials reduce to power sums through
#   m~_{sigma + [s]} = m~_sigma * p_s - sum_i m~_{sigma with part i += s},
# and the cumulant follows from its set-partition expansion over raw moments.


def _integer_partitions(n: int) -> list[tuple[int, ...]]:
    """All partitions of n as non-increasing tuples."""
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, cap: int, acc: tuple[int, ...]) -> None:
        if remaining == 0:
            out.append(acc)
            return
        for part in range(min(cap, remaining), 0, -1):
            rec(remaining - part, part, acc + (part,))

    rec(n, n, ())
    return out


def _augmented_monomial(sigma: tuple[int, ...], power_sums: dict[int, float]) -> float:
    memo: dict[tuple[int, ...], float] = {}

    def rec(sig: tuple[int, ...]) -> float:
        if len(sig) == 1:
            return power_sums[sig[0]]
        if sig in memo:
            return memo[sig]
        rest, s = sig[:-1], sig[-1]
        val = rec(rest) * power_sums[s]
        for i in range(len(rest)):
            merged = tuple(sorted(rest[:i] + (rest[i] + s,) + rest[i + 1 :], reverse=True))
            val -= rec(merged)
        memo[sig] = val
        return val

    return rec(tuple(sorted(sigma, reverse=True)))


def k_statistics(sample: FptSample | np.ndarray, r_max: int) -> np.ndarray:
    """Unbiased cumulant estimators kappa_1..kappa_r_max.

    Returned as an array k with k[r] the r-th k-statistic (k[0] unused, 0).
    E[k[r]] equals the r-th cumulant exactly for any parent distribution.
    """
    times = sample.times if isinstance(sample, FptSample) else np.asarray(sample, dtype=float)
    n = times.size
    if r_max < 1 or r_max > MAX_KSTAT_ORDER:
        raise ValueError(f"r_max must be in 1..{MAX_KSTAT_ORDER}, got {r_max}")
    if n < r_max:
        raise DegenerateSampleError(f"need at least {r_max} observations, got {n}")

    # compensated power sums; math.fsum is exact in double accumulation
    power_sums = {j: math.fsum(times**j) for j in range(1, r_max + 1)}

    kappa = np.zeros(r_max + 1)
    for r in range(1, r_max + 1):
        acc = 0.0
        for sigma in _integer_partitions(r):
            ell = len(sigma)
            mults: dict[int, int] = {}
            for part in sigma:
                mults[part] = mults.get(part, 0) + 1
            n_set_partitions = math.factorial(r)
            for part in sigma:
                n_set_partitions //= math.factorial(part)
            for m in mults.values():
                n_set_partitions //= math.factorial(m)
            weight = (-1) ** (ell - 1) * math.factorial(ell - 1) * n_set_partitions
            ff = 1.0
            for i in range(ell):
                ff *= n - i
            acc += weight * _augmented_monomial(sigma, power_sums) / ff
        kappa[r] = acc
    return kappa


def approximate_from_sample(
    sample: FptSample,
    r_max: int = MAX_KSTAT_ORDER,
    epsilon: float = DEFAULT_EPSILON,
    n_cap: int = DEFAULT_N_CAP,
) -> tuple[LaguerreExpansion, np.ndarray]:
    """Build an adaptive expansion from raw FPT data.

    Pipeline: k-statistics -> moments (cumulant recursion) -> two-moment
    gamma reference -> adaptive degree search.  Cumulants beyond r_max are
    extrapolated as zero; a warning flags any build whose final degree
    actually relies on them.  Returns the expansion and the k-statistics.
    """
    kappa = k_statistics(sample, r_max)
    if kappa[2] <= 0:
        raise DegenerateSampleError(
            f"second k-statistic is not positive ({kappa[2]}); sample too small or degenerate"
        )
    cumulants = np.zeros(max(n_cap, r_max) + 1)
    cumulants[1 : r_max + 1] = kappa[1:]
    moments = moments_from_cumulants(cumulants, n_cap)
    ref = default_reference(kappa[1], kappa[2])
    exp = build_adaptive(ref, moments, epsilon=epsilon, n_cap=n_cap)
    if exp.n > r_max:
        warnings.warn(
            f"expansion degree {exp.n} exceeds the estimated cumulant order {r_max}; "
            "higher moments rely on zero-extrapolated cumulants",
            stacklevel=2,
        )
    return exp, kappa


# -- sample files -----------------------------------------------------------
# Plain text, one positive decimal FPT per line; '#'-prefixed header lines
# echo metadata (source, seed, dt, model parameters).


def save_sample(sample: FptSample, path: str | Path, extra_header: dict | None = None) -> None:
    path = Path(path)
    lines = [f"# source = {sample.source}"]
    if sample.seed is not None:
        lines.append(f"# seed = {sample.seed}")
    if sample.dt is not None:
        lines.append(f"# dt = {sample.dt}")
    if sample.censored:
        lines.append(f"# censored = {sample.censored}")
    for key, value in (extra_header or {}).items():
        lines.append(f"# {key} = {value}")
    lines.extend(repr(float(t)) for t in sample.times)
    path.write_text("\n".join(lines) + "\n")


def load_sample(path: str | Path) -> FptSample:
    path = Path(path)
    meta: dict[str, str] = {}
    times: list[float] = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "=" in line:
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
            continue
        times.append(float(line))
    if not times:
        raise DegenerateSampleError(f"no observations found in {path}")
    seed = int(meta["seed"]) if "seed" in meta else None
    dt = float(meta["dt"]) if "dt" in meta else None
    return FptSample(times=np.array(times), source="file", seed=seed, dt=dt)
