"""Parameter estimation from FPT samples.

Maximum likelihood over the approximated density (simulated annealing with
a Nelder-Mead polish) and a closed-form method of moments through the first
two cumulants.  The feasible region keeps mu > sigma^2/2 so every candidate
has an almost surely finite passage time.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .expansion import build_expansion, default_reference, eval_pn, gamma_pdf
from .gbm import IgParams, ig_moments_recursive
from .sampling import DegenerateSampleError, FptSample, k_statistics

#: Floor substituted where ghat_n(T_i) <= 0; keeps the objective finite
#: while steering the search away from negativity regions.
LOG_FLOOR = math.log(1e-300)

#: Feasible box: mu in (sigma^2/2 + MU_MARGIN, MU_HI], ln sigma^2 in [S_LO, S_HI].
MU_MARGIN = 1e-6
MU_HI = 100.0
S_LO = math.log(1e-4)
S_HI = math.log(1e2)

DEFAULT_MLE_DEGREE = 34


@dataclass(frozen=True)
class AnnealingConfig:
    """Geometric-cooling schedule with Gaussian proposals in (mu, ln sigma^2)."""

    t0: float = 1.0
    rho: float = 0.97
    n_stages: int = 200
    proposals_per_stage: int = 50
    step_mu: float = 0.1
    step_s: float = 0.1
    max_polish_move: float = 0.5


@dataclass
class FitResult:
    mu_hat: float
    sigma2_hat: float
    method: str  # "mle" | "mm"
    n_used: int | None = None
    loglik: float | None = None
    seed: int | None = None
    diagnostics: dict = field(default_factory=dict)


def _in_theta(mu: float, sigma2: float) -> bool:
    return (
        S_LO <= math.log(sigma2) <= S_HI if sigma2 > 0 else False
    ) and sigma2 / 2 + MU_MARGIN < mu <= MU_HI


def candidate_ig(mu: float, sigma2: float, threshold: float, y0: float) -> IgParams:
    """IG parameters implied by a (mu, sigma^2) candidate."""
    s = math.log(threshold) - math.log(y0)
    return IgParams(a=s**2 / sigma2, b=s / (mu - sigma2 / 2))


def _loglik(times: np.ndarray, mu: float, sigma2: float, n: int, threshold: float, y0: float):
    p = candidate_ig(mu, sigma2, threshold, y0)
    ref = default_reference(p.b, p.variance)
    # extreme candidates can overflow the moment recursion; score them with
    # the flat penalty instead of propagating inf/nan into the chain
    with np.errstate(over="ignore", invalid="ignore"):
        exp = build_expansion(ref, ig_moments_recursive(p, n), n)
        vals = np.asarray(gamma_pdf(ref, times) * eval_pn(exp, times))
    if not np.all(np.isfinite(vals)):
        return LOG_FLOOR * times.size, times.size
    bad = vals <= 0
    n_bad = int(np.count_nonzero(bad))
    if n_bad:
        logs = np.where(bad, LOG_FLOOR, np.log(np.where(bad, 1.0, vals)))
    else:
        logs = np.log(vals)
    return float(np.sum(logs)), n_bad


def log_likelihood(
    sample: FptSample | np.ndarray,
    mu: float,
    sigma2: float,
    n: int,
    threshold: float,
    y0: float,
) -> float:
    """Sum of ln ghat_n(T_i) for the candidate (mu, sigma^2).

    Moments entering the expansion are the analytic IG moments of the
    candidate.  Points where ghat_n is nonpositive contribute a large
    finite penalty instead of -inf.
    """
    if not _in_theta(mu, sigma2):
        raise ValueError(f"candidate (mu={mu}, sigma2={sigma2}) outside the feasible region")
    times = sample.times if isinstance(sample, FptSample) else np.asarray(sample, dtype=float)
    return _loglik(times, mu, sigma2, n, threshold, y0)[0]


def mm_from_cumulants(kappa1: float, kappa2: float, threshold: float, y0: float) -> tuple[float, float]:
    """Invert the first two IG cumulants to (mu, sigma^2).

    With s = ln(threshold/y0):
      mu      = (s/kappa1) (1 + (kappa2 / (2 kappa1^2)) s)
      sigma^2 = (kappa2 / kappa1^3) s^2
    Feeding the true cumulants recovers the true parameters exactly.
    """
    if kappa1 <= 0 or kappa2 <= 0:
        raise DegenerateSampleError(
            f"cumulant estimates must be positive, got kappa1={kappa1}, kappa2={kappa2}"
        )
    s = math.log(threshold) - math.log(y0)
    mu_hat = s / kappa1 * (1 + 0.5 * kappa2 / kappa1**2 * s)
    sigma2_hat = kappa2 / kappa1**3 * s**2
    return mu_hat, sigma2_hat


def mm_fit(sample: FptSample, threshold: float, y0: float) -> FitResult:
    """Method-of-moments estimate from the first two k-statistics."""
    if sample.size < 2:
        raise DegenerateSampleError("method of moments needs at least 2 observations")
    kappa = k_statistics(sample, 2)
    mu_hat, sigma2_hat = mm_from_cumulants(kappa[1], kappa[2], threshold, y0)
    return FitResult(
        mu_hat=mu_hat,
        sigma2_hat=sigma2_hat,
        method="mm",
        diagnostics={"kappa1": kappa[1], "kappa2": kappa[2]},
    )


def mle_fit(
    sample: FptSample,
    threshold: float,
    y0: float,
    n: int = DEFAULT_MLE_DEGREE,
    config: AnnealingConfig | None = None,
    seed: int | None = 0,
    start: tuple[float, float] | None = None,
) -> FitResult:
    """Maximize the approximated log-likelihood by simulated annealing in
    (mu, s = ln sigma^2) followed by a deterministic Nelder-Mead polish.

    The chain starts from the method-of-moments estimate unless an explicit
    start is given.  With t0 == 0 annealing is disabled and the start
    candidate is returned as-is (degenerate-input contract).  Identical
    (seed, config, sample) always yield an identical result.
    """
    config = config or AnnealingConfig()
    times = sample.times

    if start is None:
        mm = mm_fit(sample, threshold, y0)
        start = (mm.mu_hat, mm.sigma2_hat)
    mu0 = min(max(start[0], start[1] / 2 + 2 * MU_MARGIN), MU_HI)
    s0 = min(max(math.log(start[1]), S_LO), S_HI)
    start_pt = (mu0, s0)

    if config.t0 == 0:
        return FitResult(
            mu_hat=start_pt[0],
            sigma2_hat=math.exp(start_pt[1]),
            method="mle",
            n_used=n,
            seed=seed,
            diagnostics={"annealing": "disabled (t0=0)"},
        )

    def objective(mu: float, s: float):
        return _loglik(times, mu, math.exp(s), n, threshold, y0)

    rng = np.random.default_rng(seed)
    cur = start_pt
    cur_ll, _ = objective(*cur)
    best, best_ll = cur, cur_ll
    start_ll = cur_ll
    temp = config.t0
    n_accept = n_total = 0
    for _ in range(config.n_stages):
        for _ in range(config.proposals_per_stage):
            cand = (
                cur[0] + config.step_mu * rng.standard_normal(),
                cur[1] + config.step_s * rng.standard_normal(),
            )
            sigma2 = math.exp(cand[1])
            if not (S_LO <= cand[1] <= S_HI and sigma2 / 2 + MU_MARGIN < cand[0] <= MU_HI):
                continue
            n_total += 1
            cand_ll, _ = objective(*cand)
            delta = cand_ll - cur_ll
            if delta > 0 or rng.random() < math.exp(delta / temp):
                cur, cur_ll = cand, cand_ll
                n_accept += 1
                if cur_ll > best_ll:
                    best, best_ll = cur, cur_ll
        temp *= config.rho

    def neg(x: np.ndarray) -> float:
        mu, s = float(x[0]), float(x[1])
        sigma2 = math.exp(s) if S_LO <= s <= S_HI else None
        if sigma2 is None or not (sigma2 / 2 + MU_MARGIN < mu <= MU_HI):
            return 1e12
        return -objective(mu, s)[0]

    polish = minimize(
        neg,
        np.array(best),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000},
    )
    polish_move = float(np.hypot(polish.x[0] - best[0], polish.x[1] - best[1]))
    if -polish.fun > best_ll:
        best, best_ll = (float(polish.x[0]), float(polish.x[1])), -float(polish.fun)

    mu_hat, sigma2_hat = best[0], math.exp(best[1])
    _, neg_count = _loglik(times, mu_hat, sigma2_hat, n, threshold, y0)
    return FitResult(
        mu_hat=mu_hat,
        sigma2_hat=sigma2_hat,
        method="mle",
        n_used=n,
        loglik=best_ll,
        seed=seed,
        diagnostics={
            "start_mu": start_pt[0],
            "start_sigma2": math.exp(start_pt[1]),
            "start_loglik": start_ll,
            "acceptance_rate": n_accept / n_total if n_total else 0.0,
            "polish_move": polish_move,
            "polish_converged": polish_move <= config.max_polish_move,
            "negativity_count": neg_count,
        },
    )


def fit_report(
    result: FitResult, true_mu: float | None = None, true_sigma2: float | None = None
) -> str:
    """Flat JSON report of a fit, with relative errors when truth is known."""
    payload: dict = {
        "method": result.method,
        "mu_hat": result.mu_hat,
        "sigma2_hat": result.sigma2_hat,
    }
    if result.n_used is not None:
        payload["n_used"] = result.n_used
    if result.loglik is not None:
        payload["loglik"] = result.loglik
    if result.seed is not None:
        payload["seed"] = result.seed
    if true_mu is not None:
        payload["mu_true"] = true_mu
        payload["mu_rel_err"] = abs(result.mu_hat - true_mu) / abs(true_mu)
    if true_sigma2 is not None:
        payload["sigma2_true"] = true_sigma2
        payload["sigma2_rel_err"] = abs(result.sigma2_hat - true_sigma2) / abs(true_sigma2)
    payload.update({f"diag_{k}": v for k, v in result.diagnostics.items()})
    return json.dumps(payload, indent=2, default=float)
