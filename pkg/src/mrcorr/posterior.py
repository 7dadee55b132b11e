"""Posterior summaries and benchmark aggregation for sampler traces.

The causal-effect estimate reported everywhere is the posterior mean of
beta0, the slope of the component with the indicator switched off; its
Wald p-value treats the posterior mean and standard deviation as a point
estimate and standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import DataError
from .mr_corr import Trace


def ess(draws: np.ndarray) -> float:
    """Effective sample size by the initial-positive-sequence estimator.

    Sums autocovariances while consecutive even/odd pairs stay positive;
    the result is clipped to the number of draws.
    """
    x = np.asarray(draws, dtype=float)
    n = x.shape[0]
    if n < 4:
        return float(n)
    x = x - x.mean()
    var = float(np.dot(x, x)) / n
    if var == 0.0:
        return float(n)
    # autocovariances via FFT, normalized by n
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n].real / n
    rho = acov / acov[0]
    total = -1.0  # lag-0 term counted once below
    for k in range(0, n - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0.0:
            break
        total += 2.0 * pair
    total = max(total, 1.0)
    return float(min(n / total, n))


def split_rhat(chains: list[np.ndarray]) -> float:
    """Potential scale reduction with each chain split in half."""
    halves = []
    for chain in chains:
        chain = np.asarray(chain, dtype=float)
        half = chain.shape[0] // 2
        if half < 2:
            raise DataError("chains too short for split-rhat")
        halves.append(chain[:half])
        halves.append(chain[half : 2 * half])
    n = min(h.shape[0] for h in halves)
    halves = np.stack([h[:n] for h in halves])
    m = halves.shape[0]
    chain_means = halves.mean(axis=1)
    chain_vars = halves.var(axis=1, ddof=1)
    w = float(chain_means.var(ddof=1)) * n
    within = float(chain_vars.mean())
    if within == 0.0:
        return 1.0 if w == 0.0 else math.inf
    var_plus = (n - 1) / n * within + w / n
    return float(math.sqrt(var_plus / within))


def wald_pvalue(mean: float, sd: float) -> float | None:
    """Two-sided normal p-value for mean / sd; None when sd collapses."""
    if sd <= 0.0 or not math.isfinite(sd):
        return None
    return float(2.0 * norm.sf(abs(mean) / sd))


def credible_interval(draws: np.ndarray, level: float = 0.95) -> tuple[float, float]:
    """Equal-tailed posterior interval."""
    if not (0.0 < level < 1.0):
        raise DataError("interval level must lie in (0, 1)")
    tail = 0.5 * (1.0 - level)
    lo, hi = np.quantile(np.asarray(draws, dtype=float), [tail, 1.0 - tail])
    return float(lo), float(hi)


@dataclass
class PosteriorSummary:
    """Decision-ready summary of one fitted trace."""

    model: str
    n_draws: int
    n_chains: int
    beta0_mean: float
    beta0_sd: float
    beta0_ci: tuple[float, float]
    beta0_pvalue: float | None
    beta0_ess: float
    beta0_rhat: float | None
    beta1_mean: float
    sigma2_gamma_mean: float
    sigma2_alpha_mean: float
    omega_mean: float
    mean_occupancy: float
    unit_inclusion: np.ndarray
    snp_inclusion: np.ndarray
    ci_level: float
    diagnostics: list[str] = field(default_factory=list)

    @property
    def significant(self) -> bool:
        """True when the Wald test rejects zero at the 0.05 level."""
        return self.beta0_pvalue is not None and self.beta0_pvalue < 0.05

    def covers(self, value: float) -> bool:
        return self.beta0_ci[0] <= value <= self.beta0_ci[1]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "n_draws": self.n_draws,
            "n_chains": self.n_chains,
            "beta0_mean": self.beta0_mean,
            "beta0_sd": self.beta0_sd,
            "beta0_ci_low": self.beta0_ci[0],
            "beta0_ci_high": self.beta0_ci[1],
            "beta0_pvalue": self.beta0_pvalue,
            "beta0_ess": self.beta0_ess,
            "beta0_rhat": self.beta0_rhat,
            "beta1_mean": self.beta1_mean,
            "sigma2_gamma_mean": self.sigma2_gamma_mean,
            "sigma2_alpha_mean": self.sigma2_alpha_mean,
            "omega_mean": self.omega_mean,
            "mean_occupancy": self.mean_occupancy,
            "ci_level": self.ci_level,
            "diagnostics": list(self.diagnostics),
        }


def summarize(trace: Trace, ci_level: float = 0.95) -> PosteriorSummary:
    """Reduce a trace to point estimates, intervals, and diagnostics."""
    if trace.n_rows == 0:
        raise DataError("empty trace")
    draws = trace.beta0
    mean = float(np.mean(draws))
    # a stuck sampler yields literally constant draws; call that sd 0
    # rather than the float noise of the mean subtraction
    if draws.shape[0] < 2 or np.all(draws == draws[0]):
        sd = 0.0
    else:
        sd = float(np.std(draws, ddof=1))
    diagnostics = []
    pvalue = wald_pvalue(mean, sd)
    if pvalue is None:
        diagnostics.append("degenerate beta0 posterior; p-value unavailable")
    rhat = None
    if trace.n_chains >= 2:
        rhat = split_rhat(trace.by_chain("beta0"))
        if rhat > 1.1:
            diagnostics.append(f"split-rhat {rhat:.3f} exceeds 1.1")
    if trace.beta0_fallbacks or trace.beta1_fallbacks:
        diagnostics.append(
            f"improper-conditional fallbacks: beta0 {trace.beta0_fallbacks}, "
            f"beta1 {trace.beta1_fallbacks}"
        )
    return PosteriorSummary(
        model=trace.model,
        n_draws=trace.n_rows,
        n_chains=trace.n_chains,
        beta0_mean=mean,
        beta0_sd=sd,
        beta0_ci=credible_interval(draws, ci_level),
        beta0_pvalue=pvalue,
        beta0_ess=ess(draws),
        beta0_rhat=rhat,
        beta1_mean=float(np.mean(trace.beta1)),
        sigma2_gamma_mean=float(np.mean(trace.sigma2_gamma)),
        sigma2_alpha_mean=float(np.mean(trace.sigma2_alpha)),
        omega_mean=float(np.mean(trace.omega)),
        mean_occupancy=float(np.mean(trace.eta_mean)),
        unit_inclusion=trace.unit_inclusion.copy(),
        snp_inclusion=trace.snp_inclusion.copy(),
        ci_level=ci_level,
        diagnostics=diagnostics,
    )


@dataclass
class BenchmarkReport:
    """Operating characteristics over simulation replicates."""

    n_replicates: int
    n_failures: int
    rejection_rate: float
    bias: float
    mean_estimate: float
    sd_estimate: float
    coverage: float
    true_beta0: float
    alpha_level: float
    estimates: np.ndarray
    pvalues: np.ndarray
    summaries: list[PosteriorSummary | None] | None = None

    def to_dict(self) -> dict:
        return {
            "n_replicates": self.n_replicates,
            "n_failures": self.n_failures,
            "rejection_rate": self.rejection_rate,
            "bias": self.bias,
            "mean_estimate": self.mean_estimate,
            "sd_estimate": self.sd_estimate,
            "coverage": self.coverage,
            "true_beta0": self.true_beta0,
            "alpha_level": self.alpha_level,
        }


def benchmark_report(
    summaries: list[PosteriorSummary | None],
    true_beta0: float,
    alpha_level: float = 0.05,
) -> BenchmarkReport:
    """Aggregate per-replicate summaries; None entries count as failures."""
    if not (0.0 < alpha_level < 1.0):
        raise DataError("alpha_level must lie in (0, 1)")
    kept = [s for s in summaries if s is not None]
    n_failures = len(summaries) - len(kept)
    if not kept:
        raise DataError("all replicates failed")
    estimates = np.array([s.beta0_mean for s in kept])
    pvalues = np.array(
        [s.beta0_pvalue if s.beta0_pvalue is not None else np.nan for s in kept]
    )
    tested = pvalues[~np.isnan(pvalues)]
    rejection = float(np.mean(tested < alpha_level)) if tested.size else math.nan
    coverage = float(np.mean([s.covers(true_beta0) for s in kept]))
    sd = float(np.std(estimates, ddof=1)) if estimates.shape[0] > 1 else 0.0
    return BenchmarkReport(
        n_replicates=len(summaries),
        n_failures=n_failures,
        rejection_rate=rejection,
        bias=float(np.mean(estimates) - true_beta0),
        mean_estimate=float(np.mean(estimates)),
        sd_estimate=sd,
        coverage=coverage,
        true_beta0=true_beta0,
        alpha_level=alpha_level,
        estimates=estimates,
        pvalues=pvalues,
        summaries=list(summaries),
    )
