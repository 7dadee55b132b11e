import math

import numpy as np
import pytest
from scipy.stats import norm

from mrcorr.errors import DataError
from mrcorr.mr_corr import Hyperparams, McmcConfig, Trace, fit_mr_corr
from mrcorr.posterior import (
    BenchmarkReport,
    PosteriorSummary,
    benchmark_report,
    credible_interval,
    ess,
    split_rhat,
    summarize,
    wald_pvalue,
)
from mrcorr.summary_data import HarmonizedDataset


def make_trace(beta0, n_chains=1, model="corr", n_units=4):
    beta0 = np.asarray(beta0, dtype=float)
    n = beta0.shape[0]
    per = n // n_chains
    chain_id = np.repeat(np.arange(n_chains, dtype=np.int64), per)
    return Trace(
        model=model,
        beta0=beta0,
        beta1=beta0 + 0.5,
        sigma2_gamma=np.full(n, 0.01),
        sigma2_alpha=np.full(n, 0.02),
        omega=np.full(n, 0.3),
        eta_mean=np.full(n, 0.25),
        chain_id=chain_id,
        iteration=np.tile(np.arange(per, dtype=np.int64), n_chains),
        snp_inclusion=np.full(n_units, 0.25),
        unit_inclusion=np.full(n_units, 0.25),
        n_units=n_units,
        n_chains=n_chains,
        n_iter=per,
        n_burnin=0,
        thin=1,
    )


def test_summary_of_known_normal_draws():
    rng = np.random.default_rng(1)
    draws = rng.normal(0.3, 0.1, 200_000)
    s = summarize(make_trace(draws))
    assert math.isclose(s.beta0_mean, 0.3, abs_tol=2e-3)
    assert math.isclose(s.beta0_sd, 0.1, rel_tol=0.02)
    assert math.isclose(s.beta0_ci[0], 0.3 - 1.959964 * 0.1, abs_tol=2e-3)
    assert math.isclose(s.beta0_ci[1], 0.3 + 1.959964 * 0.1, abs_tol=2e-3)
    expected_p = 2.0 * norm.sf(s.beta0_mean / s.beta0_sd)
    assert math.isclose(s.beta0_pvalue, expected_p, rel_tol=1e-12)
    assert s.significant
    assert s.covers(0.3)
    assert not s.covers(0.8)
    assert s.beta1_mean == pytest.approx(s.beta0_mean + 0.5)
    assert s.beta0_rhat is None  # single chain
    # iid draws carry essentially full effective sample size
    assert s.beta0_ess > 0.9 * draws.shape[0]
    assert s.beta0_ess <= draws.shape[0]


def test_wald_pvalues_uniform_under_matched_null():
    """When the posterior mean truly has sampling scale equal to the
    posterior sd, the Wald test rejects at its nominal rate."""
    rng = np.random.default_rng(2)
    n, reps = 400, 2000
    rejections = 0
    for _ in range(reps):
        mu = rng.normal(0.0, math.sqrt(1.0 - 1.0 / n))
        draws = mu + rng.normal(0.0, 1.0, n)
        p = wald_pvalue(float(np.mean(draws)), float(np.std(draws, ddof=1)))
        rejections += p < 0.05
    rate = rejections / reps
    se = math.sqrt(0.05 * 0.95 / reps)
    assert abs(rate - 0.05) < 3.29 * se + 0.005


def test_ess_iid_and_autocorrelated():
    rng = np.random.default_rng(3)
    n = 100_000
    iid = rng.standard_normal(n)
    assert 0.9 * n < ess(iid) <= n

    # AR(1) with coefficient 0.9: effective fraction (1 - phi) / (1 + phi)
    phi = 0.9
    noise = rng.standard_normal(n)
    ar = np.empty(n)
    ar[0] = noise[0] / math.sqrt(1 - phi**2)
    for i in range(1, n):
        ar[i] = phi * ar[i - 1] + noise[i]
    target = n * (1 - phi) / (1 + phi)
    estimate = ess(ar)
    assert 0.7 * target < estimate < 1.4 * target

    assert ess(np.zeros(10)) == 10.0
    assert ess(np.array([1.0, 2.0])) == 2.0


def test_split_rhat_mixed_and_separated():
    rng = np.random.default_rng(4)
    mixed = [rng.standard_normal(2000) for _ in range(4)]
    assert abs(split_rhat(mixed) - 1.0) < 0.02
    separated = [rng.standard_normal(2000) + 3.0 * c for c in range(4)]
    assert split_rhat(separated) > 1.5
    with pytest.raises(DataError):
        split_rhat([np.array([1.0, 2.0, 3.0])])


def test_degenerate_posterior_reports_missing_pvalue():
    s = summarize(make_trace(np.full(100, 0.4)))
    assert s.beta0_pvalue is None
    assert not s.significant
    assert any("p-value" in d for d in s.diagnostics)
    assert wald_pvalue(0.3, 0.0) is None


def test_credible_interval_validation():
    with pytest.raises(DataError):
        credible_interval(np.arange(10.0), level=1.0)
    lo, hi = credible_interval(np.arange(1001.0), level=0.9)
    assert lo == pytest.approx(50.0)
    assert hi == pytest.approx(950.0)


def test_summarize_flags_poor_mixing_and_fallbacks():
    rng = np.random.default_rng(5)
    draws = np.concatenate([rng.standard_normal(500), rng.standard_normal(500) + 5.0])
    trace = make_trace(draws, n_chains=2)
    s = summarize(trace)
    assert s.beta0_rhat > 1.1
    assert any("split-rhat" in d for d in s.diagnostics)

    trace2 = make_trace(rng.standard_normal(200))
    trace2.beta1_fallbacks = 7
    s2 = summarize(trace2)
    assert any("fallbacks" in d for d in s2.diagnostics)


def test_benchmark_report_frozen_counts():
    def fake(mean, sd, ci, p):
        return PosteriorSummary(
            model="corr",
            n_draws=100,
            n_chains=1,
            beta0_mean=mean,
            beta0_sd=sd,
            beta0_ci=ci,
            beta0_pvalue=p,
            beta0_ess=90.0,
            beta0_rhat=None,
            beta1_mean=0.0,
            sigma2_gamma_mean=0.01,
            sigma2_alpha_mean=0.01,
            omega_mean=0.2,
            mean_occupancy=0.2,
            unit_inclusion=np.zeros(2),
            snp_inclusion=np.zeros(2),
            ci_level=0.95,
        )

    summaries = [
        fake(0.12, 0.05, (0.02, 0.22), 0.02),   # rejects, covers 0.1
        fake(0.08, 0.05, (-0.02, 0.18), 0.11),  # accepts, covers
        fake(0.30, 0.05, (0.20, 0.40), 0.001),  # rejects, misses
        None,                                   # failed replicate
    ]
    report = benchmark_report(summaries, true_beta0=0.1)
    assert isinstance(report, BenchmarkReport)
    assert report.n_replicates == 4
    assert report.n_failures == 1
    assert report.rejection_rate == pytest.approx(2.0 / 3.0)
    assert report.coverage == pytest.approx(2.0 / 3.0)
    assert report.mean_estimate == pytest.approx((0.12 + 0.08 + 0.30) / 3.0)
    assert report.bias == pytest.approx(report.mean_estimate - 0.1)
    d = report.to_dict()
    assert d["n_failures"] == 1

    with pytest.raises(DataError):
        benchmark_report([None, None], true_beta0=0.0)


def test_summarize_fitted_trace_end_to_end():
    rng = np.random.default_rng(6)
    p = 40
    gamma = rng.normal(0, 0.08, p)
    ds = HarmonizedDataset(
        snp_ids=[f"rs{i}" for i in range(p)],
        gamma_hat=gamma + rng.normal(0, 0.01, p),
        s_gamma=np.full(p, 0.01),
        Gamma_hat=0.2 * gamma + rng.normal(0, 0.01, p),
        s_Gamma=np.full(p, 0.01),
        orientation_flips=np.zeros(p, dtype=bool),
    )
    trace = fit_mr_corr(
        ds, Hyperparams(), McmcConfig(n_iter=600, n_burnin=300, n_chains=2), seed=9
    )
    s = summarize(trace)
    assert s.model == "corr"
    assert s.n_chains == 2
    assert s.n_draws == 600
    assert s.beta0_rhat is not None
    assert s.snp_inclusion.shape == (p,)
    assert np.all((s.snp_inclusion >= 0) & (s.snp_inclusion <= 1))
    assert 0.0 <= s.mean_occupancy <= 1.0
    assert abs(s.beta0_mean - 0.2) < 0.05
    d = s.to_dict()
    assert d["model"] == "corr"
    assert math.isfinite(d["beta0_ess"])

    with pytest.raises(DataError):
        summarize(make_trace(np.empty(0)))
