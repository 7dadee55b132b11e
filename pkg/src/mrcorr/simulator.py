"""Benchmark data generator for the two-sample MR samplers.

Individual-level data are generated under two scenarios and reduced to
per-SNP summary statistics by simple regressions, exactly as a pair of
GWAS would produce them.

Scenario 1: instruments act directly on the exposure; a sparse subset
also acts directly on the outcome with effects correlated with the
instrument strengths (correlated horizontal pleiotropy), and shared
non-genetic confounders load on both traits.

Scenario 2: a random fraction q ~ Beta(1, 10) of instruments act on the
exposure only through a heritable confounder U that also feeds the
outcome directly, so their entire outcome association survives at
beta0 = 0.

Genotypes are Hardy-Weinberg dosages obtained by thresholding a latent
block-autoregressive Gaussian at the HWE quantiles; the exposure,
outcome, and reference samples of a replicate share MAFs and LD
structure but are mutually independent.  Variance budgets are solved
against the empirical variances of the generated components so realized
heritabilities match their targets: the exposure has unit variance with
``h2_gamma`` genetic and ``confounder_share`` confounder content, and
the outcome's non-causal block likewise has unit variance.
"""

from __future__ import annotations

import configparser
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import DataError, NumericError
from .ld_reference import (
    BlockCorr,
    GenotypePanel,
    estimate_block_corr,
    save_panel_tsv,
    uniform_partition,
    write_partition,
)
from .mr_corr import Hyperparams, McmcConfig, fit_mr_corr
from .mr_corr2 import fit_mr_corr2
from .posterior import BenchmarkReport, benchmark_report, summarize
from .summary_data import HarmonizedDataset


@dataclass
class ScenarioConfig:
    """Complete description of one benchmark data-generating process.

    ``confounder_share`` (variance fraction of each trait carried by the
    shared non-genetic confounders), ``u_noise_var`` (noise variance of
    the scenario-2 heritable confounder), and ``u_kappa`` (effect of that
    confounder on the outcome; its effect on the exposure is scaled to 1)
    are fixed conventions of the generator, exposed here so they are
    documented and overridable.
    """

    scenario: int = 1
    n1: int = 5000
    n2: int = 5000
    n_ref: int = 500
    L: int = 50
    block_size: int = 10
    rho: float = 0.4
    rho_alpha_gamma: float = 0.2
    sparsity: float = 0.1
    h2_gamma: float = 0.1
    h2_alpha: float = 0.05
    beta0: float = 0.0
    r_confounders: int = 50
    eta_cov_offdiag: float = 0.8
    maf_range: tuple[float, float] = (0.05, 0.5)
    seed: int = 0
    confounder_share: float = 0.2
    u_noise_var: float = 0.2
    u_kappa: float = 0.15

    def __post_init__(self):
        if self.scenario not in (1, 2):
            raise DataError("scenario must be 1 or 2")
        for name in ("n1", "n2", "n_ref", "L", "block_size"):
            if int(getattr(self, name)) < 1:
                raise DataError(f"{name} must be a positive integer")
        if not (0.0 <= self.rho < 1.0):
            raise DataError("rho must lie in [0, 1)")
        if not (-1.0 < self.rho_alpha_gamma < 1.0):
            raise DataError("rho_alpha_gamma must lie in (-1, 1)")
        if not (0.0 <= self.sparsity <= 1.0):
            raise DataError("sparsity must lie in [0, 1]")
        for name in ("h2_gamma", "h2_alpha"):
            if not (0.0 <= getattr(self, name) < 1.0):
                raise DataError(f"{name} must lie in [0, 1)")
        if self.h2_gamma + self.h2_alpha >= 1.0:
            raise DataError("h2_gamma + h2_alpha must be below 1")
        low, high = self.maf_range
        if not (0.0 < low <= high <= 0.5):
            raise DataError("maf_range bounds must lie in (0, 0.5]")
        if self.r_confounders < 0:
            raise DataError("r_confounders must be non-negative")
        if not (0.0 <= self.confounder_share < 1.0):
            raise DataError("confounder_share must lie in [0, 1)")
        if self.u_noise_var < 0.0:
            raise DataError("u_noise_var must be non-negative")
        if not math.isfinite(self.u_kappa):
            raise DataError("u_kappa must be finite")
        if self.r_confounders == 0 and self.confounder_share > 0.0:
            raise DataError("confounder_share needs r_confounders > 0")

    @property
    def p(self) -> int:
        return self.L * self.block_size

    def to_ini(self, path) -> None:
        parser = configparser.ConfigParser()
        parser["scenario"] = {
            "scenario": str(self.scenario),
            "n1": str(self.n1),
            "n2": str(self.n2),
            "n_ref": str(self.n_ref),
            "L": str(self.L),
            "block_size": str(self.block_size),
            "rho": repr(self.rho),
            "rho_alpha_gamma": repr(self.rho_alpha_gamma),
            "sparsity": repr(self.sparsity),
            "h2_gamma": repr(self.h2_gamma),
            "h2_alpha": repr(self.h2_alpha),
            "beta0": repr(self.beta0),
            "r_confounders": str(self.r_confounders),
            "eta_cov_offdiag": repr(self.eta_cov_offdiag),
            "maf_low": repr(self.maf_range[0]),
            "maf_high": repr(self.maf_range[1]),
            "seed": str(self.seed),
            "confounder_share": repr(self.confounder_share),
            "u_noise_var": repr(self.u_noise_var),
            "u_kappa": repr(self.u_kappa),
        }
        with open(path, "wt") as fh:
            parser.write(fh)

    @classmethod
    def from_ini(cls, path) -> "ScenarioConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read or "scenario" not in parser:
            raise DataError(f"missing or invalid scenario config: {path}")
        section = parser["scenario"]
        known = {
            "scenario": int,
            "n1": int,
            "n2": int,
            "n_ref": int,
            "L": int,
            "block_size": int,
            "rho": float,
            "rho_alpha_gamma": float,
            "sparsity": float,
            "h2_gamma": float,
            "h2_alpha": float,
            "beta0": float,
            "r_confounders": int,
            "eta_cov_offdiag": float,
            "seed": int,
            "confounder_share": float,
            "u_noise_var": float,
            "u_kappa": float,
        }
        kwargs = {}
        maf = {"low": 0.05, "high": 0.5}
        for key in section:
            if key in ("maf_low", "maf_high"):
                try:
                    maf[key[4:]] = float(section[key])
                except ValueError as exc:
                    raise DataError(f"config field {key}: {exc}") from exc
            elif key.lower() == "l":
                kwargs["L"] = int(section[key])
            elif key in known:
                try:
                    kwargs[key] = known[key](section[key])
                except ValueError as exc:
                    raise DataError(f"config field {key}: {exc}") from exc
            else:
                raise DataError(f"unknown scenario config field: {key}")
        kwargs["maf_range"] = (maf["low"], maf["high"])
        return cls(**kwargs)


@dataclass
class SimTruth:
    """Generating values retained for evaluating fits.

    ``alpha`` holds the direct outcome effects; scenario-2 SNPs routed
    through the heritable confounder additionally move the outcome by
    their full instrument effect, and are marked in ``mechanism2_mask``.
    ``pleiotropy_mask`` covers both sources.
    """

    beta0: float
    gamma: np.ndarray
    alpha: np.ndarray
    pleiotropy_mask: np.ndarray
    scenario: int
    maf: np.ndarray
    q: float | None = None
    mechanism2_mask: np.ndarray | None = None


@dataclass
class SimulatedStudy:
    """Fit-ready summary statistics plus reference panel and truth."""

    dataset: HarmonizedDataset
    reference_panel: GenotypePanel
    truth: SimTruth
    config: ScenarioConfig
    exposure_genotypes: np.ndarray | None = None
    outcome_genotypes: np.ndarray | None = None

    def block_eta_truth(self) -> np.ndarray:
        """Block-level indicator: 1 when any member SNP is pleiotropic."""
        part = uniform_partition(self.config.p, self.config.block_size)
        mask = self.truth.pleiotropy_mask
        return np.array([float(np.any(mask[a:b])) for a, b in part.bounds])

    def oracle_block_corr(self) -> BlockCorr:
        """LD from the pooled study genotypes with no shrinkage, as close
        to the generating dosage correlation as the replicate allows."""
        if self.exposure_genotypes is None or self.outcome_genotypes is None:
            raise DataError("study was exported without genotypes")
        pooled = np.vstack([self.exposure_genotypes, self.outcome_genotypes])
        panel = GenotypePanel(pooled, list(self.dataset.snp_ids))
        part = uniform_partition(self.config.p, self.config.block_size)
        return estimate_block_corr(panel, part, shrink_lambda=0.0)

    def export(self, outdir) -> dict:
        """Write ingestion-format files: two GWAS tables (with alleles
        and Wald p-values), the reference panel, and the partition."""
        os.makedirs(outdir, exist_ok=True)
        ds = self.dataset
        paths = {
            "exposure": os.path.join(outdir, "exposure.tsv"),
            "outcome": os.path.join(outdir, "outcome.tsv"),
            "panel": os.path.join(outdir, "panel.tsv"),
            "partition": os.path.join(outdir, "partition.tsv"),
        }
        _write_gwas_table(paths["exposure"], ds.snp_ids, ds.gamma_hat, ds.s_gamma)
        _write_gwas_table(paths["outcome"], ds.snp_ids, ds.Gamma_hat, ds.s_Gamma)
        save_panel_tsv(paths["panel"], self.reference_panel)
        partition = uniform_partition(self.config.p, self.config.block_size)
        write_partition(paths["partition"], partition, list(ds.snp_ids))
        return paths


def _write_gwas_table(path, snp_ids, beta, se) -> None:
    pvals = 2.0 * norm.sf(np.abs(np.asarray(beta) / np.asarray(se)))
    with open(path, "wt") as fh:
        fh.write("snp_id\teffect_allele\tother_allele\tbeta\tse\tp_value\n")
        for i, sid in enumerate(snp_ids):
            fh.write(f"{sid}\tA\tG\t{beta[i]:.17g}\t{se[i]:.17g}\t{pvals[i]:.17g}\n")


# ---------------------------------------------------------------------------
# genotype and effect generation
# ---------------------------------------------------------------------------


def gen_genotypes(n: int, config: ScenarioConfig, rng, maf=None) -> GenotypePanel:
    """Hardy-Weinberg dosages from a latent block-AR(rho) Gaussian.

    ``maf`` supplies per-SNP allele frequencies so the exposure, outcome,
    and reference samples of one replicate share them; when omitted they
    are drawn fresh from ``config.maf_range``.
    """
    p = config.p
    if maf is None:
        maf = rng.uniform(config.maf_range[0], config.maf_range[1], p)
    maf = np.asarray(maf, dtype=float)
    m = config.block_size
    idx = np.arange(m)
    chol = np.linalg.cholesky(config.rho ** np.abs(idx[:, None] - idx[None, :]))
    latent = np.empty((n, p))
    for start in range(0, p, m):
        latent[:, start : start + m] = rng.standard_normal((n, m)) @ chol.T
    cut0 = norm.ppf((1.0 - maf) ** 2)
    cut1 = norm.ppf(1.0 - maf**2)
    dosage = (latent > cut0).astype(float) + (latent > cut1)
    return GenotypePanel(dosage, [f"rs{i}" for i in range(p)])


def gen_effects(config: ScenarioConfig, rng) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit-scale instrument and pleiotropy effects with a sparsity mask.

    Pairs (gamma_k, alpha_k) are bivariate normal with correlation
    rho_alpha_gamma; alpha survives only on ceil(sparsity * p) randomly
    chosen SNPs.  Scales are fixed later against heritability targets.
    """
    p = config.p
    r = config.rho_alpha_gamma
    cov = np.array([[1.0, r], [r, 1.0]])
    pairs = rng.multivariate_normal(np.zeros(2), cov, size=p, method="cholesky")
    gamma = pairs[:, 0]
    alpha = pairs[:, 1]
    mask = np.zeros(p, dtype=bool)
    n_mask = math.ceil(config.sparsity * p)
    if n_mask > 0:
        mask[rng.choice(p, size=n_mask, replace=False)] = True
    return gamma, np.where(mask, alpha, 0.0), mask


def scale_to_heritability(
    genetic: np.ndarray,
    confounder: np.ndarray | None,
    h2_target: float,
    confounder_share: float,
    total_var: float = 1.0,
) -> tuple[float, float, float]:
    """Solve (genetic scale, confounder scale, residual variance).

    Scales are set against the empirical variances of the generated
    components so realized shares hit their targets; the residual
    variance absorbs the remaining budget or the call fails with the
    computed budget.
    """
    if h2_target > 0.0:
        var_g = float(np.var(genetic))
        if var_g <= 0.0:
            raise DataError("zero genetic component with positive heritability target")
        g_scale = math.sqrt(h2_target * total_var / var_g)
    else:
        g_scale = 0.0
    if confounder_share > 0.0:
        var_c = float(np.var(confounder)) if confounder is not None else 0.0
        if var_c <= 0.0:
            raise DataError("zero confounder component with positive share")
        c_scale = math.sqrt(confounder_share * total_var / var_c)
    else:
        c_scale = 0.0
    residual = total_var * (1.0 - h2_target - confounder_share)
    if residual < 0.0:
        raise DataError(
            "variance budget infeasible: "
            f"heritability {h2_target} + confounder share {confounder_share} "
            f"exceeds total {total_var}"
        )
    return g_scale, c_scale, residual


def _summary_stats(G: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-SNP simple-regression slopes and standard errors."""
    n = G.shape[0]
    Gc = G - G.mean(axis=0)
    yc = y - y.mean()
    den = np.einsum("ij,ij->j", Gc, Gc)
    if np.any(den <= 0.0):
        bad = int(np.argmin(den))
        raise DataError(f"monomorphic SNP column {bad} in simulated sample")
    beta = (Gc.T @ yc) / den
    sse = float(yc @ yc) - beta**2 * den
    sigma2 = np.maximum(sse, 0.0) / (n - 2)
    se = np.sqrt(sigma2 / den)
    if np.any(se <= 0.0):
        raise DataError("degenerate regression standard error in simulated sample")
    return beta, se


def _dataset_from_stats(p, gamma_hat, s_gamma, Gamma_hat, s_Gamma) -> HarmonizedDataset:
    return HarmonizedDataset(
        snp_ids=[f"rs{i}" for i in range(p)],
        gamma_hat=np.asarray(gamma_hat, dtype=float),
        s_gamma=np.asarray(s_gamma, dtype=float),
        Gamma_hat=np.asarray(Gamma_hat, dtype=float),
        s_Gamma=np.asarray(s_Gamma, dtype=float),
        orientation_flips=np.zeros(p, dtype=bool),
    )


def _confounder_loadings(config: ScenarioConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    """Rows (eta_x_j, eta_y_j) bivariate normal with unit variances and
    the configured off-diagonal covariance."""
    c = config.eta_cov_offdiag
    cov = np.array([[1.0, c], [c, 1.0]])
    rows = rng.multivariate_normal(
        np.zeros(2), cov, size=config.r_confounders, method="cholesky"
    )
    return rows[:, 0], rows[:, 1]


def gen_scenario1(config: ScenarioConfig, rng) -> SimulatedStudy:
    """Direct-pleiotropy design with shared non-genetic confounders.

    Sample 1: x = G1 gamma + confounders + noise.  Sample 2 regenerates
    the exposure equation with the same coefficients, then
    y = beta0 x + G2 alpha + confounders + noise, with the confounder
    loadings of the two traits correlated.
    """
    p = config.p
    maf = rng.uniform(config.maf_range[0], config.maf_range[1], p)
    G1 = gen_genotypes(config.n1, config, rng, maf).matrix
    G2 = gen_genotypes(config.n2, config, rng, maf).matrix
    panel = gen_genotypes(config.n_ref, config, rng, maf)
    gamma_raw, alpha_raw, mask = gen_effects(config, rng)
    eta_x, eta_y = _confounder_loadings(config, rng)
    U1 = rng.standard_normal((config.n1, config.r_confounders))
    U2 = rng.standard_normal((config.n2, config.r_confounders))

    # exposure scales solved on sample 1, where the heritability is defined
    g_scale, cx_scale, var_e1 = scale_to_heritability(
        G1 @ gamma_raw, U1 @ eta_x, config.h2_gamma, config.confounder_share
    )
    gamma = g_scale * gamma_raw
    x = G1 @ gamma + cx_scale * (U1 @ eta_x) + rng.normal(0.0, math.sqrt(var_e1), config.n1)

    # outcome-side scales solved on sample 2
    a_scale, cy_scale, var_e2 = scale_to_heritability(
        G2 @ alpha_raw, U2 @ eta_y, config.h2_alpha, config.confounder_share
    )
    alpha = a_scale * alpha_raw
    x2 = G2 @ gamma + cx_scale * (U2 @ eta_x) + rng.normal(0.0, math.sqrt(var_e1), config.n2)
    y = (
        config.beta0 * x2
        + G2 @ alpha
        + cy_scale * (U2 @ eta_y)
        + rng.normal(0.0, math.sqrt(var_e2), config.n2)
    )

    gamma_hat, s_gamma = _summary_stats(G1, x)
    Gamma_hat, s_Gamma = _summary_stats(G2, y)
    return SimulatedStudy(
        dataset=_dataset_from_stats(p, gamma_hat, s_gamma, Gamma_hat, s_Gamma),
        reference_panel=panel,
        truth=SimTruth(
            beta0=config.beta0,
            gamma=gamma,
            alpha=alpha,
            pleiotropy_mask=mask,
            scenario=1,
            maf=maf,
        ),
        config=config,
        exposure_genotypes=G1,
        outcome_genotypes=G2,
    )


def _draw_q(rng) -> float:
    return float(rng.beta(1.0, 10.0))


def _scenario2_with_q(config: ScenarioConfig, rng, q: float) -> SimulatedStudy:
    """Scenario 2 with the mechanism fraction pinned (testing hook)."""
    p = config.p
    maf = rng.uniform(config.maf_range[0], config.maf_range[1], p)
    G1 = gen_genotypes(config.n1, config, rng, maf).matrix
    G2 = gen_genotypes(config.n2, config, rng, maf).matrix
    panel = gen_genotypes(config.n_ref, config, rng, maf)
    gamma_raw, alpha_raw, alpha_mask = gen_effects(config, rng)
    _, eta_y = _confounder_loadings(config, rng)
    U2 = rng.standard_normal((config.n2, config.r_confounders))
    mech2 = rng.random(p) < q

    # every instrument contributes to the exposure's genetic variance,
    # directly or through the heritable confounder at unit loading
    g_scale, _, _ = scale_to_heritability(G1 @ gamma_raw, None, config.h2_gamma, 0.0)
    gamma = g_scale * gamma_raw
    var_e1 = 1.0 - config.h2_gamma - config.u_noise_var
    if var_e1 < 0.0:
        raise DataError(
            "variance budget infeasible: "
            f"h2_gamma {config.h2_gamma} + confounder noise {config.u_noise_var} "
            "exceeds total 1.0"
        )
    sd_u = math.sqrt(config.u_noise_var)
    x = G1 @ gamma + rng.normal(0.0, sd_u, config.n1) + rng.normal(
        0.0, math.sqrt(var_e1), config.n1
    )

    # sample-2 confounder realization enters both the regenerated
    # exposure and the outcome, creating the confounded path
    u2 = G2[:, mech2] @ gamma[mech2] + rng.normal(0.0, sd_u, config.n2)
    direct = ~mech2
    x2 = G2[:, direct] @ gamma[direct] + u2 + rng.normal(0.0, math.sqrt(var_e1), config.n2)

    a_scale, cy_scale, _ = scale_to_heritability(
        G2 @ alpha_raw, U2 @ eta_y, config.h2_alpha, config.confounder_share
    )
    alpha = a_scale * alpha_raw
    var_u2 = config.u_kappa**2 * float(np.var(u2))
    var_e2 = 1.0 - config.h2_alpha - config.confounder_share - var_u2
    if var_e2 < 0.0:
        raise DataError(
            "variance budget infeasible: "
            f"h2_alpha {config.h2_alpha} + confounder share {config.confounder_share} "
            f"+ heritable confounder variance {var_u2:.4f} exceeds total 1.0"
        )
    y = (
        config.beta0 * x2
        + config.u_kappa * u2
        + G2 @ alpha
        + cy_scale * (U2 @ eta_y)
        + rng.normal(0.0, math.sqrt(var_e2), config.n2)
    )

    gamma_hat, s_gamma = _summary_stats(G1, x)
    Gamma_hat, s_Gamma = _summary_stats(G2, y)
    return SimulatedStudy(
        dataset=_dataset_from_stats(p, gamma_hat, s_gamma, Gamma_hat, s_Gamma),
        reference_panel=panel,
        truth=SimTruth(
            beta0=config.beta0,
            gamma=gamma,
            alpha=alpha,
            pleiotropy_mask=alpha_mask | mech2,
            scenario=2,
            maf=maf,
            q=q,
            mechanism2_mask=mech2,
        ),
        config=config,
        exposure_genotypes=G1,
        outcome_genotypes=G2,
    )


def gen_scenario2(config: ScenarioConfig, rng) -> SimulatedStudy:
    """Confounder-mediated design: q ~ Beta(1, 10) of the instruments act
    on the exposure only through a heritable confounder that also feeds
    the outcome."""
    return _scenario2_with_q(config, rng, _draw_q(rng))


def gen_study(config: ScenarioConfig, rng) -> SimulatedStudy:
    if config.scenario == 1:
        return gen_scenario1(config, rng)
    return gen_scenario2(config, rng)


# ---------------------------------------------------------------------------
# replicate benchmarks
# ---------------------------------------------------------------------------


def _fit_study(study, method, mcmc, hyper, shrink_lambda, ld_source, eta_mode, seed):
    if eta_mode == "free":
        fix_eta = None
    elif eta_mode == "truth":
        if method == "mr_corr":
            fix_eta = study.truth.pleiotropy_mask.astype(float)
        else:
            fix_eta = study.block_eta_truth()
    elif eta_mode == "zero":
        L = study.config.L if method == "mr_corr2" else study.config.p
        fix_eta = np.zeros(L)
    else:
        raise DataError(f"unknown eta_mode: {eta_mode}")

    if method == "mr_corr":
        return fit_mr_corr(study.dataset, hyper, mcmc, seed=seed, fix_eta=fix_eta)
    if method != "mr_corr2":
        raise DataError(f"unknown method: {method}")
    if ld_source == "reference":
        part = uniform_partition(study.config.p, study.config.block_size)
        corr = estimate_block_corr(study.reference_panel, part, shrink_lambda)
    elif ld_source == "oracle":
        corr = study.oracle_block_corr()
    else:
        raise DataError(f"unknown ld_source: {ld_source}")
    return fit_mr_corr2(study.dataset, corr, hyper, mcmc, seed=seed, fix_eta=fix_eta)


def _replicate_worker(args):
    (config, seed_seq, method, mcmc, hyper, shrink_lambda, ld_source, eta_mode) = args
    gen_seed, fit_seed = seed_seq.spawn(2)
    rng = np.random.default_rng(gen_seed)
    try:
        study = gen_study(config, rng)
        trace = _fit_study(
            study, method, mcmc, hyper, shrink_lambda, ld_source, eta_mode, fit_seed
        )
        return summarize(trace)
    except (DataError, NumericError):
        return None


def run_benchmark(
    config: ScenarioConfig,
    n_replicates: int,
    method: str = "mr_corr2",
    alpha_level: float = 0.05,
    mcmc: McmcConfig | None = None,
    hyper: Hyperparams | None = None,
    workers: int = 1,
    shrink_lambda: float = 0.1,
    ld_source: str = "reference",
    eta_mode: str = "free",
) -> BenchmarkReport:
    """Generate-fit-summarize over independent replicates.

    Each replicate consumes its own spawned substream of ``config.seed``
    and results are aggregated in replicate order, so the report is a
    deterministic function of the config alone, independent of
    ``workers``.  Failed replicates are counted, not fatal.
    """
    if n_replicates < 1:
        raise DataError("n_replicates must be positive")
    mcmc = mcmc or McmcConfig(n_iter=2000, n_burnin=1000)
    hyper = hyper or Hyperparams()
    seeds = np.random.SeedSequence(config.seed).spawn(n_replicates)
    payloads = [
        (config, seeds[i], method, mcmc, hyper, shrink_lambda, ld_source, eta_mode)
        for i in range(n_replicates)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=min(workers, n_replicates)) as pool:
            summaries = list(pool.map(_replicate_worker, payloads))
    else:
        summaries = [_replicate_worker(pl) for pl in payloads]
    return benchmark_report(summaries, config.beta0, alpha_level=alpha_level)
