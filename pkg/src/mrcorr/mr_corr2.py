"""Spike-slab Gibbs sampler for two-sample MR with LD-correlated SNPs.

SNPs are grouped into LD blocks with reference correlation R_l.  Within a
block the observed effects follow the multivariate likelihood

    gamma_hat_l ~ N(S_g R_l S_g^-1 gamma_l, S_g R_l S_g)
    Gamma_hat_l ~ N(S_G R_l S_G^-1 (b_l gamma_l + eta_l alpha_l),
                    S_G R_l S_G)

with S_* the diagonal standard-error matrices, b_l = beta0 (1 - eta_l)
+ beta1 eta_l, and a block-level indicator eta_l ~ Bernoulli(omega)
switching the whole block between the clean and pleiotropic components.

Writing A = S R S^-1 and V = S R S, the identities A' V^-1 = S^-2 and
A' V^-1 A = S^-1 R S^-1 reduce every Gaussian conditional to cached
per-block kernels:

    K   = S^-1 R S^-1      (precision contribution in coefficient space)
    V^-1 = S^-1 R^-1 S^-1  (precision in observation space, for densities)

Blocks of equal size are processed as stacked arrays so a full sweep
costs a handful of batched linear-algebra calls regardless of the number
of blocks.  Randomness is consumed in fixed SNP/block order, so chain
output is independent of how the batching groups the blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .ld_reference import BlockCorr
from .mr_corr import (
    LOG_2PI,
    INIT_VARIANCE_FLOOR,
    Hyperparams,
    McmcConfig,
    SamplerState,
    Trace,
    _inverse_gamma_draw,
    _log_beta_pdf,
    _log_ig,
    _ratio_anchor,
    concat_traces,
    validate_state,
    variance_posteriors,
)
from .summary_data import HarmonizedDataset
from scipy.special import expit


@dataclass
class BlockData:
    """Per-block data slices and cached likelihood factorizations."""

    start: int
    stop: int
    R: np.ndarray
    chol_R: np.ndarray
    gamma_hat: np.ndarray
    Gamma_hat: np.ndarray
    s_gamma: np.ndarray
    s_Gamma: np.ndarray
    A_gamma: np.ndarray
    A_Gamma: np.ndarray
    K_gamma: np.ndarray
    K_Gamma: np.ndarray
    Vinv_gamma: np.ndarray
    Vinv_Gamma: np.ndarray
    V_Gamma: np.ndarray
    AAt_Gamma: np.ndarray
    logdet_V_gamma: float
    logdet_V_Gamma: float
    info_exposure: np.ndarray
    info_outcome: np.ndarray

    @property
    def size(self) -> int:
        return self.stop - self.start


class _Group:
    """Blocks of one common size stacked for batched updates."""

    def __init__(self, size, block_idx, snp_idx, blocks):
        self.size = size
        self.block_idx = np.asarray(block_idx, dtype=np.int64)
        self.snp_idx = np.asarray(snp_idx, dtype=np.int64)

        def stack(name):
            return np.stack([getattr(b, name) for b in blocks])

        self.K_gamma = stack("K_gamma")
        self.K_Gamma = stack("K_Gamma")
        self.Vinv_Gamma = stack("Vinv_Gamma")
        self.V_Gamma = stack("V_Gamma")
        self.AAt_Gamma = stack("AAt_Gamma")
        self.A_Gamma = stack("A_Gamma")
        self.Gamma_hat = stack("Gamma_hat")
        self.info_exposure = stack("info_exposure")
        self.info_outcome = stack("info_outcome")
        self.logdet_V_Gamma = np.array([b.logdet_V_Gamma for b in blocks])
        self.eye = np.eye(size)


class BlockSet:
    """All blocks of one dataset plus the size-grouped stacks."""

    def __init__(self, blocks: list[BlockData], p: int):
        self.blocks = blocks
        self.p = p
        self.L = len(blocks)
        by_size: dict[int, list[int]] = {}
        for i, block in enumerate(blocks):
            by_size.setdefault(block.size, []).append(i)
        self.groups = []
        for size in sorted(by_size):
            idx = by_size[size]
            snp_idx = [np.arange(blocks[i].start, blocks[i].stop) for i in idx]
            self.groups.append(_Group(size, idx, snp_idx, [blocks[i] for i in idx]))

    def with_new_observations(self, gamma_hat, Gamma_hat) -> "BlockSet":
        """Same structural caches, new observed effect vectors."""
        gamma_hat = np.asarray(gamma_hat, dtype=float)
        Gamma_hat = np.asarray(Gamma_hat, dtype=float)
        blocks = []
        for b in self.blocks:
            gh = gamma_hat[b.start : b.stop]
            Gh = Gamma_hat[b.start : b.stop]
            blocks.append(
                BlockData(
                    start=b.start,
                    stop=b.stop,
                    R=b.R,
                    chol_R=b.chol_R,
                    gamma_hat=gh,
                    Gamma_hat=Gh,
                    s_gamma=b.s_gamma,
                    s_Gamma=b.s_Gamma,
                    A_gamma=b.A_gamma,
                    A_Gamma=b.A_Gamma,
                    K_gamma=b.K_gamma,
                    K_Gamma=b.K_Gamma,
                    Vinv_gamma=b.Vinv_gamma,
                    Vinv_Gamma=b.Vinv_Gamma,
                    V_Gamma=b.V_Gamma,
                    AAt_Gamma=b.AAt_Gamma,
                    logdet_V_gamma=b.logdet_V_gamma,
                    logdet_V_Gamma=b.logdet_V_Gamma,
                    info_exposure=gh / (b.s_gamma * b.s_gamma),
                    info_outcome=Gh / (b.s_Gamma * b.s_Gamma),
                )
            )
        return BlockSet(blocks, self.p)

    def block_to_snp(self, per_block: np.ndarray) -> np.ndarray:
        """Broadcast a per-block vector onto SNP positions."""
        out = np.empty(self.p)
        for b, value in zip(self.blocks, per_block):
            out[b.start : b.stop] = value
        return out


def _scale_kernels(R, chol_R, s):
    """A = S R S^-1, K = S^-1 R S^-1, V^-1 = S^-1 R^-1 S^-1, V = S R S."""
    inv_outer = 1.0 / np.outer(s, s)
    A = R * np.outer(s, 1.0 / s)
    K = R * inv_outer
    V = R * np.outer(s, s)
    m = R.shape[0]
    Rinv = np.linalg.solve(R, np.eye(m))
    Rinv = 0.5 * (Rinv + Rinv.T)
    Vinv = Rinv * inv_outer
    logdet_V = 2.0 * float(np.sum(np.log(s))) + 2.0 * float(
        np.sum(np.log(np.diag(chol_R)))
    )
    return A, K, Vinv, V, logdet_V


def precompute_blocks(dataset: HarmonizedDataset, block_corr: BlockCorr) -> BlockSet:
    """Slice the dataset by the LD partition and cache block factorizations."""
    partition = block_corr.partition
    partition.validate_for(dataset.n_snps)
    blocks = []
    for bi, ((start, stop), R) in enumerate(zip(partition.bounds, block_corr.matrices)):
        try:
            chol_R = np.linalg.cholesky(R)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"block {bi}: LD matrix failed Cholesky") from exc
        s_g = dataset.s_gamma[start:stop]
        s_G = dataset.s_Gamma[start:stop]
        gh = dataset.gamma_hat[start:stop]
        Gh = dataset.Gamma_hat[start:stop]
        A_g, K_g, Vinv_g, _, logdet_g = _scale_kernels(R, chol_R, s_g)
        A_G, K_G, Vinv_G, V_G, logdet_G = _scale_kernels(R, chol_R, s_G)
        blocks.append(
            BlockData(
                start=start,
                stop=stop,
                R=R,
                chol_R=chol_R,
                gamma_hat=gh,
                Gamma_hat=Gh,
                s_gamma=s_g,
                s_Gamma=s_G,
                A_gamma=A_g,
                A_Gamma=A_G,
                K_gamma=K_g,
                K_Gamma=K_G,
                Vinv_gamma=Vinv_g,
                Vinv_Gamma=Vinv_G,
                V_Gamma=V_G,
                AAt_Gamma=A_G @ A_G.T,
                logdet_V_gamma=logdet_g,
                logdet_V_Gamma=logdet_G,
                info_exposure=gh / (s_g * s_g),
                info_outcome=Gh / (s_G * s_G),
            )
        )
    return BlockSet(blocks, dataset.n_snps)


def init_state2(blockset: BlockSet, hyper: Hyperparams, rng: np.random.Generator) -> SamplerState:
    gamma_hat = np.concatenate([b.gamma_hat for b in blockset.blocks])
    Gamma_hat = np.concatenate([b.Gamma_hat for b in blockset.blocks])
    inv_s2_Gamma = np.concatenate(
        [1.0 / (b.s_Gamma * b.s_Gamma) for b in blockset.blocks]
    )
    anchor = _ratio_anchor(gamma_hat, Gamma_hat, inv_s2_Gamma)
    return SamplerState(
        beta0=anchor,
        beta1=anchor,
        gamma=gamma_hat.copy(),
        alpha_tilde=np.zeros(blockset.p),
        eta=(rng.random(blockset.L) < 0.1).astype(float),
        sigma2_gamma=max(float(np.var(gamma_hat)), INIT_VARIANCE_FLOOR),
        sigma2_alpha=max(float(np.var(Gamma_hat)), INIT_VARIANCE_FLOOR),
        omega=0.1,
    )


# ---------------------------------------------------------------------------
# conditional moments (grouped internally; flat views exposed for tests)
# ---------------------------------------------------------------------------


def _symmetrized_inverse(P):
    cov = np.linalg.inv(P)
    return 0.5 * (cov + np.swapaxes(cov, -1, -2))


def _gamma_moments(state, blockset):
    """Per group: (conditional mean, covariance) stacks for gamma blocks."""
    out = []
    inv_s2g = 1.0 / state.sigma2_gamma
    for g in blockset.groups:
        eta_g = state.eta[g.block_idx]
        b = state.beta0 * (1.0 - eta_g) + state.beta1 * eta_g
        P = g.K_gamma + (b * b)[:, None, None] * g.K_Gamma + inv_s2g * g.eye
        alpha_g = state.alpha_tilde[g.snp_idx] * eta_g[:, None]
        resid_info = g.info_outcome - np.einsum("gij,gj->gi", g.K_Gamma, alpha_g)
        info = g.info_exposure + b[:, None] * resid_info
        cov = _symmetrized_inverse(P)
        mean = np.einsum("gij,gj->gi", cov, info)
        out.append((mean, cov))
    return out


def gamma_conditional2(state, blockset):
    """Flat conditional mean and per-block covariance list, test helper."""
    mean_flat = np.empty(blockset.p)
    covs = [None] * blockset.L
    for g, (mean, cov) in zip(blockset.groups, _gamma_moments(state, blockset)):
        mean_flat[g.snp_idx] = mean
        for row, bi in enumerate(g.block_idx):
            covs[bi] = cov[row]
    return mean_flat, covs


def eta_log_odds2(state, blockset):
    """Log odds of eta_l = 1 with the block pleiotropy integrated out.

    Under eta_l = 0 the outcome block is N(A beta0 gamma_l, V); under
    eta_l = 1 it is N(A beta1 gamma_l, V + sigma2_alpha A A') because the
    mean operator propagates the pleiotropy covariance.
    """
    out = np.empty(blockset.L)
    prior = math.log(state.omega) - math.log1p(-state.omega)
    for g in blockset.groups:
        gamma_g = state.gamma[g.snp_idx]
        mean_op = np.einsum("gij,gj->gi", g.A_Gamma, gamma_g)
        r0 = g.Gamma_hat - state.beta0 * mean_op
        q0 = np.einsum("gi,gij,gj->g", r0, g.Vinv_Gamma, r0)
        ll0 = -0.5 * (q0 + g.logdet_V_Gamma + g.size * LOG_2PI)

        C1 = g.V_Gamma + state.sigma2_alpha * g.AAt_Gamma
        chol = np.linalg.cholesky(C1)
        logdet1 = 2.0 * np.sum(np.log(np.diagonal(chol, axis1=-2, axis2=-1)), axis=-1)
        r1 = g.Gamma_hat - state.beta1 * mean_op
        solved = np.linalg.solve(C1, r1[..., None])[..., 0]
        q1 = np.einsum("gi,gi->g", r1, solved)
        ll1 = -0.5 * (q1 + logdet1 + g.size * LOG_2PI)
        out[g.block_idx] = prior + ll1 - ll0
    return out


def _alpha_moments(state, blockset):
    """Per group: slab conditional (mean, covariance) for alpha blocks."""
    out = []
    inv_s2a = 1.0 / state.sigma2_alpha
    for g in blockset.groups:
        gamma_g = state.gamma[g.snp_idx]
        Q = g.K_Gamma + inv_s2a * g.eye
        info = g.info_outcome - state.beta1 * np.einsum("gij,gj->gi", g.K_Gamma, gamma_g)
        cov = _symmetrized_inverse(Q)
        mean = np.einsum("gij,gj->gi", cov, info)
        out.append((mean, cov))
    return out


def alpha_conditional2(state, blockset):
    mean_flat = np.empty(blockset.p)
    covs = [None] * blockset.L
    for g, (mean, cov) in zip(blockset.groups, _alpha_moments(state, blockset)):
        mean_flat[g.snp_idx] = mean
        for row, bi in enumerate(g.block_idx):
            covs[bi] = cov[row]
    return mean_flat, covs


def beta_conditional2(state, blockset, hyper, component):
    """Pooled Gaussian conditional for beta0 (0) or beta1 (1).

    Precision sums gamma' K gamma over the blocks assigned to the
    component; for beta1 the information is reduced by the pleiotropy
    term.  Improper-and-empty conditionals signal the random-walk
    fallback exactly as in the independent-SNP model.
    """
    precision = 0.0
    info = 0.0
    for g in blockset.groups:
        eta_g = state.eta[g.block_idx]
        mask = eta_g == component
        if not np.any(mask):
            continue
        gamma_g = state.gamma[g.snp_idx]
        qf = np.einsum("gi,gij,gj->g", gamma_g, g.K_Gamma, gamma_g)
        if component == 0:
            iv = np.einsum("gi,gi->g", gamma_g, g.info_outcome)
        else:
            alpha_g = state.alpha_tilde[g.snp_idx]
            reduced = g.info_outcome - np.einsum("gij,gj->gi", g.K_Gamma, alpha_g)
            iv = np.einsum("gi,gi->g", gamma_g, reduced)
        precision += float(np.sum(qf[mask]))
        info += float(np.sum(iv[mask]))
    if np.isfinite(hyper.beta_prior_var):
        precision += 1.0 / hyper.beta_prior_var
    current = state.beta0 if component == 0 else state.beta1
    if precision <= 0.0:
        return current, 1.0, True
    return info / precision, 1.0 / precision, False


# ---------------------------------------------------------------------------
# Gibbs updates
# ---------------------------------------------------------------------------


def update_gamma_block(state, blockset, hyper, rng) -> None:
    z = rng.standard_normal(blockset.p)
    new_gamma = np.empty(blockset.p)
    for g, (mean, cov) in zip(blockset.groups, _gamma_moments(state, blockset)):
        chol = np.linalg.cholesky(cov)
        noise = np.einsum("gij,gj->gi", chol, z[g.snp_idx])
        new_gamma[g.snp_idx] = mean + noise
    state.gamma = new_gamma


def update_eta_alpha_block(state, blockset, hyper, rng, fix_eta=None) -> None:
    if fix_eta is None:
        prob = expit(eta_log_odds2(state, blockset))
        state.eta = (rng.random(blockset.L) < prob).astype(float)
    else:
        state.eta = np.asarray(fix_eta, dtype=float)
    z = rng.standard_normal(blockset.p)
    sd_prior = math.sqrt(state.sigma2_alpha)
    new_alpha = np.empty(blockset.p)
    for g, (mean, cov) in zip(blockset.groups, _alpha_moments(state, blockset)):
        chol = np.linalg.cholesky(cov)
        z_g = z[g.snp_idx]
        slab = mean + np.einsum("gij,gj->gi", chol, z_g)
        prior = sd_prior * z_g
        eta_g = state.eta[g.block_idx]
        new_alpha[g.snp_idx] = np.where(eta_g[:, None] == 1.0, slab, prior)
    state.alpha_tilde = new_alpha


def update_globals(state, blockset, hyper, rng, fix_omega=None) -> tuple[bool, bool]:
    mean, var, fb0 = beta_conditional2(state, blockset, hyper, 0)
    state.beta0 = mean + math.sqrt(var) * rng.standard_normal()
    mean, var, fb1 = beta_conditional2(state, blockset, hyper, 1)
    state.beta1 = mean + math.sqrt(var) * rng.standard_normal()

    ig_gamma, ig_alpha, beta_omega = variance_posteriors(state, hyper, blockset.p)
    state.sigma2_gamma = _inverse_gamma_draw(rng, ig_gamma[0], ig_gamma[1])
    state.sigma2_alpha = _inverse_gamma_draw(rng, ig_alpha[0], ig_alpha[1])
    if fix_omega is None:
        state.omega = float(rng.beta(beta_omega[0], beta_omega[1]))
    else:
        state.omega = fix_omega
    return fb0, fb1


def gibbs_sweep2(state, blockset, hyper, rng, fix_eta=None, fix_omega=None):
    update_gamma_block(state, blockset, hyper, rng)
    update_eta_alpha_block(state, blockset, hyper, rng, fix_eta=fix_eta)
    return update_globals(state, blockset, hyper, rng, fix_omega=fix_omega)


# ---------------------------------------------------------------------------
# log posterior over blocks (reference density for oracle checks)
# ---------------------------------------------------------------------------


def log_posterior2(state: SamplerState, blockset: BlockSet, hyper: Hyperparams) -> float:
    if state.sigma2_gamma <= 0 or state.sigma2_alpha <= 0:
        return -math.inf
    if not (0.0 < state.omega < 1.0):
        return -math.inf
    if not np.all((state.eta == 0) | (state.eta == 1)):
        return -math.inf
    if not (np.isfinite(state.beta0) and np.isfinite(state.beta1)):
        return -math.inf

    out = 0.0
    for bi, block in enumerate(blockset.blocks):
        gamma_l = state.gamma[block.start : block.stop]
        alpha_l = state.alpha_tilde[block.start : block.stop]
        eta_l = state.eta[bi]
        b_l = state.beta0 * (1.0 - eta_l) + state.beta1 * eta_l

        r_g = block.gamma_hat - block.A_gamma @ gamma_l
        out -= 0.5 * (
            float(r_g @ block.Vinv_gamma @ r_g)
            + block.logdet_V_gamma
            + block.size * LOG_2PI
        )
        mean_out = block.A_Gamma @ (b_l * gamma_l + eta_l * alpha_l)
        r_G = block.Gamma_hat - mean_out
        out -= 0.5 * (
            float(r_G @ block.Vinv_Gamma @ r_G)
            + block.logdet_V_Gamma
            + block.size * LOG_2PI
        )

    p = blockset.p
    out -= 0.5 * (
        float(np.sum(state.gamma**2)) / state.sigma2_gamma
        + p * math.log(state.sigma2_gamma)
        + float(np.sum(state.alpha_tilde**2)) / state.sigma2_alpha
        + p * math.log(state.sigma2_alpha)
        + 2.0 * p * LOG_2PI
    )
    k = float(np.sum(state.eta))
    out += k * math.log(state.omega) + (blockset.L - k) * math.log1p(-state.omega)
    out += _log_ig(state.sigma2_gamma, hyper.a_gamma, hyper.b_gamma)
    out += _log_ig(state.sigma2_alpha, hyper.a_alpha, hyper.b_alpha)
    out += _log_beta_pdf(state.omega, hyper.a_omega, hyper.b_omega)
    if np.isfinite(hyper.beta_prior_var):
        tau2 = hyper.beta_prior_var
        out -= 0.5 * (
            state.beta0**2 / tau2 + state.beta1**2 / tau2 + 2.0 * math.log(2.0 * math.pi * tau2)
        )
    return out


# ---------------------------------------------------------------------------
# chain driver
# ---------------------------------------------------------------------------


def _check_finite2(state, iteration):
    for name in ("beta0", "beta1", "sigma2_gamma", "sigma2_alpha", "omega"):
        if not np.isfinite(getattr(state, name)):
            raise NumericError(f"non-finite draw of {name} at iteration {iteration}")
    if not np.all(np.isfinite(state.gamma)):
        raise NumericError(f"non-finite draw of gamma at iteration {iteration}")
    if not np.all(np.isfinite(state.alpha_tilde)):
        raise NumericError(f"non-finite draw of alpha_tilde at iteration {iteration}")


def run_chain2(
    dataset: HarmonizedDataset,
    block_corr: BlockCorr,
    hyper: Hyperparams,
    config: McmcConfig,
    seed,
    start: SamplerState | None = None,
    chain_id: int = 0,
    fix_eta=None,
    fix_omega: float | None = None,
    blockset: BlockSet | None = None,
) -> Trace:
    """Run one Gibbs chain of the LD-aware model.

    Deterministic given ``seed``; the batching of blocks never changes the
    random stream, so results do not depend on execution layout.
    """
    if blockset is None:
        blockset = precompute_blocks(dataset, block_corr)
    rng = np.random.default_rng(seed)
    state = init_state2(blockset, hyper, rng) if start is None else start.copy()
    if fix_eta is not None:
        state.eta = np.asarray(fix_eta, dtype=float)
    if fix_omega is not None:
        state.omega = fix_omega
    validate_state(state, n_units=blockset.L)

    n_keep = config.n_retained
    keep = {
        "beta0": np.empty(n_keep),
        "beta1": np.empty(n_keep),
        "sigma2_gamma": np.empty(n_keep),
        "sigma2_alpha": np.empty(n_keep),
        "omega": np.empty(n_keep),
        "eta_mean": np.empty(n_keep),
    }
    iterations = np.empty(n_keep, dtype=np.int64)
    eta_draws = np.empty((n_keep, blockset.L)) if config.keep_unit_draws else None
    alpha_draws = np.empty((n_keep, blockset.p)) if config.keep_unit_draws else None
    inclusion = np.zeros(blockset.L)
    fb0_count = 0
    fb1_count = 0

    row = 0
    for t in range(config.n_iter):
        try:
            fb0, fb1 = gibbs_sweep2(
                state, blockset, hyper, rng, fix_eta=fix_eta, fix_omega=fix_omega
            )
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"factorization failed at iteration {t}") from exc
        fb0_count += fb0
        fb1_count += fb1
        _check_finite2(state, t)
        if t >= config.n_burnin and (t - config.n_burnin) % config.thin == 0:
            keep["beta0"][row] = state.beta0
            keep["beta1"][row] = state.beta1
            keep["sigma2_gamma"][row] = state.sigma2_gamma
            keep["sigma2_alpha"][row] = state.sigma2_alpha
            keep["omega"][row] = state.omega
            keep["eta_mean"][row] = float(np.mean(state.eta))
            iterations[row] = t
            inclusion += state.eta
            if config.keep_unit_draws:
                eta_draws[row] = state.eta
                alpha_draws[row] = state.alpha_tilde
            row += 1
    inclusion /= max(row, 1)

    return Trace(
        model="corr2",
        beta0=keep["beta0"],
        beta1=keep["beta1"],
        sigma2_gamma=keep["sigma2_gamma"],
        sigma2_alpha=keep["sigma2_alpha"],
        omega=keep["omega"],
        eta_mean=keep["eta_mean"],
        chain_id=np.full(n_keep, chain_id, dtype=np.int64),
        iteration=iterations,
        snp_inclusion=blockset.block_to_snp(inclusion),
        unit_inclusion=inclusion,
        n_units=blockset.L,
        n_chains=1,
        n_iter=config.n_iter,
        n_burnin=config.n_burnin,
        thin=config.thin,
        beta0_fallbacks=fb0_count,
        beta1_fallbacks=fb1_count,
        eta_draws=eta_draws,
        alpha_draws=alpha_draws,
    )


def _chain_worker2(args) -> Trace:
    dataset, block_corr, hyper, config, seed, chain_id, fix_eta, fix_omega = args
    return run_chain2(
        dataset,
        block_corr,
        hyper,
        config,
        seed,
        chain_id=chain_id,
        fix_eta=fix_eta,
        fix_omega=fix_omega,
    )


def fit_mr_corr2(
    dataset: HarmonizedDataset,
    block_corr: BlockCorr,
    hyper: Hyperparams | None = None,
    config: McmcConfig | None = None,
    seed=0,
    fix_eta=None,
    fix_omega: float | None = None,
    workers: int = 1,
) -> Trace:
    """Run ``config.n_chains`` chains of the LD-aware model and combine.

    Chains consume pre-spawned seed substreams and are concatenated in
    chain order, so the result is independent of ``workers``.
    """
    hyper = hyper or Hyperparams()
    config = config or McmcConfig()
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    seeds = seed.spawn(config.n_chains)
    if workers > 1 and config.n_chains > 1:
        from concurrent.futures import ProcessPoolExecutor

        payloads = [
            (dataset, block_corr, hyper, config, seeds[c], c, fix_eta, fix_omega)
            for c in range(config.n_chains)
        ]
        with ProcessPoolExecutor(max_workers=min(workers, config.n_chains)) as pool:
            traces = list(pool.map(_chain_worker2, payloads))
    else:
        blockset = precompute_blocks(dataset, block_corr)
        traces = [
            run_chain2(
                dataset,
                block_corr,
                hyper,
                config,
                seeds[c],
                chain_id=c,
                fix_eta=fix_eta,
                fix_omega=fix_omega,
                blockset=blockset,
            )
            for c in range(config.n_chains)
        ]
    return concat_traces(traces)
