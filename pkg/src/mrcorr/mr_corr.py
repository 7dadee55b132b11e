"""Spike-slab Gibbs sampler for two-sample MR with independent SNPs.

The observed per-SNP effects are modeled as

    gamma_hat_k ~ N(gamma_k, s_gamma_k^2)
    Gamma_hat_k ~ N(beta0 * (1 - eta_k) * gamma_k
                    + beta1 * eta_k * gamma_k + eta_k * alpha_k,
                    s_Gamma_k^2)

where eta_k is a Bernoulli(omega) indicator selecting SNPs that carry
correlated horizontal pleiotropy.  beta0 (the eta = 0 component) is the
causal effect; beta1 = beta0 + c absorbs the pleiotropy-exposure
correlation and is reported only as a nuisance summary.  gamma_k and the
orthogonalized pleiotropy alpha_k carry zero-mean Gaussian priors whose
variances get inverse-gamma priors; omega gets a beta prior; beta0 and
beta1 are flat by default (an optional Gaussian prior supports prior
predictive checks).

All conditional moments live in small pure helper functions so they can
be validated independently against numeric integration of
:func:`log_posterior`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import betaln, expit, gammaln

from .errors import DataError, NumericError
from .summary_data import HarmonizedDataset

VARIANCE_FLOOR = 1e-12
INIT_VARIANCE_FLOOR = 1e-8
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Hyperparams:
    """Prior hyperparameters shared by both samplers.

    ``beta_prior_var`` is the variance of an optional zero-mean Gaussian
    prior on beta0 and beta1; the default ``inf`` gives the flat prior.
    """

    a_gamma: float = 0.001
    b_gamma: float = 0.001
    a_alpha: float = 0.001
    b_alpha: float = 0.001
    a_omega: float = 1.0
    b_omega: float = 1.0
    beta_prior_var: float = math.inf

    def __post_init__(self):
        for name in ("a_gamma", "b_gamma", "a_alpha", "b_alpha", "a_omega", "b_omega"):
            if getattr(self, name) <= 0:
                raise DataError(f"hyperparameter {name} must be positive")
        if not self.beta_prior_var > 0:
            raise DataError("beta_prior_var must be positive (inf for flat)")


@dataclass
class McmcConfig:
    n_iter: int = 10000
    n_burnin: int = 5000
    thin: int = 1
    n_chains: int = 1
    keep_unit_draws: bool = False

    def __post_init__(self):
        if self.n_iter <= 0 or not (0 <= self.n_burnin < self.n_iter):
            raise DataError("need 0 <= n_burnin < n_iter")
        if self.thin < 1 or self.n_chains < 1:
            raise DataError("thin and n_chains must be >= 1")
        if self.n_retained < 100:
            warnings.warn(
                f"only {self.n_retained} retained draws per chain; "
                "summaries will be noisy",
                stacklevel=2,
            )

    @property
    def n_retained(self) -> int:
        return len(range(self.n_burnin, self.n_iter, self.thin))


@dataclass
class SamplerState:
    """Current values of all latent quantities for one chain."""

    beta0: float
    beta1: float
    gamma: np.ndarray
    alpha_tilde: np.ndarray
    eta: np.ndarray
    sigma2_gamma: float
    sigma2_alpha: float
    omega: float

    def copy(self) -> "SamplerState":
        return SamplerState(
            beta0=self.beta0,
            beta1=self.beta1,
            gamma=self.gamma.copy(),
            alpha_tilde=self.alpha_tilde.copy(),
            eta=self.eta.copy(),
            sigma2_gamma=self.sigma2_gamma,
            sigma2_alpha=self.sigma2_alpha,
            omega=self.omega,
        )


def validate_state(state: SamplerState, n_units: int | None = None) -> None:
    """Raise if the state violates the model's support."""
    p = state.gamma.shape[0]
    if state.alpha_tilde.shape[0] != p:
        raise DataError("gamma and alpha_tilde must have equal length")
    if n_units is None:
        n_units = p
    if state.eta.shape[0] != n_units:
        raise DataError("eta has wrong length")
    if not np.all((state.eta == 0) | (state.eta == 1)):
        raise DataError("eta entries must be 0 or 1")
    if state.sigma2_gamma <= 0 or state.sigma2_alpha <= 0:
        raise DataError("variances must be positive")
    if not (0.0 < state.omega < 1.0):
        raise DataError("omega must lie in (0, 1)")
    for name in ("beta0", "beta1"):
        if not np.isfinite(getattr(state, name)):
            raise DataError(f"{name} must be finite")


@dataclass
class Trace:
    """Retained draws of the global parameters plus inclusion summaries."""

    model: str
    beta0: np.ndarray
    beta1: np.ndarray
    sigma2_gamma: np.ndarray
    sigma2_alpha: np.ndarray
    omega: np.ndarray
    eta_mean: np.ndarray
    chain_id: np.ndarray
    iteration: np.ndarray
    snp_inclusion: np.ndarray
    unit_inclusion: np.ndarray
    n_units: int
    n_chains: int
    n_iter: int
    n_burnin: int
    thin: int
    beta0_fallbacks: int = 0
    beta1_fallbacks: int = 0
    eta_draws: np.ndarray | None = None
    alpha_draws: np.ndarray | None = None

    @property
    def n_rows(self) -> int:
        return self.beta0.shape[0]

    def scalar(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def by_chain(self, name: str) -> list[np.ndarray]:
        values = getattr(self, name)
        return [values[self.chain_id == c] for c in range(self.n_chains)]

    def to_csv(self, path) -> None:
        with open(path, "wt") as fh:
            fh.write(
                "chain\titeration\tbeta0\tbeta1\tsigma2_gamma\tsigma2_alpha"
                "\tomega\tmean_eta\n"
            )
            for i in range(self.n_rows):
                fh.write(
                    f"{self.chain_id[i]}\t{self.iteration[i]}"
                    f"\t{self.beta0[i]:.17g}\t{self.beta1[i]:.17g}"
                    f"\t{self.sigma2_gamma[i]:.17g}\t{self.sigma2_alpha[i]:.17g}"
                    f"\t{self.omega[i]:.17g}\t{self.eta_mean[i]:.17g}\n"
                )


@dataclass
class ChainData:
    """Precomputed per-SNP quantities for the independent-SNP sampler."""

    gamma_hat: np.ndarray
    Gamma_hat: np.ndarray
    s2_gamma: np.ndarray
    s2_Gamma: np.ndarray
    inv_s2_gamma: np.ndarray = field(init=False)
    inv_s2_Gamma: np.ndarray = field(init=False)

    def __post_init__(self):
        self.gamma_hat = np.asarray(self.gamma_hat, dtype=float)
        self.Gamma_hat = np.asarray(self.Gamma_hat, dtype=float)
        self.s2_gamma = np.asarray(self.s2_gamma, dtype=float)
        self.s2_Gamma = np.asarray(self.s2_Gamma, dtype=float)
        if np.any(self.s2_gamma <= 0) or np.any(self.s2_Gamma <= 0):
            raise DataError("squared standard errors must be positive")
        self.inv_s2_gamma = 1.0 / self.s2_gamma
        self.inv_s2_Gamma = 1.0 / self.s2_Gamma

    @property
    def p(self) -> int:
        return self.gamma_hat.shape[0]

    @classmethod
    def from_dataset(cls, dataset: HarmonizedDataset) -> "ChainData":
        if dataset.n_snps == 0:
            raise DataError("empty dataset")
        return cls(
            gamma_hat=dataset.gamma_hat.copy(),
            Gamma_hat=dataset.Gamma_hat.copy(),
            s2_gamma=dataset.s_gamma**2,
            s2_Gamma=dataset.s_Gamma**2,
        )

    def with_new_observations(self, gamma_hat, Gamma_hat) -> "ChainData":
        return ChainData(gamma_hat, Gamma_hat, self.s2_gamma, self.s2_Gamma)


def _ratio_anchor(gamma_hat, Gamma_hat, inv_s2_Gamma) -> float:
    """Precision-weighted regression of outcome on exposure effects.

    Used only to start the slopes near the data-supported value so the
    chain does not have to random-walk toward it through a flat prior.
    """
    with np.errstate(all="ignore"):
        den = float(np.sum(gamma_hat * gamma_hat * inv_s2_Gamma))
        if den <= 0.0 or not math.isfinite(den):
            return 0.0
        anchor = float(np.sum(gamma_hat * Gamma_hat * inv_s2_Gamma)) / den
    return anchor if math.isfinite(anchor) else 0.0


def init_state(data: ChainData, hyper: Hyperparams, rng: np.random.Generator) -> SamplerState:
    """Data-driven starting point for one chain."""
    p = data.p
    anchor = _ratio_anchor(data.gamma_hat, data.Gamma_hat, data.inv_s2_Gamma)
    return SamplerState(
        beta0=anchor,
        beta1=anchor,
        gamma=data.gamma_hat.copy(),
        alpha_tilde=np.zeros(p),
        eta=(rng.random(p) < 0.1).astype(float),
        sigma2_gamma=max(float(np.var(data.gamma_hat)), INIT_VARIANCE_FLOOR),
        sigma2_alpha=max(float(np.var(data.Gamma_hat)), INIT_VARIANCE_FLOOR),
        omega=0.1,
    )


# ---------------------------------------------------------------------------
# conditional moments (pure; validated against quadrature of log_posterior)
# ---------------------------------------------------------------------------


def slope_per_snp(state: SamplerState) -> np.ndarray:
    """Mixture slope b_k = beta0 (1 - eta_k) + beta1 eta_k."""
    return state.beta0 * (1.0 - state.eta) + state.beta1 * state.eta


def gamma_conditional(state: SamplerState, data: ChainData) -> tuple[np.ndarray, np.ndarray]:
    """Mean and variance of each gamma_k given everything else."""
    b = slope_per_snp(state)
    precision = data.inv_s2_gamma + b * b * data.inv_s2_Gamma + 1.0 / state.sigma2_gamma
    resid = data.Gamma_hat - state.eta * state.alpha_tilde
    info = data.gamma_hat * data.inv_s2_gamma + b * resid * data.inv_s2_Gamma
    var = 1.0 / precision
    return info * var, var


def eta_log_odds(state: SamplerState, data: ChainData) -> np.ndarray:
    """Log posterior odds of eta_k = 1 with alpha_k integrated out."""
    var1 = data.s2_Gamma + state.sigma2_alpha
    ll1 = -0.5 * ((data.Gamma_hat - state.beta1 * state.gamma) ** 2 / var1 + np.log(var1))
    ll0 = -0.5 * (
        (data.Gamma_hat - state.beta0 * state.gamma) ** 2 / data.s2_Gamma
        + np.log(data.s2_Gamma)
    )
    prior = math.log(state.omega) - math.log1p(-state.omega)
    return prior + ll1 - ll0


def alpha_conditional(state: SamplerState, data: ChainData) -> tuple[np.ndarray, np.ndarray]:
    """Mean and variance of alpha_k given eta_k = 1 and everything else."""
    precision = data.inv_s2_Gamma + 1.0 / state.sigma2_alpha
    var = 1.0 / precision
    mean = (data.Gamma_hat - state.beta1 * state.gamma) * data.inv_s2_Gamma * var
    return mean, var


def beta_conditional(
    state: SamplerState, data: ChainData, hyper: Hyperparams, component: int
) -> tuple[float, float, bool]:
    """Gaussian conditional for beta0 (component 0) or beta1 (component 1).

    Information is pooled over the SNPs currently assigned to the
    component; for beta1 the response is reduced by the pleiotropy term.
    With a flat prior and no information the conditional is improper and
    a random-walk fallback around the current value is signaled.
    """
    mask = state.eta == component
    if component == 0:
        response = data.Gamma_hat
        current = state.beta0
    else:
        response = data.Gamma_hat - state.alpha_tilde
        current = state.beta1
    g = state.gamma[mask]
    w = data.inv_s2_Gamma[mask]
    precision = float(np.sum(g * g * w))
    info = float(np.sum(g * response[mask] * w))
    if np.isfinite(hyper.beta_prior_var):
        precision += 1.0 / hyper.beta_prior_var
    if precision <= 0.0:
        return current, 1.0, True
    return info / precision, 1.0 / precision, False


def variance_posteriors(
    state: SamplerState, hyper: Hyperparams, p: int
) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
    """(shape, rate) for the two inverse-gamma posteriors and (a, b) for omega.

    Both variance updates pool all p components; alpha_tilde keeps its
    Gaussian prior whether or not eta currently selects it.
    """
    n_units = state.eta.shape[0]
    k = float(np.sum(state.eta))
    ig_gamma = (hyper.a_gamma + 0.5 * p, hyper.b_gamma + 0.5 * float(np.sum(state.gamma**2)))
    ig_alpha = (hyper.a_alpha + 0.5 * p, hyper.b_alpha + 0.5 * float(np.sum(state.alpha_tilde**2)))
    beta_omega = (hyper.a_omega + k, hyper.b_omega + n_units - k)
    return ig_gamma, ig_alpha, beta_omega


# ---------------------------------------------------------------------------
# Gibbs updates (draw from the conditionals above, mutating the state)
# ---------------------------------------------------------------------------


def update_gamma(state, data, hyper, rng) -> None:
    mean, var = gamma_conditional(state, data)
    state.gamma = mean + np.sqrt(var) * rng.standard_normal(data.p)


def update_eta_alpha(state, data, hyper, rng, fix_eta=None) -> None:
    if fix_eta is None:
        prob = expit(eta_log_odds(state, data))
        state.eta = (rng.random(data.p) < prob).astype(float)
    else:
        state.eta = np.asarray(fix_eta, dtype=float)
    mean1, var1 = alpha_conditional(state, data)
    z = rng.standard_normal(data.p)
    prior_draw = math.sqrt(state.sigma2_alpha) * z
    state.alpha_tilde = np.where(state.eta == 1.0, mean1 + np.sqrt(var1) * z, prior_draw)


def update_beta0(state, data, hyper, rng) -> bool:
    mean, var, fallback = beta_conditional(state, data, hyper, 0)
    state.beta0 = mean + math.sqrt(var) * rng.standard_normal()
    return fallback


def update_beta1(state, data, hyper, rng) -> bool:
    mean, var, fallback = beta_conditional(state, data, hyper, 1)
    state.beta1 = mean + math.sqrt(var) * rng.standard_normal()
    return fallback


def _inverse_gamma_draw(rng, shape: float, rate: float) -> float:
    g = rng.gamma(shape, 1.0 / rate) if rate > 0 else 0.0
    if g <= 0.0 or not math.isfinite(g):
        return math.inf
    return max(1.0 / g, VARIANCE_FLOOR)


def update_variances_omega(state, data, hyper, rng, fix_omega=None) -> None:
    ig_gamma, ig_alpha, beta_omega = variance_posteriors(state, hyper, data.p)
    state.sigma2_gamma = _inverse_gamma_draw(rng, ig_gamma[0], ig_gamma[1])
    state.sigma2_alpha = _inverse_gamma_draw(rng, ig_alpha[0], ig_alpha[1])
    if fix_omega is None:
        state.omega = float(rng.beta(beta_omega[0], beta_omega[1]))
    else:
        state.omega = fix_omega


def gibbs_sweep(state, data, hyper, rng, fix_eta=None, fix_omega=None) -> tuple[bool, bool]:
    """One full update sweep; returns the beta fallback flags."""
    update_gamma(state, data, hyper, rng)
    update_eta_alpha(state, data, hyper, rng, fix_eta=fix_eta)
    fb0 = update_beta0(state, data, hyper, rng)
    fb1 = update_beta1(state, data, hyper, rng)
    update_variances_omega(state, data, hyper, rng, fix_omega=fix_omega)
    return fb0, fb1


# ---------------------------------------------------------------------------
# log posterior (reference density for oracle checks; also guards support)
# ---------------------------------------------------------------------------


def _log_ig(x: float, a: float, b: float) -> float:
    return a * math.log(b) - gammaln(a) - (a + 1.0) * math.log(x) - b / x


def _log_beta_pdf(x: float, a: float, b: float) -> float:
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - betaln(a, b)


def log_posterior(state: SamplerState, data: ChainData, hyper: Hyperparams) -> float:
    """Joint log density of the state given the data, -inf off support."""
    if state.sigma2_gamma <= 0 or state.sigma2_alpha <= 0:
        return -math.inf
    if not (0.0 < state.omega < 1.0):
        return -math.inf
    if not np.all((state.eta == 0) | (state.eta == 1)):
        return -math.inf
    if not (np.isfinite(state.beta0) and np.isfinite(state.beta1)):
        return -math.inf

    p = data.p
    b = slope_per_snp(state)
    r_gamma = data.gamma_hat - state.gamma
    r_Gamma = data.Gamma_hat - b * state.gamma - state.eta * state.alpha_tilde
    out = -0.5 * float(
        np.sum(r_gamma * r_gamma * data.inv_s2_gamma)
        + np.sum(np.log(data.s2_gamma))
        + np.sum(r_Gamma * r_Gamma * data.inv_s2_Gamma)
        + np.sum(np.log(data.s2_Gamma))
    ) - p * LOG_2PI

    out -= 0.5 * (
        float(np.sum(state.gamma**2)) / state.sigma2_gamma
        + p * math.log(state.sigma2_gamma)
        + float(np.sum(state.alpha_tilde**2)) / state.sigma2_alpha
        + p * math.log(state.sigma2_alpha)
        + 2.0 * p * LOG_2PI
    )

    k = float(np.sum(state.eta))
    n_units = state.eta.shape[0]
    out += k * math.log(state.omega) + (n_units - k) * math.log1p(-state.omega)

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


def _check_finite(state: SamplerState, iteration: int) -> None:
    for name in ("beta0", "beta1", "sigma2_gamma", "sigma2_alpha", "omega"):
        if not np.isfinite(getattr(state, name)):
            raise NumericError(f"non-finite draw of {name} at iteration {iteration}")
    if not np.all(np.isfinite(state.gamma)):
        raise NumericError(f"non-finite draw of gamma at iteration {iteration}")
    if not np.all(np.isfinite(state.alpha_tilde)):
        raise NumericError(f"non-finite draw of alpha_tilde at iteration {iteration}")


def run_chain(
    dataset: HarmonizedDataset,
    hyper: Hyperparams,
    config: McmcConfig,
    seed,
    start: SamplerState | None = None,
    chain_id: int = 0,
    fix_eta=None,
    fix_omega: float | None = None,
) -> Trace:
    """Run one Gibbs chain on independent-SNP summary data.

    ``seed`` may be an int or a ``numpy.random.SeedSequence``; the chain
    is a deterministic function of it.  ``fix_eta`` / ``fix_omega`` pin
    the indicator vector or slab weight for diagnostic refits.
    """
    data = ChainData.from_dataset(dataset)
    rng = np.random.default_rng(seed)
    state = init_state(data, hyper, rng) if start is None else start.copy()
    if fix_eta is not None:
        state.eta = np.asarray(fix_eta, dtype=float)
    if fix_omega is not None:
        state.omega = fix_omega
    validate_state(state)

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
    eta_draws = np.empty((n_keep, data.p)) if config.keep_unit_draws else None
    alpha_draws = np.empty((n_keep, data.p)) if config.keep_unit_draws else None
    inclusion = np.zeros(data.p)
    fb0_count = 0
    fb1_count = 0

    row = 0
    for t in range(config.n_iter):
        fb0, fb1 = gibbs_sweep(state, data, hyper, rng, fix_eta=fix_eta, fix_omega=fix_omega)
        fb0_count += fb0
        fb1_count += fb1
        _check_finite(state, t)
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
        model="corr",
        beta0=keep["beta0"],
        beta1=keep["beta1"],
        sigma2_gamma=keep["sigma2_gamma"],
        sigma2_alpha=keep["sigma2_alpha"],
        omega=keep["omega"],
        eta_mean=keep["eta_mean"],
        chain_id=np.full(n_keep, chain_id, dtype=np.int64),
        iteration=iterations,
        snp_inclusion=inclusion,
        unit_inclusion=inclusion.copy(),
        n_units=data.p,
        n_chains=1,
        n_iter=config.n_iter,
        n_burnin=config.n_burnin,
        thin=config.thin,
        beta0_fallbacks=fb0_count,
        beta1_fallbacks=fb1_count,
        eta_draws=eta_draws,
        alpha_draws=alpha_draws,
    )


def concat_traces(traces: list[Trace]) -> Trace:
    """Stack chain traces in chain order into one multi-chain trace."""
    if not traces:
        raise DataError("no traces to combine")
    first = traces[0]
    if len(traces) == 1:
        return first

    def cat(name):
        return np.concatenate([getattr(tr, name) for tr in traces])

    return Trace(
        model=first.model,
        beta0=cat("beta0"),
        beta1=cat("beta1"),
        sigma2_gamma=cat("sigma2_gamma"),
        sigma2_alpha=cat("sigma2_alpha"),
        omega=cat("omega"),
        eta_mean=cat("eta_mean"),
        chain_id=np.concatenate(
            [np.full(tr.n_rows, i, dtype=np.int64) for i, tr in enumerate(traces)]
        ),
        iteration=cat("iteration"),
        snp_inclusion=np.mean([tr.snp_inclusion for tr in traces], axis=0),
        unit_inclusion=np.mean([tr.unit_inclusion for tr in traces], axis=0),
        n_units=first.n_units,
        n_chains=len(traces),
        n_iter=first.n_iter,
        n_burnin=first.n_burnin,
        thin=first.thin,
        beta0_fallbacks=sum(tr.beta0_fallbacks for tr in traces),
        beta1_fallbacks=sum(tr.beta1_fallbacks for tr in traces),
    )


def _chain_worker(args) -> Trace:
    dataset, hyper, config, seed, chain_id, fix_eta, fix_omega = args
    return run_chain(
        dataset, hyper, config, seed, chain_id=chain_id, fix_eta=fix_eta, fix_omega=fix_omega
    )


def fit_mr_corr(
    dataset: HarmonizedDataset,
    hyper: Hyperparams | None = None,
    config: McmcConfig | None = None,
    seed=0,
    fix_eta=None,
    fix_omega: float | None = None,
    workers: int = 1,
) -> Trace:
    """Run ``config.n_chains`` chains and combine their traces.

    Chains consume pre-spawned seed substreams and are concatenated in
    chain order, so the result is independent of ``workers``.
    """
    hyper = hyper or Hyperparams()
    config = config or McmcConfig()
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    seeds = seed.spawn(config.n_chains)
    payloads = [
        (dataset, hyper, config, seeds[c], c, fix_eta, fix_omega)
        for c in range(config.n_chains)
    ]
    if workers > 1 and config.n_chains > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(workers, config.n_chains)) as pool:
            traces = list(pool.map(_chain_worker, payloads))
    else:
        traces = [_chain_worker(pl) for pl in payloads]
    return concat_traces(traces)
