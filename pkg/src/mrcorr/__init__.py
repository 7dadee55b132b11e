"""Two-sample Mendelian randomization with correlated-pleiotropy correction."""

__version__ = "0.1.0"

from .errors import DataError, MrCorrError, NumericError
from .ld_reference import (
    BlockCorr,
    BlockPartition,
    GenotypePanel,
    estimate_block_corr,
    identity_block_corr,
    load_panel,
    load_partition,
    uniform_partition,
)
from .mr_corr import (
    Hyperparams,
    McmcConfig,
    SamplerState,
    Trace,
    fit_mr_corr,
    log_posterior,
    run_chain,
)
from .mr_corr2 import (
    BlockData,
    BlockSet,
    fit_mr_corr2,
    log_posterior2,
    precompute_blocks,
    run_chain2,
)
from .posterior import (
    BenchmarkReport,
    PosteriorSummary,
    benchmark_report,
    credible_interval,
    ess,
    split_rhat,
    summarize,
    wald_pvalue,
)
from .simulator import (
    ScenarioConfig,
    SimTruth,
    SimulatedStudy,
    gen_effects,
    gen_genotypes,
    gen_scenario1,
    gen_scenario2,
    gen_study,
    run_benchmark,
    scale_to_heritability,
)
from .summary_data import (
    HarmonizedDataset,
    SnpRecord,
    harmonize,
    parse_gwas_table,
    select_instruments,
)

__all__ = [
    "BenchmarkReport",
    "BlockCorr",
    "BlockData",
    "BlockPartition",
    "BlockSet",
    "DataError",
    "GenotypePanel",
    "HarmonizedDataset",
    "Hyperparams",
    "McmcConfig",
    "MrCorrError",
    "NumericError",
    "PosteriorSummary",
    "SamplerState",
    "ScenarioConfig",
    "SimTruth",
    "SimulatedStudy",
    "SnpRecord",
    "Trace",
    "benchmark_report",
    "credible_interval",
    "ess",
    "estimate_block_corr",
    "fit_mr_corr",
    "fit_mr_corr2",
    "gen_effects",
    "gen_genotypes",
    "gen_scenario1",
    "gen_scenario2",
    "gen_study",
    "harmonize",
    "identity_block_corr",
    "load_panel",
    "load_partition",
    "log_posterior",
    "log_posterior2",
    "parse_gwas_table",
    "precompute_blocks",
    "run_benchmark",
    "run_chain2",
    "run_chain",
    "scale_to_heritability",
    "select_instruments",
    "split_rhat",
    "summarize",
    "uniform_partition",
    "wald_pvalue",
]
