"""Batch command-line interface.

Subcommands tie ingestion, LD estimation, fitting, simulation, and
plot-data export together.  All outputs are plain files (JSON carries a
``schema_version`` field); rendering is left to external tools.  Every
run is reproducible from the recorded seed: outputs are byte-identical
across reruns and worker counts, except for the JSON ``timestamp``
field.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import DataError, NumericError
from .ld_reference import estimate_block_corr, load_panel, load_partition
from .mr_corr import Hyperparams, McmcConfig, fit_mr_corr
from .mr_corr2 import fit_mr_corr2
from .posterior import summarize
from .simulator import ScenarioConfig, run_benchmark
from .summary_data import (
    HarmonizedDataset,
    harmonize,
    parse_gwas_table,
    select_instruments,
    write_harmonization_report,
)

SCHEMA_VERSION = 1

DEFAULT_COLUMNS = {
    "snp_id": "snp_id",
    "effect_allele": "effect_allele",
    "other_allele": "other_allele",
    "beta": "beta",
    "se": "se",
}


class UsageError(Exception):
    """Bad flag combination detected after argparse."""


class _Outputs:
    """Tracks files written by one command so a failure leaves nothing."""

    def __init__(self, outdir):
        self.outdir = outdir
        self.paths: list[str] = []
        os.makedirs(outdir, exist_ok=True)

    def path(self, name: str) -> str:
        full = os.path.join(self.outdir, name)
        self.paths.append(full)
        return full

    def discard_all(self) -> None:
        for full in self.paths:
            try:
                os.unlink(full)
            except OSError:
                pass


def _write_json(path, payload: dict) -> None:
    with open(path, "wt") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _metadata(seed) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
    }


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    return int(np.random.SeedSequence().entropy)


def _resolve_outdir(args) -> str:
    if args.out is not None:
        return args.out
    return os.environ.get("MRCORR_OUTDIR", ".")


def _resolve_workers(args) -> int:
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be a positive integer")
        return args.workers
    env = os.environ.get("MRCORR_WORKERS")
    if env is not None:
        try:
            workers = int(env)
        except ValueError as exc:
            raise UsageError(f"MRCORR_WORKERS must be an integer: {env!r}") from exc
        if workers < 1:
            raise UsageError("MRCORR_WORKERS must be a positive integer")
        return workers
    return 1


def _column_map(args) -> dict:
    columns = dict(DEFAULT_COLUMNS)
    for spec in args.column or []:
        role, sep, name = spec.partition("=")
        if not sep or not role or not name:
            raise UsageError(f"--column expects ROLE=NAME, got {spec!r}")
        columns[role] = name
    return columns


def _parse_study(path, columns: dict, need_pvalue: bool = False):
    if need_pvalue and "p_value" not in columns:
        columns = dict(columns, p_value="p_value")
    result = parse_gwas_table(path, columns)
    if not result.records:
        raise DataError(f"no usable rows in {path}")
    return result


def _load_dataset(args, columns: dict):
    """HarmonizedDataset from either a harmonized TSV or two GWAS tables;
    returns (dataset, harmonization report or None)."""
    if args.harmonized is not None:
        return HarmonizedDataset.from_tsv(args.harmonized), None
    exposure = _parse_study(args.exposure, columns)
    outcome = _parse_study(args.outcome, columns)
    dataset, report = harmonize(
        exposure.records, outcome.records, keep_palindromic=args.keep_palindromic
    )
    if dataset.n_snps == 0:
        raise DataError("no SNPs survived harmonization")
    if args.screen is not None:
        screening = _parse_study(args.screen, columns, need_pvalue=True)
        dataset = select_instruments(dataset, screening.records, args.p_sel)
        if dataset.n_snps == 0:
            raise DataError("no SNPs passed the screening threshold")
    return dataset, report


def _hyper_from_args(args) -> Hyperparams:
    return Hyperparams(
        a_gamma=args.a_gamma,
        b_gamma=args.b_gamma,
        a_alpha=args.a_alpha,
        b_alpha=args.b_alpha,
        a_omega=args.a_omega,
        b_omega=args.b_omega,
        beta_prior_var=args.beta_prior_var,
    )


def _mcmc_from_args(args) -> McmcConfig:
    return McmcConfig(
        n_iter=args.n_iter,
        n_burnin=args.n_burnin,
        thin=args.thin,
        n_chains=args.chains,
    )


def cmd_fit(args) -> int:
    columns = _column_map(args)
    if args.harmonized is None and (args.exposure is None or args.outcome is None):
        raise UsageError("fit needs --harmonized or both --exposure and --outcome")
    if args.harmonized is not None and (args.exposure or args.outcome or args.screen):
        raise UsageError("--harmonized excludes --exposure/--outcome/--screen")
    if args.model == "corr2" and (args.panel is None or args.partition is None):
        raise UsageError("--model corr2 requires --panel and --partition")

    seed = _resolve_seed(args)
    workers = _resolve_workers(args)
    outputs = _Outputs(_resolve_outdir(args))
    try:
        dataset, report = _load_dataset(args, columns)
        hyper = _hyper_from_args(args)
        mcmc = _mcmc_from_args(args)
        if args.model == "corr":
            trace = fit_mr_corr(dataset, hyper, mcmc, seed=seed, workers=workers)
        else:
            panel = load_panel(args.panel).reindex(list(dataset.snp_ids))
            partition = load_partition(args.partition, list(dataset.snp_ids))
            corr = estimate_block_corr(panel, partition, args.shrink)
            trace = fit_mr_corr2(dataset, corr, hyper, mcmc, seed=seed, workers=workers)
        summary = summarize(trace, ci_level=args.ci_level)

        hyper_echo = vars(hyper).copy()
        if not np.isfinite(hyper_echo["beta_prior_var"]):
            hyper_echo["beta_prior_var"] = None  # flat prior
        payload = _metadata(seed)
        payload["summary"] = summary.to_dict()
        payload["config"] = {
            "model": args.model,
            "p_snps": dataset.n_snps,
            "shrink_lambda": args.shrink if args.model == "corr2" else None,
            "p_sel": args.p_sel if args.screen is not None else None,
            "hyper": hyper_echo,
            "mcmc": {
                "n_iter": mcmc.n_iter,
                "n_burnin": mcmc.n_burnin,
                "thin": mcmc.thin,
                "n_chains": mcmc.n_chains,
            },
        }
        _write_json(outputs.path("summary.json"), payload)
        dataset.to_tsv(outputs.path("harmonized.tsv"))
        if report is not None:
            write_harmonization_report(outputs.path("harmonization_report.tsv"), report)
        with open(outputs.path("snp_inclusion.tsv"), "wt") as fh:
            fh.write("snp_id\teta_mean\n")
            for sid, em in zip(dataset.snp_ids, trace.snp_inclusion):
                fh.write(f"{sid}\t{em:.17g}\n")
        if args.model == "corr2":
            with open(outputs.path("block_inclusion.tsv"), "wt") as fh:
                fh.write("block_index\teta_mean\n")
                for i, em in enumerate(trace.unit_inclusion, start=1):
                    fh.write(f"{i}\t{em:.17g}\n")
        if args.save_trace:
            trace.to_csv(outputs.path("trace.csv"))
    except BaseException:
        outputs.discard_all()
        raise
    return 0


def cmd_simulate(args) -> int:
    if args.replicates < 1:
        raise UsageError("--replicates must be a positive integer")
    config = ScenarioConfig.from_ini(args.config)
    overrides = {}
    if args.scenario is not None:
        overrides["scenario"] = args.scenario
    if args.seed is not None:
        overrides["seed"] = int(args.seed)
    if overrides:
        fields = {k: getattr(config, k) for k in config.__dataclass_fields__}
        fields.update(overrides)
        config = ScenarioConfig(**fields)
    workers = _resolve_workers(args)
    outputs = _Outputs(_resolve_outdir(args))
    try:
        mcmc = _mcmc_from_args(args)
        report = run_benchmark(
            config,
            args.replicates,
            method=args.method,
            alpha_level=args.alpha,
            mcmc=mcmc,
            hyper=_hyper_from_args(args),
            workers=workers,
            shrink_lambda=args.shrink,
        )
        hyper_echo = vars(_hyper_from_args(args)).copy()
        if not np.isfinite(hyper_echo["beta_prior_var"]):
            hyper_echo["beta_prior_var"] = None  # flat prior
        payload = _metadata(config.seed)
        payload["report"] = report.to_dict()
        payload["config"] = {
            "scenario": config.scenario,
            "method": args.method,
            "n_replicates": args.replicates,
            "hyper": hyper_echo,
            "scenario_config": {
                k: (list(v) if isinstance(v, tuple) else v)
                for k, v in ((f, getattr(config, f)) for f in config.__dataclass_fields__)
            },
        }
        _write_json(outputs.path("report.json"), payload)
        with open(outputs.path("replicates.tsv"), "wt") as fh:
            fh.write(
                "replicate\tstatus\tbeta0_mean\tbeta0_sd\tci_low\tci_high\tpvalue\tcovers_truth\n"
            )
            for i, s in enumerate(report.summaries, start=1):
                if s is None:
                    fh.write(f"{i}\tfailed\tNA\tNA\tNA\tNA\tNA\tNA\n")
                    continue
                pv = "NA" if s.beta0_pvalue is None else f"{s.beta0_pvalue:.17g}"
                fh.write(
                    f"{i}\tok\t{s.beta0_mean:.17g}\t{s.beta0_sd:.17g}"
                    f"\t{s.beta0_ci[0]:.17g}\t{s.beta0_ci[1]:.17g}\t{pv}"
                    f"\t{int(s.covers(config.beta0))}\n"
                )
    except BaseException:
        outputs.discard_all()
        raise
    return 0


def cmd_ld_estimate(args) -> int:
    outputs = _Outputs(_resolve_outdir(args))
    try:
        panel = load_panel(args.panel)
        partition = load_partition(args.partition, panel.snp_ids)
        corr = estimate_block_corr(panel, partition, args.shrink)
        corr.save_npz(outputs.path("ld_blocks.npz"))
        payload = _metadata(None)
        payload["config"] = {
            "n_blocks": partition.n_blocks,
            "p_snps": panel.n_snps,
            "n_individuals": panel.n_individuals,
            "shrink_lambda": args.shrink,
        }
        _write_json(outputs.path("ld.json"), payload)
    except BaseException:
        outputs.discard_all()
        raise
    return 0


def cmd_export_scatter(args) -> int:
    harmonized = os.path.join(args.fit_dir, "harmonized.tsv")
    inclusion = os.path.join(args.fit_dir, "snp_inclusion.tsv")
    summary_path = os.path.join(args.fit_dir, "summary.json")
    for path in (harmonized, inclusion, summary_path):
        if not os.path.exists(path):
            raise DataError(f"missing fit output: {path}")
    dataset = HarmonizedDataset.from_tsv(harmonized)
    eta_by_id = {}
    with open(inclusion) as fh:
        header = fh.readline()
        if header.rstrip("\n").split("\t") != ["snp_id", "eta_mean"]:
            raise DataError(f"unexpected header in {inclusion}")
        for line in fh:
            sid, val = line.rstrip("\n").split("\t")
            eta_by_id[sid] = float(val)
    missing = [sid for sid in dataset.snp_ids if sid not in eta_by_id]
    if missing:
        raise DataError(f"snp_inclusion.tsv lacks {len(missing)} fitted SNPs")
    with open(summary_path) as fh:
        summary = json.load(fh)["summary"]

    outputs = _Outputs(_resolve_outdir(args))
    try:
        with open(outputs.path("scatter.tsv"), "wt") as fh:
            fh.write("snp_id\tgamma_hat\ts_gamma\tGamma_hat\ts_Gamma\teta_mean\n")
            for i, sid in enumerate(dataset.snp_ids):
                # orient every SNP to a positive exposure association,
                # flipping the outcome jointly so the ratio is unchanged
                flip = -1.0 if dataset.gamma_hat[i] < 0.0 else 1.0
                fh.write(
                    f"{sid}\t{flip * dataset.gamma_hat[i]:.17g}\t{dataset.s_gamma[i]:.17g}"
                    f"\t{flip * dataset.Gamma_hat[i]:.17g}\t{dataset.s_Gamma[i]:.17g}"
                    f"\t{eta_by_id[sid]:.17g}\n"
                )
        lines = _metadata(None)
        lines["beta0_mean"] = summary["beta0_mean"]
        lines["beta1_mean"] = summary["beta1_mean"]
        _write_json(outputs.path("lines.json"), lines)
    except BaseException:
        outputs.discard_all()
        raise
    return 0


def cmd_harmonize(args) -> int:
    columns = _column_map(args)
    outputs = _Outputs(_resolve_outdir(args))
    try:
        exposure = _parse_study(args.exposure, columns)
        outcome = _parse_study(args.outcome, columns)
        dataset, report = harmonize(
            exposure.records, outcome.records, keep_palindromic=args.keep_palindromic
        )
        n_before_screen = dataset.n_snps
        if args.screen is not None:
            screening = _parse_study(args.screen, columns, need_pvalue=True)
            dataset = select_instruments(dataset, screening.records, args.p_sel)
        if dataset.n_snps == 0:
            raise DataError("no SNPs survived harmonization and screening")
        dataset.to_tsv(outputs.path("harmonized.tsv"))
        write_harmonization_report(outputs.path("harmonization_report.tsv"), report)
        payload = _metadata(None)
        payload["config"] = {
            "n_exposure_rows": len(exposure.records),
            "n_outcome_rows": len(outcome.records),
            "n_exposure_rejected": len(exposure.rejections),
            "n_outcome_rejected": len(outcome.rejections),
            "n_harmonized": n_before_screen,
            "n_selected": dataset.n_snps,
            "p_sel": args.p_sel if args.screen is not None else None,
        }
        _write_json(outputs.path("harmonize.json"), payload)
    except BaseException:
        outputs.discard_all()
        raise
    return 0


def _add_io_flags(sub, with_workers: bool = True) -> None:
    sub.add_argument("--out", default=None, help="output directory (default: . or MRCORR_OUTDIR)")
    if with_workers:
        sub.add_argument("--workers", type=int, default=None,
                         help="parallel workers (default: 1 or MRCORR_WORKERS)")


def _add_gwas_flags(sub) -> None:
    sub.add_argument("--exposure", help="exposure GWAS table (TSV)")
    sub.add_argument("--outcome", help="outcome GWAS table (TSV)")
    sub.add_argument("--screen", help="independent screening GWAS table for instrument selection")
    sub.add_argument("--p-sel", type=float, default=1.0,
                     help="screening p-value threshold (default 1.0: keep all)")
    sub.add_argument("--keep-palindromic", action="store_true",
                     help="keep strand-ambiguous SNPs instead of dropping them")
    sub.add_argument("--column", action="append", metavar="ROLE=NAME",
                     help="map a column role to a file column name (repeatable)")


def _add_mcmc_flags(sub) -> None:
    sub.add_argument("--n-iter", type=int, default=10000)
    sub.add_argument("--n-burnin", type=int, default=5000)
    sub.add_argument("--thin", type=int, default=1)
    sub.add_argument("--chains", type=int, default=1)
    sub.add_argument("--a-gamma", type=float, default=0.001)
    sub.add_argument("--b-gamma", type=float, default=0.001)
    sub.add_argument("--a-alpha", type=float, default=0.001)
    sub.add_argument("--b-alpha", type=float, default=0.001)
    sub.add_argument("--a-omega", type=float, default=1.0)
    sub.add_argument("--b-omega", type=float, default=1.0)
    sub.add_argument("--beta-prior-var", type=float, default=float("inf"),
                     help="Gaussian prior variance on the slopes (inf = flat)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrcorr",
        description="Two-sample Mendelian randomization with correlated-pleiotropy correction",
    )
    parser.add_argument("--version", action="version", version=f"mrcorr {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    fit = subs.add_parser("fit", help="fit a sampler to summary statistics")
    fit.add_argument("--model", choices=["corr", "corr2"], required=True)
    _add_gwas_flags(fit)
    fit.add_argument("--harmonized", help="previously harmonized dataset TSV (skips ingestion)")
    fit.add_argument("--panel", help="reference genotype panel TSV (corr2)")
    fit.add_argument("--partition", help="LD block partition TSV (corr2)")
    fit.add_argument("--shrink", type=float, default=0.1, help="LD shrinkage weight")
    fit.add_argument("--ci-level", type=float, default=0.95)
    fit.add_argument("--save-trace", action="store_true", help="also write trace.csv")
    fit.add_argument("--seed", type=int, default=None)
    _add_mcmc_flags(fit)
    _add_io_flags(fit)
    fit.set_defaults(func=cmd_fit)

    sim = subs.add_parser("simulate", help="run a replicate benchmark from a scenario config")
    sim.add_argument("--config", required=True, help="scenario INI file")
    sim.add_argument("--replicates", type=int, required=True)
    sim.add_argument("--method", choices=["mr_corr", "mr_corr2"], default="mr_corr2")
    sim.add_argument("--scenario", type=int, choices=[1, 2], default=None,
                     help="override the config's scenario")
    sim.add_argument("--alpha", type=float, default=0.05, help="rejection level")
    sim.add_argument("--shrink", type=float, default=0.1, help="LD shrinkage weight")
    sim.add_argument("--seed", type=int, default=None, help="override the config's seed")
    _add_mcmc_flags(sim)
    _add_io_flags(sim)
    sim.set_defaults(func=cmd_simulate)

    ld = subs.add_parser("ld-estimate", help="estimate block LD from a reference panel")
    ld.add_argument("--panel", required=True)
    ld.add_argument("--partition", required=True)
    ld.add_argument("--shrink", type=float, default=0.1)
    _add_io_flags(ld, with_workers=False)
    ld.set_defaults(func=cmd_ld_estimate, workers=None)

    scatter = subs.add_parser("export-scatter", help="export per-SNP scatter data from a fit")
    scatter.add_argument("--fit-dir", required=True, help="directory written by `mrcorr fit`")
    _add_io_flags(scatter, with_workers=False)
    scatter.set_defaults(func=cmd_export_scatter, workers=None)

    harm = subs.add_parser("harmonize", help="align two GWAS tables without fitting")
    harm.add_argument("--exposure", required=True)
    harm.add_argument("--outcome", required=True)
    harm.add_argument("--screen")
    harm.add_argument("--p-sel", type=float, default=1.0)
    harm.add_argument("--keep-palindromic", action="store_true")
    harm.add_argument("--column", action="append", metavar="ROLE=NAME")
    _add_io_flags(harm, with_workers=False)
    harm.set_defaults(func=cmd_harmonize, workers=None)

    return parser


def _fail(kind: str, exc: Exception) -> None:
    message = " ".join(str(exc).split())
    print(f"error[{kind}]: {message}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        _fail("usage", exc)
        return 2
    except (DataError, OSError) as exc:
        _fail("data", exc)
        return 3
    except NumericError as exc:
        _fail("numeric", exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
