"""GWAS summary-statistic ingestion, allele harmonization, instrument selection.

Input tables are tab-separated with a header line.  Column names are mapped
onto roles by the caller, so files from different pipelines can be read
without renaming.  Harmonization aligns the outcome study to the exposure
study's effect alleles; all downstream model code consumes the resulting
:class:`HarmonizedDataset` and never touches alleles again.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

# roles a column map may assign; the first five are required
REQUIRED_ROLES = ("snp_id", "effect_allele", "other_allele", "beta", "se")
OPTIONAL_ROLES = ("chromosome", "position", "p_value", "sample_size")

# unordered allele pairs that are strand-ambiguous
PALINDROMIC_PAIRS = {frozenset(("A", "T")), frozenset(("C", "G"))}

MISSING_TOKENS = {"", "na", "nan", "null", "none", "."}

ACTION_KEPT = "kept"
ACTION_FLIPPED = "flipped"
ACTION_DROPPED_MISMATCH = "dropped_allele_mismatch"
ACTION_DROPPED_PALINDROMIC = "dropped_palindromic"
ACTION_DROPPED_NOT_SHARED = "dropped_not_shared"


@dataclass
class SnpRecord:
    """One SNP row from a GWAS summary table."""

    snp_id: str
    effect_allele: str
    other_allele: str
    beta: float
    se: float
    chromosome: int = 0
    position: int = 0
    p_value: float | None = None
    sample_size: int | None = None


@dataclass
class ParseResult:
    """Outcome of reading one summary table."""

    records: list[SnpRecord]
    n_rows: int
    rejections: list[tuple[int, str]] = field(default_factory=list)

    @property
    def n_rejected(self) -> int:
        return len(self.rejections)


def _is_missing(token: str) -> bool:
    return token.strip().lower() in MISSING_TOKENS


def _valid_allele(allele: str) -> bool:
    return len(allele) > 0 and all(ch in "ACGT" for ch in allele)


def parse_gwas_table(path, column_map: dict) -> ParseResult:
    """Read a tab-separated GWAS summary table.

    Parameters
    ----------
    path : str or Path
        File with a header line naming the columns.
    column_map : dict
        Maps roles (``snp_id``, ``effect_allele``, ``other_allele``,
        ``beta``, ``se``, optionally ``chromosome``, ``position``,
        ``p_value``, ``sample_size``) to column names in the file.

    Returns
    -------
    ParseResult
        Well-formed rows as records in file order, plus a list of
        (line number, reason) pairs for every rejected row.

    Raises
    ------
    DataError
        If a mapped column is absent from the header or a required role
        is not mapped.
    """
    for role in column_map:
        if role not in REQUIRED_ROLES and role not in OPTIONAL_ROLES:
            raise DataError(f"unknown column role: {role}")
    for role in REQUIRED_ROLES:
        if role not in column_map:
            raise DataError(f"column map missing required role: {role}")

    with open(path, "rt") as fh:
        header = fh.readline().rstrip("\n").rstrip("\r")
        if not header:
            raise DataError(f"{path}: empty file, no header line")
        columns = header.split("\t")
        col_index = {}
        for role, name in column_map.items():
            if name not in columns:
                raise DataError(f"{path}: mapped column not in header: {name}")
            col_index[role] = columns.index(name)

        records: list[SnpRecord] = []
        rejections: list[tuple[int, str]] = []
        seen_ids: set[str] = set()
        n_rows = 0
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            n_rows += 1
            fields = line.split("\t")
            if len(fields) < len(columns):
                rejections.append((line_no, "too few fields"))
                continue

            def get(role):
                return fields[col_index[role]].strip()

            snp_id = get("snp_id")
            if not snp_id or _is_missing(snp_id):
                rejections.append((line_no, "empty snp_id"))
                continue
            if snp_id in seen_ids:
                rejections.append((line_no, f"duplicate snp_id {snp_id}"))
                continue

            ea = get("effect_allele").upper()
            oa = get("other_allele").upper()
            if not _valid_allele(ea) or not _valid_allele(oa):
                rejections.append((line_no, f"invalid alleles for {snp_id}"))
                continue
            if ea == oa:
                rejections.append((line_no, f"identical alleles for {snp_id}"))
                continue

            try:
                beta = float(get("beta"))
                se = float(get("se"))
            except ValueError:
                rejections.append((line_no, f"non-numeric beta/se for {snp_id}"))
                continue
            if not np.isfinite(beta) or not np.isfinite(se) or se <= 0:
                rejections.append((line_no, f"invalid beta/se for {snp_id}"))
                continue

            chrom = 0
            if "chromosome" in col_index and not _is_missing(get("chromosome")):
                try:
                    chrom = int(float(get("chromosome")))
                except ValueError:
                    rejections.append((line_no, f"bad chromosome for {snp_id}"))
                    continue
            pos = 0
            if "position" in col_index and not _is_missing(get("position")):
                try:
                    pos = int(float(get("position")))
                except ValueError:
                    rejections.append((line_no, f"bad position for {snp_id}"))
                    continue

            p_value = None
            if "p_value" in col_index and not _is_missing(get("p_value")):
                try:
                    p_value = float(get("p_value"))
                except ValueError:
                    rejections.append((line_no, f"bad p_value for {snp_id}"))
                    continue
                if not (0.0 <= p_value <= 1.0):
                    rejections.append((line_no, f"p_value out of [0,1] for {snp_id}"))
                    continue

            sample_size = None
            if "sample_size" in col_index and not _is_missing(get("sample_size")):
                try:
                    sample_size = int(float(get("sample_size")))
                except ValueError:
                    rejections.append((line_no, f"bad sample_size for {snp_id}"))
                    continue
                if sample_size <= 0:
                    rejections.append((line_no, f"non-positive sample_size for {snp_id}"))
                    continue

            seen_ids.add(snp_id)
            records.append(
                SnpRecord(
                    snp_id=snp_id,
                    effect_allele=ea,
                    other_allele=oa,
                    beta=beta,
                    se=se,
                    chromosome=chrom,
                    position=pos,
                    p_value=p_value,
                    sample_size=sample_size,
                )
            )
    return ParseResult(records=records, n_rows=n_rows, rejections=rejections)


@dataclass
class HarmonizedDataset:
    """Aligned exposure/outcome summary statistics, one row per SNP.

    All arrays share the same length and order.  ``orientation_flips``
    marks SNPs whose outcome effect sign was flipped to match the exposure
    study's effect allele.
    """

    snp_ids: list[str]
    gamma_hat: np.ndarray
    s_gamma: np.ndarray
    Gamma_hat: np.ndarray
    s_Gamma: np.ndarray
    orientation_flips: np.ndarray

    def __post_init__(self):
        self.gamma_hat = np.asarray(self.gamma_hat, dtype=float)
        self.s_gamma = np.asarray(self.s_gamma, dtype=float)
        self.Gamma_hat = np.asarray(self.Gamma_hat, dtype=float)
        self.s_Gamma = np.asarray(self.s_Gamma, dtype=float)
        self.orientation_flips = np.asarray(self.orientation_flips, dtype=bool)
        self.snp_ids = list(self.snp_ids)
        n = len(self.snp_ids)
        for name in ("gamma_hat", "s_gamma", "Gamma_hat", "s_Gamma", "orientation_flips"):
            if getattr(self, name).shape != (n,):
                raise DataError(f"harmonized field {name} has wrong length")
        if len(set(self.snp_ids)) != n:
            raise DataError("duplicate snp_ids in harmonized dataset")
        for name in ("gamma_hat", "s_gamma", "Gamma_hat", "s_Gamma"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DataError(f"non-finite values in {name}")
        if n > 0 and (np.any(self.s_gamma <= 0) or np.any(self.s_Gamma <= 0)):
            raise DataError("standard errors must be positive")

    @property
    def n_snps(self) -> int:
        return len(self.snp_ids)

    def subset(self, indices) -> "HarmonizedDataset":
        """Restriction to the given row indices, order preserved."""
        idx = np.asarray(indices)
        return HarmonizedDataset(
            snp_ids=[self.snp_ids[i] for i in idx],
            gamma_hat=self.gamma_hat[idx],
            s_gamma=self.s_gamma[idx],
            Gamma_hat=self.Gamma_hat[idx],
            s_Gamma=self.s_Gamma[idx],
            orientation_flips=self.orientation_flips[idx],
        )

    def to_tsv(self, path) -> None:
        with open(path, "wt") as fh:
            fh.write("snp_id\tgamma_hat\ts_gamma\tGamma_hat\ts_Gamma\torientation_flip\n")
            for i, sid in enumerate(self.snp_ids):
                fh.write(
                    f"{sid}\t{self.gamma_hat[i]:.17g}\t{self.s_gamma[i]:.17g}"
                    f"\t{self.Gamma_hat[i]:.17g}\t{self.s_Gamma[i]:.17g}"
                    f"\t{int(self.orientation_flips[i])}\n"
                )

    @classmethod
    def from_tsv(cls, path) -> "HarmonizedDataset":
        ids, gh, sg, Gh, sG, fl = [], [], [], [], [], []
        with open(path, "rt") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            expected = ["snp_id", "gamma_hat", "s_gamma", "Gamma_hat", "s_Gamma"]
            if header[: len(expected)] != expected:
                raise DataError(f"{path}: not a harmonized dataset table")
            has_flip = len(header) > 5 and header[5] == "orientation_flip"
            for line_no, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) < 5:
                    raise DataError(f"{path}:{line_no}: too few fields")
                ids.append(fields[0])
                try:
                    gh.append(float(fields[1]))
                    sg.append(float(fields[2]))
                    Gh.append(float(fields[3]))
                    sG.append(float(fields[4]))
                except ValueError as exc:
                    raise DataError(f"{path}:{line_no}: non-numeric value") from exc
                fl.append(bool(int(fields[5])) if has_flip and len(fields) > 5 else False)
        return cls(
            snp_ids=ids,
            gamma_hat=np.array(gh),
            s_gamma=np.array(sg),
            Gamma_hat=np.array(Gh),
            s_Gamma=np.array(sG),
            orientation_flips=np.array(fl, dtype=bool),
        )


def _is_palindromic(ea: str, oa: str) -> bool:
    return frozenset((ea, oa)) in PALINDROMIC_PAIRS


def harmonize(
    exposure_records: list[SnpRecord],
    outcome_records: list[SnpRecord],
    keep_palindromic: bool = False,
) -> tuple[HarmonizedDataset, list[tuple[str, str]]]:
    """Align outcome effects to the exposure study's effect alleles.

    SNPs are matched by ``snp_id``.  Outcome rows whose allele pair is the
    reverse of the exposure pair have their beta sign flipped; pairs that
    do not match as a set are dropped.  Strand-ambiguous (A/T, C/G) SNPs
    are dropped unless ``keep_palindromic`` is set.

    Returns
    -------
    (HarmonizedDataset, report)
        ``report`` lists one (snp_id, action) pair for every SNP seen in
        either study, exposure order first.
    """
    outcome_by_id = {r.snp_id: r for r in outcome_records}
    exposure_ids = {r.snp_id for r in exposure_records}

    ids, gh, sg, Gh, sG, flips = [], [], [], [], [], []
    report: list[tuple[str, str]] = []
    for exp in exposure_records:
        out = outcome_by_id.get(exp.snp_id)
        if out is None:
            report.append((exp.snp_id, ACTION_DROPPED_NOT_SHARED))
            continue
        if not keep_palindromic and _is_palindromic(exp.effect_allele, exp.other_allele):
            report.append((exp.snp_id, ACTION_DROPPED_PALINDROMIC))
            continue
        if (out.effect_allele, out.other_allele) == (exp.effect_allele, exp.other_allele):
            action = ACTION_KEPT
            out_beta = out.beta
        elif (out.other_allele, out.effect_allele) == (exp.effect_allele, exp.other_allele):
            action = ACTION_FLIPPED
            out_beta = -out.beta
        else:
            report.append((exp.snp_id, ACTION_DROPPED_MISMATCH))
            continue
        ids.append(exp.snp_id)
        gh.append(exp.beta)
        sg.append(exp.se)
        Gh.append(out_beta)
        sG.append(out.se)
        flips.append(action == ACTION_FLIPPED)
        report.append((exp.snp_id, action))
    for out in outcome_records:
        if out.snp_id not in exposure_ids:
            report.append((out.snp_id, ACTION_DROPPED_NOT_SHARED))

    dataset = HarmonizedDataset(
        snp_ids=ids,
        gamma_hat=np.array(gh, dtype=float),
        s_gamma=np.array(sg, dtype=float),
        Gamma_hat=np.array(Gh, dtype=float),
        s_Gamma=np.array(sG, dtype=float),
        orientation_flips=np.array(flips, dtype=bool),
    )
    return dataset, report


def write_harmonization_report(path, report: list[tuple[str, str]]) -> None:
    with open(path, "wt") as fh:
        fh.write("snp_id\taction\n")
        for snp_id, action in report:
            fh.write(f"{snp_id}\t{action}\n")


def select_instruments(
    dataset: HarmonizedDataset,
    screening_records: list[SnpRecord],
    p_sel: float,
) -> HarmonizedDataset:
    """Restrict a dataset to SNPs passing the screening-study threshold.

    Selection uses p-values from an independent screening study only, so
    the exposure study's own p-values never drive instrument choice.  A
    SNP without a screening record (or without a p-value there) is not
    selected.  ``p_sel >= 1`` keeps the dataset unchanged.
    """
    if p_sel <= 0:
        raise DataError("p_sel must be positive")
    if p_sel >= 1.0:
        return dataset
    p_by_id = {
        r.snp_id: r.p_value for r in screening_records if r.p_value is not None
    }
    keep = [
        i
        for i, sid in enumerate(dataset.snp_ids)
        if sid in p_by_id and p_by_id[sid] < p_sel
    ]
    return dataset.subset(keep)
