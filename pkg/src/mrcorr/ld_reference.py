"""Reference-panel LD estimation over contiguous SNP blocks.

Correlation is estimated per block from a (usually small) reference panel
and shrunk toward the identity, which keeps every block matrix positive
definite even when the panel is smaller than the block.  Partitions are
ordered half-open ranges that exactly cover the SNP list; cross-block
correlation is treated as zero by the samplers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass
class BlockPartition:
    """Ordered half-open [start, stop) column ranges covering 0..p."""

    bounds: list[tuple[int, int]]

    def __post_init__(self):
        self.bounds = [(int(a), int(b)) for a, b in self.bounds]
        if not self.bounds:
            raise DataError("empty partition")
        if self.bounds[0][0] != 0:
            raise DataError("partition must start at the first SNP")
        for (a, b), (c, _) in zip(self.bounds, self.bounds[1:]):
            if b != c:
                raise DataError("partition blocks must be contiguous and ordered")
        for a, b in self.bounds:
            if b <= a:
                raise DataError("empty partition block")

    @property
    def n_blocks(self) -> int:
        return len(self.bounds)

    @property
    def n_snps(self) -> int:
        return self.bounds[-1][1]

    @property
    def sizes(self) -> list[int]:
        return [b - a for a, b in self.bounds]

    def validate_for(self, p: int) -> None:
        if self.n_snps != p:
            raise DataError(f"partition covers {self.n_snps} SNPs, dataset has {p}")


def uniform_partition(p: int, block_size: int) -> BlockPartition:
    """Consecutive blocks of ``block_size`` SNPs; the last may be smaller."""
    if p <= 0 or block_size <= 0:
        raise DataError("p and block_size must be positive")
    bounds = [(start, min(start + block_size, p)) for start in range(0, p, block_size)]
    return BlockPartition(bounds)


def load_partition(path, snp_ids: list[str]) -> BlockPartition:
    """Read a partition table of (block_index, start_snp_id, end_snp_id).

    Ranges are inclusive in SNP ids and must tile ``snp_ids`` in order.
    """
    index_of = {sid: i for i, sid in enumerate(snp_ids)}
    rows = []
    with open(path, "rt") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:3] != ["block_index", "start_snp_id", "end_snp_id"]:
            raise DataError(f"{path}: not a partition table")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) < 3:
                raise DataError(f"{path}:{line_no}: too few fields")
            try:
                block_index = int(fields[0])
            except ValueError as exc:
                raise DataError(f"{path}:{line_no}: bad block_index") from exc
            for sid in fields[1:3]:
                if sid not in index_of:
                    raise DataError(f"{path}:{line_no}: unknown snp_id {sid}")
            rows.append((block_index, index_of[fields[1]], index_of[fields[2]]))
    rows.sort(key=lambda r: r[0])
    bounds = [(start, stop + 1) for _, start, stop in rows]
    partition = BlockPartition(bounds)
    partition.validate_for(len(snp_ids))
    return partition


def write_partition(path, partition: BlockPartition, snp_ids: list[str]) -> None:
    with open(path, "wt") as fh:
        fh.write("block_index\tstart_snp_id\tend_snp_id\n")
        for i, (a, b) in enumerate(partition.bounds, start=1):
            fh.write(f"{i}\t{snp_ids[a]}\t{snp_ids[b - 1]}\n")


@dataclass
class GenotypePanel:
    """Reference genotype dosages, individuals by SNPs."""

    matrix: np.ndarray
    snp_ids: list[str]

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.snp_ids = list(self.snp_ids)
        if self.matrix.ndim != 2:
            raise DataError("panel matrix must be 2-D")
        if self.matrix.shape[1] != len(self.snp_ids):
            raise DataError("panel snp_ids do not match matrix columns")
        if self.matrix.shape[0] < 2:
            raise DataError("panel needs at least 2 individuals")
        if not np.all(np.isfinite(self.matrix)):
            raise DataError("non-finite dosages in panel")
        if self.matrix.min() < 0.0 or self.matrix.max() > 2.0:
            raise DataError("dosages must lie in [0, 2]")

    @property
    def n_individuals(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_snps(self) -> int:
        return self.matrix.shape[1]

    def reindex(self, snp_ids: list[str]) -> "GenotypePanel":
        """Column subset/reorder matching the given SNP ids."""
        index_of = {sid: i for i, sid in enumerate(self.snp_ids)}
        missing = [sid for sid in snp_ids if sid not in index_of]
        if missing:
            raise DataError(f"panel missing {len(missing)} SNPs, first: {missing[0]}")
        cols = [index_of[sid] for sid in snp_ids]
        return GenotypePanel(self.matrix[:, cols], list(snp_ids))


def load_panel(path, sidecar=None) -> GenotypePanel:
    """Read a panel from TSV (header of snp_ids) or .npy plus an id list."""
    path = str(path)
    if path.endswith(".npy"):
        if sidecar is None:
            raise DataError("binary panel requires a sidecar snp_id list")
        matrix = np.load(path)
        with open(sidecar, "rt") as fh:
            snp_ids = [line.strip() for line in fh if line.strip()]
        return GenotypePanel(matrix, snp_ids)
    with open(path, "rt") as fh:
        header = fh.readline().rstrip("\n")
        if not header:
            raise DataError(f"{path}: empty panel file")
        snp_ids = header.split("\t")
        try:
            matrix = np.loadtxt(fh, delimiter="\t", ndmin=2)
        except ValueError as exc:
            raise DataError(f"{path}: malformed panel matrix") from exc
    return GenotypePanel(matrix, snp_ids)


def save_panel_tsv(path, panel: GenotypePanel) -> None:
    with open(path, "wt") as fh:
        fh.write("\t".join(panel.snp_ids) + "\n")
        np.savetxt(fh, panel.matrix, fmt="%.17g", delimiter="\t")


@dataclass
class BlockCorr:
    """Shrunk per-block LD correlation matrices."""

    matrices: list[np.ndarray]
    partition: BlockPartition
    shrink_lambda: float
    snp_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.matrices) != self.partition.n_blocks:
            raise DataError("one correlation matrix required per block")
        for i, (mat, size) in enumerate(zip(self.matrices, self.partition.sizes)):
            mat = np.asarray(mat, dtype=float)
            self.matrices[i] = mat
            if mat.shape != (size, size):
                raise DataError(f"block {i}: matrix shape {mat.shape} != block size {size}")
            if np.max(np.abs(mat - mat.T)) > 1e-12:
                raise DataError(f"block {i}: correlation matrix not symmetric")
            if np.max(np.abs(np.diag(mat) - 1.0)) > 1e-12:
                raise DataError(f"block {i}: diagonal not unit")

    def save_npz(self, path) -> None:
        payload = {
            "bounds": np.array(self.partition.bounds, dtype=np.int64),
            "shrink_lambda": np.array(self.shrink_lambda),
            "snp_ids": np.array(self.snp_ids, dtype=object),
        }
        for i, mat in enumerate(self.matrices):
            payload[f"block_{i}"] = mat
        np.savez(path, **payload)

    @classmethod
    def load_npz(cls, path) -> "BlockCorr":
        with np.load(path, allow_pickle=True) as data:
            partition = BlockPartition([tuple(row) for row in data["bounds"]])
            matrices = [data[f"block_{i}"] for i in range(partition.n_blocks)]
            snp_ids = [str(s) for s in data["snp_ids"]]
            lam = float(data["shrink_lambda"])
        return cls(matrices, partition, lam, snp_ids)


def identity_block_corr(p: int, block_size: int = 1) -> BlockCorr:
    """Identity LD for models that assume independent SNPs."""
    partition = uniform_partition(p, block_size)
    return BlockCorr([np.eye(s) for s in partition.sizes], partition, 0.0)


def estimate_block_corr(
    panel: GenotypePanel,
    partition: BlockPartition,
    shrink_lambda: float = 0.1,
) -> BlockCorr:
    """Per-block Pearson correlation shrunk toward the identity.

    Each block estimate is ``(1 - lambda) * R_sample + lambda * I`` after
    centering and scaling columns by their sample standard deviation.  A
    constant column makes correlation undefined and is an error.
    """
    if not (0.0 <= shrink_lambda <= 1.0):
        raise DataError("shrink_lambda must lie in [0, 1]")
    partition.validate_for(panel.n_snps)
    X = panel.matrix
    Xc = X - X.mean(axis=0)
    norms = np.sqrt(np.sum(Xc * Xc, axis=0))
    if np.any(norms == 0.0):
        sid = panel.snp_ids[int(np.argmax(norms == 0.0))]
        raise DataError(f"constant dosage column for SNP {sid}")
    Z = Xc / norms
    matrices = []
    for bi, (a, b) in enumerate(partition.bounds):
        Zb = Z[:, a:b]
        R = Zb.T @ Zb
        R = 0.5 * (R + R.T)
        np.fill_diagonal(R, 1.0)
        R = (1.0 - shrink_lambda) * R + shrink_lambda * np.eye(b - a)
        try:
            np.linalg.cholesky(R)
        except np.linalg.LinAlgError as exc:
            raise DataError(
                f"block {bi}: correlation not positive definite; "
                "increase shrink_lambda"
            ) from exc
        matrices.append(R)
    return BlockCorr(matrices, partition, shrink_lambda, list(panel.snp_ids))
