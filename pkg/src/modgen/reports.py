"""File formats: report CSV, kernel CSV, and the MODMAT matrix container.

All numeric output is decimal text.  Report/kernel CSVs carry 30 significant
digits (plot-grade); MODMAT files carry enough digits for an exact binary
round trip at the stored precision, so a reloaded matrix is bit-identical to
the one that was written.
"""

from __future__ import annotations

import hashlib

from gmpy2 import mpfr

from .errors import ConfigError
from .linalg import SymMatrix
from .precision import PrecisionContext, to_decimal, roundtrip_digits
from .probes import SmearReport

REPORT_DIGITS = 30

# reference kind -> CSV column suffix
_COLUMN_SUFFIX = {"wedge": "wedge", "qd2": "qd", "pl2": "pl", "qd4": "qd"}


def _metadata_lines(metadata: dict):
    return [f"# {key} = {metadata[key]}" for key in metadata]


def report_to_csv(report: SmearReport) -> str:
    """Schema: mu,value,ref_*,err_* with per-scenario reference columns.

    An err_ cell is empty exactly where the reference is 0 (undefined ratio).
    """
    kinds = report.reference_names
    header = ["mu", "value"]
    header += [f"ref_{_COLUMN_SUFFIX[k]}" for k in kinds]
    header += [f"err_{_COLUMN_SUFFIX[k]}" for k in kinds]
    lines = _metadata_lines(report.metadata)
    lines.append(",".join(header))
    for row in report.rows:
        cells = [to_decimal(row.mu, REPORT_DIGITS), to_decimal(row.value, REPORT_DIGITS)]
        for k in kinds:
            cells.append(to_decimal(row.references[k], REPORT_DIGITS))
        for k in kinds:
            err = row.rel_errors.get(k)
            cells.append("" if err is None else to_decimal(err, REPORT_DIGITS))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def kernel_to_csv(matrix: SymMatrix, breakpoints, metadata: dict) -> str:
    """Heatmap input: i,j,x_i,y_j,value with x_i the cell centers."""
    with PrecisionContext(matrix.digits).activate():
        centers = [(breakpoints[i] + breakpoints[i + 1]) / 2
                   for i in range(matrix.dim)]
    lines = _metadata_lines(metadata)
    lines.append("i,j,x_i,y_j,value")
    for i in range(matrix.dim):
        ci = to_decimal(centers[i], REPORT_DIGITS)
        row = matrix.rows[i]
        for j in range(matrix.dim):
            lines.append(f"{i},{j},{ci},{to_decimal(centers[j], REPORT_DIGITS)},"
                         f"{to_decimal(row[j], REPORT_DIGITS)}")
    return "\n".join(lines) + "\n"


def matrix_to_modmat(matrix: SymMatrix, ctx: PrecisionContext, config_sha: str) -> str:
    """MODMAT 1 <dim> <digits> <sha>, then one row of entries per line."""
    nd = roundtrip_digits(ctx.bits)
    lines = [f"MODMAT 1 {matrix.dim} {ctx.digits} {config_sha}"]
    for row in matrix.rows:
        lines.append(" ".join(to_decimal(v, nd) for v in row))
    return "\n".join(lines) + "\n"


def modmat_to_matrix(text: str, ctx: PrecisionContext) -> SymMatrix:
    lines = text.strip().split("\n")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "MODMAT" or head[1] != "1":
        raise ConfigError("not a MODMAT 1 file")
    dim = int(head[2])
    digits = int(head[3])
    if digits != ctx.digits:
        raise ConfigError(f"matrix stored at {digits} digits, context has {ctx.digits}")
    if len(lines) != dim + 1:
        raise ConfigError(f"expected {dim} rows, found {len(lines) - 1}")
    with ctx.activate():
        rows = []
        for line in lines[1:]:
            row = [mpfr(tok) for tok in line.split()]
            if len(row) != dim:
                raise ConfigError("ragged MODMAT row")
            rows.append(row)
    return SymMatrix(rows, ctx.digits, symmetrize=False)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
