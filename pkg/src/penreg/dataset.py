"""Descriptor table ingestion, centering/standardization, splits and folds.

Input format: delimited text, comma separator, optional header row, last
column is the response, UTF-8 with LF or CRLF line endings. All split and
fold assignments come from the documented xorshift64* generator in
``penreg._rng`` so they are reproducible across implementations.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._rng import RNG_DESCRIPTION, XorShift64Star
from .errors import DataError

MODE_CENTER = "center_only"
MODE_UNIT = "center_and_unit_norm"
_MODES = (MODE_CENTER, MODE_UNIT)


@dataclass
class DescriptorTable:
    """An n x p predictor matrix with its length-n response vector."""

    predictors: np.ndarray
    response: np.ndarray
    column_names: list[str] = field(default_factory=list)
    row_ids: list[str] = field(default_factory=list)
    response_name: str = "y"

    def __post_init__(self):
        self.predictors = np.ascontiguousarray(self.predictors, dtype=np.float64)
        self.response = np.ascontiguousarray(self.response, dtype=np.float64)
        if self.predictors.ndim != 2:
            raise DataError("predictors must be a 2-d matrix")
        n, p = self.predictors.shape
        if n < 2:
            raise DataError(f"need at least 2 observations, got {n}")
        if p < 1:
            raise DataError("need at least 1 predictor column")
        if self.response.shape != (n,):
            raise DataError("response length does not match predictor rows")
        if not np.isfinite(self.predictors).all() or not np.isfinite(self.response).all():
            raise DataError("non-finite entries are not allowed")
        if not self.column_names:
            self.column_names = [f"x{j + 1}" for j in range(p)]
        if not self.row_ids:
            self.row_ids = [f"r{i + 1}" for i in range(n)]
        if len(self.column_names) != p:
            raise DataError("column_names length does not match predictor columns")
        if len(self.row_ids) != n:
            raise DataError("row_ids length does not match observations")

    @property
    def n(self) -> int:
        return self.predictors.shape[0]

    @property
    def p(self) -> int:
        return self.predictors.shape[1]

    def subset(self, rows) -> "DescriptorTable":
        """Row-subset view copy (used for train/test and fold splits)."""
        rows = np.asarray(rows, dtype=np.intp)
        return DescriptorTable(
            predictors=self.predictors[rows],
            response=self.response[rows],
            column_names=list(self.column_names),
            row_ids=[self.row_ids[i] for i in rows],
            response_name=self.response_name,
        )


@dataclass
class Preprocessing:
    """Training-set column statistics for centering / unit-norm scaling."""

    column_means: np.ndarray
    column_scales: np.ndarray
    response_mean: float
    mode: str


@dataclass
class SplitPlan:
    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int


@dataclass
class FoldAssignment:
    fold_of: np.ndarray
    k: int
    seed: int


def _parse_cell(text: str, line_no: int, col_no: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"line {line_no}, column {col_no}: cannot parse {text!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise DataError(f"line {line_no}, column {col_no}: non-finite value {text!r}")
    return value


def load_table(source, has_header: bool = True) -> DescriptorTable:
    """Read a delimited table; the last column is the response.

    ``source`` may be a path or an open text/binary stream. Parse errors
    report the 1-based line and column of the offending cell.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return load_table(fh, has_header=has_header)
    if isinstance(source, (bytes, bytearray)):
        return load_table(io.StringIO(source.decode("utf-8")), has_header=has_header)
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")

    lines = raw.replace("\r\n", "\n").split("\n")
    rows: list[list[str]] = []
    line_nos: list[int] = []
    for i, line in enumerate(lines):
        if line.strip() == "":
            continue
        rows.append(line.split(","))
        line_nos.append(i + 1)
    if not rows:
        raise DataError("empty input")

    header: list[str] | None = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows, line_nos = rows[1:], line_nos[1:]

    if not rows:
        raise DataError("no data rows after header")
    width = len(rows[0])
    if width < 2:
        raise DataError(f"line {line_nos[0]}: need at least 2 columns "
                        "(predictors plus response)")
    data = np.empty((len(rows), width), dtype=np.float64)
    for i, (cells, line_no) in enumerate(zip(rows, line_nos)):
        if len(cells) != width:
            raise DataError(
                f"line {line_no}: ragged row ({len(cells)} cells, expected {width})"
            )
        for j, cell in enumerate(cells):
            data[i, j] = _parse_cell(cell.strip(), line_no, j + 1)

    if header is not None:
        if len(header) != width:
            raise DataError("header width does not match data rows")
        column_names, response_name = header[:-1], header[-1]
    else:
        column_names = [f"x{j + 1}" for j in range(width - 1)]
        response_name = "y"
    return DescriptorTable(
        predictors=data[:, :-1],
        response=data[:, -1],
        column_names=column_names,
        response_name=response_name,
    )


def fit_preprocessing(table: DescriptorTable, mode: str = MODE_CENTER) -> Preprocessing:
    """Column means/scales and the response mean of a fitting table.

    In unit-norm mode the scales are the Euclidean norms of the centered
    columns; an (effectively) constant column makes that scale zero and is
    rejected with its name.
    """
    if mode not in _MODES:
        raise DataError(f"unknown preprocessing mode {mode!r}")
    means = table.predictors.mean(axis=0)
    if mode == MODE_UNIT:
        centered = table.predictors - means
        scales = np.linalg.norm(centered, axis=0)
        floor = 1e-12 * np.maximum(1.0, np.abs(means) * math.sqrt(table.n))
        bad = np.nonzero(scales <= floor)[0]
        if bad.size:
            names = ", ".join(table.column_names[j] for j in bad[:5])
            raise DataError(f"constant column(s) cannot be unit-norm scaled: {names}")
    else:
        scales = np.ones(table.p)
    return Preprocessing(
        column_means=means,
        column_scales=scales,
        response_mean=float(table.response.mean()),
        mode=mode,
    )


def apply_preprocessing(table: DescriptorTable, prep: Preprocessing) -> DescriptorTable:
    """Transform a table with stored training statistics (held-out safe)."""
    if prep.column_means.shape[0] != table.p:
        raise DataError("preprocessing was fitted for a different column count")
    return DescriptorTable(
        predictors=(table.predictors - prep.column_means) / prep.column_scales,
        response=table.response - prep.response_mean,
        column_names=list(table.column_names),
        row_ids=list(table.row_ids),
        response_name=table.response_name,
    )


def invert_preprocessing(table: DescriptorTable, prep: Preprocessing) -> DescriptorTable:
    """Undo apply_preprocessing (round-trips within 1e-12 relative error)."""
    if prep.column_means.shape[0] != table.p:
        raise DataError("preprocessing was fitted for a different column count")
    return DescriptorTable(
        predictors=table.predictors * prep.column_scales + prep.column_means,
        response=table.response + prep.response_mean,
        column_names=list(table.column_names),
        row_ids=list(table.row_ids),
        response_name=table.response_name,
    )


def train_test_split(n: int, train_fraction: float, seed: int) -> SplitPlan:
    """Seeded uniformly-random split; train size is round(train_fraction * n)."""
    if not 0.0 < train_fraction < 1.0:
        raise DataError("train_fraction must lie in (0, 1)")
    size = int(math.floor(train_fraction * n + 0.5))
    if size < 1 or size > n - 1:
        raise DataError(
            f"train size {size} of n={n} leaves no data on one side of the split"
        )
    perm = XorShift64Star(seed).permutation(n)
    return SplitPlan(
        train_indices=np.array(perm[:size], dtype=np.intp),
        test_indices=np.array(perm[size:], dtype=np.intp),
        seed=seed,
    )


def kfold(n: int, k: int, seed: int) -> FoldAssignment:
    """Shuffled indices dealt round-robin into k folds (sizes differ by <= 1)."""
    if k < 2 or k > n:
        raise DataError(f"fold count k={k} must satisfy 2 <= k <= n={n}")
    perm = XorShift64Star(seed).permutation(n)
    fold_of = np.empty(n, dtype=np.intp)
    for i, idx in enumerate(perm):
        fold_of[idx] = i % k
    return FoldAssignment(fold_of=fold_of, k=k, seed=seed)


def write_split(plan: SplitPlan, path, row_ids=None) -> None:
    """Two-column export (row_id, train/test) with the RNG recorded in the header."""
    n = len(plan.train_indices) + len(plan.test_indices)
    ids = row_ids if row_ids is not None else [f"r{i + 1}" for i in range(n)]
    assignment = {}
    for i in plan.train_indices:
        assignment[int(i)] = "train"
    for i in plan.test_indices:
        assignment[int(i)] = "test"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# split seed={plan.seed} rng={RNG_DESCRIPTION}\n")
        fh.write("row_id,assignment\n")
        for i in range(n):
            fh.write(f"{ids[i]},{assignment[i]}\n")


def write_folds(folds: FoldAssignment, path, row_ids=None) -> None:
    """Two-column export (row_id, fold id)."""
    n = len(folds.fold_of)
    ids = row_ids if row_ids is not None else [f"r{i + 1}" for i in range(n)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# folds k={folds.k} seed={folds.seed} rng={RNG_DESCRIPTION}\n")
        fh.write("row_id,fold\n")
        for i in range(n):
            fh.write(f"{ids[i]},{int(folds.fold_of[i])}\n")


def write_table(table: DescriptorTable, path) -> None:
    """Emit the delimited format load_table reads (header row included)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(table.column_names + [table.response_name]) + "\n")
        for i in range(table.n):
            cells = [repr(float(v)) for v in table.predictors[i]]
            cells.append(repr(float(table.response[i])))
            fh.write(",".join(cells) + "\n")
