"""Loan table ingestion, cleaning, dummy encoding and train/test splitting."""

from __future__ import annotations

import csv
import io
import json
import statistics
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import (
    DataError,
    EmptyDatasetError,
    ParseError,
    SchemaError,
    UnresolvableColumnError,
)

COLUMN_KINDS = ("numeric", "categorical", "text", "date")
COLUMN_ROLES = ("feature", "target", "exposure_aux", "drop")

# Terminal loan outcomes. Everything else (Current, Late, In Grace Period, ...)
# is still in flight and carries no default label.
STATUS_MAP = {"Fully Paid": 0, "Charged Off": 1}

# Columns removed from the default spec before modeling.
DEFAULT_DROP_COLUMNS = ("emp_title", "emp_length", "grade", "issue_d", "title")

MISSING_POLICIES = ("drop_row", "fill_median_or_mode")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    role: str = "feature"

    def __post_init__(self):
        if self.kind not in COLUMN_KINDS:
            raise SchemaError(f"unknown column kind {self.kind!r} for {self.name!r}")
        if self.role not in COLUMN_ROLES:
            raise SchemaError(f"unknown column role {self.role!r} for {self.name!r}")


def validate_schema(specs) -> tuple[ColumnSpec, ...]:
    """Check uniqueness of names and that exactly one column is the target."""
    specs = tuple(specs)
    names = [s.name for s in specs]
    dupes = [n for n, c in Counter(names).items() if c > 1]
    if dupes:
        raise SchemaError(f"duplicate column names in spec: {dupes}")
    targets = [s.name for s in specs if s.role == "target"]
    if len(targets) != 1:
        raise SchemaError(f"spec must have exactly one target column, found {targets}")
    return specs


def default_column_specs() -> tuple[ColumnSpec, ...]:
    """Spec for the accepted-loans extract this pipeline is normally run on."""
    return validate_schema(
        [
            ColumnSpec("loan_amnt", "numeric", "feature"),
            ColumnSpec("term", "categorical", "feature"),
            ColumnSpec("int_rate", "numeric", "feature"),
            ColumnSpec("sub_grade", "categorical", "feature"),
            ColumnSpec("emp_title", "text", "drop"),
            ColumnSpec("emp_length", "categorical", "drop"),
            ColumnSpec("grade", "categorical", "drop"),
            ColumnSpec("issue_d", "date", "drop"),
            ColumnSpec("title", "text", "drop"),
            ColumnSpec("annual_inc", "numeric", "feature"),
            ColumnSpec("dti", "numeric", "feature"),
            ColumnSpec("open_acc", "numeric", "feature"),
            ColumnSpec("total_acc", "numeric", "feature"),
            ColumnSpec("purpose", "categorical", "feature"),
            ColumnSpec("fico", "numeric", "feature"),
            ColumnSpec("loan_status", "text", "target"),
            ColumnSpec("recoveries", "numeric", "exposure_aux"),
            ColumnSpec("total_rec_prncp", "numeric", "exposure_aux"),
        ]
    )


def load_column_specs(path) -> tuple[ColumnSpec, ...]:
    """Read a JSON array of {name, kind, role} objects."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise SchemaError(f"column spec file {path} must hold a JSON array")
    specs = []
    for i, entry in enumerate(raw):
        try:
            specs.append(ColumnSpec(entry["name"], entry["kind"], entry.get("role", "feature")))
        except (TypeError, KeyError) as exc:
            raise SchemaError(f"column spec entry {i} in {path} is malformed: {entry!r}") from exc
    return validate_schema(specs)


def dump_column_specs(specs, path) -> None:
    payload = [{"name": s.name, "kind": s.kind, "role": s.role} for s in specs]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class RawLoanTable:
    """Parsed loan rows. A cell is float, str, or None when missing."""

    schema: tuple[ColumnSpec, ...]
    rows: tuple[tuple, ...]
    status_map: dict | None = None

    def __post_init__(self):
        width = len(self.schema)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise SchemaError(f"row {i} has {len(row)} cells, schema has {width}")

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.schema)

    @property
    def target_name(self) -> str:
        return next(s.name for s in self.schema if s.role == "target")

    def index_of(self, name: str) -> int:
        for i, s in enumerate(self.schema):
            if s.name == name:
                return i
        raise SchemaError(f"unknown column {name!r}")

    def spec_for(self, name: str) -> ColumnSpec:
        return self.schema[self.index_of(name)]

    def column(self, name: str) -> list:
        j = self.index_of(name)
        return [row[j] for row in self.rows]

    def has_column(self, name: str) -> bool:
        return any(s.name == name for s in self.schema)


def _parse_cell(text: str, kind: str):
    """Parse one CSV cell per its column kind; unparseable numerics become missing."""
    value = text.strip()
    if value == "":
        return None
    if kind == "numeric":
        # Lending Club dumps write rates as "13.56%".
        candidate = value[:-1].strip() if value.endswith("%") else value
        try:
            return float(candidate)
        except ValueError:
            return None
    return value


def _open_text(source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8")), True
    data = getattr(source, "read", None)
    if data is None:
        raise TypeError(f"cannot read CSV from {type(source).__name__}")
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def load_csv(source, specs, allow_extra: bool = False) -> RawLoanTable:
    """Parse an RFC-4180 CSV with a header row into a RawLoanTable.

    The header must carry exactly the spec'd column names (any order). With
    allow_extra, header columns absent from the spec are appended to the
    schema as droppable text columns instead of raising.
    """
    specs = validate_schema(specs)
    fh, owned = _open_text(source)
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("CSV has no header row") from None
        except csv.Error as exc:
            raise ParseError(f"malformed CSV at line 1: {exc}") from exc

        dupes = [n for n, c in Counter(header).items() if c > 1]
        if dupes:
            raise SchemaError(f"duplicate header columns: {dupes}")
        by_name = {s.name: s for s in specs}
        missing = [s.name for s in specs if s.name not in header]
        if missing:
            raise SchemaError(f"spec columns absent from header: {missing}")
        extra = [h for h in header if h not in by_name]
        if extra and not allow_extra:
            raise SchemaError(f"header columns absent from spec: {extra}")

        schema = list(specs) + [ColumnSpec(h, "text", "drop") for h in extra]
        positions = [header.index(s.name) for s in schema]
        kinds = [s.kind for s in schema]

        rows = []
        try:
            for record in reader:
                if len(record) != len(header):
                    raise ParseError(
                        f"malformed CSV at line {reader.line_num}: "
                        f"expected {len(header)} fields, got {len(record)}"
                    )
                rows.append(
                    tuple(_parse_cell(record[p], k) for p, k in zip(positions, kinds))
                )
        except csv.Error as exc:
            raise ParseError(f"malformed CSV at line {reader.line_num}: {exc}") from exc
    finally:
        if owned:
            fh.close()
    return RawLoanTable(schema=tuple(schema), rows=tuple(rows))


def filter_terminal(table: RawLoanTable, status_map=None) -> RawLoanTable:
    """Keep only rows whose loan status is a terminal outcome (paid or charged off)."""
    mapping = dict(status_map or STATUS_MAP)
    j = table.index_of(table.target_name)
    kept = tuple(row for row in table.rows if row[j] in mapping)
    if not kept:
        raise EmptyDatasetError(
            f"no rows with a terminal loan status; expected one of {sorted(mapping)}"
        )
    return RawLoanTable(schema=table.schema, rows=kept, status_map=mapping)


def drop_columns(table: RawLoanTable, names=None) -> RawLoanTable:
    """Remove the named columns; default is every column with role 'drop'."""
    if names is None:
        names = [s.name for s in table.schema if s.role == "drop"]
    names = list(names)
    known = set(table.names)
    unknown = [n for n in names if n not in known]
    if unknown:
        raise SchemaError(f"cannot drop unknown columns: {unknown}")
    doomed = set(names)
    schema = tuple(s for s in table.schema if s.name not in doomed)
    if not any(s.role == "feature" for s in schema):
        raise SchemaError("dropping these columns would leave no feature columns")
    keep = [i for i, s in enumerate(table.schema) if s.name not in doomed]
    rows = tuple(tuple(row[i] for i in keep) for row in table.rows)
    return RawLoanTable(schema=schema, rows=rows, status_map=table.status_map)


def _fill_value(spec: ColumnSpec, cells):
    observed = [c for c in cells if c is not None]
    if not observed:
        raise UnresolvableColumnError(f"column {spec.name!r} has no observed values to fill from")
    if spec.kind == "numeric":
        return statistics.median(observed)
    counts = Counter(observed)
    top = max(counts.values())
    return min(v for v, c in counts.items() if c == top)


def handle_missing(table: RawLoanTable, policy: str = "fill_median_or_mode") -> RawLoanTable:
    """Produce a table with no missing cells.

    drop_row removes every row that has any missing cell. fill_median_or_mode
    substitutes the column median (numeric) or most frequent value (other
    kinds), computed over the non-missing cells.
    """
    if policy not in MISSING_POLICIES:
        raise DataError(f"unknown missing policy {policy!r}; expected one of {MISSING_POLICIES}")
    if table.row_count == 0:
        raise EmptyDatasetError("cannot handle missing values on an empty table")

    if policy == "drop_row":
        rows = tuple(row for row in table.rows if all(c is not None for c in row))
        if not rows:
            raise EmptyDatasetError("every row has at least one missing cell")
        return RawLoanTable(schema=table.schema, rows=rows, status_map=table.status_map)

    fills = {}
    for j, spec in enumerate(table.schema):
        cells = [row[j] for row in table.rows]
        if any(c is None for c in cells):
            fills[j] = _fill_value(spec, cells)
    if not fills:
        return table
    rows = tuple(
        tuple(fills[j] if cell is None else cell for j, cell in enumerate(row))
        for row in table.rows
    )
    return RawLoanTable(schema=table.schema, rows=rows, status_map=table.status_map)


@dataclass(frozen=True)
class EncodeReport:
    """What encoding did: constant columns it dropped and the dummy mapping."""

    dropped_constant: tuple[str, ...]
    dummies: dict
    numeric: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "dropped_constant": list(self.dropped_constant),
            "dummies": {
                name: {"baseline": m["baseline"], "columns": list(m["columns"])}
                for name, m in self.dummies.items()
            },
            "numeric": list(self.numeric),
        }


@dataclass(frozen=True)
class DesignMatrix:
    """Numeric feature matrix with a binary default target (1 = charged off)."""

    columns: tuple[str, ...]
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(np.asarray(self.x, dtype=np.float64))
        y = np.asarray(self.y, dtype=np.int64)
        if x.ndim != 2:
            raise DataError("design matrix must be 2-D")
        if x.shape[1] != len(self.columns):
            raise DataError(f"{x.shape[1]} matrix columns vs {len(self.columns)} names")
        if y.shape != (x.shape[0],):
            raise DataError("target length does not match row count")
        if not np.all(np.isfinite(x)):
            raise DataError("design matrix contains non-finite values")
        if y.size and not np.isin(y, (0, 1)).all():
            raise DataError("target vector must be binary")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n_rows(self) -> int:
        return self.x.shape[0]

    @property
    def n_cols(self) -> int:
        return self.x.shape[1]


def encode(table: RawLoanTable) -> tuple[DesignMatrix, EncodeReport]:
    """Turn a clean table into a numeric matrix.

    Numeric features pass through. Each discrete feature with k distinct
    values becomes k-1 indicator columns named "<col>=<value>"; the
    lexicographically first value is the dropped baseline. Single-valued
    columns are dropped and recorded in the report.
    """
    mapping = table.status_map or STATUS_MAP
    target = table.target_name
    j_target = table.index_of(target)

    y = []
    for i, row in enumerate(table.rows):
        status = row[j_target]
        if status not in mapping:
            raise DataError(
                f"row {i} has non-terminal status {status!r}; filter_terminal must run first"
            )
        y.append(mapping[status])

    col_arrays: list[np.ndarray] = []
    col_names: list[str] = []
    dropped: list[str] = []
    dummies: dict = {}
    numeric: list[str] = []

    for j, spec in enumerate(table.schema):
        if spec.role != "feature":
            continue
        cells = [row[j] for row in table.rows]
        if any(c is None for c in cells):
            raise DataError(f"column {spec.name!r} still has missing cells; clean before encoding")
        if spec.kind == "numeric":
            col_arrays.append(np.asarray(cells, dtype=np.float64))
            col_names.append(spec.name)
            numeric.append(spec.name)
            continue
        levels = sorted(set(cells))
        if len(levels) < 2:
            dropped.append(spec.name)
            continue
        baseline, rest = levels[0], levels[1:]
        names = [f"{spec.name}={v}" for v in rest]
        dummies[spec.name] = {"baseline": baseline, "columns": tuple(names)}
        for v, nm in zip(rest, names):
            col_arrays.append(np.asarray([1.0 if c == v else 0.0 for c in cells]))
            col_names.append(nm)

    n_rows = table.row_count
    x = (
        np.column_stack(col_arrays)
        if col_arrays
        else np.zeros((n_rows, 0), dtype=np.float64)
    )
    matrix = DesignMatrix(columns=tuple(col_names), x=x, y=np.asarray(y, dtype=np.int64))
    report = EncodeReport(
        dropped_constant=tuple(dropped), dummies=dummies, numeric=tuple(numeric)
    )
    return matrix, report


@dataclass(frozen=True)
class SplitPair:
    train: DesignMatrix
    test: DesignMatrix
    seed: int
    test_fraction: float
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]


def split(matrix: DesignMatrix, test_fraction: float, seed: int) -> SplitPair:
    """Seeded shuffle split. The permutation comes from numpy's PCG64 stream,
    so a given (seed, n_rows) pair always produces the same membership."""
    if not 0.0 < test_fraction < 1.0:
        raise DataError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = matrix.n_rows
    if n < 2:
        raise DataError("need at least 2 rows to split")
    n_test = int(round(test_fraction * n))
    n_test = min(max(n_test, 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    test_idx = perm[:n_test]
    train_idx = perm[n_test:]
    return SplitPair(
        train=DesignMatrix(matrix.columns, matrix.x[train_idx], matrix.y[train_idx]),
        test=DesignMatrix(matrix.columns, matrix.x[test_idx], matrix.y[test_idx]),
        seed=seed,
        test_fraction=test_fraction,
        train_indices=tuple(int(i) for i in train_idx),
        test_indices=tuple(int(i) for i in test_idx),
    )


class ClassBalance(NamedTuple):
    count0: int
    count1: int
    w0: float
    w1: float


def class_balance(y) -> ClassBalance:
    """Class counts and their proportions (weights sum to 1)."""
    y = np.asarray(y)
    if y.size == 0:
        raise DataError("cannot compute class balance of an empty target")
    count1 = int(np.count_nonzero(y == 1))
    count0 = int(y.size - count1)
    total = count0 + count1
    return ClassBalance(count0, count1, count0 / total, count1 / total)
