"""Dataset container, CSV I/O, synthetic generators and preprocessing."""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

FAMILIES = ("gaussian", "binomial", "poisson", "gamma")

BINOMIAL_TRIALS = 100
GAMMA_SHAPE = 15.0
DEFAULT_NOISE_SCALE = 0.5


class DataError(ValueError):
    """Raised for malformed or out-of-domain input data."""


@dataclass
class DataMatrix:
    """An n x m block of observations with optional ground-truth labels."""

    values: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = ""
    columns: Optional[list[str]] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DataError(f"data must be a non-empty 2-D matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("data contains non-finite values")
        self.values = values
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (values.shape[0],):
                raise DataError(
                    f"labels have length {labels.shape}, expected {values.shape[0]}"
                )
            if not np.issubdtype(labels.dtype, np.integer):
                if not np.all(labels == np.round(labels)):
                    raise DataError("labels must be integers")
                labels = labels.astype(np.int64)
            if np.any(labels < 0):
                raise DataError("labels must be nonnegative")
            self.labels = labels
        if self.columns is None:
            self.columns = [f"x{j}" for j in range(values.shape[1])]
        elif len(self.columns) != values.shape[1]:
            raise DataError("column names do not match the data width")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def with_values(self, values: np.ndarray) -> "DataMatrix":
        """Copy carrying labels and name through, with new coordinates."""
        columns = self.columns if np.shape(values)[-1] == self.m else None
        return replace(self, values=np.array(values, dtype=float), columns=columns)


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    centers: Sequence[Sequence[float]]
    samples_per_center: int = 99
    noise_scale: float = DEFAULT_NOISE_SCALE
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DataError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if len(self.centers) == 0:
            raise DataError("at least one center is required")
        if self.samples_per_center < 1:
            raise DataError("samples_per_center must be >= 1")
        if self.noise_scale < 0:
            raise DataError("noise_scale must be nonnegative")
        widths = {len(c) for c in self.centers}
        if len(widths) != 1:
            raise DataError("all centers must have the same dimension")
        centers = np.asarray(self.centers, dtype=float)
        if self.family != "gaussian" and np.any(centers <= 0):
            raise DataError(f"{self.family} centers must be strictly positive")
        if self.family == "binomial" and np.any(centers >= BINOMIAL_TRIALS):
            raise DataError(
                f"binomial centers must be below the trial count {BINOMIAL_TRIALS}"
            )


@dataclass(frozen=True)
class PreprocessSpec:
    kind: str
    target_dims: Optional[int] = None
    range: tuple[float, float] = field(default=(0.0, 1.0))

    def __post_init__(self):
        if self.kind not in ("standardize", "normalize", "pca"):
            raise DataError(f"unknown preprocessing kind {self.kind!r}")
        if self.range[0] >= self.range[1]:
            raise DataError("normalize range must satisfy lower < upper")
        if self.kind == "pca" and (self.target_dims is None or self.target_dims < 1):
            raise DataError("pca needs target_dims >= 1")


# --------------------------------------------------------------------------- I/O


def load_csv(path, label_column: Optional[str] = None) -> DataMatrix:
    """Read a headed, comma-separated numeric table.

    Parameters
    ----------
    path : path-like
        CSV file whose first row is a header.
    label_column : str, optional
        Name of the column holding integer ground-truth labels.

    Returns
    -------
    DataMatrix
        Feature columns in file order; labels extracted iff ``label_column``.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = [r for r in reader if r and any(c.strip() for c in r)]

    label_idx = None
    if label_column is not None:
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header")
        label_idx = header.index(label_column)
    feature_idx = [j for j in range(len(header)) if j != label_idx]
    if not rows:
        raise DataError(f"{path}: no data rows")

    values = np.empty((len(rows), len(feature_idx)))
    labels = np.empty(len(rows), dtype=np.int64) if label_idx is not None else None
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != len(header):
            raise DataError(
                f"{path}: row {line} has {len(row)} fields, header has {len(header)}"
            )
        for out_j, j in enumerate(feature_idx):
            values[i, out_j] = _parse_cell(row[j], path, line, header[j])
        if label_idx is not None:
            raw = _parse_cell(row[label_idx], path, line, header[label_idx])
            if raw != int(raw) or raw < 0:
                raise DataError(
                    f"{path}: row {line}, column {header[label_idx]!r}: "
                    f"label {row[label_idx]!r} is not a nonnegative integer"
                )
            labels[i] = int(raw)
    return DataMatrix(
        values, labels, name=path.stem, columns=[header[j] for j in feature_idx]
    )


def _parse_cell(cell: str, path, line: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(
            f"{path}: row {line}, column {column!r}: cannot parse {cell!r} as a number"
        ) from None
    if not np.isfinite(value):
        raise DataError(f"{path}: row {line}, column {column!r}: non-finite value")
    return value


def write_csv(data: DataMatrix, path, label_column: str = "label") -> Path:
    """Write ``data`` so that :func:`load_csv` reads it back exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = list(data.columns)
        if data.labels is not None:
            header.append(label_column)
        writer.writerow(header)
        for i in range(data.n):
            row = [repr(float(v)) for v in data.values[i]]
            if data.labels is not None:
                row.append(str(int(data.labels[i])))
            writer.writerow(row)
    return path


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def data_sha256(data: DataMatrix) -> str:
    h = hashlib.sha256(np.ascontiguousarray(data.values).tobytes())
    if data.labels is not None:
        h.update(np.ascontiguousarray(data.labels, dtype=np.int64).tobytes())
    return h.hexdigest()


# --------------------------------------------------------------------- generators


def generate(spec: GeneratorSpec) -> DataMatrix:
    """Sample ``samples_per_center`` points around every center.

    Each cluster's population mean equals its center. Gaussian clusters have
    per-coordinate sd ``noise_scale``; Poisson uses rate ``c``; gamma uses
    shape ``GAMMA_SHAPE`` and scale ``c / GAMMA_SHAPE``; binomial uses
    ``BINOMIAL_TRIALS`` trials with success probability ``c / BINOMIAL_TRIALS``.
    """
    rng = np.random.default_rng(spec.seed)
    centers = np.asarray(spec.centers, dtype=float)
    n_per = spec.samples_per_center
    means = np.repeat(centers, n_per, axis=0)
    if spec.family == "gaussian":
        values = means + rng.normal(0.0, spec.noise_scale, size=means.shape)
    elif spec.family == "poisson":
        values = rng.poisson(means).astype(float)
    elif spec.family == "gamma":
        values = rng.gamma(GAMMA_SHAPE, means / GAMMA_SHAPE)
    else:
        values = rng.binomial(BINOMIAL_TRIALS, means / BINOMIAL_TRIALS).astype(float)
    labels = np.repeat(np.arange(len(centers)), n_per)
    return DataMatrix(values, labels, name=f"{spec.family}-sim")


def shift_positive(data: DataMatrix) -> tuple[DataMatrix, np.ndarray]:
    """Shift columns by ``1 - min`` wherever a coordinate is <= 0.

    Returns the shifted data and the per-column offsets that were added.
    """
    col_min = data.values.min(axis=0)
    offsets = np.where(col_min <= 0, 1.0 - col_min, 0.0)
    if not np.any(offsets):
        return data, offsets
    return data.with_values(data.values + offsets), offsets


# ------------------------------------------------------------------ preprocessing


def preprocess(data: DataMatrix, spec: PreprocessSpec) -> DataMatrix:
    X = data.values
    if spec.kind == "standardize":
        mean = X.mean(axis=0)
        sd = X.std(axis=0, ddof=1) if data.n > 1 else np.zeros(data.m)
        out = np.zeros_like(X)
        ok = sd > 0
        out[:, ok] = (X[:, ok] - mean[ok]) / sd[ok]
        return data.with_values(out)
    if spec.kind == "normalize":
        lo, hi = spec.range
        cmin, cmax = X.min(axis=0), X.max(axis=0)
        span = cmax - cmin
        out = np.full_like(X, lo)
        ok = span > 0
        out[:, ok] = lo + (X[:, ok] - cmin[ok]) / span[ok] * (hi - lo)
        return data.with_values(out)
    return pca(data, spec.target_dims)[0]


def pca(data: DataMatrix, target_dims: int) -> tuple[DataMatrix, np.ndarray]:
    """Project onto the leading covariance eigenvectors.

    Returns the projected data and the full eigenvalue spectrum in
    decreasing order.
    """
    if target_dims > data.m:
        raise DataError(f"pca target_dims={target_dims} exceeds data width {data.m}")
    if data.n < 2:
        raise DataError("pca needs at least two rows")
    X = data.values
    centered = X - X.mean(axis=0)
    cov = centered.T @ centered / (data.n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    comps = eigvecs[:, :target_dims]
    # sign convention: largest-magnitude loading positive
    pivot = np.argmax(np.abs(comps), axis=0)
    signs = np.sign(comps[pivot, np.arange(target_dims)])
    signs[signs == 0] = 1.0
    comps = comps * signs
    projected = DataMatrix(
        centered @ comps,
        data.labels,
        name=data.name,
        columns=[f"pc{j + 1}" for j in range(target_dims)],
    )
    return projected, np.clip(eigvals, 0.0, None)
