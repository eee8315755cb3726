"""Dataset ingestion, sparse column-major storage, synthetic generation.

Examples are stored as the *columns* of a d x n matrix in compressed
sparse column layout, one column per training example, which matches the
per-coordinate access pattern of the dual solvers: the hot loop reads one
column's (indices, values) pair and nothing else.
"""

from __future__ import annotations

import gzip
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LabelError, ParseError


@dataclass(frozen=True, eq=False)
class SparseColMatrix:
    """d x n matrix in CSC layout: column j holds values[indptr[j]:indptr[j+1]].

    Row indices are strictly increasing within each column; stored values
    are finite and nonzero.
    """

    d: int
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    values: np.ndarray
    col_ids: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        if indptr.shape != (self.n + 1,) or indptr[0] != 0 or indptr[-1] != indices.size:
            raise ValueError("malformed indptr")
        if np.any(np.diff(indptr) < 0):
            raise ValueError("indptr must be non-decreasing")
        if indices.size != values.size:
            raise ValueError("indices and values length mismatch")
        col_ids = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(indptr))
        if indices.size:
            if indices.min() < 0 or indices.max() >= self.d:
                raise ValueError("row index out of range")
            if indices.size > 1:
                same_col = col_ids[1:] == col_ids[:-1]
                if np.any(same_col & (np.diff(indices) <= 0)):
                    raise ValueError("row indices must be strictly increasing per column")
            if not np.all(np.isfinite(values)) or np.any(values == 0.0):
                raise ValueError("stored values must be finite and nonzero")
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "col_ids", col_ids)

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def col(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """(row indices, values) views of column j."""
        lo, hi = self.indptr[j], self.indptr[j + 1]
        return self.indices[lo:hi], self.values[lo:hi]

    def col_norms_sq(self) -> np.ndarray:
        out = np.zeros(self.n)
        if self.nnz:
            np.add.at(out, self.col_ids, self.values ** 2)
        return out

    def dot(self, x: np.ndarray) -> np.ndarray:
        """A @ x for a length-n vector x; returns a length-d vector."""
        if self.nnz == 0:
            return np.zeros(self.d)
        return np.bincount(self.indices, weights=self.values * x[self.col_ids],
                           minlength=self.d)

    def tdot(self, w: np.ndarray) -> np.ndarray:
        """A.T @ w for a length-d vector w; returns the n column dots."""
        if self.nnz == 0:
            return np.zeros(self.n)
        return np.bincount(self.col_ids, weights=self.values * w[self.indices],
                           minlength=self.n)

    def scale_columns(self, factors: np.ndarray) -> "SparseColMatrix":
        """New matrix with column j multiplied by factors[j] (all nonzero)."""
        factors = np.asarray(factors, dtype=float)
        if factors.shape != (self.n,):
            raise ValueError("need one factor per column")
        if np.any(factors == 0.0) or not np.all(np.isfinite(factors)):
            raise ValueError("column factors must be finite and nonzero")
        return SparseColMatrix(d=self.d, n=self.n, indptr=self.indptr.copy(),
                               indices=self.indices.copy(),
                               values=self.values * factors[self.col_ids])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.d, self.n))
        out[self.indices, self.col_ids] = self.values
        return out

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SparseColMatrix":
        dense = np.asarray(dense, dtype=float)
        d, n = dense.shape
        indptr = [0]
        indices, values = [], []
        for j in range(n):
            rows = np.flatnonzero(dense[:, j])
            indices.append(rows)
            values.append(dense[rows, j])
            indptr.append(indptr[-1] + rows.size)
        return cls(d=d, n=n, indptr=np.asarray(indptr, dtype=np.int64),
                   indices=np.concatenate(indices) if n else np.empty(0, np.int64),
                   values=np.concatenate(values) if n else np.empty(0, float))


@dataclass(frozen=True)
class DatasetMeta:
    """Descriptive statistics of a loaded dataset."""

    name: str
    n: int
    d: int
    sparsity: float

    @classmethod
    def from_matrix(cls, name: str, A: SparseColMatrix) -> "DatasetMeta":
        cells = A.n * A.d
        sparsity = A.nnz / cells if cells else 0.0
        return cls(name=name, n=A.n, d=A.d, sparsity=sparsity)


def _open_maybe_gzip(source):
    if hasattr(source, "read"):
        return source, False
    path = Path(source)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="ascii"), True
    return open(path, "r", encoding="ascii"), True


def parse_libsvm(source, n_features: int | None = None
                 ) -> tuple[SparseColMatrix, np.ndarray]:
    """Parse LIBSVM text: one example per line, ``label idx:val idx:val ...``.

    Feature indices are 1-based on disk and strictly increasing within a
    line (duplicates rejected); labels must be +1 or -1.  Examples become
    the columns of the returned matrix.  Explicitly stored zero values are
    dropped.  ``source`` is a path (``.gz`` accepted) or a text stream.
    """
    stream, owned = _open_maybe_gzip(source)
    labels: list[float] = []
    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    max_index = 0
    try:
        for line_no, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line:
                raise ParseError(line_no, "blank line")
            tokens = line.split()
            try:
                label = float(tokens[0])
            except ValueError:
                raise ParseError(line_no, f"bad label token {tokens[0]!r}") from None
            if label not in (1.0, -1.0):
                raise LabelError(line_no, f"label must be +1 or -1, got {tokens[0]}")
            labels.append(label)
            prev = 0
            for tok in tokens[1:]:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise ParseError(line_no, f"feature token {tok!r} lacks ':'")
                try:
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise ParseError(line_no, f"bad feature token {tok!r}") from None
                if idx < 1:
                    raise ParseError(line_no, f"feature index {idx} must be >= 1")
                if n_features is not None and idx > n_features:
                    raise ParseError(line_no,
                                     f"feature index {idx} exceeds n_features={n_features}")
                if idx == prev:
                    raise ParseError(line_no, f"duplicate feature index {idx}")
                if idx < prev:
                    raise ParseError(line_no, f"feature indices out of order at {idx}")
                if not math.isfinite(val):
                    raise ParseError(line_no, f"non-finite value in token {tok!r}")
                prev = idx
                if val != 0.0:
                    indices.append(idx - 1)
                    values.append(val)
                max_index = max(max_index, idx)
            indptr.append(len(indices))
    finally:
        if owned:
            stream.close()

    d = max_index if n_features is None else int(n_features)
    A = SparseColMatrix(d=d, n=len(labels),
                        indptr=np.asarray(indptr, dtype=np.int64),
                        indices=np.asarray(indices, dtype=np.int64),
                        values=np.asarray(values, dtype=float))
    return A, np.asarray(labels, dtype=float)


def write_libsvm(A: SparseColMatrix, labels: np.ndarray, target) -> None:
    """Inverse of :func:`parse_libsvm`; values written with round-trip repr."""
    if len(labels) != A.n:
        raise ValueError("one label per column required")
    stream, owned = (target, False) if hasattr(target, "write") else (
        open(target, "w", encoding="ascii"), True)
    try:
        for j in range(A.n):
            rows, vals = A.col(j)
            parts = ["+1" if labels[j] > 0 else "-1"]
            parts.extend(f"{int(r) + 1}:{float(v)!r}" for r, v in zip(rows, vals))
            stream.write(" ".join(parts) + "\n")
    finally:
        if owned:
            stream.close()


def synth_binary(n: int, d: int, sparsity: float, condition: float = 1.0,
                 seed: int = 0, normalize: bool = True, noise: float = 0.0,
                 min_nnz: int = 0) -> tuple[SparseColMatrix, np.ndarray]:
    """Reproducible sparse Gaussian columns with planted-hyperplane labels.

    Each column draws Binomial(d, sparsity) nonzero rows (at least
    ``min_nnz``) with standard normal values; ``condition > 1`` scales the
    rows geometrically from 1 down to 1/condition to worsen the data
    conditioning.  With ``normalize`` every nonzero column has unit
    Euclidean norm, so the column-norm bound R is exactly 1.  Labels are
    ``sign(column . w_true + noise * eps)`` for a hidden Gaussian w_true.
    """
    if not (0.0 < sparsity <= 1.0):
        raise ValueError(f"sparsity must lie in (0, 1], got {sparsity}")
    if condition < 1.0:
        raise ValueError("condition knob must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    row_scale = (np.geomspace(1.0, 1.0 / condition, d)
                 if condition > 1.0 else np.ones(d))
    indptr = [0]
    indices: list[np.ndarray] = []
    values: list[np.ndarray] = []
    for _ in range(n):
        k = int(rng.binomial(d, sparsity))
        k = max(k, min(min_nnz, d))
        if k == 0:
            indptr.append(indptr[-1])
            continue
        rows = np.sort(rng.choice(d, size=k, replace=False))
        vals = rng.standard_normal(k) * row_scale[rows]
        vals[vals == 0.0] = 1e-12  # standard_normal never returns 0 in practice
        if normalize:
            vals = vals / np.linalg.norm(vals)
        indices.append(rows)
        values.append(vals)
        indptr.append(indptr[-1] + k)
    A = SparseColMatrix(
        d=d, n=n, indptr=np.asarray(indptr, dtype=np.int64),
        indices=np.concatenate(indices) if indices else np.empty(0, np.int64),
        values=np.concatenate(values) if values else np.empty(0, float))
    w_true = rng.standard_normal(d)
    margins = A.tdot(w_true)
    if noise > 0.0:
        margins = margins + noise * rng.standard_normal(n)
    labels = np.where(margins >= 0.0, 1.0, -1.0)
    return A, labels


def spectral_norm(A: SparseColMatrix, tol: float = 1e-6, max_iters: int = 20000,
                  seed: int = 0) -> float:
    """Largest singular value by power iteration on A A^T.

    Stops when the Rayleigh quotient stabilizes to ``tol`` relative; near-tied
    top singular values stall the iteration but then the estimate is within
    the tie gap of the true value anyway.
    """
    if A.nnz == 0:
        return 0.0
    rng = np.random.Generator(np.random.PCG64(seed))
    w = rng.standard_normal(A.d)
    w /= np.linalg.norm(w)
    est = 0.0
    for it in range(max_iters):
        bw = A.dot(A.tdot(w))
        norm = np.linalg.norm(bw)
        if norm == 0.0:
            return 0.0
        new_est = float(w @ bw)
        w = bw / norm
        if it >= 10 and abs(new_est - est) <= tol * 0.1 * max(new_est, 1e-300):
            est = new_est
            break
        est = new_est
    return math.sqrt(est)


def column_stats(A: SparseColMatrix) -> tuple[float, float]:
    """(max column norm R, spectral norm estimate)."""
    norms_sq = A.col_norms_sq()
    R = math.sqrt(float(norms_sq.max())) if A.n else 0.0
    return R, spectral_norm(A)
