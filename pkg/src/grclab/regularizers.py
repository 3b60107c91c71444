"""Construction of the memory matrix carried between the two learning phases.

A regularizer is a PSD matrix stored either as a nonnegative diagonal or as
a k x d factor W with Sigma = W^T W.  Its memory size is the number of
d-vectors needed to write it down: k factor rows, or one axis eigenvector
per nonzero diagonal entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, KTooLarge, NotDiagonal, NotOneHotDesign, NotPSD
from .model import Spectrum

DIAGONAL = "diagonal"
LOWRANK = "lowrank"


@dataclass(frozen=True)
class Regularizer:
    """PSD memory matrix in diagonal or low-rank-factor form."""

    form: str
    values: np.ndarray | None = None  # (d,) nonnegative, diagonal form
    factor: np.ndarray | None = None  # (k, d), low-rank form
    memory_size: int = 0

    def __post_init__(self):
        if self.form == DIAGONAL:
            vals = np.asarray(self.values, dtype=float)
            if vals.ndim != 1:
                raise DimensionMismatch("diagonal values must be a vector")
            if np.any(vals < 0) or not np.all(np.isfinite(vals)):
                raise NotPSD("diagonal regularizer needs finite nonnegative entries")
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "memory_size", int(np.count_nonzero(vals)))
        elif self.form == LOWRANK:
            fac = np.asarray(self.factor, dtype=float)
            if fac.ndim != 2:
                raise DimensionMismatch("low-rank factor must be a k x d matrix")
            if not np.all(np.isfinite(fac)):
                raise NotPSD("low-rank factor must be finite")
            fac.setflags(write=False)
            object.__setattr__(self, "factor", fac)
            object.__setattr__(self, "memory_size", int(fac.shape[0]))
        else:
            raise DimensionMismatch(f"unknown regularizer form {self.form!r}")

    @property
    def d(self) -> int:
        if self.form == DIAGONAL:
            return self.values.shape[0]
        return self.factor.shape[1]

    @property
    def is_diagonal(self) -> bool:
        return self.form == DIAGONAL

    @property
    def is_zero(self) -> bool:
        if self.form == DIAGONAL:
            return not np.any(self.values)
        return self.factor.size == 0 or not np.any(self.factor)

    def diagonal_values(self) -> np.ndarray:
        if self.form != DIAGONAL:
            raise NotDiagonal("regularizer is not in diagonal form")
        return self.values

    def matrix(self) -> np.ndarray:
        """Densify to the full d x d PSD matrix."""
        if self.form == DIAGONAL:
            return np.diag(self.values)
        return self.factor.T @ self.factor

    def sqrt_factor(self) -> np.ndarray:
        """A matrix W with W^T W = Sigma (rows only for nonzero directions)."""
        if self.form == LOWRANK:
            return self.factor
        nz = np.flatnonzero(self.values)
        w = np.zeros((nz.size, self.d))
        w[np.arange(nz.size), nz] = np.sqrt(self.values[nz])
        return w


def zero_regularizer(d: int) -> Regularizer:
    return Regularizer(form=LOWRANK, factor=np.zeros((0, d)))


def topk_empirical(x1: np.ndarray, k: int) -> Regularizer:
    """Best rank-k PSD approximation of the empirical covariance X1^T X1 / n."""
    x1 = np.asarray(x1, dtype=float)
    n, d = x1.shape
    if not (0 <= k <= min(n, d)):
        raise KTooLarge(f"need 0 <= k <= min(n, d) = {min(n, d)}, got {k}")
    if k == 0:
        return zero_regularizer(d)
    emp = x1.T @ x1 / n
    eigvals, eigvecs = np.linalg.eigh(emp)
    top = np.argsort(eigvals)[::-1][:k]
    w = np.clip(eigvals[top], 0.0, None)
    factor = np.sqrt(w)[:, None] * eigvecs[:, top].T
    return Regularizer(form=LOWRANK, factor=factor)


def onehot_frequency(x1: np.ndarray, min_count: int = 1) -> Regularizer:
    """Diagonal Sigma of observed-atom frequencies count_i / n.

    Coordinates seen fewer than ``min_count`` times are dropped; whatever
    remains is an unbiased estimate of the kept eigenvalues.
    """
    x1 = np.asarray(x1, dtype=float)
    if min_count < 1:
        raise KTooLarge(f"min_count must be >= 1, got {min_count}")
    is_binary = np.all((x1 == 0.0) | (x1 == 1.0))
    if x1.ndim != 2 or not is_binary or not np.all(x1.sum(axis=1) == 1.0):
        raise NotOneHotDesign("rows must be standard basis vectors")
    n = x1.shape[0]
    counts = x1.sum(axis=0)
    gamma = np.where(counts >= min_count, counts / n, 0.0)
    return Regularizer(form=DIAGONAL, values=gamma)


def corollary3_regularizer(g: Spectrum, n: int) -> Regularizer:
    """Diagonal Sigma keeping the task-1 eigenvalues at or above 1/n."""
    if n < 1:
        raise KTooLarge(f"sample size must be >= 1, got {n}")
    gamma = np.where(g.values >= 1.0 / n, g.values, 0.0)
    return Regularizer(form=DIAGONAL, values=gamma)


def topk_spectrum_regularizer(g: Spectrum, k: int) -> Regularizer:
    """Diagonal Sigma keeping the first k entries of the task-1 spectrum."""
    if not (0 <= k <= g.d):
        raise KTooLarge(f"need 0 <= k <= d = {g.d}, got {k}")
    gamma = g.values.copy()
    gamma[k:] = 0.0
    return Regularizer(form=DIAGONAL, values=gamma)


def sketch_regularizer(x1: np.ndarray, k: int, seed) -> Regularizer:
    """CountSketch compression of the task-1 data, Sigma = (S X1 / sqrt(n))^T (...).

    S is k x n with one +-1 per column at a uniformly random row, so
    E_S[Sigma] equals the empirical covariance X1^T X1 / n.
    """
    x1 = np.asarray(x1, dtype=float)
    if k < 1:
        raise KTooLarge(f"sketch size must be >= 1, got {k}")
    n, d = x1.shape
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, k, size=n)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    factor = np.zeros((k, d))
    np.add.at(factor, rows, signs[:, None] * x1)
    return Regularizer(form=LOWRANK, factor=factor / np.sqrt(n))


# -- plain-text serialization -------------------------------------------------

def regularizer_to_text(reg: Regularizer) -> str:
    lines = [f"form={reg.form}"]
    if reg.form == DIAGONAL:
        lines.append("values=" + ",".join(repr(float(v)) for v in reg.values))
    else:
        lines.append(f"k={reg.factor.shape[0]}")
        lines.append(f"d={reg.factor.shape[1]}")
        for row in reg.factor:
            lines.append("row=" + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def regularizer_from_text(text: str) -> Regularizer:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    header = dict(ln.partition("=")[::2] for ln in lines if not ln.startswith("row="))
    form = header.get("form")
    if form == DIAGONAL:
        values = np.array([float(v) for v in header["values"].split(",")])
        return Regularizer(form=DIAGONAL, values=values)
    if form == LOWRANK:
        k, d = int(header["k"]), int(header["d"])
        rows = [ln.partition("=")[2] for ln in lines if ln.startswith("row=")]
        if len(rows) != k:
            raise DimensionMismatch(f"expected {k} factor rows, found {len(rows)}")
        factor = np.array([[float(v) for v in row.split(",")] for row in rows])
        factor = factor.reshape(k, d)
        return Regularizer(form=LOWRANK, factor=factor)
    raise DimensionMismatch(f"unknown regularizer form {form!r}")
