"""Random designs and labels for both task distributions.

Every operation is a pure function of (inputs, seed).  Seeds for parallel
replications are derived from (master_seed, replication_index, stream_tag)
through ``numpy.random.SeedSequence`` so results do not depend on
scheduling order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotAProbabilitySpectrum
from .model import Spectrum

# Stream tags for replication-level seed derivation.
TASK1_DESIGN = 0
TASK1_NOISE = 1
TASK2_DESIGN = 2
TASK2_NOISE = 3
REGULARIZER_STREAM = 4


def stream_seed(master_seed: int, replication: int, tag: int) -> int:
    """Derive a 64-bit sub-seed for one stream of one replication."""
    words = np.random.SeedSequence((master_seed, replication, tag)).generate_state(2)
    return int(words[0]) | (int(words[1]) << 32)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Dataset:
    """A sampled design with its labels and the seed that produced them."""

    x: np.ndarray
    y: np.ndarray
    seed: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DimensionMismatch(f"X is {x.shape} but y has length {y.shape[0]}")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def is_one_hot(self) -> bool:
        return bool(
            np.all((self.x == 0.0) | (self.x == 1.0))
            and np.all(self.x.sum(axis=1) == 1.0)
        )

    def dump(self, path) -> None:
        dump_dataset(path, self.x, self.y)


def sample_one_hot_design(s: Spectrum, n: int, seed) -> np.ndarray:
    """Draw n i.i.d. rows, row = e_i with probability s_i.

    Sampling is inverse-CDF over the cumulative spectrum, so equal seeds
    give bit-identical matrices.
    """
    if not s.one_hot:
        raise NotAProbabilitySpectrum("design spectrum must be one-hot")
    cdf = np.cumsum(s.values)
    u = _rng(seed).random(n)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, s.d - 1)
    x = np.zeros((n, s.d))
    x[np.arange(n), idx] = 1.0
    return x


def sample_gaussian_design(s: Spectrum, n: int, seed) -> np.ndarray:
    """Draw n i.i.d. rows of diag(s)^(1/2) z with z standard normal."""
    z = _rng(seed).standard_normal((n, s.d))
    return z * np.sqrt(s.values)


def sample_labels(x: np.ndarray, w_star: np.ndarray, sigma2: float, seed) -> np.ndarray:
    """Labels y = X w* + eps with eps ~ N(0, sigma2 I), independent of X."""
    x = np.asarray(x, dtype=float)
    w_star = np.asarray(w_star, dtype=float)
    if x.ndim != 2 or w_star.ndim != 1 or x.shape[1] != w_star.shape[0]:
        raise DimensionMismatch(f"X is {x.shape}, w* is {w_star.shape}")
    if sigma2 < 0:
        raise DimensionMismatch(f"sigma2 must be nonnegative, got {sigma2}")
    noise = np.sqrt(sigma2) * _rng(seed).standard_normal(x.shape[0])
    return x @ w_star + noise


def dump_dataset(path, x: np.ndarray, y: np.ndarray) -> None:
    """Write samples to a delimited text file, last column = label."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{x.shape[0]} rows but {y.shape[0]} labels")
    np.savetxt(path, np.column_stack([x, y]), delimiter="\t")
