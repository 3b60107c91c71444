"""Problem definitions: spectra, instances, index sets, and the P(k) family.

Both task covariances are diagonal in a shared basis, so a covariance is
represented by its eigenvalue sequence alone.  All types are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InfeasibleEffectiveRank,
    InvalidK,
    NegativeEigenvalue,
    OneHotMassMismatch,
)

ONE_HOT_MASS_TOL = 1e-9


class Design(enum.Enum):
    """Random-design family for the covariate draws."""

    ONE_HOT = "one_hot"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class Spectrum:
    """Ordered nonnegative eigenvalue sequence of a diagonal covariance.

    ``one_hot`` marks spectra that double as categorical sampling
    probabilities; those must sum to 1 (enforced by :func:`make_spectrum`).
    Construct through :func:`make_spectrum` rather than directly.
    """

    values: np.ndarray
    one_hot: bool = False

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def is_sorted_desc(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0))

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        self.values.setflags(write=False)


def make_spectrum(values, one_hot: bool = False) -> Spectrum:
    """Validate an eigenvalue sequence and build a :class:`Spectrum`.

    For ``one_hot=True`` the entries must sum to 1 within 1e-9; they are
    then renormalized by their exact sum so downstream mass checks at
    1e-12 hold.

    Raises
    ------
    NegativeEigenvalue
        Some entry is negative or non-finite.
    OneHotMassMismatch
        ``one_hot`` is set but the mass deviates from 1 by more than 1e-9.
    """
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise NegativeEigenvalue("spectrum entries must be finite and nonempty")
    if np.any(arr < 0):
        raise NegativeEigenvalue(f"negative eigenvalue: min={arr.min()}")
    if one_hot:
        mass = math.fsum(arr.tolist())
        if abs(mass - 1.0) > ONE_HOT_MASS_TOL:
            raise OneHotMassMismatch(f"one-hot spectrum sums to {mass!r}, not 1")
        arr = arr / mass
    return Spectrum(values=arr, one_hot=one_hot)


@dataclass(frozen=True)
class ProblemInstance:
    """A two-task problem: shared optimum, noise level, and both covariances."""

    w_star: np.ndarray
    sigma2: float
    g: Spectrum
    h: Spectrum
    design: Design

    def __post_init__(self):
        object.__setattr__(self, "w_star", np.asarray(self.w_star, dtype=float))
        self.w_star.setflags(write=False)
        d = self.w_star.shape[0]
        if self.g.d != d or self.h.d != d:
            raise DimensionMismatch(
                f"w_star has d={d} but spectra have d={self.g.d}, {self.h.d}"
            )
        if not np.all(np.isfinite(self.w_star)):
            raise DimensionMismatch("w_star entries must be finite")
        if self.sigma2 < 0:
            raise NegativeEigenvalue(f"sigma2 must be nonnegative, got {self.sigma2}")
        if self.design is Design.ONE_HOT and not (self.g.one_hot and self.h.one_hot):
            raise OneHotMassMismatch(
                "one-hot instances need one-hot spectra for both tasks"
            )

    @property
    def d(self) -> int:
        return self.w_star.shape[0]


@dataclass(frozen=True)
class IndexSet:
    """A subset of coordinate indices in [0, d), with d fixed for complements."""

    members: frozenset
    d: int

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if any((i < 0 or i >= self.d) for i in self.members):
            raise DimensionMismatch(f"index outside [0, {self.d})")

    def complement(self) -> "IndexSet":
        return IndexSet(frozenset(range(self.d)) - self.members, self.d)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.d, dtype=bool)
        m[sorted(self.members)] = True
        return m

    def __contains__(self, i) -> bool:
        return i in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class RiskDecomposition:
    """Excess risk split into a signal (bias) and a noise (variance) part."""

    bias: float
    variance: float
    total: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.total is None:
            object.__setattr__(self, "total", self.bias + self.variance)
        if self.bias < 0 or self.variance < 0:
            raise NegativeEigenvalue("bias and variance must be nonnegative")
        scale = max(abs(self.total), self.bias + self.variance, 1e-300)
        if abs(self.total - (self.bias + self.variance)) > 1e-10 * scale:
            raise DimensionMismatch("total must equal bias + variance")


def make_problem_pk(k: int, d: int, design: Design = Design.GAUSSIAN) -> ProblemInstance:
    """Build the geometric benchmark instance P(k).

    Task-1 eigenvalues decay as 2^-(i-1); task 2 reverses the first k of
    them and keeps the tail.  The optimum is w*_i = 1/i and sigma2 = 1.
    Under a one-hot design both spectra are renormalized by their (equal)
    sums so they are valid sampling distributions.
    """
    if not (1 <= k <= d):
        raise InvalidK(f"need 1 <= k <= d, got k={k}, d={d}")
    mu = 0.5 ** np.arange(d, dtype=float)
    lam = mu.copy()
    lam[:k] = mu[:k][::-1]
    w_star = 1.0 / np.arange(1, d + 1, dtype=float)
    one_hot = design is Design.ONE_HOT
    if one_hot:
        mu = mu / mu.sum()
        lam = lam / lam.sum()
    return ProblemInstance(
        w_star=w_star,
        sigma2=1.0,
        g=make_spectrum(mu, one_hot=one_hot),
        h=make_spectrum(lam, one_hot=one_hot),
        design=design,
    )


def one_hot_index_sets(s: Spectrum, n: int) -> IndexSet:
    """Head coordinates {i : s_i >= 1/n} (non-strict threshold convention)."""
    if n < 1:
        raise InvalidK(f"sample size must be >= 1, got {n}")
    members = frozenset(np.flatnonzero(s.values >= 1.0 / n).tolist())
    return IndexSet(members, s.d)


def effective_rank(s: Spectrum, exclude: IndexSet | None = None) -> float:
    """Trace over operator norm of the spectrum outside ``exclude``.

    Returns 0 when the complement is empty or all-zero.
    """
    if exclude is None:
        exclude = IndexSet(frozenset(), s.d)
    if exclude.d != s.d:
        raise DimensionMismatch("exclude set sized for a different spectrum")
    keep = ~exclude.mask()
    tail = s.values[keep]
    if tail.size == 0:
        return 0.0
    top = tail.max()
    if top <= 0:
        return 0.0
    return float(math.fsum(tail.tolist()) / top)


def gaussian_index_set(s: Spectrum, n: int, b2: float) -> IndexSet:
    """Smallest strict-threshold head K with tail effective rank >= b2*n.

    Candidate heads are K_t = {i : s_i > t} for t at each distinct
    eigenvalue, scanned from the largest threshold down; the first
    candidate whose complement satisfies r >= b2*n is returned (this
    realizes the maximal feasible threshold).  K = empty is a legal
    answer when the full spectrum is already flat enough.

    Raises
    ------
    InfeasibleEffectiveRank
        No candidate, including excluding nothing, reaches b2*n.
    """
    if n < 1:
        raise InvalidK(f"sample size must be >= 1, got {n}")
    if b2 <= 0:
        raise InvalidK(f"b2 must be positive, got {b2}")
    target = b2 * n
    order = np.argsort(-s.values, kind="stable")
    sorted_vals = s.values[order]
    # Suffix data for each candidate boundary: candidate K = first `c` sorted
    # coordinates, where `c` counts entries strictly above each distinct value.
    distinct = np.unique(sorted_vals)[::-1]
    for t in np.concatenate(([np.inf], distinct)):
        head = int(np.count_nonzero(sorted_vals > t))
        tail = sorted_vals[head:]
        if tail.size == 0:
            continue
        top = tail[0]
        if top <= 0:
            continue
        if math.fsum(tail.tolist()) / top >= target:
            members = frozenset(order[:head].tolist())
            return IndexSet(members, s.d)
    raise InfeasibleEffectiveRank(
        f"no threshold achieves tail effective rank >= {target}"
    )


# -- plain-text serialization -------------------------------------------------

def _fmt_list(arr) -> str:
    return ",".join(repr(float(v)) for v in arr)


def instance_to_text(inst: ProblemInstance) -> str:
    """Serialize an instance to the key=value exchange format."""
    lines = [
        f"d={inst.d}",
        f"sigma2={inst.sigma2!r}",
        f"g={_fmt_list(inst.g.values)}",
        f"h={_fmt_list(inst.h.values)}",
        f"w_star={_fmt_list(inst.w_star)}",
        f"design={inst.design.value}",
    ]
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> ProblemInstance:
    """Parse the key=value exchange format back into an instance."""
    fields = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    try:
        d = int(fields["d"])
        sigma2 = float(fields["sigma2"])
        design = Design(fields["design"])
        g = np.array([float(v) for v in fields["g"].split(",")])
        h = np.array([float(v) for v in fields["h"].split(",")])
        w_star = np.array([float(v) for v in fields["w_star"].split(",")])
    except (KeyError, ValueError) as exc:
        raise DimensionMismatch(f"bad instance text: {exc}") from exc
    if not (len(g) == len(h) == len(w_star) == d):
        raise DimensionMismatch("instance text lengths disagree with d")
    one_hot = design is Design.ONE_HOT
    return ProblemInstance(
        w_star=w_star,
        sigma2=sigma2,
        g=make_spectrum(g, one_hot=one_hot),
        h=make_spectrum(h, one_hot=one_hot),
        design=design,
    )
