"""Population excess risk and its conditional bias/variance decomposition.

For fixed designs the expectation over label noise has a closed form:
the first-phase error w1 - w* has covariance P1 w* w*^T P1 + sigma2 A1^+
with A1 = X1^T X1 and P1 the projection onto null(A1); the second phase
propagates it through Q = I - (A2 + n Sigma)^+ A2 and adds its own noise
term (A2 + n Sigma)^+ A2 (A2 + n Sigma)^+.  Monte Carlo therefore only
ever integrates over designs, never over noise.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import sampler
from .errors import DimensionMismatch, NotPSD
from .estimators import (
    DEFAULT_OPTIONS,
    NORMAL_PATH_MAX_D,
    SolveOptions,
    Weights,
    eigen_cutoff_ratio,
)
from .model import Design, ProblemInstance, RiskDecomposition
from .regularizers import Regularizer, sketch_regularizer, topk_empirical, zero_regularizer


class RiskWeighting(enum.Enum):
    """Which population covariance weights the squared parameter error."""

    TASK1 = "task1"
    TASK2 = "task2"
    JOINT = "joint"


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Replication average of the conditional excess risk."""

    mean: float
    std_error: float
    replications: int

    def __post_init__(self):
        if self.std_error < 0 or self.replications < 1:
            raise DimensionMismatch("need std_error >= 0 and replications >= 1")


def weight_vector(inst: ProblemInstance, weighting: RiskWeighting) -> np.ndarray:
    if weighting is RiskWeighting.TASK1:
        return inst.g.values
    if weighting is RiskWeighting.TASK2:
        return inst.h.values
    return inst.g.values + inst.h.values


def population_excess(w: Weights, inst: ProblemInstance,
                      weighting: RiskWeighting = RiskWeighting.JOINT) -> float:
    """Excess of the population risk at w over its minimum, sum m_i (w-w*)_i^2."""
    if w.d != inst.d:
        raise DimensionMismatch(f"weights have d={w.d}, instance has d={inst.d}")
    m = weight_vector(inst, weighting)
    diff = w.w - inst.w_star
    return float(m @ (diff * diff))


def _check_designs(x1, x2, inst):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.ndim != 2 or x2.ndim != 2:
        raise DimensionMismatch("designs must be matrices")
    if x1.shape[1] != inst.d or x2.shape[1] != inst.d:
        raise DimensionMismatch(
            f"designs have d={x1.shape[1]}, {x2.shape[1]}; instance has d={inst.d}"
        )
    return x1, x2


def _is_one_hot_matrix(x: np.ndarray) -> bool:
    return bool(np.all((x == 0.0) | (x == 1.0)) and np.all(x.sum(axis=1) == 1.0))


def _sigma_as_regularizer(sigma, d: int) -> Regularizer:
    if sigma is None:
        return zero_regularizer(d)
    if isinstance(sigma, Regularizer):
        if sigma.d != d:
            raise DimensionMismatch(f"Sigma has d={sigma.d}, instance has d={d}")
        return sigma
    mat = np.asarray(sigma, dtype=float)
    if mat.shape != (d, d):
        raise DimensionMismatch(f"Sigma has shape {mat.shape}, need ({d}, {d})")
    if np.array_equal(mat, np.diag(np.diagonal(mat))):
        return Regularizer(form="diagonal", values=np.diagonal(mat).copy())
    eigvals, eigvecs = np.linalg.eigh(mat)
    if eigvals[0] < -1e-12 * max(abs(eigvals[-1]), 1.0):
        raise NotPSD(f"regularization matrix has eigenvalue {eigvals[0]}")
    keep = eigvals > 0
    factor = np.sqrt(eigvals[keep])[:, None] * eigvecs[:, keep].T
    return Regularizer(form="lowrank", factor=factor)


def _pinv_parts(sym: np.ndarray, cutoff_ratio: float):
    """Eigendecomposition split of a PSD matrix into kept/dropped directions."""
    eigvals, eigvecs = np.linalg.eigh(sym)
    cutoff = cutoff_ratio * max(eigvals[-1], 0.0)
    keep = eigvals > cutoff
    inv = np.where(keep, 1.0 / np.maximum(eigvals, 1e-300), 0.0)
    return eigvals, eigvecs, inv, keep


def _conditional_sequential_dense(x1, x2, inst, gamma_reg, weighting, opts):
    n2, d = x2.shape
    n_big = max(x1.shape[0], n2)
    cutoff = eigen_cutoff_ratio(opts.resolve(n_big, d), n_big, d)
    m = weight_vector(inst, weighting)

    a1 = x1.T @ x1
    _, v1, inv1, keep1 = _pinv_parts(a1, cutoff)
    # Null-space projection of the first task: symmetric, exact idempotent.
    v1_null = v1[:, ~keep1]
    p1w = v1_null @ (v1_null.T @ inst.w_star)

    sigma_mat = gamma_reg.matrix()
    a2 = x2.T @ x2
    s = a2 + n2 * sigma_mat
    _, vs, invs, _ = _pinv_parts(s, cutoff)
    splus = (vs * invs) @ vs.T
    q = np.eye(d) - splus @ a2

    b = q @ p1w
    bias = float(m @ (b * b))

    # <M, Q A1^+ Q^T> through the PSD square root of A1^+.
    a1_half = v1 * np.sqrt(inv1)
    qa = q @ a1_half
    var1 = float(m @ np.einsum("ij,ij->i", qa, qa))
    # <M, S^+ A2 S^+> = row norms of S^+ X2^T.
    c = splus @ x2.T
    var2 = float(m @ np.einsum("ij,ij->i", c, c))
    variance = inst.sigma2 * (var1 + var2)
    return RiskDecomposition(bias=bias, variance=variance)


def _conditional_sequential_gram(x1, x2, inst, weighting, opts):
    """Unregularized conditional risk through the n x n Gram matrices.

    For d far beyond the sample sizes the d x d normal matrices are not
    materializable; with Sigma = 0 every needed quantity reduces to
    weighted Grams Z D Z^T, using (X^T X)^+ = X^T (X X^T)^+2 X and
    P2 = I - X2^T (X2 X2^T)^+ X2.
    """
    n1, d = x1.shape
    n2 = x2.shape[0]
    n_big = max(n1, n2)
    cutoff = eigen_cutoff_ratio(opts.resolve(n_big, d), n_big, d)
    m = weight_vector(inst, weighting)

    def pinv_from(sym):
        _, v, inv, _ = _pinv_parts(sym, cutoff)
        return (v * inv) @ v.T

    a1_plus = pinv_from(x1 @ x1.T)
    a2_plus = pinv_from(x2 @ x2.T)

    u = inst.w_star - x1.T @ (a1_plus @ (x1 @ inst.w_star))
    b = u - x2.T @ (a2_plus @ (x2 @ u))
    bias = float(m @ (b * b))

    x1m = x1 * m
    w11 = x1m @ x1.T
    w12 = x1m @ x2.T
    del x1m
    w22 = (x2 * m) @ x2.T
    k12 = x1 @ x2.T
    t = k12 @ a2_plus
    # (X1 P2) M (X1 P2)^T assembled from the Gram blocks
    core = w11 - t @ w12.T - w12 @ t.T + t @ w22 @ t.T
    var1 = float(np.einsum("ij,ji->", a1_plus @ core, a1_plus))
    var2 = float(np.einsum("ij,ji->", a2_plus @ w22, a2_plus))
    variance = inst.sigma2 * (var1 + var2)
    return RiskDecomposition(bias=bias, variance=max(variance, 0.0))


def _conditional_sequential_onehot(c1, c2, n2, inst, gamma, weighting):
    m = weight_vector(inst, weighting)
    s = c2 + n2 * gamma
    live = s > 0
    q = np.where(live, np.divide(n2 * gamma, s, out=np.zeros_like(s), where=live), 1.0)
    p1w = np.where(c1 == 0, inst.w_star, 0.0)
    b = q * p1w
    bias = float(m @ (b * b))
    a1inv = np.divide(1.0, c1, out=np.zeros_like(c1, dtype=float), where=c1 > 0)
    noise2 = np.divide(c2, s * s, out=np.zeros_like(s), where=live)
    variance = inst.sigma2 * float(m @ (q * q * a1inv) + m @ noise2)
    return RiskDecomposition(bias=bias, variance=variance)


def conditional_risk(x1, x2, inst: ProblemInstance, sigma,
                     weighting: RiskWeighting = RiskWeighting.JOINT,
                     opts: SolveOptions = DEFAULT_OPTIONS) -> RiskDecomposition:
    """Noise-expected excess risk of the sequential fit, for fixed designs.

    Covers the whole Sigma family: Sigma = 0 is the unregularized update
    (the propagation map degenerates to the task-2 null-space projection),
    Sigma = gamma I the l2-penalized one, general PSD Sigma the structural
    one.  One-hot designs with diagonal Sigma take an exact O(d)
    coordinate path; the dense path agrees with it to rounding.

    Parameters
    ----------
    sigma : Regularizer, (d, d) ndarray, or None
        PSD penalty; None means zero.
    """
    x1, x2 = _check_designs(x1, x2, inst)
    reg = _sigma_as_regularizer(sigma, inst.d)
    n2 = x2.shape[0]
    diagonal_like = reg.is_zero or reg.is_diagonal
    if diagonal_like and _is_one_hot_matrix(x1) and _is_one_hot_matrix(x2):
        gamma = reg.values if reg.is_diagonal else np.zeros(inst.d)
        return _conditional_sequential_onehot(
            x1.sum(axis=0), x2.sum(axis=0), n2, inst, gamma, weighting
        )
    if reg.is_zero and inst.d > NORMAL_PATH_MAX_D:
        return _conditional_sequential_gram(x1, x2, inst, weighting, opts)
    return _conditional_sequential_dense(x1, x2, inst, reg, weighting, opts)


def conditional_risk_joint(x1, x2, inst: ProblemInstance,
                           weighting: RiskWeighting = RiskWeighting.JOINT,
                           opts: SolveOptions = DEFAULT_OPTIONS) -> RiskDecomposition:
    """Noise-expected excess risk of the stacked min-norm fit, fixed designs."""
    x1, x2 = _check_designs(x1, x2, inst)
    m = weight_vector(inst, weighting)
    if _is_one_hot_matrix(x1) and _is_one_hot_matrix(x2):
        c = x1.sum(axis=0) + x2.sum(axis=0)
        pw = np.where(c == 0, inst.w_star, 0.0)
        bias = float(m @ (pw * pw))
        ainv = np.divide(1.0, c, out=np.zeros_like(c, dtype=float), where=c > 0)
        return RiskDecomposition(bias=bias, variance=inst.sigma2 * float(m @ ainv))
    x = np.vstack([x1, x2])
    cutoff = eigen_cutoff_ratio(opts.resolve(*x.shape), *x.shape)
    a = x.T @ x
    _, v, inv, keep = _pinv_parts(a, cutoff)
    v_null = v[:, ~keep]
    pw = v_null @ (v_null.T @ inst.w_star)
    bias = float(m @ (pw * pw))
    variance = inst.sigma2 * float(m @ np.einsum("ij,j,ij->i", v, inv, v))
    return RiskDecomposition(bias=bias, variance=variance)


# -- algorithms ---------------------------------------------------------------

RegularizerBuilder = Callable[[np.ndarray, int], Regularizer]


@dataclass(frozen=True)
class OCL:
    """Unregularized sequential learning."""

    name: str = "ocl"


@dataclass(frozen=True)
class L2RCL:
    """Sequential learning with an isotropic penalty gamma ||w - w1||^2."""

    gamma: float
    name: str = "l2rcl"

    def __post_init__(self):
        if self.gamma <= 0:
            raise NotPSD(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class GRCL:
    """Sequential learning with a memory matrix, fixed or built from X1."""

    regularizer: Regularizer | None = None
    builder: RegularizerBuilder | None = None
    name: str = "grcl"

    def __post_init__(self):
        if (self.regularizer is None) == (self.builder is None):
            raise DimensionMismatch("provide exactly one of regularizer, builder")

    def build(self, x1: np.ndarray, seed: int) -> Regularizer:
        if self.regularizer is not None:
            return self.regularizer
        return self.builder(x1, seed)


@dataclass(frozen=True)
class Joint:
    """Min-norm least squares on the union of both datasets."""

    name: str = "joint"


def topk_builder(k: int) -> RegularizerBuilder:
    return lambda x1, seed: topk_empirical(x1, k)


def sketch_builder(k: int) -> RegularizerBuilder:
    return lambda x1, seed: sketch_regularizer(x1, k, seed)


def _sample_design(spectrum, design: Design, n: int, seed) -> np.ndarray:
    if design is Design.ONE_HOT:
        return sampler.sample_one_hot_design(spectrum, n, seed)
    return sampler.sample_gaussian_design(spectrum, n, seed)


def _replication_risk(inst, algorithm, n, master_seed, rep, weighting):
    x1 = _sample_design(
        inst.g, inst.design, n, sampler.stream_seed(master_seed, rep, sampler.TASK1_DESIGN)
    )
    x2 = _sample_design(
        inst.h, inst.design, n, sampler.stream_seed(master_seed, rep, sampler.TASK2_DESIGN)
    )
    if isinstance(algorithm, Joint):
        return conditional_risk_joint(x1, x2, inst, weighting)
    if isinstance(algorithm, OCL):
        sigma = None
    elif isinstance(algorithm, L2RCL):
        sigma = Regularizer(form="diagonal", values=np.full(inst.d, algorithm.gamma))
    elif isinstance(algorithm, GRCL):
        sigma = algorithm.build(
            x1, sampler.stream_seed(master_seed, rep, sampler.REGULARIZER_STREAM)
        )
    else:
        raise DimensionMismatch(f"unknown algorithm {algorithm!r}")
    return conditional_risk(x1, x2, inst, sigma, weighting)


def _max_workers() -> int:
    raw = os.environ.get("GRCL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def monte_carlo_expected_excess(
    inst: ProblemInstance,
    algorithm,
    n: int,
    reps: int,
    seed: int,
    weighting: RiskWeighting = RiskWeighting.JOINT,
) -> tuple[MonteCarloEstimate, RiskDecomposition]:
    """Design-average of the conditional excess risk over ``reps`` replications.

    Noise is integrated analytically inside each replication, so the only
    randomness is the pair of designs (and a data-built regularizer, when
    the algorithm carries one).  Per-replication seeds derive from
    (seed, replication, stream), making the result independent of
    execution order; ``GRCL_THREADS`` caps worker threads.
    """
    if reps < 2:
        raise DimensionMismatch(f"need reps >= 2, got {reps}")
    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            decomps = list(
                pool.map(
                    lambda rep: _replication_risk(inst, algorithm, n, seed, rep, weighting),
                    range(reps),
                )
            )
    else:
        decomps = [
            _replication_risk(inst, algorithm, n, seed, rep, weighting)
            for rep in range(reps)
        ]
    totals = [dec.total for dec in decomps]
    mean = math.fsum(totals) / reps
    sq = math.fsum((t - mean) ** 2 for t in totals)
    std_error = math.sqrt(sq / (reps - 1)) / math.sqrt(reps)
    bias_mean = math.fsum(dec.bias for dec in decomps) / reps
    var_mean = math.fsum(dec.variance for dec in decomps) / reps
    estimate = MonteCarloEstimate(mean=mean, std_error=std_error, replications=reps)
    return estimate, RiskDecomposition(bias=bias_mean, variance=var_mean)
