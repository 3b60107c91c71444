"""Independent exact computations for validating the risk and theory modules.

Small one-hot problems admit exhaustive enumeration: a one-hot dataset is
determined (up to row order, which no estimator here sees) by its count
vector, so the design expectation is a finite multinomial sum over
compositions rather than d^n raw sequences.  Binomial mixed moments are
summed exactly in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, GrclabError, InvalidProbability
from .model import Design, ProblemInstance, RiskDecomposition
from .risk import (
    GRCL,
    Joint,
    L2RCL,
    OCL,
    RiskWeighting,
    conditional_risk,
    conditional_risk_joint,
)
from .regularizers import Regularizer

MAX_STATES_CAP = 10**7


@dataclass(frozen=True)
class EnumerationBudget:
    """Cap on the number of dataset pairs the oracle may visit."""

    max_states: int = 10**6

    def __post_init__(self):
        if not (1 <= self.max_states <= MAX_STATES_CAP):
            raise BudgetExceeded(f"max_states must be in [1, {MAX_STATES_CAP}]")


def binomial_pmf(n: int, p: float) -> np.ndarray:
    """Exact Binomial(n, p) probabilities for j = 0..n, via log-space terms."""
    if not (0.0 <= p <= 1.0):
        raise InvalidProbability(f"p must be in [0, 1], got {p}")
    if n < 0:
        raise DimensionMismatch(f"n must be nonnegative, got {n}")
    j = np.arange(n + 1)
    if p == 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    if p == 1.0:
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out
    log_comb = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(v + 1) for v in j])
        - np.array([math.lgamma(n - v + 1) for v in j])
    )
    return np.exp(log_comb + j * math.log(p) + (n - j) * math.log1p(-p))


def binomial_mixed_moment(n: int, p: float, shift: float,
                          inv_power: int, num_power: int) -> float:
    """Exact E[B^num / (B + shift)^inv] for B ~ Binomial(n, p).

    Follows the pseudoinverse convention: the j = 0 term contributes 0
    whenever shift = 0 (for num = 0 this is E[(B^+)^-inv]).
    """
    if inv_power not in (1, 2):
        raise DimensionMismatch(f"inv_power must be 1 or 2, got {inv_power}")
    if num_power not in (0, 1):
        raise DimensionMismatch(f"num_power must be 0 or 1, got {num_power}")
    if shift < 0:
        raise DimensionMismatch(f"shift must be nonnegative, got {shift}")
    pmf = binomial_pmf(n, p)
    terms = []
    for j in range(n + 1):
        den = (j + shift) ** inv_power
        if den == 0.0:
            continue
        num = float(j) ** num_power if num_power else 1.0
        if num == 0.0:
            continue
        terms.append(num / den * pmf[j])
    return math.fsum(terms)


def _compositions(n: int, d: int):
    """All count vectors of length d summing to n, in lexicographic order."""
    if d == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


def _log_factorials(n: int) -> np.ndarray:
    return np.array([math.lgamma(v + 1) for v in range(n + 1)])


def _multinomial_states(n: int, probs: np.ndarray):
    """(counts, probability) pairs for a Multinomial(n, probs) draw."""
    d = probs.shape[0]
    lf = _log_factorials(n)
    states = []
    for counts in _compositions(n, d):
        logp = lf[n]
        dead = False
        for c, p in zip(counts, probs):
            if c == 0:
                continue
            if p == 0.0:
                dead = True
                break
            logp += c * math.log(p) - lf[c]
        if dead:
            continue
        states.append((np.array(counts, dtype=float), math.exp(logp)))
    return states


def _design_from_counts(counts: np.ndarray) -> np.ndarray:
    return np.repeat(np.eye(counts.shape[0]), counts.astype(int), axis=0)


def exact_one_hot_expected_excess(
    inst: ProblemInstance,
    n: int,
    algorithm,
    budget: EnumerationBudget = EnumerationBudget(),
    weighting: RiskWeighting = RiskWeighting.JOINT,
) -> RiskDecomposition:
    """Exact design-expectation of the conditional excess risk.

    Every pair of one-hot datasets is visited through its count vector
    with the exact multinomial probability; the label noise is already
    integrated analytically by :func:`grclab.risk.conditional_risk`.
    Only count-determined algorithms are meaningful here (all four
    standard ones are).
    """
    if inst.design is not Design.ONE_HOT:
        raise DimensionMismatch("exhaustive enumeration needs a one-hot instance")
    states1 = _multinomial_states(n, inst.g.values)
    states2 = _multinomial_states(n, inst.h.values)
    n_pairs = len(states1) * len(states2)
    if n_pairs > budget.max_states:
        raise BudgetExceeded(f"{n_pairs} dataset pairs exceed budget {budget.max_states}")

    bias_terms, var_terms, prob_terms = [], [], []
    for c1, p1 in states1:
        x1 = _design_from_counts(c1)
        if isinstance(algorithm, GRCL):
            sigma = algorithm.build(x1, seed=0)
        elif isinstance(algorithm, L2RCL):
            sigma = Regularizer(form="diagonal", values=np.full(inst.d, algorithm.gamma))
        elif isinstance(algorithm, (OCL, Joint)):
            sigma = None
        else:
            raise DimensionMismatch(f"unknown algorithm {algorithm!r}")
        for c2, p2 in states2:
            x2 = _design_from_counts(c2)
            if isinstance(algorithm, Joint):
                dec = conditional_risk_joint(x1, x2, inst, weighting)
            else:
                dec = conditional_risk(x1, x2, inst, sigma, weighting)
            p = p1 * p2
            prob_terms.append(p)
            bias_terms.append(p * dec.bias)
            var_terms.append(p * dec.variance)

    total_prob = math.fsum(prob_terms)
    if abs(total_prob - 1.0) > 1e-9:
        raise GrclabError(f"enumeration probabilities sum to {total_prob!r}")
    return RiskDecomposition(
        bias=math.fsum(bias_terms), variance=math.fsum(var_terms)
    )
