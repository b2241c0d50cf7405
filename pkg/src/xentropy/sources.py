"""Constructors for the meaning sources used by the simulations and sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FactoredSpace, SourceDistribution, ValidationError

CELL_TOL = 1e-12


def _source(table: np.ndarray, cards) -> SourceDistribution:
    p = np.asarray(table, dtype=float).reshape(-1)
    p = np.where(np.abs(p) < CELL_TOL, 0.0, p)
    return SourceDistribution(p / p.sum(), FactoredSpace(tuple(cards)))


def _check_prob(x: float, name: str):
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"{name} = {x} is outside [0, 1]")


def bernoulli_product(ps) -> SourceDistribution:
    """Independent binary components with p(M_j = 1) = ps[j]."""
    table = np.ones(())
    for j, p in enumerate(ps):
        _check_prob(p, f"ps[{j}]")
        table = np.multiply.outer(table, np.array([1.0 - p, p]))
    return _source(table, [2] * len(ps))


def indep_bern_probs(eps: float = 0.05) -> tuple[float, float, float]:
    return (2 / 3, 2 / 3 + eps, 2 / 3 + 2 * eps)


def three_feature_mixture(eps: float = 0.05, alpha: float = 0.0) -> SourceDistribution:
    """p(ijk) = p(M1=i) [(1 - alpha) p(M2=j) p(M3=k) + (alpha / 2) delta_jk]."""
    _check_prob(alpha, "alpha")
    p1, p2, p3 = indep_bern_probs(eps)
    for name, p in (("p1", p1), ("p2", p2), ("p3", p3)):
        _check_prob(p, name)
    m1 = np.array([1 - p1, p1])
    pair = (1 - alpha) * np.outer([1 - p2, p2], [1 - p3, p3]) + (alpha / 2) * np.eye(2)
    return _source(np.multiply.outer(m1, pair), [2, 2, 2])


def zipf(n: int, exponent: float = 1.0) -> SourceDistribution:
    """p(rank r) proportional to r^-exponent, where rank = index + 1."""
    if n < 1:
        raise ValidationError("zipf needs at least one outcome")
    if exponent <= 0:
        raise ValidationError("zipf exponent must be positive")
    w = np.arange(1, n + 1, dtype=float) ** -exponent
    return SourceDistribution(w / w.sum())


def _zipf_block(k: int, card: int = 5) -> np.ndarray:
    """Zipf over card**k outcomes ranked by mixed-radix index, shaped (card,)*k."""
    return zipf(card ** k).probabilities.reshape((card,) * k)


def hierarchical_source(alpha: float = 0.01, beta: float = 0.20, gamma: float = 0.99) -> SourceDistribution:
    """Six 5-ary components with couplings {1,2} < {1,2,3} and {4,5} < {4,5,6}.

    p = alpha q(M1..M6) + (1 - alpha) g(M1, M2, M3) g(M4, M5, M6) with
    g(x, y, z) = beta q(x, y, z) + (1 - beta) [gamma q(x, y) + (1 - gamma) q(x) q(y)] q(z),
    every q a Zipf distribution over its own outcome space.
    """
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        _check_prob(v, name)
    q1, q2, q3, q6 = (_zipf_block(k) for k in (1, 2, 3, 6))
    pair = gamma * q2 + (1 - gamma) * np.multiply.outer(q1, q1)
    group = beta * q3 + (1 - beta) * np.multiply.outer(pair, q1)
    table = alpha * q6 + (1 - alpha) * np.multiply.outer(group, group)
    return _source(table, [5] * 6)


@dataclass(frozen=True)
class TwoFeatureSpec:
    a: float  # p(M1 = 1)
    b: float  # p(M2 = 1)
    r: float  # Pearson correlation


def two_feature_cells(spec: TwoFeatureSpec) -> np.ndarray:
    a, b, r = spec.a, spec.b, spec.r
    if not (0 < a < 1 and 0 < b < 1):
        raise ValidationError("two-feature marginals must lie strictly inside (0, 1)")
    p11 = a * b + r * math.sqrt(a * (1 - a) * b * (1 - b))
    p10 = a - p11
    p01 = b - p11
    p00 = 1 - a - b + p11
    return np.array([[p00, p01], [p10, p11]])


def two_feature_joint(spec: TwoFeatureSpec) -> SourceDistribution:
    """Source over (M1, M2) in {0,1}^2 with the given marginals and correlation."""
    cells = two_feature_cells(spec)
    if np.any(cells < -CELL_TOL) or np.any(cells > 1 + CELL_TOL):
        raise ValidationError(f"infeasible two-feature source {spec}: cells {cells.ravel().tolist()}")
    return _source(np.clip(cells, 0.0, 1.0), [2, 2])


def simplex_grid(marginals, correlations):
    """Feasible (spec, source) pairs over marginals x marginals x correlations.

    Returns (feasible, skipped), skipped holding the infeasible specs.
    """
    feasible, skipped = [], []
    for a in marginals:
        for b in marginals:
            for r in correlations:
                spec = TwoFeatureSpec(float(a), float(b), float(r))
                try:
                    feasible.append((spec, two_feature_joint(spec)))
                except ValidationError:
                    skipped.append(spec)
    return feasible, skipped
