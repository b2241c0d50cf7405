"""Discrete information measures over small dense joint tables.

Sign convention for interaction information: I[X1:X2:X3] = I[X1:X2] - I[X1:X2|X3],
so a positive value means redundancy and a negative value means synergy.

The length-2 and length-3 analyses give closed forms for the excess entropy of
bijective codes whose positions draw from disjoint alphabets:

    length 2:  E = log2(3) + I[X1:X2] / 3
    length 3:  E = 2 + (TC - I[X1:X2:X3] + I[X1:X3]) / 4
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import Language, SourceDistribution, ValidationError

INFO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class JointTable:
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.ndim < 1 or p.ndim > 6:
            raise ValidationError("joint tables cover 1 to 6 variables")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValidationError("joint probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError(f"joint probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def from_samples(cls, columns, weights, cardinalities=None) -> JointTable:
        """Weighted joint table of integer-valued columns."""
        columns = [np.asarray(c, dtype=np.int64) for c in columns]
        if cardinalities is None:
            cardinalities = [int(c.max()) + 1 for c in columns]
        table = np.zeros(cardinalities)
        np.add.at(table, tuple(columns), np.asarray(weights, dtype=float))
        return cls(table / table.sum())

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return self.probabilities.shape

    @property
    def arity(self) -> int:
        return self.probabilities.ndim

    def marginal(self, axes) -> np.ndarray:
        axes = tuple(axes)
        drop = tuple(i for i in range(self.arity) if i not in axes)
        m = self.probabilities.sum(axis=drop)
        # reorder to the requested axis order
        kept = [i for i in range(self.arity) if i in axes]
        return np.transpose(m, [kept.index(a) for a in axes])

    def permuted(self, order) -> JointTable:
        return JointTable(np.transpose(self.probabilities, order))


def _as_table(joint) -> JointTable:
    return joint if isinstance(joint, JointTable) else JointTable(joint)


def _check_arity(table: JointTable, k: int | None = None, at_least: int | None = None):
    if k is not None and table.arity != k:
        raise ValidationError(f"expected a joint table over {k} variables, got {table.arity}")
    if at_least is not None and table.arity < at_least:
        raise ValidationError(f"expected at least {at_least} variables, got {table.arity}")


def entropy(dist) -> float:
    """Shannon entropy in bits; 0 log 0 = 0."""
    p = np.asarray(dist, dtype=float).reshape(-1)
    p = p[p > 0]
    return max(-float(np.sum(p * np.log2(p))), 0.0)


def _h(table: JointTable, axes) -> float:
    return entropy(table.marginal(axes))


def mutual_information(joint) -> float:
    t = _as_table(joint)
    _check_arity(t, 2)
    p = t.probabilities
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / (px * py)[mask])))


def conditional_mutual_information(joint) -> float:
    """I[X1:X3 | X2] for a table over (X1, X2, X3)."""
    t = _as_table(joint)
    _check_arity(t, 3)
    p = t.probabilities
    p12 = p.sum(axis=2, keepdims=True)
    p23 = p.sum(axis=0, keepdims=True)
    p2 = p.sum(axis=(0, 2), keepdims=True)
    mask = p > 0
    num = np.broadcast_to(p * p2, p.shape)[mask]
    den = np.broadcast_to(p12 * p23, p.shape)[mask]
    return float(np.sum(p[mask] * np.log2(num / den)))


def total_correlation(joint) -> float:
    """Sum of marginal entropies minus the joint entropy."""
    t = _as_table(joint)
    _check_arity(t, at_least=2)
    singles = math.fsum(_h(t, [i]) for i in range(t.arity))
    return singles - entropy(t.probabilities)


def interaction_information(joint) -> float:
    """I[X1:X2:X3] = I[X1:X2] - I[X1:X2|X3]; positive is redundancy."""
    t = _as_table(joint)
    _check_arity(t, 3)
    i12 = mutual_information(t.marginal([0, 1]))
    i12_given_3 = conditional_mutual_information(t.permuted([0, 2, 1]))
    return i12 - i12_given_3


def pearson_binary(joint) -> float:
    """Pearson correlation of two binary variables from their 2x2 table."""
    t = _as_table(joint)
    _check_arity(t, 2)
    if t.cardinalities != (2, 2):
        raise ValidationError("pearson_binary needs a 2x2 table")
    p = t.probabilities
    a = p[1, :].sum()
    b = p[:, 1].sum()
    var = a * (1 - a) * b * (1 - b)
    if var <= 0:
        raise ValidationError("a marginal is degenerate (zero variance)")
    return float((p[1, 1] - a * b) / math.sqrt(var))


def position_joint(language: Language, source: SourceDistribution) -> JointTable:
    """Joint table of the symbols at each position, induced by the source."""
    lengths = set(language.form_lengths())
    if len(lengths) != 1:
        raise ValidationError("all forms must have the same length")
    (length,) = lengths
    columns = []
    for i in range(length):
        symbols = sorted({f[i] for f in language.forms})
        index = {s: k for k, s in enumerate(symbols)}
        columns.append([index[f[i]] for f in language.forms])
    return JointTable.from_samples(columns, source.probabilities)


def _check_disjoint_bijective(language: Language, length: int):
    if not language.is_bijective():
        raise ValidationError("language is not bijective")
    if set(language.form_lengths()) != {length}:
        raise ValidationError(f"all forms must have length {length}")
    per_position = [{f[i] for f in language.forms} for i in range(length)]
    for a, b in itertools.combinations(per_position, 2):
        if a & b:
            raise ValidationError("position alphabets are not disjoint")


def length2_analysis(language: Language, source: SourceDistribution) -> dict:
    _check_disjoint_bijective(language, 2)
    mi = mutual_information(position_joint(language, source))
    return {"mi": mi, "predicted_E": math.log2(3) + mi / 3}


def length3_analysis(language: Language, source: SourceDistribution) -> dict:
    _check_disjoint_bijective(language, 3)
    t = position_joint(language, source)
    tc = total_correlation(t)
    ii = interaction_information(t)
    i13 = mutual_information(t.marginal([0, 2]))
    return {"tc": tc, "ii": ii, "i13": i13, "predicted_E": 2.0 + (tc - ii + i13) / 4}
