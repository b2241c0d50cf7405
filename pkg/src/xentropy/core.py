"""Domain types shared by every other module: alphabets, forms, sources, languages."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Union

import numpy as np

DEFAULT_DELIMITER = "#"
PROB_TOL = 1e-12

Form = tuple[str, ...]
FormLike = Union[str, Sequence[str]]


class ValidationError(ValueError):
    """Raised when an input violates a domain invariant."""


def as_form(value: FormLike) -> Form:
    """Coerce a string (one token per character) or a token sequence to a Form."""
    if isinstance(value, str):
        return tuple(value)
    return tuple(str(tok) for tok in value)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]
    delimiter: str = DEFAULT_DELIMITER

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if len(set(symbols)) != len(symbols):
            raise ValidationError("alphabet symbols must be distinct")
        if self.delimiter in symbols:
            raise ValidationError(f"delimiter {self.delimiter!r} is also an alphabet symbol")

    @classmethod
    def from_forms(cls, forms: Iterable[FormLike], delimiter: str = DEFAULT_DELIMITER) -> Alphabet:
        """Alphabet of every token seen in `forms`, in first-seen order."""
        seen: dict[str, None] = {}
        for form in forms:
            for tok in as_form(form):
                seen.setdefault(tok, None)
        seen.pop(delimiter, None)
        return cls(tuple(seen), delimiter)

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.symbols

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class FactoredSpace:
    """Mixed-radix product space; the first component is the most significant digit."""

    cardinalities: tuple[int, ...]

    def __post_init__(self):
        cards = tuple(int(c) for c in self.cardinalities)
        if not cards or any(c < 1 for c in cards):
            raise ValidationError("cardinalities must be a non-empty list of positive integers")
        object.__setattr__(self, "cardinalities", cards)

    @property
    def size(self) -> int:
        return int(np.prod(self.cardinalities, dtype=np.int64))

    @property
    def num_components(self) -> int:
        return len(self.cardinalities)

    def encode(self, values: Sequence[int]) -> int:
        if len(values) != len(self.cardinalities):
            raise ValidationError("meaning tuple has the wrong number of components")
        index = 0
        for v, c in zip(values, self.cardinalities):
            if not 0 <= v < c:
                raise ValidationError(f"component value {v} out of range 0..{c - 1}")
            index = index * c + int(v)
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise ValidationError(f"meaning index {index} out of range")
        out = []
        for c in reversed(self.cardinalities):
            index, v = divmod(index, c)
            out.append(v)
        return tuple(reversed(out))

    def meanings(self) -> np.ndarray:
        """All meaning tuples as an (size, K) integer array, row i decoding index i."""
        grids = np.indices(self.cardinalities).reshape(len(self.cardinalities), -1)
        return grids.T.copy()


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SourceDistribution:
    probabilities: np.ndarray
    factored: FactoredSpace | None = None

    def __post_init__(self):
        p = _frozen_array(self.probabilities).reshape(-1)
        p.setflags(write=False)
        if p.size == 0:
            raise ValidationError("source distribution is empty")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValidationError("source probabilities must be finite and non-negative")
        if abs(float(np.sum(p)) - 1.0) > PROB_TOL:
            raise ValidationError(f"source probabilities sum to {np.sum(p)!r}, not 1")
        if self.factored is not None and self.factored.size != p.size:
            raise ValidationError("factored space size does not match the number of meanings")
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def uniform(cls, n: int, factored: FactoredSpace | None = None) -> SourceDistribution:
        return cls(np.full(n, 1.0 / n), factored)

    @property
    def size(self) -> int:
        return int(self.probabilities.size)

    def joint_table(self) -> np.ndarray:
        """Probabilities reshaped to the factored component axes."""
        if self.factored is None:
            raise ValidationError("source has no factored structure")
        return self.probabilities.reshape(self.factored.cardinalities)


@dataclass(frozen=True, eq=False)
class Language:
    alphabet: Alphabet
    forms: tuple[Form, ...]

    @property
    def size(self) -> int:
        return len(self.forms)

    def is_bijective(self) -> bool:
        return len(set(self.forms)) == len(self.forms)

    def form_lengths(self) -> list[int]:
        return [len(f) for f in self.forms]

    def reversed(self) -> Language:
        return Language(self.alphabet, tuple(f[::-1] for f in self.forms))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Language):
            return NotImplemented
        return self.forms == other.forms and self.alphabet == other.alphabet

    def __hash__(self) -> int:
        return hash(self.forms)


@dataclass(frozen=True, eq=False)
class FormDistribution:
    entries: Mapping[Form, float] = field(default_factory=dict)

    def __post_init__(self):
        entries = {as_form(k): float(v) for k, v in dict(self.entries).items()}
        if not entries:
            raise ValidationError("form distribution is empty")
        if any(v < 0 or not np.isfinite(v) for v in entries.values()):
            raise ValidationError("form probabilities must be finite and non-negative")
        if any(len(k) == 0 for k in entries):
            raise ValidationError("forms must contain at least one token")
        total = sum(entries.values())
        if abs(total - 1.0) > PROB_TOL:
            raise ValidationError(f"form probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "entries", MappingProxyType(entries))

    def items(self):
        return self.entries.items()

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def max_length(self) -> int:
        return max(len(f) for f in self.entries)

    def reversed(self) -> FormDistribution:
        return FormDistribution({f[::-1]: p for f, p in self.entries.items()})


def make_language(forms: Iterable[FormLike], alphabet: Alphabet | None = None) -> Language:
    """Validate `forms` against `alphabet`; list order defines meaning indices.

    Strings are split into characters, so ``"ac"`` is the two-token form ``("a", "c")``.
    When no alphabet is given one is inferred from the forms.
    """
    forms = [as_form(f) for f in forms]
    if not forms:
        raise ValidationError("a language needs at least one form")
    if alphabet is None:
        alphabet = Alphabet.from_forms(forms)
    for i, form in enumerate(forms):
        if not form:
            raise ValidationError(f"form {i} is empty")
        for tok in form:
            if tok == alphabet.delimiter:
                raise ValidationError(f"form {i} {''.join(form)!r} contains the delimiter")
            if tok not in alphabet:
                raise ValidationError(f"form {i} uses unknown symbol {tok!r}")
    return Language(alphabet, tuple(forms))


def form_distribution(language: Language, source: SourceDistribution) -> FormDistribution:
    """Push the source through the language, merging meanings that share a form."""
    if language.size != source.size:
        raise ValidationError(
            f"language has {language.size} forms but the source has {source.size} meanings")
    acc: dict[Form, list[float]] = {}
    for form, p in zip(language.forms, source.probabilities):
        if p > 0:
            acc.setdefault(form, []).append(float(p))
    entries = {f: float(np.sum(ps)) for f, ps in acc.items()}
    # renormalize away drift from summing many tiny terms
    total = sum(entries.values())
    return FormDistribution({f: p / total for f, p in entries.items()})


def normalize_counts(counts: Mapping, smoothing: float = 0.0) -> dict:
    """Additive smoothing: p(k) = (count(k) + smoothing) / sum(count + smoothing)."""
    if not counts:
        raise ValidationError("no counts to normalize")
    if smoothing < 0:
        raise ValidationError("smoothing must be non-negative")
    values = {}
    for k, c in counts.items():
        c = float(c)
        if not np.isfinite(c) or c < 0:
            raise ValidationError(f"count for {k!r} must be finite and non-negative")
        values[k] = c + smoothing
    total = sum(values.values())
    if total <= 0:
        raise ValidationError("all counts are zero and no smoothing was given")
    return {k: v / total for k, v in values.items()}
