"""Corpus studies: real systems against deterministic and sampled baselines."""

from __future__ import annotations

import statistics
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import prng
from .codes import assignment_permutation, class_preserving_shuffle, seeded_shuffle
from .core import FormDistribution, Language, SourceDistribution, ValidationError, form_distribution
from .corpus import Wordlist, wordlist_source
from .entropy import entropy_profile, excess_entropies_from_arrays

SAMPLED_BASELINES = ("nonsyst", "nonsyst-lenpres")
FIXED_BASELINES = ("nonconcat", "class-shuffle")
ALL_BASELINES = ("nonconcat", "nonsyst", "nonsyst-lenpres", "class-shuffle")


@dataclass
class SystemRecord:
    """One evaluated system: the real one, a fixed baseline, or one draw of a sampled baseline."""

    system: str
    sample: int | None
    distribution: FormDistribution
    excess_entropy: float
    entropy_rate: float


def _evaluate(system: str, sample, fd: FormDistribution) -> SystemRecord:
    prof = entropy_profile(fd)
    return SystemRecord(system, sample, fd, prof.excess_entropy, prof.entropy_rate)


def shuffle_forms(language: Language, seed: int) -> Language:
    """Seeded position shuffle of every form (same permutation per length)."""
    return Language(language.alphabet, tuple(seeded_shuffle(f, seed) for f in language.forms))


def class_shuffle_forms(language: Language, classes: Sequence, seed: int) -> Language:
    forms = []
    for form, cls in zip(language.forms, classes):
        if cls is None:
            raise ValidationError(f"form {''.join(form)!r} has no class annotation")
        forms.append(class_preserving_shuffle(form, cls, seed))
    return Language(language.alphabet, tuple(forms))


def _assignment_draws(language: Language, source: SourceDistribution, seed: int, samples: int,
                      length_preserving: bool, batch: int = 200) -> np.ndarray:
    """Excess entropies of `samples` seeded reassignments; draw k uses derive_seed(seed, k)."""
    vocab: dict[str, int] = {}
    for form in language.forms:
        for tok in form:
            vocab.setdefault(tok, len(vocab) + 1)
    width = max(len(f) for f in language.forms)
    codes = np.zeros((language.size, width), dtype=np.int64)
    for row, form in enumerate(language.forms):
        codes[row, :len(form)] = [vocab[t] for t in form]
    lengths = np.array(language.form_lengths(), dtype=np.int64)
    perms = np.array([assignment_permutation(language.form_lengths(), prng.derive_seed(seed, k),
                                             length_preserving) for k in range(samples)], dtype=np.int64)
    out = [excess_entropies_from_arrays(codes[perms[a:b]], lengths[perms[a:b]], source.probabilities)
           for a in range(0, samples, batch) for b in [min(a + batch, samples)]]
    return np.concatenate(out) if out else np.zeros(0)


def p_value(real: float, draws: Sequence[float], tol: float = 1e-12) -> float:
    """Fraction of draws strictly below the real value."""
    draws = np.asarray(draws, dtype=float)
    if draws.size == 0:
        raise ValidationError("no baseline draws")
    return float(np.mean(draws < real - tol))


@dataclass
class StudyResult:
    language: str
    real: SystemRecord
    fixed: list[SystemRecord]
    draws: dict[str, np.ndarray]

    def p_values(self) -> dict[str, float]:
        return {name: p_value(self.real.excess_entropy, d) for name, d in self.draws.items()}


def compare_baselines(name: str, language: Language, source: SourceDistribution, baselines: Sequence[str],
                      seed: int = 0, samples: int = 1000, classes=None) -> StudyResult:
    """Real system against each requested baseline."""
    unknown = set(baselines) - set(ALL_BASELINES)
    if unknown:
        raise ValidationError(f"unknown baselines {sorted(unknown)}")
    real = _evaluate("real", None, form_distribution(language, source))
    fixed, draws = [], {}
    for b in baselines:
        if b == "nonconcat":
            fixed.append(_evaluate(b, None, form_distribution(shuffle_forms(language, seed), source)))
        elif b == "class-shuffle":
            if classes is None:
                raise ValidationError("class-shuffle needs per-token classes")
            fixed.append(_evaluate(b, None, form_distribution(class_shuffle_forms(language, classes, seed), source)))
        else:
            draws[b] = _assignment_draws(language, source, seed, samples, b == "nonsyst-lenpres")
    return StudyResult(name, real, fixed, draws)


def phonotactics_triple(name: str, wordlist: Wordlist, seed: int = 0) -> dict:
    """Real, class-preserving (manner) and free shuffle excess entropies under a uniform source."""
    source, language = wordlist_source(wordlist, uniform=True)
    real = entropy_profile(form_distribution(language, source)).excess_entropy
    shuffled = entropy_profile(form_distribution(shuffle_forms(language, seed), source)).excess_entropy
    manner = None
    if all(c is not None for c in wordlist.classes):
        manner = entropy_profile(form_distribution(
            class_shuffle_forms(language, wordlist.classes, seed), source)).excess_entropy
    return {"language": name, "real": real, "manner": manner, "shuffled": shuffled}


def apply_class_map(wordlist: Wordlist, class_map: dict) -> Wordlist:
    """Fill class strings from a symbol -> class table."""
    classes = []
    for form in wordlist.forms:
        missing = [t for t in form if t not in class_map]
        if missing:
            raise ValidationError(f"no class for symbol(s) {sorted(set(missing))}")
        classes.append(tuple(class_map[t] for t in form))
    return Wordlist(wordlist.forms, wordlist.frequencies, classes)


def median(values) -> float:
    return float(statistics.median(values))
