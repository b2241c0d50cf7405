"""Readers for wordlists, paradigms, pair counts, CoNLL-U treebanks and semantic norms.

Every reader takes an iterable of text lines (an open file works) and raises
:class:`FormatError` carrying the line number of the offending input.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import prng
from .core import (Alphabet, Form, Language, SourceDistribution, ValidationError, make_language,
                   normalize_counts)
from .infotheory import entropy, mutual_information

ABSENT = None
ABSENT_MARKERS = {"", "_", "-", "---", "\u2014"}
NP_SLOTS = ("D", "N", "A", "n")  # determiner, numeral, adjective, noun


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.message = message
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass(frozen=True)
class TokenRecord:
    id: int
    form: str
    lemma: str
    upos: str
    feats: dict = field(default_factory=dict, hash=False, compare=True)
    head: int = 0
    deprel: str = "_"


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    words: tuple
    features: tuple[str, ...]
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int8)
        weights = np.asarray(self.weights, dtype=float)
        if values.shape != (len(self.words), len(self.features)):
            raise ValidationError("feature matrix shape does not match words x features")
        if not np.isin(values, (0, 1)).all():
            raise ValidationError("feature values must be 0 or 1")
        if weights.shape != (len(self.words),) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValidationError("word weights must be one probability per word")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)


def _data_lines(stream: Iterable[str]):
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def tokenize(text: str, whitespace: bool = False) -> Form:
    return tuple(text.split()) if whitespace else tuple(text)


def _parse_count(text: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(f"count {text!r} is not a number", lineno) from None
    if not math.isfinite(value) or value < 0:
        raise FormatError(f"count {text!r} must be finite and non-negative", lineno)
    return value


@dataclass
class Wordlist:
    forms: list[Form]
    frequencies: list[float]
    classes: list[tuple | None]


def parse_wordlist(stream: Iterable[str], whitespace: bool = False) -> Wordlist:
    """Read ``form<TAB>[count]<TAB>[classes]`` lines; duplicate forms add their counts.

    With ``whitespace=True`` forms are space-separated symbols (e.g. phonemes) and the
    class column is space-separated too; otherwise both are split into characters.
    """
    counts: dict[Form, float] = {}
    classes: dict[Form, tuple | None] = {}
    for lineno, line in _data_lines(stream):
        cols = line.split("\t")
        if len(cols) > 3:
            raise FormatError(f"expected at most 3 columns, got {len(cols)}", lineno)
        form = tokenize(cols[0].strip(), whitespace)
        if not form:
            raise FormatError("empty form", lineno)
        count = _parse_count(cols[1].strip(), lineno) if len(cols) > 1 and cols[1].strip() else 1.0
        cls = None
        if len(cols) > 2 and cols[2].strip():
            cls = tokenize(cols[2].strip(), whitespace)
            if len(cls) != len(form):
                raise FormatError(
                    f"class string has {len(cls)} labels for a form of {len(form)} symbols", lineno)
        counts[form] = counts.get(form, 0.0) + count
        if form in classes and classes[form] != cls and cls is not None and classes[form] is not None:
            raise FormatError("conflicting class strings for a repeated form", lineno)
        classes[form] = classes.get(form) or cls
    forms = list(counts)
    return Wordlist(forms, [counts[f] for f in forms], [classes[f] for f in forms])


def wordlist_source(wordlist: Wordlist, uniform: bool = True) -> tuple[SourceDistribution, Language]:
    """Source over wordlist entries (uniform by default) and the identity language."""
    n = len(wordlist.forms)
    if n == 0:
        raise ValidationError("wordlist is empty")
    if uniform:
        source = SourceDistribution.uniform(n)
    else:
        probs = normalize_counts(dict(enumerate(wordlist.frequencies)))
        source = SourceDistribution([probs[i] for i in range(n)])
    return source, make_language(wordlist.forms)


def parse_conllu(stream: Iterable[str]) -> list[list[TokenRecord]]:
    """Sentences of a CoNLL-U file; multiword ranges and empty nodes are skipped."""
    sentences: list[list[TokenRecord]] = []
    current: list[TokenRecord] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if current:
                sentences.append(current)
                current = []
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise FormatError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            continue
        try:
            ident = int(tok_id)
        except ValueError:
            raise FormatError(f"token id {tok_id!r} is not an integer", lineno) from None
        try:
            head = int(cols[6]) if cols[6] != "_" else 0
        except ValueError:
            raise FormatError(f"head {cols[6]!r} is not an integer", lineno) from None
        if ident < 1 or head < 0:
            raise FormatError("token ids start at 1 and heads are non-negative", lineno)
        feats = {}
        if cols[5] != "_":
            for item in cols[5].split("|"):
                if "=" not in item:
                    raise FormatError(f"malformed feature {item!r}", lineno)
                k, v = item.split("=", 1)
                feats[k] = v
        current.append(TokenRecord(ident, cols[1], cols[2], cols[3], feats, head, cols[7]))
    if current:
        sentences.append(current)
    return sentences


def serialize_conllu(sentences: Sequence[Sequence[TokenRecord]]) -> str:
    lines = []
    for sent in sentences:
        for tok in sent:
            feats = "|".join(f"{k}={v}" for k, v in sorted(tok.feats.items())) or "_"
            lines.append("\t".join([str(tok.id), tok.form, tok.lemma, tok.upos, "_", feats,
                                    str(tok.head), tok.deprel, "_", "_"]))
        lines.append("")
    return "\n".join(lines) + "\n"


def _base_rel(deprel: str) -> str:
    return deprel.split(":", 1)[0]


def _clean_lemma(lemma: str) -> str | None:
    lemma = lemma.casefold()
    if not any(ch.isalnum() for ch in lemma):
        return None
    return lemma


def extract_noun_phrases(sentences, seed: int = 0, stats: dict | None = None) -> Counter:
    """Count (det, num, adj, noun) lemma tuples, one per NOUN head.

    Several adjectives: one is kept by a seeded uniform draw.  Several determiners
    or numerals: the first by position is kept.  Absent slots hold None.  If
    `stats` is given, it receives how many phrases needed each kind of resolution.
    """
    if stats is not None:
        for key in ("multiple_det", "multiple_num", "multiple_amod"):
            stats.setdefault(key, 0)
    counts: Counter = Counter()
    noun_index = 0
    for sent in sentences:
        deps: dict[int, list[TokenRecord]] = {}
        for tok in sent:
            deps.setdefault(tok.head, []).append(tok)
        for tok in sent:
            if tok.upos != "NOUN":
                continue
            noun = _clean_lemma(tok.lemma)
            if noun is None:
                continue
            slots = {"det": [], "nummod": [], "amod": []}
            wanted = {"det": "DET", "nummod": "NUM", "amod": "ADJ"}
            for dep in sorted(deps.get(tok.id, []), key=lambda t: t.id):
                rel = _base_rel(dep.deprel)
                if rel in wanted and dep.upos == wanted[rel]:
                    lemma = _clean_lemma(dep.lemma)
                    if lemma is not None:
                        slots[rel].append(lemma)
            if stats is not None:
                for rel, key in (("det", "multiple_det"), ("nummod", "multiple_num"), ("amod", "multiple_amod")):
                    stats[key] += len(slots[rel]) > 1
            det = slots["det"][0] if slots["det"] else ABSENT
            num = slots["nummod"][0] if slots["nummod"] else ABSENT
            adjs = slots["amod"]
            if len(adjs) > 1:
                adj = adjs[prng.SplitMix64(prng.derive_seed(seed, noun_index)).below(len(adjs))]
            else:
                adj = adjs[0] if adjs else ABSENT
            counts[(det, num, adj, noun)] += 1
            noun_index += 1
    return counts


def extract_verb_object_pairs(sentences) -> Counter:
    """Count (verb lemma, object noun lemma) for VERB heads with a NOUN obj dependent."""
    counts: Counter = Counter()
    for sent in sentences:
        by_id = {tok.id: tok for tok in sent}
        for tok in sent:
            if _base_rel(tok.deprel) != "obj" or tok.upos != "NOUN":
                continue
            head = by_id.get(tok.head)
            if head is not None and head.upos == "VERB":
                counts[(head.lemma, tok.lemma)] += 1
    return counts


def extract_adjective_noun_pairs(sentences) -> Counter:
    """Count adjacent (word1, word2) wordform pairs of a NOUN and its amod ADJ, in surface order."""
    counts: Counter = Counter()
    for sent in sentences:
        by_id = {tok.id: tok for tok in sent}
        for tok in sent:
            if _base_rel(tok.deprel) != "amod" or tok.upos != "ADJ":
                continue
            head = by_id.get(tok.head)
            if head is None or head.upos != "NOUN" or abs(head.id - tok.id) != 1:
                continue
            pair = (tok.form, head.form) if tok.id < head.id else (head.form, tok.form)
            counts[pair] += 1
    return counts


def parse_pair_counts(stream: Iterable[str]) -> Counter:
    """``word1<TAB>word2<TAB>count`` lines."""
    counts: Counter = Counter()
    for lineno, line in _data_lines(stream):
        cols = line.split("\t")
        if len(cols) != 3:
            raise FormatError(f"expected 3 columns, got {len(cols)}", lineno)
        counts[(cols[0].strip(), cols[1].strip())] += _parse_count(cols[2].strip(), lineno)
    return counts


def parse_np_counts(stream: Iterable[str]) -> Counter:
    """``det<TAB>num<TAB>adj<TAB>noun<TAB>count`` lines, absent slots written as ``---`` or ``_``."""
    counts: Counter = Counter()
    for lineno, line in _data_lines(stream):
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) != 5:
            raise FormatError(f"expected 5 columns, got {len(cols)}", lineno)
        slots = tuple(None if c in ABSENT_MARKERS else c for c in cols[:4])
        if slots[3] is None:
            raise FormatError("noun slot cannot be empty", lineno)
        counts[slots] += _parse_count(cols[4], lineno)
    return counts


def pair_language(pair_counts: Counter, separator: str = " ") -> tuple[SourceDistribution, Language]:
    """Character-level forms ``word1 + separator + word2`` weighted by pair counts."""
    if not pair_counts:
        raise ValidationError("no pairs")
    keys = sorted(pair_counts)
    probs = normalize_counts({k: pair_counts[k] for k in keys})
    forms = [tuple(w1 + separator + w2) for w1, w2 in keys]
    return SourceDistribution([probs[k] for k in keys]), make_language(forms)


def np_order_distributions(np_counts: Counter):
    """(order label, form distribution entries) for all 24 orders of D, N, A, n.

    Words are atomic symbols; absent slots are dropped from the form.
    """
    import itertools

    if not np_counts:
        raise ValidationError("no noun phrases")
    total = float(sum(np_counts.values()))
    out = []
    for order in itertools.permutations(range(4)):
        entries: dict[Form, float] = {}
        for phrase, c in np_counts.items():
            form = tuple(phrase[i] for i in order if phrase[i] is not None)
            entries[form] = entries.get(form, 0.0) + c / total
        out.append(("-".join(NP_SLOTS[i] for i in order), entries))
    return out


def np_order_sweep(np_counts: Counter, reversal_tol: float = 1e-9) -> list[tuple[str, float]]:
    """Excess entropy of every D/N/A/n order; checks that reversed orders agree."""
    from .core import FormDistribution
    from .entropy import entropy_profile

    rows = []
    for label, entries in np_order_distributions(np_counts):
        total = sum(entries.values())
        fd = FormDistribution({f: p / total for f, p in entries.items()})
        rows.append((label, entropy_profile(fd).excess_entropy))
    values = dict(rows)
    for label, e in rows:
        rev = "-".join(reversed(label.split("-")))
        if abs(values[rev] - e) > reversal_tol:
            raise AssertionError(f"time-reversal asymmetry between {label} and {rev}")
    return rows


@dataclass
class Paradigm:
    feature_names: list[str]
    bundles: list[tuple[str, ...]]
    forms: list[Form]
    counts: list[float]


def parse_paradigm(stream: Iterable[str], whitespace: bool = False) -> Paradigm:
    """``feat1<TAB>...<TAB>form<TAB>count`` with a header row naming the columns."""
    header = None
    bundles, forms, counts = [], [], []
    seen = set()
    for lineno, line in _data_lines(stream):
        cols = [c.strip() for c in line.split("\t")]
        if header is None:
            if len(cols) < 3:
                raise FormatError("header needs at least one feature, form and count column", lineno)
            header = cols
            continue
        if len(cols) != len(header):
            raise FormatError(f"expected {len(header)} columns, got {len(cols)}", lineno)
        bundle = tuple(cols[:-2])
        if bundle in seen:
            raise FormatError(f"duplicate feature bundle {bundle}", lineno)
        seen.add(bundle)
        form = tokenize(cols[-2], whitespace)
        if not form:
            raise FormatError("empty form", lineno)
        bundles.append(bundle)
        forms.append(form)
        counts.append(_parse_count(cols[-1], lineno))
    if header is None or not bundles:
        raise FormatError("paradigm table is empty")
    return Paradigm(header[:-2], bundles, forms, counts)


def paradigm_source(paradigm: Paradigm, smoothing: float = 0.5) -> tuple[SourceDistribution, Language]:
    """Smoothed source over feature bundles and the aligned language of affix forms."""
    probs = normalize_counts(dict(zip(paradigm.bundles, paradigm.counts)), smoothing)
    source = SourceDistribution([probs[b] for b in paradigm.bundles])
    return source, make_language(paradigm.forms, Alphabet.from_forms(paradigm.forms))


def parse_norms(stream: Iterable[str]) -> tuple[list[str], list[str], np.ndarray]:
    """``word<TAB>feature1<TAB>...`` real-valued table with a header row."""
    header = None
    words, rows = [], []
    for lineno, line in _data_lines(stream):
        cols = [c.strip() for c in line.split("\t")]
        if header is None:
            if len(cols) < 2:
                raise FormatError("header needs a word column and at least one feature", lineno)
            header = cols
            continue
        if len(cols) != len(header):
            raise FormatError(f"expected {len(header)} columns, got {len(cols)}", lineno)
        try:
            rows.append([float(c) for c in cols[1:]])
        except ValueError:
            raise FormatError("norm values must be numbers", lineno) from None
        words.append(cols[0])
    if header is None or not words:
        raise FormatError("norms table is empty")
    return words, header[1:], np.array(rows, dtype=float)


def binarize_norms(raw: np.ndarray, words=None, features=None, weights=None) -> FeatureMatrix:
    """1 where a value strictly exceeds its feature's unweighted mean over words."""
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.size == 0:
        raise ValidationError("norms must be a non-empty word x feature matrix")
    n_words, n_feats = raw.shape
    values = (raw > raw.mean(axis=0, keepdims=True)).astype(np.int8)
    words = tuple(words) if words is not None else tuple(range(n_words))
    features = tuple(features) if features is not None else tuple(f"f{k}" for k in range(n_feats))
    if weights is None:
        weights = np.full(n_words, 1.0 / n_words)
    return FeatureMatrix(words, features, values, np.asarray(weights, dtype=float))


def pair_feature_matrix(fm: FeatureMatrix, pair_counts: Counter) -> FeatureMatrix:
    """Features of word 1 and word 2 side by side, rows weighted by pair frequency.

    Pairs with a word missing from `fm` are dropped.
    """
    index = {w: i for i, w in enumerate(fm.words)}
    rows, weights, names = [], [], []
    for (w1, w2), c in sorted(pair_counts.items()):
        if w1 in index and w2 in index and c > 0:
            rows.append(np.concatenate([fm.values[index[w1]], fm.values[index[w2]]]))
            weights.append(c)
            names.append((w1, w2))
    if not rows:
        raise ValidationError("no pair has both words in the feature matrix")
    weights = np.array(weights, dtype=float)
    features = tuple(f"{f}@1" for f in fm.features) + tuple(f"{f}@2" for f in fm.features)
    return FeatureMatrix(tuple(names), features, np.array(rows), weights / weights.sum())


def pairwise_feature_mi(fm: FeatureMatrix) -> np.ndarray:
    """Symmetric matrix of pairwise MI in bits; the diagonal holds feature entropies."""
    k = len(fm.features)
    out = np.zeros((k, k))
    w = fm.weights
    for i in range(k):
        xi = fm.values[:, i]
        out[i, i] = entropy([w[xi == 0].sum(), w[xi == 1].sum()])
        for j in range(i + 1, k):
            xj = fm.values[:, j]
            table = np.zeros((2, 2))
            np.add.at(table, (xi, xj), w)
            out[i, j] = out[j, i] = mutual_information(table / table.sum())
    return out


def sample_without_replacement(items: Sequence, k: int, seed: int) -> list:
    """Deterministic subset helper used by fixture generators."""
    rng = random.Random(seed)
    return rng.sample(list(items), k)
