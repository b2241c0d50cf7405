"""Enumerating, transforming and classifying codes (languages)."""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from . import prng
from .core import (Alphabet, FactoredSpace, Form, FormLike, Language, SourceDistribution,
                   ValidationError, as_form, make_language)

# Rows are meanings 000..111 (M1 M2 M3, M1 most significant) where 0 is the more
# probable value of every component.
CNOT_ADVANTAGE_PROBS = tuple(
    m1 * m23 for m1 in (2 / 3, 1 / 3) for m23 in (5 / 9, 1 / 9, 1 / 9, 2 / 9))
CNOT_ADVANTAGE_FORMS = {
    "local": ("aaa", "aab", "aba", "abb", "baa", "bab", "bba", "bbb"),
    "natural": ("aaa", "aab", "abb", "aba", "baa", "bab", "bbb", "bba"),
    "unnatural": ("aaa", "aab", "aba", "abb", "bba", "bbb", "baa", "bab"),
    "holistic": ("bba", "aaa", "baa", "bab", "aba", "bbb", "abb", "aab"),
}

# Rows are outcomes 00, 01, 10, 11 of (M1, M2).
TWO_SOURCES_PROBS = {
    "correlated": (3 / 8, 1 / 8, 1 / 8, 3 / 8),
    "anticorrelated": (0.0, 1 / 4, 1 / 4, 1 / 2),
}
TWO_SOURCES_FORMS = {
    "systematic": ("ac", "ad", "bc", "bd"),
    "cnot12": ("ac", "ad", "bd", "bc"),
    "cnot21": ("ac", "bd", "bc", "ad"),
}


@dataclass(frozen=True)
class PositionPermutation:
    """mapping[i] is the source position copied into output slot i."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValidationError(f"{mapping} is not a permutation of 0..{len(mapping) - 1}")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, n: int) -> PositionPermutation:
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.mapping)

    def inverse(self) -> PositionPermutation:
        inv = [0] * len(self.mapping)
        for slot, src in enumerate(self.mapping):
            inv[src] = slot
        return PositionPermutation(tuple(inv))

    def apply(self, form: Sequence) -> tuple:
        if len(form) != len(self.mapping):
            raise ValidationError(f"form of length {len(form)} cannot take a length-{len(self)} permutation")
        return tuple(form[src] for src in self.mapping)

    def image(self, positions) -> list[int]:
        """Output slots that receive the given source positions."""
        positions = set(positions)
        return sorted(slot for slot, src in enumerate(self.mapping) if src in positions)


@dataclass(frozen=True)
class SystematicityReport:
    degree: int
    matching: tuple[tuple[int, int], ...]


def enumerate_bijections(source: SourceDistribution, form_space: Sequence[FormLike],
                         alphabet: Alphabet | None = None) -> Iterator[Language]:
    """Every bijection meanings -> form_space, in lexicographic permutation order."""
    forms = [as_form(f) for f in form_space]
    if len(forms) != source.size:
        raise ValidationError(f"{len(forms)} forms for {source.size} meanings")
    if len(set(forms)) != len(forms):
        raise ValidationError("form space contains duplicates")
    alphabet = alphabet or Alphabet.from_forms(forms)
    for perm in itertools.permutations(forms):
        yield Language(alphabet, perm)


def product_forms(symbols: str | Sequence[str], length: int) -> list[Form]:
    """All forms of the given length over `symbols`, in lexicographic order."""
    return [tuple(p) for p in itertools.product(list(symbols), repeat=length)]


def _depends_on(language: Language, meanings: np.ndarray, i: int, j: int) -> bool:
    """Does the symbol at position i change when only component j changes?"""
    rest = np.delete(meanings, j, axis=1)
    seen: dict[tuple, str] = {}
    for key, form in zip(map(tuple, rest), language.forms):
        if seen.setdefault(key, form[i]) != form[i]:
            return True
    return False


def systematic_relation(language: Language, space: FactoredSpace,
                        exclusive: bool = True) -> set[tuple[int, int]]:
    """(component j, position i) pairs where position i injectively encodes m_j alone.

    With ``exclusive`` (the default) the pair also requires that no other position
    depends on m_j, so a component spread over several positions (as in a
    controlled-not block) is not counted as expressed systematically.
    """
    lengths = set(language.form_lengths())
    if len(lengths) != 1:
        raise ValidationError("systematicity needs forms of one fixed length")
    if space.size != language.size:
        raise ValidationError("factored space does not match the language size")
    (length,) = lengths
    meanings = space.meanings()
    rel = set()
    for j, card in enumerate(space.cardinalities):
        for i in range(length):
            seen: dict[int, str] = {}
            ok = True
            for m, form in zip(meanings[:, j], language.forms):
                if seen.setdefault(int(m), form[i]) != form[i]:
                    ok = False
                    break
            if not (ok and len(seen) == card and len(set(seen.values())) == card):
                continue
            if exclusive and any(_depends_on(language, meanings, k, j) for k in range(length) if k != i):
                continue
            rel.add((j, i))
    return rel


def _max_matching(rel: set[tuple[int, int]], n_left: int) -> list[tuple[int, int]]:
    owner: dict[int, int] = {}

    def augment(j: int, visited: set[int]) -> bool:
        for i in sorted(i for jj, i in rel if jj == j):
            if i in visited:
                continue
            visited.add(i)
            if i not in owner or augment(owner[i], visited):
                owner[i] = j
                return True
        return False

    for j in range(n_left):
        augment(j, set())
    return sorted((j, i) for i, j in owner.items())


def systematicity_degree(language: Language, space: FactoredSpace, exclusive: bool = True) -> SystematicityReport:
    """Size of a maximum matching between components and positions that express them."""
    rel = systematic_relation(language, space, exclusive)
    matching = _max_matching(rel, space.num_components)
    return SystematicityReport(len(matching), tuple(matching))


def systematicity_degrees_binary(form_bits: np.ndarray, meaning_bits: np.ndarray,
                                 exclusive: bool = True) -> np.ndarray:
    """Vectorized degree for batches of binary codes with as many positions as components.

    form_bits: (B, M, K) symbol bits per language/meaning/position.
    meaning_bits: (M, K) component bits per meaning, all 2^K rows present.
    """
    K = meaning_bits.shape[1]
    X = form_bits[:, :, :, None]            # B, M, i, 1
    Mj = meaning_bits[None, :, None, :]     # 1, M, 1, j
    same = np.all(X == Mj, axis=1)
    flipped = np.all(X != Mj, axis=1)
    rel = same | flipped                    # B, i, j
    if exclusive:
        row = {tuple(m): r for r, m in enumerate(meaning_bits.tolist())}
        depends = np.zeros(rel.shape, dtype=bool)
        for j in range(K):
            partner = [row[tuple(m[:j] + [1 - m[j]] + m[j + 1:])] for m in meaning_bits.tolist()]
            depends[:, :, j] = np.any(form_bits != form_bits[:, partner, :], axis=1)
        rel &= depends.sum(axis=1, keepdims=True) == 1
    best = np.zeros(form_bits.shape[0], dtype=np.int64)
    for sigma in itertools.permutations(range(K)):
        hits = sum(rel[:, sigma[j], j].astype(np.int64) for j in range(K))
        best = np.maximum(best, hits)
    return best


def count_holistic(symbols: str = "ab", length: int = 3, exclusive: bool = True) -> int:
    """Bijections from {0,1}^length meanings onto symbols^length with degree 0."""
    hist = degree_histogram(symbols, length, exclusive)
    return hist.get(0, 0)


def degree_histogram(symbols: str = "ab", length: int = 3, exclusive: bool = True) -> dict[int, int]:
    space = FactoredSpace((2,) * length)
    forms = np.array([[symbols.index(t) for t in f] for f in product_forms(symbols, length)])
    perms = np.array(list(itertools.permutations(range(len(forms)))))
    degrees = systematicity_degrees_binary(forms[perms], space.meanings(), exclusive)
    values, counts = np.unique(degrees, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def apply_permutation(language: Language, perm: PositionPermutation) -> Language:
    return Language(language.alphabet, tuple(perm.apply(f) for f in language.forms))


def _check_partition(blocks, n: int, what: str):
    flat = [p for b in blocks for p in b]
    if sorted(flat) != list(range(n)):
        raise ValidationError(f"{what} do not partition 0..{n - 1}")


def _contiguous(slots: list[int]) -> bool:
    return not slots or slots[-1] - slots[0] + 1 == len(slots)


def is_contiguous(perm: PositionPermutation, blocks) -> bool:
    """True iff every block of source positions lands on an unbroken run of slots."""
    blocks = [set(b) for b in blocks]
    _check_partition(blocks, len(perm), "blocks")
    return all(_contiguous(perm.image(b)) for b in blocks)


def is_well_nested(perm: PositionPermutation, groups) -> bool:
    """True iff every group of a laminar family maps to contiguous slots."""
    groups = [set(g) for g in groups]
    for g in groups:
        if any(p < 0 or p >= len(perm) for p in g):
            raise ValidationError(f"group {sorted(g)} has positions outside the form")
    for g, h in itertools.combinations(groups, 2):
        if g & h and not (g <= h or h <= g):
            raise ValidationError(f"groups {sorted(g)} and {sorted(h)} overlap without nesting")
    return all(_contiguous(perm.image(g)) for g in groups)


def seeded_shuffle(form: FormLike, seed: int) -> Form:
    """Shuffle token positions; every form of one length gets the same permutation."""
    form = as_form(form)
    return tuple(form[i] for i in prng.permutation(len(form), seed))


def class_preserving_shuffle(form: FormLike, classes: Sequence, seed: int) -> Form:
    """Shuffle tokens only among positions that share a class label."""
    form = as_form(form)
    classes = list(classes)
    if len(classes) != len(form):
        raise ValidationError(f"{len(classes)} class labels for a form of length {len(form)}")
    out = list(form)
    groups: dict = {}
    for pos, c in enumerate(classes):
        groups.setdefault(c, []).append(pos)
    for positions in groups.values():
        perm = prng.permutation(len(positions), seed)
        for slot, src in zip(positions, perm):
            out[slot] = form[positions[src]]
    return tuple(out)


def assignment_permutation(lengths: Sequence[int], seed: int, length_preserving: bool) -> list[int]:
    """Meaning -> original meaning index whose form it receives."""
    n = len(lengths)
    if not length_preserving:
        return prng.permutation(n, seed)
    result = list(range(n))
    groups: dict[int, list[int]] = {}
    for m, length in enumerate(lengths):
        groups.setdefault(length, []).append(m)
    for length in sorted(groups):
        members = groups[length]
        perm = prng.permutation(len(members), seed, length)
        for slot, src in zip(members, perm):
            result[slot] = members[src]
    return result


def permute_assignment(language: Language, source: SourceDistribution, seed: int,
                       length_preserving: bool = False) -> Language:
    """Reassign forms to meanings by a seeded permutation (within length classes if asked)."""
    if language.size != source.size:
        raise ValidationError("language and source sizes differ")
    perm = assignment_permutation(language.form_lengths(), seed, length_preserving)
    return Language(language.alphabet, tuple(language.forms[src] for src in perm))


def partition_language(space: FactoredSpace, partition, codebooks, alphabet: Alphabet | None = None) -> Language:
    """Concatenate per-block codewords, blocks in partition order.

    codebooks[b] maps the tuple of component values of block b to its string.
    """
    partition = [tuple(b) for b in partition]
    if len(codebooks) != len(partition):
        raise ValidationError("one codebook per block is required")
    _check_partition(partition, space.num_components, "blocks")
    books = []
    for block, book in zip(partition, codebooks):
        book = {tuple(k) if isinstance(k, (tuple, list)) else (k,): as_form(v) for k, v in book.items()}
        outcomes = list(itertools.product(*(range(space.cardinalities[c]) for c in block)))
        if sorted(book) != sorted(outcomes):
            raise ValidationError(f"codebook for block {block} does not cover its outcomes exactly")
        if len(set(book.values())) != len(book):
            raise ValidationError(f"codebook for block {block} is not injective")
        if len({len(v) for v in book.values()}) != 1:
            raise ValidationError(f"codebook for block {block} mixes string lengths")
        books.append(book)
    forms = []
    for m in space.meanings():
        parts = [books[b][tuple(int(m[c]) for c in block)] for b, block in enumerate(partition)]
        forms.append(tuple(tok for part in parts for tok in part))
    return make_language(forms, alphabet)


def _position_function(language: Language, i: int) -> tuple[int, ...]:
    symbols = sorted({f[i] for f in language.forms})
    return tuple(symbols.index(f[i]) for f in language.forms)


def classify_two_feature_code(language: Language) -> str:
    """systematic, cnot12, cnot21, or other for a length-2 code of two binary features.

    Meanings are ordered 00, 01, 10, 11.  cnot12 means M1 is expressed directly and
    the other position carries M1 xor M2 (M2 flipped whenever M1 = 1); cnot21
    swaps the roles.  Symbol labels at each position are irrelevant.
    """
    if language.size != 4:
        raise ValidationError("two-feature codes have exactly 4 meanings")
    if set(language.form_lengths()) != {2}:
        raise ValidationError("two-feature codes have forms of length 2")
    m1 = (0, 0, 1, 1)
    m2 = (0, 1, 0, 1)
    xor = (0, 1, 1, 0)

    def kind(bits):
        for name, ref in (("m1", m1), ("m2", m2), ("xor", xor)):
            if bits == ref or bits == tuple(1 - b for b in ref):
                return name
        return None

    kinds = {kind(_position_function(language, i)) for i in range(2)}
    if kinds == {"m1", "m2"}:
        return "systematic"
    if kinds == {"m1", "xor"}:
        return "cnot12"
    if kinds == {"m2", "xor"}:
        return "cnot21"
    return "other"


def random_lexicon(cardinalities: Sequence[int], seed: int, word_length: int = 4,
                   symbols: str = "01") -> list[list[Form]]:
    """Distinct random words per component value, rejection-sampled per component."""
    capacity = len(symbols) ** word_length
    lexicon = []
    for c, card in enumerate(cardinalities):
        if card > capacity:
            raise ValidationError(f"component {c} needs {card} words but only {capacity} exist")
        rng = prng.SplitMix64(prng.derive_seed(seed, c))
        words: list[Form] = []
        seen: set[Form] = set()
        while len(words) < card:
            word = tuple(symbols[rng.below(len(symbols))] for _ in range(word_length))
            if word not in seen:
                seen.add(word)
                words.append(word)
        lexicon.append(words)
    return lexicon


def word_language(space: FactoredSpace, lexicon_seed: int, word_length: int = 4,
                  symbols: str = "01") -> Language:
    """L(m1 x m2 x ...) = word(m1) . word(m2) . ... with a seeded random lexicon."""
    lexicon = random_lexicon(space.cardinalities, lexicon_seed, word_length, symbols)
    forms = [tuple(tok for c, v in enumerate(m) for tok in lexicon[c][int(v)]) for m in space.meanings()]
    return make_language(forms, Alphabet(tuple(symbols)))
