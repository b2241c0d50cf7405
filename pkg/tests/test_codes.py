import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xentropy.codes import (CNOT_ADVANTAGE_FORMS, TWO_SOURCES_FORMS, PositionPermutation, apply_permutation,
                            class_preserving_shuffle, classify_two_feature_code, count_holistic,
                            degree_histogram, enumerate_bijections, is_contiguous, is_well_nested,
                            partition_language, permute_assignment, product_forms, random_lexicon,
                            seeded_shuffle, systematicity_degree, systematicity_degrees_binary,
                            word_language)
from xentropy.core import FactoredSpace, SourceDistribution, ValidationError, form_distribution, make_language
from xentropy.entropy import entropy_profile

SPACE3 = FactoredSpace((2, 2, 2))


def test_enumerate_bijections_counts_and_order():
    langs = list(enumerate_bijections(SourceDistribution.uniform(2), ["x", "y"]))
    assert [l.forms for l in langs] == [(("x",), ("y",)), (("y",), ("x",))]
    assert len(list(enumerate_bijections(SourceDistribution.uniform(1), ["x"]))) == 1
    assert sum(1 for _ in enumerate_bijections(SourceDistribution.uniform(8), product_forms("ab", 3))) == 40320
    with pytest.raises(ValidationError):
        list(enumerate_bijections(SourceDistribution.uniform(3), ["x", "y"]))


def test_table_degrees():
    degree = {k: systematicity_degree(make_language(v), SPACE3).degree for k, v in CNOT_ADVANTAGE_FORMS.items()}
    assert degree == {"local": 3, "natural": 1, "unnatural": 1, "holistic": 0}
    report = systematicity_degree(make_language(CNOT_ADVANTAGE_FORMS["local"]), SPACE3)
    assert report.matching == ((0, 0), (1, 1), (2, 2))


def test_degree_invariant_under_relabeling_and_position_permutation():
    lang = make_language(CNOT_ADVANTAGE_FORMS["natural"])
    relabeled = make_language(["".join({"a": "b", "b": "a"}[t] if i == 2 else t for i, t in enumerate(f))
                               for f in lang.forms])
    assert systematicity_degree(relabeled, SPACE3).degree == 1
    moved = apply_permutation(lang, PositionPermutation((2, 0, 1)))
    assert systematicity_degree(moved, SPACE3).degree == 1


def test_degree_histogram_partition_and_trivial_case():
    for exclusive in (True, False):
        hist = degree_histogram("ab", 3, exclusive)
        assert sum(hist.values()) == 40320
        assert hist[3] == 48
        assert count_holistic("ab", 1, exclusive) == 0
    # frozen from the first verified enumeration
    assert degree_histogram("ab", 3) == {0: 39984, 1: 288, 3: 48}
    assert degree_histogram("ab", 3, exclusive=False) == {0: 31056, 1: 8208, 2: 1008, 3: 48}


def test_non_exclusive_reading_counts_control_positions():
    lang = make_language(CNOT_ADVANTAGE_FORMS["natural"])
    assert systematicity_degree(lang, SPACE3, exclusive=False).degree == 2


def test_vectorized_degree_matches_scalar(rng):
    forms = product_forms("ab", 3)
    for _ in range(200):
        perm = list(range(8))
        rng.shuffle(perm)
        lang = make_language([forms[j] for j in perm])
        bits = np.array([[[t == "b" for t in f] for f in lang.forms]], dtype=int)
        for exclusive in (True, False):
            assert systematicity_degrees_binary(bits, SPACE3.meanings(), exclusive)[0] == \
                systematicity_degree(lang, SPACE3, exclusive).degree


def test_apply_permutation_interleave_and_inverse():
    lang = make_language(["00001111"])
    interleave = PositionPermutation((4, 0, 1, 2, 5, 6, 3, 7))
    assert "".join(apply_permutation(lang, interleave).forms[0]) == "10001101"
    assert apply_permutation(apply_permutation(lang, interleave), interleave.inverse()) == lang
    assert apply_permutation(lang, PositionPermutation.identity(8)) == lang
    with pytest.raises(ValidationError):
        PositionPermutation((0, 0, 1))


def test_contiguity():
    blocks = [range(4), range(4, 8)]
    assert is_contiguous(PositionPermutation.identity(8), blocks)
    assert is_contiguous(PositionPermutation((7, 6, 5, 4, 3, 2, 1, 0)), blocks)
    assert not is_contiguous(PositionPermutation((0, 4, 1, 5, 2, 6, 3, 7)), blocks)
    with pytest.raises(ValidationError):
        is_contiguous(PositionPermutation.identity(8), [range(4)])


def test_well_nestedness():
    groups = [{0, 1}, {3, 4}, {0, 1, 2}, {3, 4, 5}]
    assert is_well_nested(PositionPermutation.identity(6), groups)
    assert not is_well_nested(PositionPermutation((0, 3, 1, 4, 2, 5)), groups)
    assert is_well_nested(PositionPermutation((5, 4, 3, 2, 1, 0)), groups)
    with pytest.raises(ValidationError):
        is_well_nested(PositionPermutation.identity(6), [{0, 1}, {1, 2}])


def test_seeded_shuffle_goldens_and_contract():
    assert "".join(seeded_shuffle("fasted", 0)) == "fadtes"
    assert "".join(seeded_shuffle("fasted", 1)) == "adftes"
    assert seeded_shuffle("a", 99) == ("a",)
    # same permutation for every form of one length
    assert "".join(seeded_shuffle("abcdef", 0)) == "abfdec"


def test_class_preserving_shuffle_goldens_and_edges():
    assert "".join(class_preserving_shuffle("fasted", "CVCCVC", 0)) == "detsaf"
    assert "".join(class_preserving_shuffle("fasted", "CVCCVC", 4)) == "desfat"
    assert class_preserving_shuffle("fasted", "CCCCCC", 3) == seeded_shuffle("fasted", 3)
    assert class_preserving_shuffle("fasted", "abcdef", 3) == tuple("fasted")
    with pytest.raises(ValidationError):
        class_preserving_shuffle("abc", "CV", 0)


@settings(max_examples=80, deadline=None)
@given(st.text("ptkaiu", min_size=1, max_size=9), st.integers(0, 2 ** 64 - 1))
def test_class_shuffle_keeps_classes_and_tokens(word, seed):
    classes = ["V" if c in "aiu" else "C" for c in word]
    out = class_preserving_shuffle(word, classes, seed)
    assert sorted(out) == sorted(word)
    assert ["V" if c in "aiu" else "C" for c in out] == classes
    assert sorted(seeded_shuffle(word, seed)) == sorted(word)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.text("ab", min_size=1, max_size=4), min_size=1, max_size=8, unique=True),
       st.integers(0, 1000), st.randoms(use_true_random=False))
def test_length_preserving_assignment_keeps_entropy_rate(forms, seed, r):
    weights = [r.random() + 0.01 for _ in forms]
    total = math.fsum(weights)
    source = SourceDistribution([w / total for w in weights])
    lang = make_language(forms)
    shuffled = permute_assignment(lang, source, seed, length_preserving=True)
    assert shuffled.form_lengths() == lang.form_lengths()
    h0 = entropy_profile(form_distribution(lang, source)).entropy_rate
    h1 = entropy_profile(form_distribution(shuffled, source)).entropy_rate
    assert h1 == pytest.approx(h0, abs=1e-12)
    assert sorted(permute_assignment(lang, source, seed).forms) == sorted(lang.forms)


def test_permute_assignment_single_meaning_and_equal_lengths():
    lang = make_language(["abc"])
    assert permute_assignment(lang, SourceDistribution.uniform(1), 5, True) == lang
    lang4 = make_language(["ab", "ba", "aa", "bb"])
    src = SourceDistribution.uniform(4)
    # one length class: both modes draw from the full symmetric group
    outs = {permute_assignment(lang4, src, s, True).forms for s in range(200)}
    assert len(outs) == 24


def test_partition_language_reproduces_table_columns():
    ident = {(0,): "a", (1,): "b"}
    assert make_language(CNOT_ADVANTAGE_FORMS["local"]) == partition_language(SPACE3, [[0], [1], [2]], [ident] * 3)
    pair = {(0, 0): "aa", (0, 1): "ab", (1, 0): "bb", (1, 1): "ba"}
    assert partition_language(SPACE3, [[0], [1, 2]], [ident, pair]).forms == \
        make_language(CNOT_ADVANTAGE_FORMS["natural"]).forms
    assert partition_language(SPACE3, [[0, 1], [2]], [pair, ident]).forms == \
        make_language(CNOT_ADVANTAGE_FORMS["unnatural"]).forms
    with pytest.raises(ValidationError):
        partition_language(SPACE3, [[0], [1, 2]], [ident, {**pair, (1, 1): "aa"}])
    with pytest.raises(ValidationError):
        partition_language(SPACE3, [[0], [1]], [ident, ident])


def test_two_feature_classification():
    kinds = {k: classify_two_feature_code(make_language(v)) for k, v in TWO_SOURCES_FORMS.items()}
    assert kinds == {"systematic": "systematic", "cnot12": "cnot12", "cnot21": "cnot21"}
    # relabeling a position keeps the class
    assert classify_two_feature_code(make_language(["bd", "bc", "ac", "ad"])) == "cnot12"
    counts = {}
    for perm in itertools.permutations(["ac", "ad", "bc", "bd"]):
        c = classify_two_feature_code(make_language(perm))
        counts[c] = counts.get(c, 0) + 1
    assert counts == {"systematic": 8, "cnot12": 8, "cnot21": 8}
    with pytest.raises(ValidationError):
        classify_two_feature_code(make_language(["ab", "ba", "aa"]))


def test_word_language():
    space = FactoredSpace((10, 10))
    lang = word_language(space, 3)
    assert lang.size == 100 and set(lang.form_lengths()) == {8}
    lex = random_lexicon((10, 10), 3)
    assert all(len(set(words)) == 10 for words in lex)
    assert word_language(space, 3) == lang
    with pytest.raises(ValidationError):
        random_lexicon((17,), 0)
