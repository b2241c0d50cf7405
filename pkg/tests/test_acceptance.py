"""Acceptance criteria 1-12, each at its stated tolerance.

Every test records a verdict through the ``acceptance`` fixture; the run ends with
one PASS/FAIL line per criterion in the "acceptance criteria" summary section.
"""

import itertools
import math
import random
import time
from collections import Counter

import numpy as np
import pytest
from conftest import random_form_distribution

from xentropy import cli
from xentropy.codes import (PositionPermutation, apply_permutation, is_contiguous,
                            is_well_nested, permute_assignment)
from xentropy.core import Alphabet, FactoredSpace, Language, SourceDistribution, form_distribution, make_language
from xentropy.corpus import (extract_adjective_noun_pairs, extract_noun_phrases, extract_verb_object_pairs,
                             pair_language, paradigm_source, parse_conllu, parse_np_counts, parse_pair_counts,
                             parse_paradigm, parse_wordlist, wordlist_source)
from xentropy.data import fixture_path
from xentropy.entropy import entropy_profile, excess_entropy_window_oracle
from xentropy.infotheory import length2_analysis, length3_analysis
from xentropy.simulations import (DEFAULT_ALPHAS, HIERARCHY_GROUPS, LOCALITY_BLOCKS, TIE_TOL, sim_correlated,
                                  sim_hierarchy, sim_locality, sim_systematicity, sweep_two_feature)
from xentropy.studies import compare_baselines, phonotactics_triple

TOL = 1e-9


def _fixture_lines(name):
    with open(fixture_path(name), encoding="utf-8") as fh:
        return fh.readlines()


def _random_source(rng: random.Random, n: int, cards=None) -> SourceDistribution:
    w = np.array([rng.random() + 1e-3 for _ in range(n)])
    return SourceDistribution(w / w.sum(), FactoredSpace(cards) if cards else None)


def test_criterion_01_length2_closed_form(acceptance):
    rng = random.Random(1)
    sources = [_random_source(rng, 4) for _ in range(50)]
    grid = ["ac", "ad", "bc", "bd"]
    alphabet = Alphabet.from_forms(grid)
    start = time.perf_counter()
    worst = 0.0
    for source in sources:
        for perm in itertools.permutations(grid):
            lang = make_language(perm, alphabet)
            fd = form_distribution(lang, source)
            e = entropy_profile(fd).excess_entropy
            worst = max(worst, abs(e - length2_analysis(lang, source)["predicted_E"]))
    elapsed = time.perf_counter() - start
    # the closed form's constants are checked against the independent oracle
    oracle_gap = max(abs(excess_entropy_window_oracle(form_distribution(make_language(p, alphabet), s))
                         - length2_analysis(make_language(p, alphabet), s)["predicted_E"])
                     for s in sources[:5] for p in itertools.permutations(grid))
    ok = worst <= TOL and oracle_gap <= TOL and elapsed < 1.0
    acceptance(1, ok, f"1200 languages, max |E - closed form| = {worst:.2e}, "
                      f"oracle gap {oracle_gap:.2e}, {elapsed:.2f}s")
    assert ok


def _random_length3_language(rng: random.Random) -> Language:
    pools = ["abc", "def", "ghi"]
    sizes = [rng.choice((2, 3)) for _ in pools]
    if math.prod(sizes) < 8:
        sizes = [2, 2, 2]
    cells = list(itertools.product(*(pool[:k] for pool, k in zip(pools, sizes))))
    return make_language(rng.sample(cells, 8))


def test_criterion_02_length3_closed_form(acceptance):
    rng = random.Random(2)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        lang = _random_length3_language(rng)
        source = _random_source(rng, 8)
        e = entropy_profile(form_distribution(lang, source)).excess_entropy
        worst = max(worst, abs(e - length3_analysis(lang, source)["predicted_E"]))

    lang, source = _random_length3_language(rng), _random_source(rng, 8)
    ref_e = entropy_profile(form_distribution(lang, source)).excess_entropy
    ref_i13 = length3_analysis(lang, source)["i13"]
    delta_gap = 0.0
    for mapping in itertools.permutations(range(3)):
        moved = apply_permutation(lang, PositionPermutation(mapping))
        e = entropy_profile(form_distribution(moved, source)).excess_entropy
        i13 = length3_analysis(moved, source)["i13"]
        delta_gap = max(delta_gap, abs((e - ref_e) - (i13 - ref_i13) / 4))
    elapsed = time.perf_counter() - start
    ok = worst <= TOL and delta_gap <= TOL and elapsed < 5.0
    acceptance(2, ok, f"500 languages, max |E - closed form| = {worst:.2e}; "
                      f"order shifts max |dE - dI13/4| = {delta_gap:.2e}; {elapsed:.2f}s")
    assert ok


@pytest.fixture(scope="module")
def systematicity_run():
    start = time.perf_counter()
    result = sim_systematicity(eps=0.05, threads=1)
    return result, time.perf_counter() - start


def test_criterion_03_minimal_set_is_the_systematic_languages(acceptance, systematicity_run):
    result, elapsed = systematicity_run
    s = result.summary
    ok = (s["min_set_size"] == 48 and s["min_set_degrees"] == {3: 48}
          and s["degree_counts"].get(3) == 48 and elapsed < 30.0)
    acceptance(3, ok, f"minimal set {s['min_set_size']} languages with degrees {s['min_set_degrees']}, "
                      f"{s['degree_counts'].get(3)} degree-3 languages overall, {elapsed:.1f}s")
    assert ok


def test_criterion_04_holistic_count(acceptance, systematicity_run):
    result, _ = systematicity_run
    count = result.summary["holistic_count"]
    ok = count == 5125
    acceptance(4, ok, f"degree-0 languages: {count} (expected 5125); "
                      f"degree counts {result.summary['degree_counts']}")
    assert ok, f"holistic count {count} != 5125"


def test_criterion_05_correlated_crossover(acceptance):
    rows = sim_correlated(DEFAULT_ALPHAS, eps=0.05, holistic_samples=0).rows
    small, large = rows[0], rows[-1]
    crossover = small["local"] < small["natural"] - TOL and large["natural"] < large["local"] - TOL
    bad_unnatural = [r["alpha"] for r in rows if r["alpha"] > 0 and r["unnatural"] < r["natural"] - TOL]
    bad_nonlocal = [r["alpha"] for r in rows if r["nonlocal"] < r["local"] - TOL]
    ok = crossover and not bad_unnatural and not bad_nonlocal
    acceptance(5, ok, f"crossover {crossover}; unnatural < natural at alpha {bad_unnatural}; "
                      f"nonlocal < local at alpha {bad_nonlocal}")
    assert ok


@pytest.mark.slow
def test_criterion_06_locality(acceptance):
    start = time.perf_counter()
    result = sim_locality(seed=0, threads="auto")
    elapsed = time.perf_counter() - start
    values = np.array([r["excess_entropy"] for r in result.rows])
    contiguous = np.array([r["is_contiguous"] for r in result.rows])
    winners = np.flatnonzero(values <= values.min() + TIE_TOL)
    perms = [tuple(map(int, result.rows[i]["permutation"].split())) for i in winners]
    argmin_ok = all(is_contiguous(PositionPermutation(p), LOCALITY_BLOCKS) for p in perms)
    overlap = values[~contiguous].min() < values[contiguous].max() - TIE_TOL
    ok = argmin_ok and overlap and elapsed < 600
    acceptance(6, ok, f"{len(winners)} minimizer(s), all contiguous: {argmin_ok}; "
                      f"a non-contiguous order beats a contiguous one: {overlap}; {elapsed:.0f}s")
    assert ok


@pytest.mark.slow
def test_criterion_07_hierarchy(acceptance):
    start = time.perf_counter()
    result = sim_hierarchy(threads="auto")
    elapsed = time.perf_counter() - start
    values = np.array([r["excess_entropy"] for r in result.rows])
    winners = np.flatnonzero(values <= values.min() + TIE_TOL)
    perms = [tuple(map(int, result.rows[i]["permutation"].split())) for i in winners]
    nested = all(is_well_nested(PositionPermutation(p), HIERARCHY_GROUPS) for p in perms)
    ok = nested and elapsed < 1800
    acceptance(7, ok, f"{len(winners)} minimizer(s) of 720, all well-nested: {nested}; {elapsed:.0f}s")
    assert ok


def test_criterion_08_uniform_independent_tie(acceptance):
    (best,) = sweep_two_feature([0.5], [0.0]).summary["best_by_class"]
    holistic = min(best["min_cnot12"], best["min_cnot21"])
    gap = abs(best["min_systematic"] - holistic)
    ok = gap <= TOL
    acceptance(8, ok, f"a=b=1/2, r=0: systematic {best['min_systematic']:.12f}, "
                      f"holistic {holistic:.12f}, gap {gap:.1e}")
    assert ok


VERIFY_RUNS = (
    ["sim", "correlated", "--table-source"],
    ["sim", "correlated", "--alphas", "0,0.5,1", "--holistic-samples", "20"],
    ["sweep", "two-feature", "--marginals", "0.5,0.75", "--correlations=-0.5,0,0.5"],
    ["analyze", "phonotactics", "--input", "fixture:cv-lexicon"],
    ["analyze", "morphology", "--input", "fixture:hungarian", "--samples", "50"],
    ["analyze", "adjnoun", "--input", "fixture:german-np", "--samples", "50"],
    ["analyze", "np-order", "--input", "fixture:german-np-counts"],
)


def test_criterion_09_oracle_equivalence(acceptance, capsys, rng):
    worst = 0.0
    for _ in range(200):
        fd = random_form_distribution(rng, max_forms=10, max_len=5)
        worst = max(worst, abs(entropy_profile(fd).excess_entropy - excess_entropy_window_oracle(fd)))
    codes = []
    for argv in VERIFY_RUNS:
        codes.append(cli.main(argv + ["--verify"]))
        capsys.readouterr()
    ok = worst <= TOL and all(c == 0 for c in codes)
    acceptance(9, ok, f"200 random languages, max |E - window MI| = {worst:.2e}; "
                      f"{sum(c == 0 for c in codes)}/{len(codes)} CLI runs pass --verify")
    assert ok


def _fixture_distributions():
    out = {}
    wl = parse_wordlist(_fixture_lines("cv-lexicon"))
    out["cv-lexicon"] = form_distribution(*reversed(wordlist_source(wl)))
    src, lang = paradigm_source(parse_paradigm(_fixture_lines("hungarian")))
    out["hungarian"] = form_distribution(lang, src)
    sentences = parse_conllu(_fixture_lines("german-np"))
    for name, counts in (("german-np verb-object", extract_verb_object_pairs(sentences)),
                         ("german-np adjective-noun", extract_adjective_noun_pairs(sentences)),
                         ("pairs", parse_pair_counts(_fixture_lines("pairs")))):
        src, lang = pair_language(counts)
        out[name] = form_distribution(lang, src)
    return out


def _np_order_gaps(counts: Counter) -> float:
    from xentropy.corpus import np_order_distributions
    from xentropy.core import FormDistribution

    values = {}
    for label, entries in np_order_distributions(counts):
        total = sum(entries.values())
        values[label] = entropy_profile(FormDistribution({f: p / total for f, p in entries.items()})).excess_entropy
    return max(abs(v - values["-".join(reversed(k.split("-")))]) for k, v in values.items())


def test_criterion_10_time_reversal(acceptance):
    gaps = {name: abs(entropy_profile(fd).excess_entropy - entropy_profile(fd.reversed()).excess_entropy)
            for name, fd in _fixture_distributions().items()}
    gaps["german-np-counts 24 orders"] = _np_order_gaps(parse_np_counts(_fixture_lines("german-np-counts")))
    gaps["german-np extracted 24 orders"] = _np_order_gaps(
        extract_noun_phrases(parse_conllu(_fixture_lines("german-np"))))
    worst = max(gaps.values())
    ok = worst <= TOL
    acceptance(10, ok, f"{len(gaps)} fixture systems, max reversal gap {worst:.2e}")
    assert ok


def test_criterion_11_length_preserving_shuffles_keep_rate(acceptance):
    systems = []
    wl = parse_wordlist(_fixture_lines("cv-lexicon"))
    src, lang = wordlist_source(wl, uniform=False)
    systems.append((lang, src))
    src, lang = paradigm_source(parse_paradigm(_fixture_lines("hungarian")))
    systems.append((lang, src))
    worst, draws = 0.0, 0
    for lang, src in systems:
        h0 = entropy_profile(form_distribution(lang, src)).entropy_rate
        for seed in range(100):
            moved = permute_assignment(lang, src, seed, length_preserving=True)
            worst = max(worst, abs(entropy_profile(form_distribution(moved, src)).entropy_rate - h0))
            draws += 1
    ok = worst <= 1e-12
    acceptance(11, ok, f"{draws} shuffles, max |dh| = {worst:.1e}")
    assert ok


def test_criterion_12_corpus_substitutes(acceptance, capsys, tmp_path):
    wl = parse_wordlist(_fixture_lines("cv-lexicon"))
    triple = phonotactics_triple("cv-lexicon", wl, seed=0)
    ordering = triple["real"] < triple["manner"] < triple["shuffled"]

    src, lang = paradigm_source(parse_paradigm(_fixture_lines("hungarian")))
    study = compare_baselines("hungarian", lang, src, ["nonsyst-lenpres"], seed=0, samples=1000)
    draws = study.draws["nonsyst-lenpres"]
    fifth = float(np.percentile(draws, 5))
    below = study.real.excess_entropy < fifth

    # user-supplied WOLEX-style wordlists: one triple per language
    files = []
    for name, words in (("alpha", "pata\tPVPV\ntika\tPVPV\nmana\tNVNV\nkupi\tPVPV\n"),
                        ("beta", "sal\tFVN\nfun\tFVN\nsap\tFVP\n")):
        path = tmp_path / f"{name}.tsv"
        path.write_text("".join(f"{w.split(chr(9))[0]}\t1\t{w.split(chr(9))[1]}\n" for w in words.splitlines()),
                        encoding="utf-8")
        files += ["--input", str(path)]
    code = cli.main(["analyze", "phonotactics"] + files)
    out = capsys.readouterr().out.splitlines()
    header = out[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in out[1:]]
    triples = (code == 0 and header == ["language", "real", "manner", "shuffled"]
               and [r["language"] for r in rows] == ["alpha", "beta"]
               and all(float(r["real"]) >= 0 and r["manner"] and r["shuffled"] for r in rows))

    ok = ordering and below and triples
    acceptance(12, ok, f"lexicon real {triple['real']:.4f} < manner {triple['manner']:.4f} "
                       f"< shuffled {triple['shuffled']:.4f}: {ordering}; Hungarian real "
                       f"{study.real.excess_entropy:.4f} vs 5th percentile {fifth:.4f}: {below}; "
                       f"per-language triples emitted: {triples}")
    assert ok

