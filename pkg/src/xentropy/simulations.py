"""Exhaustive simulations over code spaces: systematicity, correlated features,
locality, hierarchy, and the two-feature simplex sweep.

Every function returns plain row dicts plus a summary dict so the CLI can render
them as CSV or JSON.  Heavy enumerations are evaluated in batches, and batches can
be farmed out to worker processes without changing the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import prng
from .codes import (CNOT_ADVANTAGE_FORMS, CNOT_ADVANTAGE_PROBS, PositionPermutation,
                    classify_two_feature_code, is_contiguous, is_well_nested, product_forms,
                    systematicity_degree, systematicity_degrees_binary, word_language)
from .core import (FactoredSpace, FormDistribution, SourceDistribution, as_form, form_distribution,
                   make_language)
from .entropy import excess_entropies_from_arrays, excess_entropy_window_oracle
from .infotheory import JointTable, mutual_information
from .parallel import chunks, ordered_map
from .sources import (hierarchical_source, simplex_grid, three_feature_mixture, zipf)

TIE_TOL = 1e-9
LOCALITY_BLOCKS = ({0, 1, 2, 3}, {4, 5, 6, 7})
HIERARCHY_GROUPS = ({0, 1}, {3, 4}, {0, 1, 2}, {3, 4, 5})
DEFAULT_ALPHAS = tuple(round(0.05 * k, 2) for k in range(21))


@dataclass
class SimResult:
    rows: list[dict]
    summary: dict
    columns: tuple[str, ...]


# -- batched evaluation --------------------------------------------------------

def _eval_chunk(task) -> np.ndarray:
    base, lengths, probs, perms, axis = task
    if axis == "forms":
        codes = base[perms]                         # (B, F, L): meaning i gets form perm[i]
    else:
        codes = base[:, perms].transpose(1, 0, 2)   # (B, F, L): slot s gets position perm[s]
    return excess_entropies_from_arrays(codes, lengths, probs)


def permutation_entropies(base: np.ndarray, lengths, probs, perms: np.ndarray, axis: str,
                          batch: int, threads=1) -> np.ndarray:
    """Excess entropy of base codes under every permutation in `perms`.

    axis="forms" permutes which form each meaning receives; axis="positions"
    permutes token positions inside every form.
    """
    base = np.asarray(base, dtype=np.int64)
    probs = np.asarray(probs, dtype=float)
    lengths = np.asarray(lengths, dtype=np.int64)
    tasks = [(base, lengths, probs, perms[a:b], axis) for a, b in chunks(len(perms), batch)]
    return np.concatenate(ordered_map(_eval_chunk, tasks, threads))


class OracleMismatch(AssertionError):
    """A fast excess-entropy value disagrees with the window oracle."""


VERIFY_TOL = 1e-9


def check_against_oracle(fd: FormDistribution, value: float, label: str = "", tol: float = VERIFY_TOL) -> float:
    expected = excess_entropy_window_oracle(fd)
    if not abs(expected - value) <= tol:
        raise OracleMismatch(f"{label}: fast value {value!r} vs oracle {expected!r}")
    return expected


def _permuted_distribution(forms, probs, perm, axis) -> FormDistribution:
    entries: dict = {}
    for i, p in enumerate(probs):
        form = forms[perm[i]] if axis == "forms" else tuple(forms[i][s] for s in perm)
        if p > 0:
            entries[form] = entries.get(form, 0.0) + float(p)
    return FormDistribution(entries)


def _verify_chunk(task) -> int:
    forms, probs, perms, axis, values, offset = task
    for k, (perm, value) in enumerate(zip(perms, values)):
        check_against_oracle(_permuted_distribution(forms, probs, perm, axis), value, f"row {offset + k}")
    return len(perms)


def verify_permutations(forms, probs, perms, axis: str, values, threads=1, batch: int = 500) -> int:
    """Recompute every permutation's excess entropy with the window oracle."""
    forms = [tuple(f) for f in forms]
    probs = [float(p) for p in probs]
    tasks = [(forms, probs, perms[a:b].tolist(), axis, values[a:b].tolist(), a)
             for a, b in chunks(len(perms), batch)]
    return sum(ordered_map(_verify_chunk, tasks, threads))


def _encode(forms) -> tuple[np.ndarray, list[str]]:
    vocab: dict[str, int] = {}
    rows = [[vocab.setdefault(t, len(vocab) + 1) for t in as_form(f)] for f in forms]
    return np.array(rows, dtype=np.int64), list(vocab)


def _min_set(values: np.ndarray, tol: float = TIE_TOL) -> np.ndarray:
    return np.flatnonzero(values <= values.min() + tol)


def _join(form) -> str:
    return "".join(form)


# -- all bijections onto {a,b}^3 -------------------------------------------

def systematicity_source(eps: float = 0.05) -> SourceDistribution:
    """Independent components with p(M_j=1) = 2/3 + (j-1) eps."""
    return three_feature_mixture(eps, alpha=0.0)


def sim_systematicity(eps: float = 0.05, threads=1, batch: int = 5000, verify: bool = False) -> SimResult:
    source = systematicity_source(eps)
    forms = product_forms("ab", 3)
    base, _ = _encode(forms)
    perms = np.array(list(itertools.permutations(range(len(forms)))), dtype=np.int64)
    values = permutation_entropies(base, 3, source.probabilities, perms, "forms", batch, threads)
    degrees = systematicity_degrees_binary(base[perms] - 1, source.factored.meanings())

    winners = _min_set(values)
    order = np.lexsort((np.arange(len(perms)), values))
    rows = [{"language_id": int(i),
             "forms": " ".join(_join(forms[j]) for j in perms[i]),
             "excess_entropy": float(values[i]),
             "degree": int(degrees[i])} for i in order]
    hist = {int(d): int(c) for d, c in zip(*np.unique(degrees, return_counts=True))}
    win_hist = {int(d): int(c) for d, c in zip(*np.unique(degrees[winners], return_counts=True))}
    summary = {"eps": eps, "languages": len(perms), "min_excess_entropy": float(values.min()),
               "min_set_size": int(len(winners)), "min_set_degrees": win_hist,
               "degree_counts": hist, "holistic_count": hist.get(0, 0)}
    if verify:
        summary["verified_rows"] = verify_permutations(forms, source.probabilities, perms, "forms", values, threads)
    return SimResult(rows, summary, ("language_id", "forms", "excess_entropy", "degree"))


# -- correlated M2, M3 --------------------------------------------------------

def table_language(name: str, flip: bool = False):
    """A code from the three-feature table; with flip=True meaning i uses row 7 - i.

    The table writes 0 for each component's probable value, while the mixture
    source makes 1 the probable value, so the mixture runs use flip=True.
    """
    forms = CNOT_ADVANTAGE_FORMS[name]
    if flip:
        forms = forms[::-1]
    return make_language(forms)


def nonlocal_systematic(flip: bool = False):
    """Local systematic code with positions reordered to (M2, M1, M3)."""
    perm = PositionPermutation((1, 0, 2))
    return make_language([perm.apply(f) for f in table_language("local", flip).forms])


def holistic_sample(n: int, seed: int, space: FactoredSpace | None = None) -> list[tuple[int, ...]]:
    """n distinct degree-0 bijections onto {a,b}^3, drawn by seeded rejection."""
    space = space or FactoredSpace((2, 2, 2))
    forms = product_forms("ab", 3)
    chosen, seen, k = [], set(), 0
    while len(chosen) < n:
        perm = tuple(prng.permutation(len(forms), seed, k))
        k += 1
        if perm in seen:
            continue
        seen.add(perm)
        lang = make_language([forms[j] for j in perm])
        if systematicity_degree(lang, space).degree == 0:
            chosen.append(perm)
    return chosen


FAMILY_COLUMNS = ("local", "nonlocal", "natural", "unnatural")


def family_languages(flip: bool):
    return {"local": table_language("local", flip), "nonlocal": nonlocal_systematic(flip),
            "natural": table_language("natural", flip), "unnatural": table_language("unnatural", flip)}


def _family_entropies(languages: dict, probs: np.ndarray, verify: bool = False) -> dict:
    out = {}
    source = SourceDistribution(probs)
    for name, lang in languages.items():
        codes, _ = _encode(lang.forms)
        out[name] = float(excess_entropies_from_arrays(codes, 3, probs)[0])
        if verify:
            check_against_oracle(form_distribution(lang, source), out[name], name)
    return out


def sim_correlated(alphas=DEFAULT_ALPHAS, eps: float = 0.05, holistic_samples: int = 200,
                   seed: int = 0, verify: bool = False) -> SimResult:
    families = family_languages(flip=True)
    forms = product_forms("ab", 3)
    base, _ = _encode(forms)
    hol = np.array(holistic_sample(holistic_samples, seed), dtype=np.int64) if holistic_samples else None
    rows = []
    for alpha in alphas:
        source = three_feature_mixture(eps, float(alpha))
        probs = source.probabilities
        mi = mutual_information(JointTable(source.joint_table()).marginal([1, 2]))
        row = {"alpha": float(alpha), "mi_m2m3": mi}
        row.update(_family_entropies(families, probs, verify))
        if hol is not None:
            # holistic permutations are in table orientation; flip meanings to match
            flipped = hol[:, ::-1]
            values = excess_entropies_from_arrays(base[flipped], 3, probs)
            if verify:
                verify_permutations(forms, probs, flipped, "forms", values)
            row["holistic_min"] = float(values.min())
            row["holistic_median"] = float(np.median(values))
        rows.append(row)
    crossover = next((r["alpha"] for r in rows if r["natural"] < r["local"] - TIE_TOL), None)
    summary = {
        "eps": eps, "crossover_alpha": crossover,
        "local_best_at_first_alpha": bool(rows and min(rows[0][k] for k in FAMILY_COLUMNS) == rows[0]["local"]),
        "unnatural_ge_natural_for_positive_alpha": all(
            r["unnatural"] >= r["natural"] - TIE_TOL for r in rows if r["alpha"] > 0),
        "nonlocal_ge_local": all(r["nonlocal"] >= r["local"] - TIE_TOL for r in rows),
        "holistic_samples": holistic_samples,
    }
    cols = ("alpha", "mi_m2m3") + FAMILY_COLUMNS
    if hol is not None:
        cols += ("holistic_min", "holistic_median")
    return SimResult(rows, summary, cols)


def cnot_advantage_table(verify: bool = False) -> SimResult:
    """Family excess entropies on the table's own source, in table orientation."""
    probs = np.array(CNOT_ADVANTAGE_PROBS)
    source = SourceDistribution(probs, FactoredSpace((2, 2, 2)))
    mi = mutual_information(JointTable(source.joint_table()).marginal([1, 2]))
    langs = family_languages(flip=False)
    langs["holistic"] = table_language("holistic")
    row = {"mi_m2m3": mi}
    row.update(_family_entropies(langs, probs, verify))
    return SimResult([row], {}, ("mi_m2m3",) + FAMILY_COLUMNS + ("holistic",))


# -- position permutations of a word language ---------------------------------

def locality_system(seed: int = 0, exponent: float = 1.0):
    space = FactoredSpace((10, 10))
    source = SourceDistribution(zipf(space.size, exponent).probabilities, space)
    return source, word_language(space, seed)


def sim_locality(seed: int = 0, threads=1, batch: int = 504, verify: bool = False) -> SimResult:
    source, language = locality_system(seed)
    base, _ = _encode(language.forms)
    perms = np.array(list(itertools.permutations(range(8))), dtype=np.int64)
    values = permutation_entropies(base, 8, source.probabilities, perms, "positions", batch, threads)
    contiguous = np.array([is_contiguous(PositionPermutation(p), LOCALITY_BLOCKS) for p in perms])
    rows = [{"permutation": " ".join(map(str, p)), "excess_entropy": float(v), "is_contiguous": bool(c)}
            for p, v, c in zip(perms, values, contiguous)]
    winners = _min_set(values)
    summary = {
        "lexicon_seed": seed, "permutations": len(perms), "contiguous_count": int(contiguous.sum()),
        "min_excess_entropy": float(values.min()), "min_set_size": int(len(winners)),
        "argmin_contiguous": bool(contiguous[winners].all()),
        "overlap": bool(values[contiguous].max() > values[~contiguous].min() + TIE_TOL),
        "mean_contiguous": float(values[contiguous].mean()),
        "mean_noncontiguous": float(values[~contiguous].mean()),
    }
    if verify:
        summary["verified_rows"] = verify_permutations(
            language.forms, source.probabilities, perms, "positions", values, threads)
    return SimResult(rows, summary, ("permutation", "excess_entropy", "is_contiguous"))


# -- position permutations under a hierarchical source ------------------------

def hierarchy_system(alpha: float = 0.01, beta: float = 0.20, gamma: float = 0.99):
    """Source and codes: component k writes one of 5 symbols private to position k."""
    source = hierarchical_source(alpha, beta, gamma)
    meanings = source.factored.meanings()
    base = 1 + meanings + 5 * np.arange(6)[None, :]
    return source, base.astype(np.int64)


def sim_hierarchy(alpha: float = 0.01, beta: float = 0.20, gamma: float = 0.99, threads=1,
                  batch: int = 8, verify: bool = False) -> SimResult:
    source, base = hierarchy_system(alpha, beta, gamma)
    perms = np.array(list(itertools.permutations(range(6))), dtype=np.int64)
    values = permutation_entropies(base, 6, source.probabilities, perms, "positions", batch, threads)
    nested = np.array([is_well_nested(PositionPermutation(p), HIERARCHY_GROUPS) for p in perms])
    rows = [{"permutation": " ".join(map(str, p)), "excess_entropy": float(v), "is_well_nested": bool(w)}
            for p, v, w in zip(perms, values, nested)]
    winners = _min_set(values)
    summary = {
        "alpha": alpha, "beta": beta, "gamma": gamma, "permutations": len(perms),
        "well_nested_count": int(nested.sum()), "min_excess_entropy": float(values.min()),
        "min_set_size": int(len(winners)), "argmin_well_nested": bool(nested[winners].all()),
        "mean_well_nested": float(values[nested].mean()), "mean_other": float(values[~nested].mean()),
    }
    if verify:
        forms = [tuple(str(t) for t in row) for row in base]
        summary["verified_rows"] = verify_permutations(
            forms, source.probabilities, perms, "positions", values, threads, batch=20)
    return SimResult(rows, summary, ("permutation", "excess_entropy", "is_well_nested"))


# -- two-feature sweep ---------------------------------------------------------------

TWO_FEATURE_FORMS = ("ac", "ad", "bc", "bd")


def two_feature_languages():
    """All 24 bijections of meanings 00, 01, 10, 11 onto {a,b} x {c,d}, with classes."""
    out = []
    for perm in itertools.permutations(range(4)):
        lang = make_language([TWO_FEATURE_FORMS[j] for j in perm])
        out.append((perm, lang, classify_two_feature_code(lang)))
    return out


def sweep_two_feature(marginals, correlations, verify: bool = False) -> SimResult:
    feasible, skipped = simplex_grid(marginals, correlations)
    langs = two_feature_languages()
    base, _ = _encode(TWO_FEATURE_FORMS)
    perms = np.array([p for p, _, _ in langs], dtype=np.int64)
    rows, best = [], []
    for spec, source in feasible:
        mi = mutual_information(source.joint_table())
        values = excess_entropies_from_arrays(base[perms], 2, source.probabilities)
        if verify:
            verify_permutations(TWO_FEATURE_FORMS, source.probabilities, perms, "forms", values)
        by_class: dict[str, float] = {}
        for k, ((_, lang, cls), v) in enumerate(zip(langs, values)):
            rows.append({"a": spec.a, "b": spec.b, "r": spec.r, "mi": mi, "language_id": k,
                         "forms": " ".join(_join(f) for f in lang.forms), "code_class": cls,
                         "excess_entropy": float(v)})
            by_class[cls] = min(by_class.get(cls, np.inf), float(v))
        best.append({"a": spec.a, "b": spec.b, "r": spec.r, **{f"min_{c}": v for c, v in sorted(by_class.items())}})
    summary = {"feasible_sources": len(feasible),
               "skipped": [[s.a, s.b, s.r] for s in skipped], "best_by_class": best}
    return SimResult(rows, summary, ("a", "b", "r", "mi", "language_id", "forms", "code_class", "excess_entropy"))
