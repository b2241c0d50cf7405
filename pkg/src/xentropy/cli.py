"""``xentropy`` command line: simulations, sweeps and corpus analyses as CSV or JSON.

Exit status: 0 on success, 2 on input or format errors, 3 when a value fails the
``--verify`` oracle cross-check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import corpus, simulations, studies
from .codes import permute_assignment
from .core import FormDistribution, ValidationError, form_distribution
from .corpus import FormatError
from .parallel import resolve_threads
from .prng import derive_seed
from .simulations import OracleMismatch, check_against_oracle

EXIT_OK, EXIT_INPUT, EXIT_ORACLE = 0, 2, 3
FIXTURE_PREFIX = "fixture:"


class InputError(Exception):
    """Bad input file or argument; reported with exit status 2."""


# -- formatting ----------------------------------------------------------------

def fmt(value) -> str:
    """Scalar as CSV text; floats get 12 significant digits and a '.' separator."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(float(value), ".12g")
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(fmt(value)) if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(rows: list[dict], columns, summary: dict | None, fmt_name: str, command: str) -> tuple[str, str]:
    """(main output, summary text for stderr)."""
    if fmt_name == "json":
        doc = {"command": command, "columns": list(columns),
               "rows": [{c: _jsonable(r.get(c)) for c in columns} for r in rows],
               "summary": _jsonable(summary or {})}
        return json.dumps(doc, ensure_ascii=False, indent=1) + "\n", ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(r.get(c)) for c in columns])
    note = ""
    if summary:
        note = "".join(f"# {k}: {json.dumps(_jsonable(v), ensure_ascii=False)}\n" for k, v in summary.items())
    return buf.getvalue(), note


# -- input helpers ----------------------------------------------------------------

def _resolve_path(text: str) -> Path:
    if text.startswith(FIXTURE_PREFIX):
        from .data import fixture_path
        try:
            return Path(str(fixture_path(text[len(FIXTURE_PREFIX):])))
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    return Path(text)


def _read(path_text: str, parser, *args, **kwargs):
    path = _resolve_path(path_text)
    try:
        with open(path, encoding="utf-8") as fh:
            return parser(fh, *args, **kwargs)
    except FormatError as exc:
        where = f"{path}:{exc.line}" if exc.line else str(path)
        raise InputError(f"{where}: {exc.message}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _threads(text: str):
    if text == "auto":
        return "auto"
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'")
    return n


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be an integer") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _read_class_map(path_text: str) -> dict:
    def parse(fh):
        table = {}
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.rstrip("\r\n").split("\t")
            if len(cols) != 2:
                raise FormatError("expected symbol<TAB>class", lineno)
            table[cols[0]] = cols[1]
        return table
    return _read(path_text, parse)


def _read_genera(path_text: str) -> dict:
    def parse(fh):
        table = {}
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.rstrip("\r\n").split("\t")
            if len(cols) != 2:
                raise FormatError("expected order<TAB>genera", lineno)
            try:
                table[cols[0].strip()] = int(cols[1])
            except ValueError:
                raise FormatError(f"genera count {cols[1]!r} is not an integer", lineno) from None
        return table
    return _read(path_text, parse)


def _is_conllu(path_text: str) -> bool:
    return str(_resolve_path(path_text)).endswith((".conllu", ".conll"))


# -- subcommand runners --------------------------------------------------------------

def run_sim(args):
    th, verify = args.threads, args.verify
    if args.which == "systematicity":
        res = simulations.sim_systematicity(args.eps, threads=th, verify=verify)
    elif args.which == "correlated":
        if args.table_source:
            res = simulations.cnot_advantage_table(verify=verify)
        else:
            res = simulations.sim_correlated(args.alphas, args.eps, args.holistic_samples, args.seed, verify=verify)
    elif args.which == "locality":
        res = simulations.sim_locality(args.seed, threads=th, verify=verify)
    else:
        res = simulations.sim_hierarchy(args.alpha, args.beta, args.gamma, threads=th, verify=verify)
    return res.rows, res.columns, res.summary


def run_sweep(args):
    res = simulations.sweep_two_feature(args.marginals, args.correlations, verify=args.verify)
    return res.rows, res.columns, res.summary


def _verify_study(result: studies.StudyResult, language, source, seed: int):
    for rec in [result.real, *result.fixed]:
        check_against_oracle(rec.distribution, rec.excess_entropy, f"{result.language}/{rec.system}")
    for name, draws in result.draws.items():
        for k, value in enumerate(draws):
            lang = permute_assignment(language, source, derive_seed(seed, k), name == "nonsyst-lenpres")
            check_against_oracle(form_distribution(lang, source), value, f"{result.language}/{name}/{k}")


STUDY_COLUMNS = ("language", "kind", "system", "sample", "excess_entropy", "entropy_rate", "p_value")


def _study_rows(result: studies.StudyResult) -> list[dict]:
    rows = [{"language": result.language, "kind": "real", "system": "real",
             "excess_entropy": result.real.excess_entropy, "entropy_rate": result.real.entropy_rate}]
    for rec in result.fixed:
        rows.append({"language": result.language, "kind": "baseline", "system": rec.system,
                     "excess_entropy": rec.excess_entropy, "entropy_rate": rec.entropy_rate})
    pvals = result.p_values()
    for name, draws in result.draws.items():
        rows.append({"language": result.language, "kind": "summary", "system": name,
                     "excess_entropy": float(np.median(draws)), "p_value": pvals[name]})
        for k, value in enumerate(draws):
            rows.append({"language": result.language, "kind": "draw", "system": name, "sample": k,
                         "excess_entropy": float(value)})
    return rows


def _study(args, name, language, source, default_baselines, classes=None):
    baselines = args.baseline or list(default_baselines)
    result = studies.compare_baselines(name, language, source, baselines, args.seed, args.samples, classes)
    if args.verify:
        _verify_study(result, language, source, args.seed)
    summary = {"real_excess_entropy": result.real.excess_entropy, "p_values": result.p_values(),
               "samples": args.samples, "seed": args.seed}
    return _study_rows(result), STUDY_COLUMNS, summary


def run_analyze(args):
    kind = args.which
    if kind == "phonotactics":
        class_map = _read_class_map(args.classes) if args.classes else None
        rows = []
        for path_text in args.input:
            wl = _read(path_text, corpus.parse_wordlist, whitespace=args.whitespace)
            if class_map is not None:
                wl = studies.apply_class_map(wl, class_map)
            name = _resolve_path(path_text).stem
            rows.append(studies.phonotactics_triple(name, wl, args.seed))
            if args.verify:
                _verify_phonotactics(wl, rows[-1], args.seed)
        return rows, ("language", "real", "manner", "shuffled"), {"seed": args.seed}
    (path_text,) = args.input if len(args.input) == 1 else _too_many(kind)
    if kind == "morphology":
        paradigm = _read(path_text, corpus.parse_paradigm, whitespace=args.whitespace)
        source, language = corpus.paradigm_source(paradigm, args.smoothing)
        classes = None
        if args.classes:
            classes = _classes_for(language, _read_class_map(args.classes))
        return _study(args, _resolve_path(path_text).stem, language, source,
                      ("nonconcat", "nonsyst", "nonsyst-lenpres"), classes)
    if kind == "adjnoun":
        if _is_conllu(path_text):
            pairs = corpus.extract_adjective_noun_pairs(_read(path_text, corpus.parse_conllu))
        else:
            pairs = _read(path_text, corpus.parse_pair_counts)
        source, language = corpus.pair_language(pairs)
        return _study(args, _resolve_path(path_text).stem, language, source,
                      ("nonconcat", "nonsyst", "nonsyst-lenpres"))
    if kind == "np-order":
        stats: dict = {}
        if _is_conllu(path_text):
            counts = corpus.extract_noun_phrases(_read(path_text, corpus.parse_conllu), args.seed, stats)
        else:
            counts = _read(path_text, corpus.parse_np_counts)
        rows = [{"order": order, "excess_entropy": e} for order, e in corpus.np_order_sweep(counts)]
        columns = ("order", "excess_entropy")
        if args.genera:
            genera = _read_genera(args.genera)
            for r in rows:
                r["genera"] = genera.get(r["order"])
            columns += ("genera",)
        if args.verify:
            for (label, entries), row in zip(corpus.np_order_distributions(counts), rows):
                total = sum(entries.values())
                check_against_oracle(FormDistribution({f: p / total for f, p in entries.items()}),
                                     row["excess_entropy"], label)
        summary = {"noun_phrases": int(sum(counts.values())), "distinct": len(counts)}
        summary.update({f"resolved_{k}": v for k, v in stats.items()})
        return rows, columns, summary
    # semantics
    words, features, raw = _read(path_text, corpus.parse_norms)
    fm = corpus.binarize_norms(raw, words, features)
    rows = _mi_rows("within", fm)
    if args.pairs:
        pairs = _read(args.pairs, corpus.parse_pair_counts)
        rows += _mi_rows("across", corpus.pair_feature_matrix(fm, pairs), len(features))
    return rows, ("mode", "feature1", "feature2", "mi"), {"words": len(words)}


def _too_many(kind):
    raise InputError(f"analyze {kind} takes exactly one --input")


def _classes_for(language, class_map):
    try:
        return [tuple(class_map[t] for t in form) for form in language.forms]
    except KeyError as exc:
        raise InputError(f"no class for symbol {exc.args[0]!r}") from None


def _verify_phonotactics(wl, row, seed):
    source, language = corpus.wordlist_source(wl)
    check_against_oracle(form_distribution(language, source), row["real"], f"{row['language']}/real")
    check_against_oracle(form_distribution(studies.shuffle_forms(language, seed), source),
                         row["shuffled"], f"{row['language']}/shuffled")
    if row["manner"] is not None:
        lang = studies.class_shuffle_forms(language, wl.classes, seed)
        check_against_oracle(form_distribution(lang, source), row["manner"], f"{row['language']}/manner")


def _mi_rows(mode, fm, split: int | None = None):
    mi = corpus.pairwise_feature_mi(fm)
    rows = []
    k = len(fm.features)
    for i in range(k):
        for j in range(k):
            if split is not None and not (i < split <= j):
                continue  # across-word: word-1 feature against word-2 feature only
            if split is None and j < i:
                continue
            rows.append({"mode": mode, "feature1": fm.features[i], "feature2": fm.features[j], "mi": mi[i, j]})
    return rows


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=_seed, default=0, help="64-bit seed (default 0)")
    common.add_argument("--threads", type=_threads, default=1, help="worker processes or 'auto'")
    common.add_argument("-o", "--output", help="write results here instead of stdout")
    common.add_argument("--verify", action="store_true",
                        help="cross-check every excess entropy against the window oracle (slow)")

    parser = argparse.ArgumentParser(prog="xentropy", description="Exact excess entropy of finite codes.")
    groups = parser.add_subparsers(dest="group", required=True)

    sim = groups.add_parser("sim", help="exhaustive code-space simulations").add_subparsers(dest="which", required=True)
    p = sim.add_parser("systematicity", parents=[common], help="all bijections onto {a,b}^3")
    p.add_argument("--eps", type=float, default=0.05)
    p = sim.add_parser("correlated", parents=[common], help="code families as M2-M3 coupling grows")
    p.add_argument("--alphas", type=_parse_float_list, default=list(simulations.DEFAULT_ALPHAS))
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--holistic-samples", type=int, default=200)
    p.add_argument("--table-source", action="store_true", help="evaluate the families on the tabulated source")
    sim.add_parser("locality", parents=[common], help="all position permutations of a word language")
    p = sim.add_parser("hierarchy", parents=[common], help="all position permutations under a nested source")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--beta", type=float, default=0.20)
    p.add_argument("--gamma", type=float, default=0.99)

    sweep = groups.add_parser("sweep", help="parameter sweeps").add_subparsers(dest="which", required=True)
    p = sweep.add_parser("two-feature", parents=[common], help="24 codes over a grid of two-feature sources")
    p.add_argument("--marginals", type=_parse_float_list, default=[0.1, 0.25, 0.5, 0.75, 0.9])
    p.add_argument("--correlations", type=_parse_float_list, default=[-0.5, -1 / 3, 0.0, 1 / 3, 0.5])

    analyze = groups.add_parser("analyze", help="corpus studies").add_subparsers(dest="which", required=True)
    for name in ("phonotactics", "morphology", "adjnoun", "np-order", "semantics"):
        p = analyze.add_parser(name, parents=[common])
        p.add_argument("--input", action="append", required=True,
                       help=f"input file (or {FIXTURE_PREFIX}NAME for a bundled fixture)")
        if name in ("phonotactics", "morphology"):
            p.add_argument("--classes", help="symbol<TAB>class table")
            p.add_argument("--whitespace", action="store_true", help="forms are space-separated symbols")
        if name in ("morphology", "adjnoun"):
            p.add_argument("--samples", type=int, default=1000)
            p.add_argument("--baseline", action="append", choices=studies.ALL_BASELINES)
        if name == "morphology":
            p.add_argument("--smoothing", type=float, default=0.5)
        if name == "np-order":
            p.add_argument("--genera", help="order<TAB>genera table")
        if name == "semantics":
            p.add_argument("--pairs", help="word1<TAB>word2<TAB>count pairs for across-word MI")
    return parser


RUNNERS = {"sim": run_sim, "sweep": run_sweep, "analyze": run_analyze}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolve_threads(args.threads)
        if getattr(args, "samples", 1) < 1:
            raise InputError("--samples must be positive")
        rows, columns, summary = RUNNERS[args.group](args)
    except OracleMismatch as exc:
        print(f"xentropy: oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (InputError, ValidationError, ValueError) as exc:
        print(f"xentropy: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.verify:
        summary = {**summary, "verified": True}
    text, note = render(rows, columns, summary, args.format, f"{args.group} {args.which}")
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if note:
        sys.stderr.write(note)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
