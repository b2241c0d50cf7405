"""Small synthetic fixtures bundled with the package."""

from importlib import resources

FIXTURES = {
    "cv-lexicon": "cv_lexicon.tsv",
    "hungarian": "hungarian_paradigm.tsv",
    "german-np": "german_np.conllu",
    "german-np-counts": "german_np_counts.tsv",
    "norms": "norms.tsv",
    "pairs": "pairs.tsv",
}


def fixture_path(name: str):
    """Filesystem path of a bundled fixture, by short name or file name."""
    filename = FIXTURES.get(name, name)
    if filename not in FIXTURES.values():
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    return resources.files(__package__).joinpath(filename)
