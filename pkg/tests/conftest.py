import math
import random

import pytest

from xentropy.core import FormDistribution


def random_form_distribution(rng: random.Random, max_forms: int = 10, max_len: int = 5,
                             symbols: str = "abcd") -> FormDistribution:
    n = rng.randint(1, max_forms)
    forms = set()
    while len(forms) < n:
        forms.add("".join(rng.choice(symbols) for _ in range(rng.randint(1, max_len))))
    weights = [rng.random() + 1e-3 for _ in forms]
    total = math.fsum(weights)
    return FormDistribution({f: w / total for f, w in zip(sorted(forms), weights)})


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one acceptance verdict: ``acceptance(number, ok, detail)``."""
    results = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def record(number: int, ok: bool, detail: str) -> bool:
        results[number] = (bool(ok), detail)
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
