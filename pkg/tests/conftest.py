import itertools
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from madjust import gallery  # noqa: E402
from madjust.criteria import check_m_criterion, check_ms_criterion, make_query  # noqa: E402
from madjust.mgraph import dpcp  # noqa: E402


def brute_family(g, x, y, mode="m"):
    """Every valid covariate set, by exhaustive subset enumeration."""
    check = check_ms_criterion if mode == "ms" else check_m_criterion
    x, y = frozenset(x), frozenset(y)
    cands = sorted(g.variables - x - y - dpcp(g, x, y))
    out = set()
    for r in range(len(cands) + 1):
        for z in itertools.combinations(cands, r):
            if check(g, make_query(g, x, y, z)).valid:
                out.add(frozenset(z))
    return out


def random_corpus(seed, count, max_vars, selection_share=0.0):
    """Deterministic list of (graph, x, y, mode) queries on random m-graphs."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        sel = rng.random() < selection_share
        g = gallery.random_mgraph(rng, rng.randint(2, max_vars), selection=sel)
        x, y = rng.sample(sorted(g.variables), 2)
        out.append((g, frozenset([x]), frozenset([y]), "ms" if sel else "m"))
    return out


FIXTURE_QUERIES = [
    ("mnar_treatment", {"X"}, {"Y"}, "m"),
    ("confounded", {"X"}, {"Y"}, "m"),
    ("confounded_mnar", {"X"}, {"Y"}, "m"),
    ("mcar", {"FI"}, {"CE"}, "m"),
    ("mar", {"FI"}, {"CE"}, "m"),
    ("mnar", {"FI"}, {"CE"}, "m"),
    ("latent_mnar", {"X_1", "X_2"}, {"Y"}, "m"),
    ("indicator_dependent", {"X"}, {"Y"}, "m"),
    ("selected_treatment", {"X"}, {"Y"}, "ms"),
    ("mnar_selection", {"X"}, {"Y"}, "ms"),
    ("selection_mnar", {"X_1", "X_2"}, {"Y"}, "ms"),
]


@pytest.fixture
def load():
    return gallery.load


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
