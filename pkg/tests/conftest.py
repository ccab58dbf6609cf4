import sys
from pathlib import Path

import numpy as np
import pytest

from sarcbench.sparse import from_dense

DATA = Path(__file__).parent / "data"
FIXTURE = DATA / "fixture_200.tsv"


@pytest.fixture
def fixture_corpus() -> Path:
    return FIXTURE


def random_sparse(rng, n_rows, n_cols, density=0.4, nonneg=True):
    d = rng.random((n_rows, n_cols)) * (rng.random((n_rows, n_cols)) < density)
    if not nonneg:
        d *= rng.choice([-1.0, 1.0], size=d.shape)
    return d, from_dense(d)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
