import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def study_files(tmp_path_factory):
    from synthetic import make_study

    return make_study(tmp_path_factory.mktemp("study"), years=40)


def pytest_terminal_summary(terminalreporter):
    from criteria import LINES

    if LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
