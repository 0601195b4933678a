import os
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from situp.dataset import synth_sequence, synth_spec_from_file, write_otb

FIXTURES = Path(__file__).parent / "fixtures"
SPEC_NAMES = ("static", "translation", "zoom", "zoom_occlusion")

# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES = []


@lru_cache(maxsize=None)
def fixture_sequence(name):
    return synth_sequence(synth_spec_from_file(FIXTURES / f"{name}.spec"))


@pytest.fixture(scope="session")
def otb_root(tmp_path_factory):
    """All committed synthetic fixtures written to disk in OTB layout."""
    root = tmp_path_factory.mktemp("otb")
    for name in SPEC_NAMES:
        write_otb(fixture_sequence(name), root / name)
    return root


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def pytest_addoption(parser):
    parser.addoption("--otb-root", default=os.environ.get("SITUP_OTB_ROOT"),
                     help="OTB-format dataset root for the optional real-data check")
