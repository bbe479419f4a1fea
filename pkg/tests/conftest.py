import os

import hypothesis
import pytest
from hypothesis import strategies as st

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# (criterion, status, detail) lines filled in by test_acceptance.py
ACCEPTANCE: list[tuple[str, str, str]] = []

traces = st.lists(st.sampled_from("abc"), min_size=1, max_size=6).map(tuple)
logs = st.dictionaries(traces, st.integers(1, 4), min_size=1, max_size=6)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in sorted(ACCEPTANCE, key=lambda x: int(x[0].split()[0])):
        terminalreporter.write_line(f"[{status}] criterion {criterion}: {detail}")


@pytest.fixture
def tmp_out(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    return out


DATA_DIR = os.environ.get("DECLARE_VARIANTS_DATA", os.path.join(os.path.dirname(__file__), "..", "data"))

SEPSIS_FILES = ("Sepsis Cases - Event Log.xes.gz", "Sepsis Cases - Event Log.xes")
RTFMP_FILES = ("Road_Traffic_Fine_Management_Process.xes.gz", "Road_Traffic_Fine_Management_Process.xes")


def find_data(names):
    for name in names:
        path = os.path.join(DATA_DIR, name)
        if os.path.exists(path):
            return path
    return None
