import json
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent
FIXTURES = ROOT / "fixtures"
SCHEMAS = ROOT / "src" / "pnet" / "schemas"

sys.path.insert(0, str(HERE))

from pnet.net import parse_net  # noqa: E402

_criteria: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def a1_doc():
    return parse_net((FIXTURES / "a1.net").read_text())


@pytest.fixture(scope="session")
def a1(a1_doc):
    return a1_doc.net


def load_schema(name: str) -> dict:
    return json.loads((SCHEMAS / f"{name}.json").read_text())


def pytest_runtest_logreport(report):
    # one verdict per acceptance criterion, taken from its call phase
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        num = int(name.split("_")[2])
        _criteria[num] = (name, "PASS" if report.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        name, verdict = _criteria[num]
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  ({name})")
