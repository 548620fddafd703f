import importlib.resources
import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from lflat.dsl import parse_file  # noqa: E402

EXAMPLES = importlib.resources.files("lflat") / "examples"


@pytest.fixture(scope="session")
def examples_dir():
    return pathlib.Path(str(EXAMPLES))


@pytest.fixture(scope="session")
def examples():
    """Name -> entity for the bundled even-b examples and the bit alphabets."""
    defs = parse_file((EXAMPLES / "even.lf").read_text())
    defs += parse_file((EXAMPLES / "words.lf").read_text(), known=defs)
    return {d.name: d.body for d in defs}


@pytest.fixture(scope="session")
def example_defs():
    defs = parse_file((EXAMPLES / "even.lf").read_text())
    return defs + parse_file((EXAMPLES / "words.lf").read_text(), known=defs)


# -- acceptance criteria summary --------------------------------------------

_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or report.outcome != "passed":
        previous = _CRITERIA.get(number, (title, True))
        _CRITERIA[number] = (title, previous[1] and report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}")
