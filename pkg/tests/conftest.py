from fractions import Fraction

import pytest

from modalstab import Indicator

_ACCEPTANCE: list[tuple[str, bool, str]] = []


class CriterionLog:
    """Records one pass/fail line per acceptance criterion."""

    def __init__(self, name):
        self.name = name
        self.details = []

    def note(self, text):
        self.details.append(text)


@pytest.fixture
def criterion(request):
    log = CriterionLog(request.node.name)
    yield log
    # rep_call is attached by the hook below
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    _ACCEPTANCE.append((request.node.name, passed, "; ".join(log.details)))


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {name}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def base_b():
    return Indicator(Fraction(1, 4), Fraction(3, 4))


@pytest.fixture
def base_c():
    return Indicator(Fraction(1, 4), Fraction(1, 2))
