import time

import pytest

_VERDICTS: dict[int, str] = {}


class Criterion:
    """Times one acceptance criterion and records its PASS/FAIL line."""

    def __init__(self, number: int, name: str, budget: float):
        self.number, self.name, self.budget = number, name, budget
        self.detail = ""
        self._t0 = time.perf_counter()
        _VERDICTS[number] = f"FAIL {number:2d} {name}: did not finish"

    def finish(self, ok: bool, detail: str = "") -> bool:
        seconds = time.perf_counter() - self._t0
        passed = bool(ok) and seconds <= self.budget
        verdict = "PASS" if passed else "FAIL"
        over = "" if seconds <= self.budget else " over budget"
        _VERDICTS[self.number] = (f"{verdict} {self.number:2d} {self.name} "
                                  f"({seconds:.2f}s of {self.budget:g}s{over}): {detail}")
        print(_VERDICTS[self.number])
        return passed


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[n])
