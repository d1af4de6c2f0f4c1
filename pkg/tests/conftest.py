from __future__ import annotations

import pytest

from oracles import instance


@pytest.fixture
def give():
    return instance("fig1.hier", "give")


@pytest.fixture
def fig3():
    return instance("fig3.hier", "obj")


@pytest.fixture
def seductive():
    return instance("seductive.hier", "obj")


@pytest.fixture
def nixon():
    return instance("nixon.hier", "nixon")


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {number} failed: {title} {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l[7:9])):
            terminalreporter.write_line(line)
