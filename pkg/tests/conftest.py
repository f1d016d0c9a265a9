from __future__ import annotations

import pytest

from tautring import pipeline
from tautring.descendent import SPACE, STACK, ToppType


class Rings:
    """Lazily built rings shared by the whole session."""

    def __init__(self) -> None:
        self.reg = pipeline.RingRegistry()
        self._extra = {}

    def space(self, d: int, chi: int = 1):
        alpha = ToppType(d, chi)
        pres = self.reg.get(alpha, SPACE)
        if pres is not None and pres.alpha == alpha:
            return pres
        if pres is None:
            return pipeline.ensure_ring(self.reg, alpha, SPACE)
        if (d, chi) not in self._extra:
            self._extra[(d, chi)] = pipeline.build_ring(alpha, SPACE, registry=self.reg)
        return self._extra[(d, chi)]

    def stack(self, d: int, dmax: int, chi: int = 0):
        return pipeline.ensure_ring(self.reg, ToppType(d, chi), STACK, dmax)


@pytest.fixture(scope="session")
def rings() -> Rings:
    return Rings()


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def emit(number, ok, detail, elapsed, gating=True):
        tag = "PASS" if ok else "FAIL"
        note = "" if gating else " (stretch, not gating)"
        line = f"{tag} criterion {number}{note}: {detail} [{elapsed:.1f}s]"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
