from __future__ import annotations

from functools import lru_cache

import pytest

from khsq.burnside import khovanov_functor
from khsq.f2algebra import cochain_complex
from khsq.harness import load_fixture
from khsq.semisimp import lambda_of

SMALL = ["unknot", "hopf_positive", "hopf_negative", "trefoil_right", "trefoil_left", "4_1"]

# criterion number -> (passed, description); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@lru_cache(maxsize=None)
def built(name: str):
    d = load_fixture(name)
    F = khovanov_functor(d)
    X = lambda_of(F)
    return d, F, X, cochain_complex(X)


@pytest.fixture
def build():
    return built


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, desc = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {desc}")
