import shutil
import sys
from pathlib import Path

import pytest

from issy.frontend import load_issy
from issy.game import build_arena
from issy.logic.translate import LtlTranslator
from issy.smt import SmtSession

DATA = Path(__file__).parent / "data"
STUB_LTL = f"{sys.executable} {DATA / 'stub_ltl.py'}"

ACCEPTANCE: list[str] = []  # filled by test_acceptance, echoed in the summary

requires_z3 = pytest.mark.skipif(shutil.which("z3") is None, reason="z3 binary not on PATH")
requires_cc = pytest.mark.skipif(not any(shutil.which(c) for c in ("gcc", "cc", "clang")),
                                 reason="no C compiler")


@pytest.fixture(scope="session")
def smt():
    with SmtSession() as s:
        yield s


@pytest.fixture(scope="session")
def stub_translator():
    return LtlTranslator(STUB_LTL)


def load_text(name: str) -> str:
    return (DATA / name).read_text()


def load_game(name: str, translator=None):
    spec, _ = load_issy(load_text(f"games/{name}.issy"))
    return build_arena(spec, translator)


@pytest.fixture
def games():
    return load_game


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
