import io
import json
from pathlib import Path

import pytest

from avlang.ast import Program
from avlang.interpreter import Interpreter
from avlang.parser import parse_source

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

TUITION_VISIBLE = """\
tuition(x, m) =
  case m of
    medical : amount = $10K;
    english : amount = $5K;
    physics : amount = $5K;
  end.
"""

TUITION_BLIND = TUITION_VISIBLE.replace("tuition(x, m)", "tuition(_, m)")


@pytest.fixture
def out():
    return io.StringIO()


@pytest.fixture
def interp(out):
    return Interpreter(out)


@pytest.fixture
def tuition_program():
    return Program(parse_source(TUITION_VISIBLE).declarations)


@pytest.fixture(scope="session")
def corpus_expectations():
    return json.loads((CORPUS / "expected.json").read_text())


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE_RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    """Record one acceptance line; printed again in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_RESULTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
