"""Shared fixtures: the shipped model corpus and an acceptance summary."""

from __future__ import annotations

import re
from pathlib import Path

import pytest

from wstskit.dsl import ModelFile, parse_model

MODELS = Path(__file__).resolve().parent.parent / "models"


def load_model(name: str) -> ModelFile:
    path = MODELS / f"{name}.model"
    return parse_model(path.read_text(encoding="utf-8"), name=path.stem)


@pytest.fixture(scope="session")
def models_dir() -> Path:
    return MODELS


@pytest.fixture(scope="session")
def m1() -> ModelFile:
    return load_model("m1")


@pytest.fixture(scope="session")
def m2() -> ModelFile:
    return load_model("m2")


@pytest.fixture(scope="session")
def m3() -> ModelFile:
    return load_model("m3")


@pytest.fixture(scope="session")
def m4() -> ModelFile:
    return load_model("m4")


@pytest.fixture(scope="session")
def m6() -> ModelFile:
    return load_model("m6")


@pytest.fixture(scope="session")
def m7() -> ModelFile:
    return load_model("m7")


@pytest.fixture(scope="session")
def m8() -> ModelFile:
    return load_model("m8")


_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    failed: set[int] = set()
    seen: set[int] = set()
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m:
                continue
            n = int(m.group(1))
            seen.add(n)
            if status != "passed":
                failed.add(n)
    if not seen:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for n in sorted(seen):
        terminalreporter.write_line(
            f"criterion {n}: {'FAIL' if n in failed else 'PASS'}"
        )
