"""Shared fixtures: the worked instances used across the suite."""

from __future__ import annotations

import os
from typing import Iterator

from dotenv import load_dotenv
import pytest

from bethe_schubert.config import SolverSettings
from bethe_schubert.master import SchubertProblem, SolverBudget, build_problem, build_problem_from_levels


def pytest_configure() -> None:
    """Load environment variables before tests run."""
    load_dotenv(".env")
    load_dotenv(".envfile")


@pytest.fixture
def worked_problem() -> SchubertProblem:
    """p=2, z=(0,1), m=(1,1), one Bethe root."""
    return build_problem(2, 2, (0, 1), [(1, 0), (1, 0), (0, 0)])


@pytest.fixture
def special_p3_problem() -> SchubertProblem:
    """p=3, z=(0,1,2), special indices (1,0,0), k=(1,0)."""
    return build_problem_from_levels(3, (0, 1, 2), [(1, 0, 0)] * 3, (1, 0))


@pytest.fixture
def hypergeometric_problem() -> SchubertProblem:
    """p=3, z=(0,1), special indices (2,0,0), k=(2,0), d=4."""
    return build_problem_from_levels(3, (0, 1), [(2, 0, 0)] * 2, (2, 0))


@pytest.fixture
def budget() -> SolverBudget:
    return SolverBudget(starts=48, max_iter=80, precision_bits=128, max_precision_bits=512)


@pytest.fixture
def settings() -> SolverSettings:
    return SolverSettings(starts=48, max_iter=80, precision_bits=128, max_precision_bits=512, seed=7)


@pytest.fixture
def clean_env(monkeypatch: pytest.MonkeyPatch) -> Iterator[pytest.MonkeyPatch]:
    """Remove every BETHE_SCHUBERT_* variable for the duration of a test."""
    for name in list(os.environ):
        if name.startswith("BETHE_SCHUBERT_"):
            monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("BETHE_SCHUBERT_ENV_FILE", "/nonexistent/.env")
    yield monkeypatch
    for name in list(os.environ):
        if name.startswith("BETHE_SCHUBERT_"):
            del os.environ[name]
