"""Tests for environment-driven solver settings."""

from __future__ import annotations

import logging
from pathlib import Path

import pytest

from bethe_schubert.config import (
    InvalidSettingError,
    SolverSettings,
    configure_logging,
    load_environment,
)
from bethe_schubert.master import SolverBudget


class TestFromEnv:
    def test_defaults(self, clean_env) -> None:
        """No variables means the dataclass defaults."""
        assert SolverSettings.from_env() == SolverSettings()

    def test_reads_prefixed_variables(self, clean_env) -> None:
        """Integers and the log level come from BETHE_SCHUBERT_*."""
        clean_env.setenv("BETHE_SCHUBERT_PRECISION_BITS", "256")
        clean_env.setenv("BETHE_SCHUBERT_SEED", "42")
        clean_env.setenv("BETHE_SCHUBERT_LOG_LEVEL", "debug")
        settings = SolverSettings.from_env()
        assert settings.precision_bits == 256
        assert settings.seed == 42
        assert settings.log_level == "DEBUG"

    def test_empty_values_are_ignored(self, clean_env) -> None:
        """Blank variables fall back to the defaults."""
        clean_env.setenv("BETHE_SCHUBERT_STARTS", "")
        assert SolverSettings.from_env().starts == SolverSettings().starts

    def test_non_integer(self, clean_env) -> None:
        """Unparseable values name the variable."""
        clean_env.setenv("BETHE_SCHUBERT_STARTS", "many")
        with pytest.raises(InvalidSettingError, match="BETHE_SCHUBERT_STARTS"):
            SolverSettings.from_env()

    def test_unknown_log_level(self, clean_env) -> None:
        """Log levels must be known to logging."""
        clean_env.setenv("BETHE_SCHUBERT_LOG_LEVEL", "chatty")
        with pytest.raises(InvalidSettingError, match="BETHE_SCHUBERT_LOG_LEVEL"):
            SolverSettings.from_env()

    def test_out_of_range(self, clean_env) -> None:
        """Values are validated after parsing."""
        clean_env.setenv("BETHE_SCHUBERT_PRECISION_BITS", "32")
        with pytest.raises(InvalidSettingError, match="precision_bits"):
            SolverSettings.from_env()


class TestMerged:
    def test_none_is_ignored(self) -> None:
        """None overrides leave the value alone."""
        settings = SolverSettings(seed=3).merged(seed=None, starts=5)
        assert settings.seed == 3
        assert settings.starts == 5

    def test_validation(self) -> None:
        """Overrides are validated."""
        with pytest.raises(InvalidSettingError, match="max_precision_bits"):
            SolverSettings().merged(precision_bits=2048)

    def test_budget(self) -> None:
        """Settings translate into a solver budget."""
        budget = SolverSettings(starts=9, workers=2).budget()
        assert budget == SolverBudget(starts=9, max_iter=80, precision_bits=128, max_precision_bits=1024, workers=2)


class TestLoadEnvironment:
    def test_additional_file(self, clean_env, tmp_path: Path) -> None:
        """Extra env files are loaded without overriding existing variables."""
        env_file = tmp_path / "solver.env"
        env_file.write_text("BETHE_SCHUBERT_STARTS=17\nBETHE_SCHUBERT_SEED=5\n")
        clean_env.setenv("BETHE_SCHUBERT_SEED", "1")
        load_environment(additional_files=[env_file])
        settings = SolverSettings.from_env()
        assert settings.starts == 17
        assert settings.seed == 1

    def test_override_variable(self, clean_env, tmp_path: Path) -> None:
        """BETHE_SCHUBERT_ENV_FILE points at a file loaded first."""
        env_file = tmp_path / "override.env"
        env_file.write_text("BETHE_SCHUBERT_WORKERS=3\n")
        clean_env.setenv("BETHE_SCHUBERT_ENV_FILE", str(env_file))
        load_environment()
        assert SolverSettings.from_env().workers == 3

    def test_missing_files_are_skipped(self, clean_env, tmp_path: Path) -> None:
        """Nonexistent paths are not an error."""
        load_environment(additional_files=[tmp_path / "absent.env"])


class TestConfigureLogging:
    def test_single_handler(self) -> None:
        """Repeated configuration keeps one handler on the package logger."""
        configure_logging("INFO")
        configure_logging("debug")
        logger = logging.getLogger("bethe_schubert")
        assert len(logger.handlers) == 1
        assert logger.level == logging.DEBUG
        configure_logging("WARNING")
