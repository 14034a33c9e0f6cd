from __future__ import annotations

from dataclasses import dataclass, fields, replace
import logging
import os
from pathlib import Path
from typing import Any, Sequence

from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler

from .master import SolverBudget

DEFAULT_ENV_FILES = (".env", ".envfile")
ENV_PREFIX = "BETHE_SCHUBERT_"


class InvalidSettingError(RuntimeError):
    """Raised when a solver setting from the environment cannot be used."""


def load_environment(
    additional_files: Sequence[str | os.PathLike[str]] | None = None,
) -> None:
    """Load environment variables from .env-style files if they exist."""

    candidates: list[Path] = []
    override = os.environ.get(f"{ENV_PREFIX}ENV_FILE")
    if override:
        candidates.append(Path(override).expanduser())

    if additional_files:
        candidates.extend(Path(f).expanduser() for f in additional_files)

    candidates.extend(Path(name) for name in DEFAULT_ENV_FILES)

    seen: set[Path] = set()
    for path in candidates:
        path = path.resolve()
        if path in seen or not path.exists():
            continue
        load_dotenv(path, override=False)
        seen.add(path)


def configure_logging(level: str | int = "WARNING") -> None:
    """Route package logs through a single rich handler on stderr."""

    root = logging.getLogger("bethe_schubert")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level.upper() if isinstance(level, str) else level)


@dataclass(slots=True)
class SolverSettings:
    precision_bits: int = 128
    max_precision_bits: int = 1024
    starts: int = 64
    max_iter: int = 80
    seed: int = 0
    workers: int = 1
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "SolverSettings":
        values: dict[str, Any] = {}
        bad: list[str] = []
        for field in fields(cls):
            name = f"{ENV_PREFIX}{field.name.upper()}"
            raw = os.environ.get(name)
            if raw is None or raw == "":
                continue
            if field.name == "log_level":
                level = raw.strip().upper()
                if not isinstance(logging.getLevelName(level), int):
                    bad.append(name)
                    continue
                values[field.name] = level
                continue
            try:
                values[field.name] = int(raw)
            except ValueError:
                bad.append(name)

        if bad:
            raise InvalidSettingError(
                f"Invalid setting(s): {', '.join(bad)}. "
                "Fix them in the environment or an env file."
            )

        settings = cls(**values)
        settings.validate()
        return settings

    def merged(self, **overrides: Any) -> "SolverSettings":
        """Return a copy with every non-None override applied."""

        changes = {key: value for key, value in overrides.items() if value is not None}
        settings = replace(self, **changes)
        settings.validate()
        return settings

    def validate(self) -> None:
        problems: list[str] = []
        if self.precision_bits < 53:
            problems.append("precision_bits must be >= 53")
        if self.max_precision_bits < self.precision_bits:
            problems.append("max_precision_bits must be >= precision_bits")
        if self.starts < 1:
            problems.append("starts must be >= 1")
        if self.max_iter < 1:
            problems.append("max_iter must be >= 1")
        if self.workers < 1:
            problems.append("workers must be >= 1")
        if problems:
            raise InvalidSettingError("; ".join(problems))

    def budget(self) -> SolverBudget:
        return SolverBudget(
            starts=self.starts,
            max_iter=self.max_iter,
            precision_bits=self.precision_bits,
            max_precision_bits=self.max_precision_bits,
            workers=self.workers,
        )
