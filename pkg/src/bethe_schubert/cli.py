from __future__ import annotations

from pathlib import Path
from typing import Any, Callable, Optional

import typer

from .config import InvalidSettingError, SolverSettings, configure_logging, load_environment
from .emitters import available_emitters, get_emitter
from .errors import BetheSchubertError, NumericError
from .problem_file import ProblemFile, load_problem_file
from .runs import count_run, profile_run, solve_run, sweep_run, verify_run

app = typer.Typer(
    add_completion=False,
    help="Bethe critical points, Wronskian planes and Schubert intersection counts.",
)

INVALID_INPUT = 2


def _format_completions(_: str, incomplete: str) -> list[str]:
    return [name for name in available_emitters() if name.startswith(incomplete)]


def _fail(message: str, code: int = INVALID_INPUT) -> None:
    typer.secho(message, err=True, fg=typer.colors.RED)
    raise typer.Exit(code=code)


@app.callback()
def initialize(
    ctx: typer.Context,
    env_file: list[Path] = typer.Option(
        None,
        "--env-file",
        help="Additional env files to load (in addition to .env/.envfile).",
    ),
    log_level: Optional[str] = typer.Option(
        None,
        "--log-level",
        help="Log level for diagnostics on stderr (default from BETHE_SCHUBERT_LOG_LEVEL).",
    ),
) -> None:
    """Load environment settings and configure logging."""

    ctx.ensure_object(dict)
    env_files = [str(path) for path in env_file] if env_file else None
    load_environment(additional_files=env_files)

    try:
        settings = SolverSettings.from_env()
        if log_level is not None:
            settings = settings.merged(log_level=log_level.upper())
    except InvalidSettingError as exc:
        _fail(str(exc))

    try:
        configure_logging(settings.log_level)
    except ValueError as exc:
        _fail(f"Invalid log level: {exc}")
    ctx.obj["settings"] = settings


def _load(path: Path) -> ProblemFile:
    try:
        return load_problem_file(path)
    except BetheSchubertError as exc:
        _fail(str(exc))


def _settings(ctx: typer.Context, spec: ProblemFile, **flags: Any) -> SolverSettings:
    base: SolverSettings = ctx.obj["settings"]
    try:
        return spec.settings(base).merged(**flags)
    except InvalidSettingError as exc:
        _fail(str(exc))


def _run(output_format: str, action: Callable[[], Any]) -> None:
    try:
        emitter = get_emitter(output_format)
    except ValueError as exc:
        _fail(str(exc))
    try:
        report = action()
    except NumericError as exc:
        _fail(f"numeric failure: {exc}", code=4)
    except BetheSchubertError as exc:
        _fail(str(exc))
    emitter.emit(report.to_dict())
    if report.exit_code:
        raise typer.Exit(code=report.exit_code)


FORMAT_OPTION = typer.Option(
    "json", "--format", "-f", help="Report format.", autocompletion=_format_completions
)
SEED_OPTION = typer.Option(None, "--seed", help="Seed for the multistart streams.")
PRECISION_OPTION = typer.Option(None, "--precision-bits", min=53, help="Working precision in bits.")
STARTS_OPTION = typer.Option(None, "--starts", min=1, help="Maximum number of Newton starts.")
MAX_ITER_OPTION = typer.Option(None, "--max-iter", min=1, help="Newton iterations per start.")
WORKERS_OPTION = typer.Option(None, "--workers", min=1, help="Worker processes for the multistart.")


@app.command()
def count(
    problem: Path = typer.Argument(..., help="Problem file (JSON, '-' for stdin)."),
    output_format: str = FORMAT_OPTION,
) -> None:
    """Print the intersection number and the weight multiplicity for a problem."""

    spec = _load(problem)
    _run(output_format, lambda: count_run(spec))


@app.command()
def solve(
    ctx: typer.Context,
    problem: Path = typer.Argument(..., help="Problem file (JSON, '-' for stdin)."),
    seed: Optional[int] = SEED_OPTION,
    precision_bits: Optional[int] = PRECISION_OPTION,
    starts: Optional[int] = STARTS_OPTION,
    max_iter: Optional[int] = MAX_ITER_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    output_format: str = FORMAT_OPTION,
) -> None:
    """Find the critical orbits of the master function."""

    spec = _load(problem)
    settings = _settings(
        ctx, spec, seed=seed, precision_bits=precision_bits, starts=starts, max_iter=max_iter, workers=workers
    )
    _run(output_format, lambda: solve_run(spec, settings))


@app.command()
def verify(
    ctx: typer.Context,
    problem: Path = typer.Argument(..., help="Problem file (JSON, '-' for stdin)."),
    seed: Optional[int] = SEED_OPTION,
    precision_bits: Optional[int] = PRECISION_OPTION,
    starts: Optional[int] = STARTS_OPTION,
    max_iter: Optional[int] = MAX_ITER_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    output_format: str = FORMAT_OPTION,
) -> None:
    """Solve, reconstruct each plane of polynomials and verify it."""

    spec = _load(problem)
    settings = _settings(
        ctx, spec, seed=seed, precision_bits=precision_bits, starts=starts, max_iter=max_iter, workers=workers
    )
    _run(output_format, lambda: verify_run(spec, settings))


@app.command()
def sweep(
    ctx: typer.Context,
    template: Path = typer.Argument(..., help="Level-form problem file; its points are resampled."),
    trials: int = typer.Option(50, "--trials", "-n", min=1, help="Number of random point sets."),
    seed: Optional[int] = SEED_OPTION,
    precision_bits: Optional[int] = PRECISION_OPTION,
    starts: Optional[int] = STARTS_OPTION,
    max_iter: Optional[int] = MAX_ITER_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    output_format: str = FORMAT_OPTION,
) -> None:
    """Count orbits over random marked points and compare with the expected number."""

    spec = _load(template)
    settings = _settings(
        ctx, spec, seed=seed, precision_bits=precision_bits, starts=starts, max_iter=max_iter, workers=workers
    )
    _run(output_format, lambda: sweep_run(spec, trials, settings.seed, settings))


@app.command()
def profile(
    problem: Path = typer.Argument(..., help="File with a 'plane' section, 'd' and optional points 'z'."),
    output_format: str = FORMAT_OPTION,
) -> None:
    """Exponents, Schubert indices and special-form verdicts of a plane of polynomials."""

    spec = _load(problem)
    _run(output_format, lambda: profile_run(spec))


def main() -> None:
    app()


if __name__ == "__main__":  # pragma: no cover
    main()
