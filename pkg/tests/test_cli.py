"""CLI tests through Typer's runner."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from bethe_schubert.cli import app

runner = CliRunner()

WORKED = {"p": 2, "d": 2, "z": [0, 1], "w": [[1, 0], [1, 0], [0, 0]]}
SPECIAL_P3 = {"p": 3, "z": [0, 1, 2], "m": [1, 1, 1], "k": [1, 0], "solver": {"starts": 48, "seed": 7}}


@pytest.fixture
def problem_file(tmp_path: Path):
    def write(data, name: str = "problem.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


def invoke(*args: str):
    return runner.invoke(app, ["--log-level", "ERROR", *args])


class TestCount:
    """The count command."""

    def test_json(self, clean_env, problem_file) -> None:
        """Counts are printed as sorted JSON."""
        result = invoke("count", problem_file(SPECIAL_P3))
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["bound"] == payload["dim_singular"] == 2
        assert payload["agree"] is True

    def test_text(self, clean_env, problem_file) -> None:
        """The text format renders a table."""
        result = invoke("count", problem_file(WORKED), "--format", "text")
        assert result.exit_code == 0, result.output
        assert "dim_singular" in result.stdout

    def test_unknown_format(self, clean_env, problem_file) -> None:
        """Unknown formats are invalid input."""
        result = invoke("count", problem_file(WORKED), "-f", "yaml")
        assert result.exit_code == 2

    def test_missing_file(self, clean_env, tmp_path: Path) -> None:
        """Unreadable files are invalid input."""
        result = invoke("count", str(tmp_path / "absent.json"))
        assert result.exit_code == 2

    def test_rejected_problem(self, clean_env, problem_file) -> None:
        """Inconsistent indices are invalid input."""
        result = invoke("count", problem_file({**WORKED, "w": [[1, 0], [0, 0], [0, 0]]}))
        assert result.exit_code == 2


class TestSolve:
    """The solve command."""

    def test_worked(self, clean_env, problem_file) -> None:
        """The worked instance completes with the exact orbit 1/2."""
        result = invoke("solve", problem_file(WORKED), "--seed", "3", "--starts", "16")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["verdict"] == "COMPLETE"
        assert payload["orbits"][0]["t"] == [[[1, 2]]]
        assert payload["seed"] == 3

    def test_partial_exit_code(self, clean_env, problem_file) -> None:
        """Incomplete searches exit with 3."""
        result = invoke("solve", problem_file(SPECIAL_P3), "--starts", "1")
        assert result.exit_code == 3
        assert json.loads(result.stdout)["verdict"] == "PARTIAL"

    def test_environment_settings(self, clean_env, problem_file) -> None:
        """Environment settings apply below the file's solver block."""
        clean_env.setenv("BETHE_SCHUBERT_PRECISION_BITS", "192")
        clean_env.setenv("BETHE_SCHUBERT_SEED", "99")
        result = invoke("solve", problem_file(SPECIAL_P3))
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["precision_bits"] == 192
        assert payload["seed"] == 7

    def test_invalid_environment(self, clean_env, problem_file) -> None:
        """Broken environment settings are invalid input."""
        clean_env.setenv("BETHE_SCHUBERT_STARTS", "lots")
        result = invoke("solve", problem_file(WORKED))
        assert result.exit_code == 2

    def test_precision_floor(self, clean_env, problem_file) -> None:
        """Precisions below 53 bits are rejected by the option parser."""
        result = invoke("solve", problem_file(WORKED), "--precision-bits", "16")
        assert result.exit_code == 2


class TestVerify:
    """The verify command."""

    def test_worked(self, clean_env, problem_file) -> None:
        """The worked instance verifies."""
        result = invoke("verify", problem_file(WORKED), "--seed", "3")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["verdict"] == "VERIFIED"
        assert payload["reconstructions"][0]["degrees"] == [1, 2]

    def test_special_p3(self, clean_env, problem_file) -> None:
        """Both p=3 planes verify and differ."""
        result = invoke("verify", problem_file(SPECIAL_P3))
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["planes_distinct"] is True
        assert len(payload["reconstructions"]) == 2


class TestSweep:
    """The sweep command."""

    def test_small_sweep(self, clean_env, problem_file) -> None:
        """Two trials over three spin-1/2 points."""
        template = {"p": 2, "z": [0, 1, 3], "m": [1, 1, 1], "k": [1]}
        result = invoke("sweep", problem_file(template), "-n", "2", "--seed", "4")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["histogram"] == {"2": 2}
        assert payload["expected"] == 2

    def test_w_form_template(self, clean_env, problem_file) -> None:
        """Templates must be in level form."""
        result = invoke("sweep", problem_file(WORKED), "-n", "1")
        assert result.exit_code == 2


class TestProfile:
    """The profile command."""

    def test_plane(self, clean_env, problem_file) -> None:
        """A plane file yields the profile and the special-form verdict."""
        data = {"p": 2, "d": 2, "z": [0, 1], "plane": [[[-1, 2], 1], [0, 0, 1]]}
        result = invoke("profile", problem_file(data))
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["special_form"]["ok"] is True
        assert payload["profile"]["infinity"]["index"] == [0, 0]

    def test_missing_plane(self, clean_env, problem_file) -> None:
        """Files without a plane are invalid input."""
        result = invoke("profile", problem_file(WORKED))
        assert result.exit_code == 2
