"""Tests for JSON problem files."""

from __future__ import annotations

import json
from pathlib import Path

import mpmath
import pytest
import sympy

from bethe_schubert.config import SolverSettings
from bethe_schubert.errors import ProblemFileError, ProblemRejection
from bethe_schubert.problem_file import format_point, load_problem_file, parse_point, parse_problem

WORKED = {"p": 2, "d": 2, "z": [0, 1], "w": [[1, 0], [1, 0], [0, 0]]}


class TestParsePoint:
    def test_integer(self) -> None:
        """Integers stay exact."""
        assert parse_point(3) == sympy.Integer(3)

    def test_fraction(self) -> None:
        """[num, den] is a rational."""
        assert parse_point([1, 2]) == sympy.Rational(1, 2)

    def test_gaussian(self) -> None:
        """[[num, den], [num, den]] is a Gaussian rational."""
        assert parse_point([[1, 2], [-3, 1]]) == sympy.Rational(1, 2) - 3 * sympy.I

    def test_decimal_string(self) -> None:
        """Strings become mpc values."""
        value = parse_point("0.5+1.5j", precision=128)
        assert isinstance(value, mpmath.mpc)
        assert value == mpmath.mpc(0.5, 1.5)

    @pytest.mark.parametrize("raw", [[1, 0], "half", True, [1, 2, 3], 0.5])
    def test_rejects(self, raw) -> None:
        """Malformed points are file errors."""
        with pytest.raises(ProblemFileError):
            parse_point(raw)

    def test_format_inverts_exact(self) -> None:
        """Exact values format back to the file forms."""
        assert format_point(sympy.Rational(-3, 4)) == [-3, 4]
        assert format_point(sympy.Rational(1, 2) + sympy.I) == [[1, 2], [1, 1]]
        assert parse_point(format_point(sympy.Rational(1, 2) + sympy.I)) == sympy.Rational(1, 2) + sympy.I


class TestParseProblem:
    def test_worked_problem(self) -> None:
        """The w form builds the worked instance."""
        spec = parse_problem(WORKED)
        assert not spec.is_level_form
        assert spec.build().k.k == (1,)

    def test_level_form_with_m(self) -> None:
        """'m' is shorthand for special indices."""
        spec = parse_problem({"p": 3, "z": [0, 1, 2], "m": [1, 1, 1], "k": [1, 0]})
        assert spec.is_level_form
        assert spec.indices == [(1, 0, 0)] * 3
        assert spec.build().degs == (0, 2, 4)

    def test_solver_block(self) -> None:
        """The solver block overrides the base settings."""
        spec = parse_problem({**WORKED, "solver": {"starts": 7, "seed": 2}})
        settings = spec.settings(SolverSettings(starts=64, seed=0, workers=2))
        assert (settings.starts, settings.seed, settings.workers) == (7, 2, 2)

    def test_solver_precision_drives_points(self) -> None:
        """Decimal points are read at the solver precision."""
        spec = parse_problem({**WORKED, "z": ["0", "0.1"], "solver": {"precision_bits": 256, "max_precision_bits": 512}})
        assert spec.precision_bits == 256
        with mpmath.workprec(256):
            assert abs(spec.z[1] - mpmath.mpf("0.1")) < mpmath.mpf(10) ** -70

    @pytest.mark.parametrize(
        "data,match",
        [
            ({"d": 2}, "missing required key 'p'"),
            ({**WORKED, "schema": 2}, "unsupported schema"),
            ({**WORKED, "solver": {"speed": 1}}, "unknown solver settings"),
            ({**WORKED, "k": [1]}, "not both"),
            ({"p": 3, "z": [0], "m": [1], "indices": [[1, 0, 0]], "k": [0, 0]}, "not both"),
            ({**WORKED, "z": 0}, "'z' must be a list"),
            ({**WORKED, "plane": [1, 2]}, "'plane' must be"),
        ],
    )
    def test_rejections(self, data, match) -> None:
        """Malformed files raise ProblemFileError."""
        with pytest.raises(ProblemFileError, match=match):
            parse_problem(data)

    def test_missing_d(self) -> None:
        """The w form needs d at build time."""
        spec = parse_problem({"p": 2, "z": [0, 1], "w": [[1, 0], [1, 0], [0, 0]]})
        with pytest.raises(ProblemFileError, match="'d' is required"):
            spec.build()

    def test_neither_form(self) -> None:
        """A file with only points cannot be built."""
        with pytest.raises(ProblemFileError):
            parse_problem({"p": 2, "z": [0, 1]}).build()

    def test_inconsistent_data(self) -> None:
        """Valid JSON with inconsistent indices surfaces the rejection."""
        spec = parse_problem({"p": 2, "d": 2, "z": [0, 1], "w": [[1, 0], [0, 0], [0, 0]]})
        with pytest.raises(ProblemRejection, match="codimension-sum"):
            spec.build()

    def test_round_trip(self) -> None:
        """to_dict reproduces a parseable file."""
        spec = parse_problem({"p": 3, "z": [[1, 2], 1, [[0, 1], [1, 1]]], "m": [1, 1, 1], "k": [1, 0]})
        again = parse_problem(spec.to_dict())
        assert again.z == spec.z
        assert again.indices == spec.indices
        assert again.k == spec.k

    def test_with_points(self) -> None:
        """Replacing the points keeps everything else."""
        spec = parse_problem({"p": 2, "z": [0, 1, 3, 7], "m": [1, 1, 1, 1], "k": [2]})
        moved = spec.with_points((0, 2, 5, 9))
        assert moved.z == (0, 2, 5, 9)
        assert moved.k == spec.k and moved.indices == spec.indices


class TestPlaneSection:
    def test_exact_plane(self) -> None:
        """Integer and fraction coefficients give an exact plane."""
        spec = parse_problem({"p": 2, "d": 2, "plane": [[[-1, 2], 1], [0, 0, 1]]})
        plane = spec.build_plane()
        assert plane.is_exact and plane.degrees == (1, 2)

    def test_numeric_plane(self) -> None:
        """Decimal strings give a numeric plane."""
        spec = parse_problem({"p": 2, "d": 2, "plane": [["-0.5", "1"], [0, 0, 1]]})
        plane = spec.build_plane()
        assert not plane.is_exact and plane.degrees == (1, 2)

    def test_missing_plane(self) -> None:
        """build_plane needs a plane section."""
        with pytest.raises(ProblemFileError, match="no 'plane'"):
            parse_problem(WORKED).build_plane()


class TestLoadProblemFile:
    def test_reads_file(self, tmp_path: Path) -> None:
        """Files are parsed with their path as source."""
        path = tmp_path / "worked.json"
        path.write_text(json.dumps(WORKED))
        spec = load_problem_file(path)
        assert spec.source == str(path)
        assert spec.build().lr_bound() == 1

    def test_invalid_json(self, tmp_path: Path) -> None:
        """Broken JSON is a file error."""
        path = tmp_path / "broken.json"
        path.write_text("{p: 2")
        with pytest.raises(ProblemFileError, match="not valid JSON"):
            load_problem_file(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        """Unreadable paths are file errors."""
        with pytest.raises(ProblemFileError, match="cannot read"):
            load_problem_file(tmp_path / "absent.json")

    def test_not_an_object(self, tmp_path: Path) -> None:
        """The top level must be an object."""
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ProblemFileError, match="JSON object"):
            load_problem_file(path)
