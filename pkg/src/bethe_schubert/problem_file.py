"""JSON problem files (schema 1).

A point is an integer, a ``[num, den]`` pair, a ``[[num, den], [num, den]]``
re/im pair, or a decimal string such as ``"0.25"`` or ``"0.5+1.5j"``.
Indices are given either as ``w`` (one per marked point plus infinity) or in
level form as ``indices``/``m`` plus ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import logging
from pathlib import Path
import sys
from typing import Any, Mapping, Sequence

import mpmath
import sympy

from .config import SolverSettings
from .errors import ProblemFileError
from .master import SchubertProblem, build_problem, build_problem_from_levels
from .planes import PPlane, plane_from_coefficients
from .polycore import DEFAULT_PRECISION

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SOLVER_KEYS = ("precision_bits", "max_precision_bits", "starts", "max_iter", "seed", "workers")


def _integer(raw: Any, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ProblemFileError(f"{where} must be an integer, got {raw!r}")
    return raw


def _rational(raw: Any, where: str) -> sympy.Rational:
    if isinstance(raw, int) and not isinstance(raw, bool):
        return sympy.Integer(raw)
    if isinstance(raw, list) and len(raw) == 2:
        num, den = (_integer(v, where) for v in raw)
        if den == 0:
            raise ProblemFileError(f"{where} has a zero denominator")
        return sympy.Rational(num, den)
    raise ProblemFileError(f"{where} must be an integer or a [num, den] pair, got {raw!r}")


def parse_point(raw: Any, where: str = "point", precision: int = DEFAULT_PRECISION) -> Any:
    """Exact Gaussian rational for integer/pair forms, ``mpc`` for decimal strings."""

    if isinstance(raw, str):
        try:
            with mpmath.workprec(precision):
                return mpmath.mpc(mpmath.mpmathify(raw.replace(" ", "")))
        except (ValueError, TypeError) as exc:
            raise ProblemFileError(f"{where} is not a number: {raw!r}") from exc
    if isinstance(raw, list) and len(raw) == 2 and all(isinstance(v, list) for v in raw):
        return _rational(raw[0], f"{where} (re)") + sympy.I * _rational(raw[1], f"{where} (im)")
    return _rational(raw, where)


def format_point(value: Any, digits: int = 30) -> Any:
    """Inverse of :func:`parse_point` for exact values; decimal strings otherwise."""

    if isinstance(value, (mpmath.mpc, mpmath.mpf, float, complex)):
        return mpmath.nstr(mpmath.mpc(value), digits)
    re, im = sympy.sympify(value).as_real_imag()
    if im == 0:
        return [int(re.p), int(re.q)]
    return [[int(re.p), int(re.q)], [int(im.p), int(im.q)]]


def _index_list(raw: Any, where: str) -> list[tuple[int, ...]]:
    if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
        raise ProblemFileError(f"{where} must be a list of integer lists")
    return [tuple(_integer(v, where) for v in row) for row in raw]


@dataclass
class ProblemFile:
    p: int
    z: tuple[Any, ...] = ()
    d: int | None = None
    w: list[tuple[int, ...]] | None = None
    indices: list[tuple[int, ...]] | None = None
    k: tuple[int, ...] | None = None
    solver: dict[str, int] = field(default_factory=dict)
    plane: list[list[Any]] | None = None
    precision_bits: int = DEFAULT_PRECISION
    source: str | None = None

    @property
    def is_level_form(self) -> bool:
        return self.indices is not None and self.k is not None

    def build(self) -> SchubertProblem:
        """The validated problem, raising ``ProblemRejection`` on inconsistent data."""

        if self.w is not None:
            if self.d is None:
                raise ProblemFileError("'d' is required when indices are given as 'w'")
            return build_problem(self.p, self.d, self.z, self.w)
        if self.is_level_form:
            return build_problem_from_levels(self.p, self.z, self.indices, self.k)
        raise ProblemFileError("a problem needs either 'w' or 'indices'/'m' together with 'k'")

    def build_plane(self) -> PPlane:
        if self.plane is None:
            raise ProblemFileError("no 'plane' section in the problem file")
        numeric = any(isinstance(c, str) for row in self.plane for c in row)
        rows = [[parse_point(c, "plane coefficient", self.precision_bits) for c in row] for row in self.plane]
        return plane_from_coefficients(rows, self.precision_bits if numeric else None)

    def settings(self, base: SolverSettings | None = None) -> SolverSettings:
        """``base`` (usually from the environment) overridden by the file's solver block."""

        base = base or SolverSettings()
        return base.merged(**self.solver)

    def with_points(self, z: Sequence[Any]) -> "ProblemFile":
        return ProblemFile(
            p=self.p,
            z=tuple(z),
            d=self.d,
            w=self.w,
            indices=self.indices,
            k=self.k,
            solver=dict(self.solver),
            plane=self.plane,
            precision_bits=self.precision_bits,
            source=self.source,
        )

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"schema": SCHEMA_VERSION, "p": self.p, "z": [format_point(v) for v in self.z]}
        if self.d is not None:
            data["d"] = self.d
        if self.w is not None:
            data["w"] = [list(row) for row in self.w]
        if self.indices is not None:
            data["indices"] = [list(row) for row in self.indices]
        if self.k is not None:
            data["k"] = list(self.k)
        if self.solver:
            data["solver"] = dict(self.solver)
        if self.plane is not None:
            data["plane"] = self.plane
        return data


def parse_problem(data: Mapping[str, Any], source: str | None = None) -> ProblemFile:
    if not isinstance(data, Mapping):
        raise ProblemFileError("a problem file must hold a JSON object")
    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ProblemFileError(f"unsupported schema {schema!r}, expected {SCHEMA_VERSION}")
    if "p" not in data:
        raise ProblemFileError("missing required key 'p'")
    p = _integer(data["p"], "p")

    solver_raw = data.get("solver", {})
    if not isinstance(solver_raw, Mapping):
        raise ProblemFileError("'solver' must be an object")
    unknown = sorted(set(solver_raw) - set(SOLVER_KEYS))
    if unknown:
        raise ProblemFileError(f"unknown solver settings: {', '.join(unknown)}")
    solver = {key: _integer(value, f"solver.{key}") for key, value in solver_raw.items()}
    precision = solver.get("precision_bits", DEFAULT_PRECISION)

    raw_points = data.get("z", [])
    if not isinstance(raw_points, list):
        raise ProblemFileError("'z' must be a list of points")
    z = tuple(parse_point(raw, f"z[{j}]", precision) for j, raw in enumerate(raw_points))

    d = _integer(data["d"], "d") if "d" in data else None
    w = _index_list(data["w"], "w") if "w" in data else None
    indices = _index_list(data["indices"], "indices") if "indices" in data else None
    if "m" in data:
        if indices is not None:
            raise ProblemFileError("give either 'indices' or 'm', not both")
        m = [_integer(v, "m") for v in data["m"]]
        indices = [(mj,) + (0,) * (p - 1) for mj in m]
    k = tuple(_integer(v, "k") for v in data["k"]) if "k" in data else None
    if w is not None and (indices is not None or k is not None):
        raise ProblemFileError("give either 'w' or the level form ('indices'/'m' with 'k'), not both")

    plane = data.get("plane")
    if plane is not None and (not isinstance(plane, list) or not all(isinstance(row, list) for row in plane)):
        raise ProblemFileError("'plane' must be a list of ascending coefficient lists")

    return ProblemFile(
        p=p,
        z=z,
        d=d,
        w=w,
        indices=indices,
        k=k,
        solver=solver,
        plane=plane,
        precision_bits=precision,
        source=source,
    )


def load_problem_file(path: str | Path) -> ProblemFile:
    """Read a problem file; ``-`` reads standard input."""

    name = str(path)
    try:
        text = sys.stdin.read() if name == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError(f"cannot read {name}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{name} is not valid JSON: {exc}") from exc
    logger.debug("loaded problem file %s", name)
    return parse_problem(data, source=name)
