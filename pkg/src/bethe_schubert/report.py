"""Serializable run reports."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Mapping

import mpmath

from .master import CriticalOrbit
from .planes import PPlane
from .polycore import Polynomial, PolyOperator
from .problem_file import format_point
from .reconstruct import ReconstructionReport

REPORT_SCHEMA = 1

COMPLETE = "COMPLETE"
PARTIAL = "PARTIAL"
VERIFIED = "VERIFIED"
FAILED = "FAILED"

EXIT_CODES: Mapping[str, int] = {COMPLETE: 0, VERIFIED: 0, PARTIAL: 3, FAILED: 4}


def _number(value: Any, digits: int = 25) -> str | None:
    if value is None:
        return None
    if isinstance(value, (mpmath.mpf, mpmath.mpc, float, complex)):
        return mpmath.nstr(value, digits)
    return str(value)


def polynomial_strings(poly: Polynomial, digits: int = 25) -> list[str]:
    """Ascending coefficients, exact values verbatim."""

    if poly.is_exact:
        return [str(c) for c in poly.coeffs]
    with mpmath.workprec(poly.precision):
        return [mpmath.nstr(c, digits) for c in poly.coeffs]


def operator_strings(operator: PolyOperator, digits: int = 25) -> list[list[str]]:
    return [polynomial_strings(c, digits) for c in operator.coefficients]


def plane_strings(plane: PPlane, digits: int = 25) -> list[list[str]]:
    return [polynomial_strings(u, digits) for u in plane.basis]


@dataclass
class OrbitRecord:
    t: list[list[Any]]
    residual: str | None
    log_value: str | None
    exact: bool
    precision: int

    @classmethod
    def from_orbit(cls, orbit: CriticalOrbit) -> "OrbitRecord":
        if orbit.is_exact:
            t = [[format_point(v) for v in group] for group in orbit.rep.t]
        else:
            t = orbit.rep.as_strings(30)
        with mpmath.workprec(orbit.precision):
            return cls(
                t=t,
                residual=_number(orbit.residual_norm, 6),
                log_value=_number(orbit.log_value),
                exact=orbit.is_exact,
                precision=orbit.precision,
            )


@dataclass
class ReconstructionDigest:
    orbit: int
    verdict: str
    checks: dict[str, dict[str, Any]] = field(default_factory=dict)
    degrees: list[int] = field(default_factory=list)
    plane: list[list[str]] = field(default_factory=list)
    operator: list[list[str]] = field(default_factory=list)
    error: str | None = None

    @classmethod
    def from_report(cls, index: int, report: ReconstructionReport) -> "ReconstructionDigest":
        return cls(
            orbit=index,
            verdict=report.verdict,
            checks={name: check.to_dict() for name, check in sorted(report.checks.items())},
            degrees=list(report.plane.degrees),
            plane=plane_strings(report.plane),
            operator=operator_strings(report.operator),
        )

    @classmethod
    def from_error(cls, index: int, exc: Exception) -> "ReconstructionDigest":
        return cls(orbit=index, verdict=FAILED, error=f"{type(exc).__name__}: {exc}")

    @property
    def failures(self) -> list[str]:
        names = [name for name, check in self.checks.items() if not check["ok"]]
        return names + (["error"] if self.error else [])


@dataclass
class RunReport:
    command: str
    problem: dict[str, Any]
    bound: int
    verdict: str
    seed: int
    precision_bits: int
    starts_used: int
    orbits: list[OrbitRecord] = field(default_factory=list)
    reconstructions: list[ReconstructionDigest] = field(default_factory=list)
    planes_distinct: bool | None = None
    wall_time: float = 0.0
    schema: int = REPORT_SCHEMA

    @property
    def count(self) -> int:
        return len(self.orbits)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunReport":
        values = dict(data)
        values["orbits"] = [OrbitRecord(**row) for row in values.get("orbits", [])]
        values["reconstructions"] = [ReconstructionDigest(**row) for row in values.get("reconstructions", [])]
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in values.items() if key in known})


@dataclass
class CountReport:
    problem: dict[str, Any]
    bound: int
    dim_singular: int
    dominant: bool
    verdict: str
    schema: int = REPORT_SCHEMA

    @property
    def agree(self) -> bool:
        return self.bound == self.dim_singular

    @property
    def exit_code(self) -> int:
        return 0 if self.agree else EXIT_CODES[FAILED]

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["agree"] = self.agree
        return data


@dataclass
class SweepReport:
    template: dict[str, Any]
    trials: int
    seed: int
    expected: int
    counts: list[int]
    points: list[list[Any]]
    wall_time: float = 0.0
    schema: int = REPORT_SCHEMA

    @property
    def histogram(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for count in self.counts:
            out[str(count)] = out.get(str(count), 0) + 1
        return dict(sorted(out.items(), key=lambda item: int(item[0])))

    @property
    def verdict(self) -> str:
        return COMPLETE if all(count == self.expected for count in self.counts) else PARTIAL

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["histogram"] = self.histogram
        data["verdict"] = self.verdict
        return data


@dataclass
class ProfileReport:
    profile: dict[str, Any]
    operator: list[list[str]]
    special_form: dict[str, Any] | None = None
    heine_stieltjes: dict[str, list[str]] | None = None
    complementary_degrees: bool | None = None
    schema: int = REPORT_SCHEMA

    @property
    def exit_code(self) -> int:
        return 0

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
