"""A p-plane of polynomials read as a Fuchsian equation.

The operator comes from the (p+1) x (p+1) Wronski determinant of u and the
basis.  Exponents are rank filtrations of Taylor coefficients, exponents at
infinity are realized degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Any, Sequence

import mpmath
import sympy

from .errors import DomainError, StructuralError
from .planes import PPlane, default_tolerance, root_orders_at
from .polycore import (
    ExactPoly,
    NumPoly,
    PolyOperator,
    Polynomial,
    exact_scalar,
    is_exact_scalar,
    normalize_operator,
    poly_det,
    to_mpc,
)
from .reconstruct import clustered_roots, kernel_plane
from .schubert import LevelCounts, SchubertIndex, WeightVector, dim_singular, weight_of_index

logger = logging.getLogger(__name__)

INFINITY = "inf"


def equation_from_plane(plane: PPlane) -> PolyOperator:
    """Expand det(u, u_1..u_p) along the u column, gcd-reduced with a monic leading coefficient."""

    p = plane.p
    basis = list(plane.basis)
    derivatives = [[u.derivative(r) for u in basis] for r in range(p + 1)]
    coefficients: list[Polynomial] = []
    for r in range(p + 1):
        minor = [row for q, row in enumerate(derivatives) if q != r]
        det = poly_det(minor)
        coefficients.append(-det if r % 2 else det)
    candidates: Sequence[Any] = ()
    if not plane.is_exact and coefficients[-1].degree > 0:
        candidates = [root for root, _ in clustered_roots(coefficients[-1], plane.precision)]
    return normalize_operator(coefficients, candidates)


@dataclass(frozen=True)
class PointProfile:
    """Exponents (decreasing), Schubert index and Wronskian multiplicity at one point."""

    point: Any
    exponents: tuple[int, ...]
    index: SchubertIndex
    multiplicity: int

    @property
    def codim(self) -> int:
        return self.index.size

    @property
    def is_infinity(self) -> bool:
        return isinstance(self.point, str) and self.point == INFINITY

    def to_dict(self) -> dict[str, Any]:
        if self.is_infinity or is_exact_scalar(self.point):
            point = str(self.point)
        else:
            point = mpmath.nstr(self.point, 20)
        return {
            "point": point,
            "exponents": list(self.exponents),
            "index": list(self.index.w),
            "codim": self.codim,
            "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True)
class FuchsProfile:
    p: int
    d: int
    wronskian: Polynomial
    points: tuple[PointProfile, ...]
    infinity: PointProfile

    @property
    def inf_multiplicity(self) -> int:
        return self.p * (self.d + 1 - self.p) - int(self.wronskian.degree)

    @property
    def singular_points(self) -> tuple[PointProfile, ...]:
        return tuple(point for point in self.points if point.codim) + (
            (self.infinity,) if self.infinity.codim else ()
        )

    @property
    def total_codim(self) -> int:
        return sum(point.codim for point in self.points) + self.infinity.codim

    def classes(self) -> list[SchubertIndex]:
        return [point.index for point in self.singular_points]

    def to_dict(self) -> dict[str, Any]:
        if self.wronskian.is_exact:
            wronskian = [str(c) for c in self.wronskian.coeffs]
        else:
            with mpmath.workprec(self.wronskian.precision):
                wronskian = [mpmath.nstr(c, 20) for c in self.wronskian.coeffs]
        return {
            "p": self.p,
            "d": self.d,
            "wronskian": wronskian,
            "points": [point.to_dict() for point in self.points],
            "infinity": self.infinity.to_dict(),
            "inf_multiplicity": self.inf_multiplicity,
            "total_codim": self.total_codim,
        }


def _finite_singular_points(wronskian: Polynomial, precision: int) -> list[tuple[Any, int]]:
    if wronskian.degree <= 0:
        return []
    if wronskian.is_exact:
        found = sympy.roots(wronskian.poly)
        if sum(found.values()) == wronskian.degree and all(is_exact_scalar(r) for r in found):
            return [(exact_scalar(r), m) for r, m in found.items()]
        logger.debug("Wronskian roots are not Gaussian rationals, profiling numerically")
    return list(clustered_roots(wronskian, precision))


def _same_point(a: Any, b: Any, tolerance: Any) -> bool:
    if is_exact_scalar(a) and is_exact_scalar(b):
        return exact_scalar(a) == exact_scalar(b)
    return abs(to_mpc(a) - to_mpc(b)) <= tolerance


def _point_profile(plane: PPlane, point: Any, multiplicity: int, d: int, rel_tol: Any) -> PointProfile:
    p = plane.p
    orders = sorted(root_orders_at(plane, point, rel_tol), reverse=True)
    if len(orders) != p:
        raise StructuralError(f"plane realizes {len(orders)} orders, expected {p}", location=("profile", point))
    index = SchubertIndex(tuple(rho + i - p for i, rho in enumerate(orders, start=1)), p, d)
    return PointProfile(point, tuple(orders), index, multiplicity)


def profile(plane: PPlane, d: int, z: Sequence[Any] | None = None, rel_tol: Any = None) -> FuchsProfile:
    """Exponents and Schubert indices at every root of W_V, at the points ``z`` and at infinity."""

    p = plane.p
    if max(plane.degrees) > d:
        raise DomainError(f"plane degrees {plane.degrees} do not fit in Poly_{d}")
    if p > d + 1:
        raise DomainError(f"no {p}-planes in Poly_{d}")
    precision = plane.precision
    if rel_tol is None and not plane.is_exact:
        rel_tol = mpmath.ldexp(1, -(precision // 4))
    closeness = default_tolerance(precision) if rel_tol is None else rel_tol

    wronskian = plane.wronskian()
    found = _finite_singular_points(wronskian, precision)
    with mpmath.workprec(precision):
        extra_points = [v if is_exact_scalar(v) else to_mpc(v) for v in z or ()]
    for extra in extra_points:
        if not any(_same_point(extra, point, closeness) for point, _ in found):
            found.append((extra, 0))

    points = tuple(_point_profile(plane, point, multiplicity, d, rel_tol) for point, multiplicity in found)
    for point in points:
        if point.codim != point.multiplicity:
            raise StructuralError(
                f"codimension {point.codim} differs from Wronskian multiplicity {point.multiplicity}",
                location=("profile", point.point),
            )

    degrees = plane.degrees
    inf_index = SchubertIndex(tuple(d - d_i + i - p for i, d_i in enumerate(degrees, start=1)), p, d)
    infinity = PointProfile(INFINITY, tuple(-d_i for d_i in degrees), inf_index, p * (d + 1 - p) - int(wronskian.degree))
    result = FuchsProfile(p, d, wronskian, points, infinity)
    if result.total_codim != p * (d + 1 - p):
        raise StructuralError(f"total codimension {result.total_codim} differs from {p * (d + 1 - p)}")
    return result


@dataclass(frozen=True)
class SpecialFormVerdict:
    ok: bool
    reasons: tuple[str, ...]
    m: tuple[int, ...]
    operator: PolyOperator

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "reasons": list(self.reasons), "m": list(self.m)}


def _multiplicity_at(poly: Polynomial, point: Any, tolerance: Any) -> int:
    coefficients = poly.taylor(point, int(poly.degree))
    if poly.is_exact and is_exact_scalar(point):
        return next(i for i, c in enumerate(coefficients) if c != 0)
    scale = max(abs(to_mpc(c)) for c in coefficients)
    return next(i for i, c in enumerate(coefficients) if abs(to_mpc(c)) > tolerance * scale)


def _defect(a: Polynomial, b: Polynomial) -> Any:
    if a.is_exact and b.is_exact:
        return mpmath.mpf(0) if a == b else mpmath.inf
    precision = max(q.precision for q in (a, b) if not q.is_exact)
    with mpmath.workprec(precision):
        diff = a.to_numeric(precision) - b.to_numeric(precision)
        return diff.norm() / max(mpmath.mpf(1), b.to_numeric(precision).norm())


def _numeric_degree(poly: Polynomial, tolerance: Any) -> int:
    if not poly.is_exact:
        poly = poly.trimmed(tolerance)
    return -1 if poly.is_zero else int(poly.degree)


def special_form_check(
    plane: PPlane, z: Sequence[Any], m: Sequence[int] | None = None, tolerance: Any = None
) -> SpecialFormVerdict:
    """Whether the equation reads prod(x - z_j) u^(p) + F_1 u^(p-1) + ... + F_p u with deg F_i <= n - i."""

    p, n = plane.p, len(z)
    exact = plane.is_exact and all(is_exact_scalar(v) for v in z)
    tolerance = (mpmath.mpf(0) if exact else default_tolerance(plane.precision)) if tolerance is None else tolerance
    if not exact:
        plane = plane.to_numeric()
    operator = equation_from_plane(plane)
    precision = plane.precision
    with mpmath.workprec(precision):
        points = [exact_scalar(v) if exact else to_mpc(v) for v in z]

    def from_roots(values: Sequence[Any]) -> Polynomial:
        return ExactPoly.from_roots(values) if exact else NumPoly.from_roots(values, precision)

    reasons: list[str] = []
    wronskian = plane.wronskian()
    found = tuple(_multiplicity_at(wronskian, point, tolerance) for point in points)
    if m is not None and tuple(m) != found:
        reasons.append(f"Wronskian multiplicities {found} differ from {tuple(m)}")
    expected = from_roots([point for point, mult in zip(points, found) for _ in range(mult)])
    if _defect(wronskian, expected) > tolerance:
        reasons.append("Wronskian has roots off the marked points")
    if sum(plane.degrees) != sum(found) + p * (p - 1) // 2:
        reasons.append(f"degree sum {sum(plane.degrees)} differs from {sum(found) + p * (p - 1) // 2}")

    marked = from_roots(points)
    if _defect(operator.leading, marked) > tolerance:
        reasons.append("leading coefficient is not the product of (x - z_j)")
    for i in range(1, p + 1):
        degree = _numeric_degree(operator.coefficients[p - i], tolerance)
        if degree >= 0 and degree > n - i:
            reasons.append(f"F_{i} has degree {degree} above {n - i}")
    first = from_roots([]) * 0
    for j in range(n):
        first = first - from_roots(points[:j] + points[j + 1 :]) * found[j]
    if p >= 1 and _defect(operator.coefficients[p - 1], first) > tolerance:
        reasons.append("F_1 differs from -sum m_j prod_{j' != j} (x - z_j')")

    if reasons:
        logger.info("special form check failed: %s", "; ".join(reasons))
    return SpecialFormVerdict(not reasons, tuple(reasons), found, operator)


@dataclass(frozen=True)
class HypergeometricCase:
    p: int
    d: int
    m: tuple[int, int]
    degrees: tuple[int, ...]
    operator: PolyOperator

    z = (sympy.Integer(0), sympy.Integer(1))

    @property
    def constant(self) -> Any:
        return self.operator.coefficients[self.p - 2].lc

    def plane(self) -> PPlane:
        return kernel_plane(self.operator, self.d, self.p)


def hypergeometric_case(p: int, m1: int, m2: int, d: int) -> HypergeometricCase | None:
    """The single plane with special points 0, 1 of multiplicities m1, m2 in Poly_d, or None."""

    if p < 2 or m1 < 1 or m2 < 1:
        raise DomainError(f"need p >= 2 and m1, m2 >= 1, got p={p}, m=({m1}, {m2})")
    if d + 1 - p < max(m1, m2):
        return None
    degrees = tuple(range(p - 2)) + (m1 + m2 - d + 2 * p - 3, d)
    if any(a >= b for a, b in zip(degrees, degrees[1:])) or degrees[0] < 0:
        return None
    c = (d - p + 2) * (m1 + m2 + p - d - 1)
    zero = ExactPoly.constant(0)
    coefficients = [zero] * (p + 1)
    coefficients[p] = ExactPoly.from_coeffs([0, -1, 1])
    coefficients[p - 1] = ExactPoly.from_coeffs([m1, -m1 - m2])
    coefficients[p - 2] = ExactPoly.constant(c)
    return HypergeometricCase(p, d, (m1, m2), degrees, PolyOperator(tuple(coefficients)))


@dataclass(frozen=True)
class HeineStieltjes:
    """A u'' + B u' + C u = 0 with C the Van Vleck and u the Stieltjes polynomial."""

    A: Polynomial
    B: Polynomial
    C: Polynomial
    u: Polynomial


def heine_stieltjes(plane: PPlane, z: Sequence[Any]) -> HeineStieltjes | None:
    if plane.p != 2:
        raise DomainError(f"Heine-Stieltjes data needs a 2-plane, got p={plane.p}")
    verdict = special_form_check(plane, z)
    if not verdict:
        return None
    A, B, C = reversed(verdict.operator.coefficients)
    return HeineStieltjes(A, B, C, plane.basis[0])


def complementary_degree_check(plane: PPlane, z: Sequence[Any] | None = None) -> bool:
    """For p = 2, d_1 + d_2 = M + 1 with M the total multiplicity at the marked points."""

    if plane.p != 2:
        raise DomainError(f"complementary degrees need a 2-plane, got p={plane.p}")
    wronskian = plane.wronskian()
    if z is None:
        total = int(wronskian.degree)
    else:
        tolerance = mpmath.mpf(0) if plane.is_exact else default_tolerance(plane.precision)
        total = sum(_multiplicity_at(wronskian, point, tolerance) for point in z)
    return sum(plane.degrees) == total + 1


def levels_from_degrees(p: int, degrees: Sequence[int]) -> LevelCounts:
    """k_i = d_1 + ... + d_{p-i} - (p-i)(p-i-1)/2 for i = 1..p-1."""

    degrees = tuple(int(v) for v in degrees)
    if len(degrees) != p:
        raise DomainError(f"expected {p} degrees, got {degrees}")
    if degrees[0] < 0 or any(a >= b for a, b in zip(degrees, degrees[1:])):
        raise DomainError(f"degrees {degrees} are not strictly increasing and nonnegative")
    return LevelCounts(
        tuple(sum(degrees[: p - i]) - (p - i) * (p - i - 1) // 2 for i in range(1, p))
    )


def special_equation_count(p: int, m: Sequence[int], degrees: Sequence[int]) -> int:
    """Number of special planes with multiplicities ``m`` and solution degrees ``degrees``."""

    d = degrees[-1]
    weights: list[WeightVector] = [weight_of_index(SchubertIndex.special(mj, p, d)) for mj in m]
    return dim_singular(weights, levels_from_degrees(p, degrees), p, d)


def ordinary_exponents(p: int) -> tuple[int, ...]:
    return tuple(range(p - 1, -1, -1))


__all__ = [
    "FuchsProfile",
    "HeineStieltjes",
    "HypergeometricCase",
    "INFINITY",
    "PointProfile",
    "SpecialFormVerdict",
    "complementary_degree_check",
    "equation_from_plane",
    "heine_stieltjes",
    "hypergeometric_case",
    "levels_from_degrees",
    "ordinary_exponents",
    "profile",
    "special_equation_count",
    "special_form_check",
]
