"""p-planes of polynomials in canonical reduced form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import mpmath
import sympy

from .errors import DegeneracyError, DomainError
from .polycore import (
    DEFAULT_PRECISION,
    ExactPoly,
    NumPoly,
    Polynomial,
    is_exact_scalar,
    monic_wronskian,
    to_mpc,
)


def default_tolerance(precision: int) -> mpmath.mpf:
    return mpmath.ldexp(1, -(precision // 2))


@dataclass(frozen=True)
class PPlane:
    """Basis u_1..u_p with increasing degrees, monic and reduced against each other."""

    basis: tuple[Polynomial, ...]

    def __post_init__(self) -> None:
        if not self.basis:
            raise DomainError("a p-plane needs at least one polynomial")
        degrees = [b.degree for b in self.basis]
        if any(a >= b for a, b in zip(degrees, degrees[1:])):
            raise DomainError(f"basis degrees {degrees} are not strictly increasing")

    @property
    def p(self) -> int:
        return len(self.basis)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(int(b.degree) for b in self.basis)

    @property
    def is_exact(self) -> bool:
        return all(b.is_exact for b in self.basis)

    @property
    def precision(self) -> int:
        return max((b.precision for b in self.basis if not b.is_exact), default=DEFAULT_PRECISION)

    def to_numeric(self, precision: int | None = None) -> "PPlane":
        precision = precision or self.precision
        return PPlane(tuple(b.to_numeric(precision) for b in self.basis))

    def wronskian(self) -> Polynomial:
        return monic_wronskian(list(self.basis))

    def coefficient_strings(self, digits: int = 25) -> list[list[str]]:
        if self.is_exact:
            return [[str(c) for c in b.coeffs] for b in self.basis]
        with mpmath.workprec(self.precision):
            return [[mpmath.nstr(c, digits) for c in b.coeffs] for b in self.basis]


def _echelon_exact(rows: list[list[Any]]) -> tuple[list[list[Any]], list[int]]:
    reduced, pivots = sympy.Matrix(rows).rref()
    return [list(reduced.row(i)) for i in range(len(pivots))], list(pivots)


def _echelon_numeric(rows: list[list[Any]], precision: int, rel_tol: Any) -> tuple[list[list[Any]], list[int]]:
    """Gauss-Jordan with partial pivoting; columns whose best pivot falls below tolerance are skipped."""

    with mpmath.workprec(precision):
        matrix = [[to_mpc(v) for v in row] for row in rows]
        scale = max((abs(v) for row in matrix for v in row), default=mpmath.mpf(0)) or mpmath.mpf(1)
        bound = rel_tol * scale
        pivots: list[int] = []
        rank = 0
        columns = len(matrix[0]) if matrix else 0
        for col in range(columns):
            if rank == len(matrix):
                break
            best = max(range(rank, len(matrix)), key=lambda i: abs(matrix[i][col]))
            if abs(matrix[best][col]) <= bound:
                for i in range(rank, len(matrix)):
                    matrix[i][col] = mpmath.mpc(0)
                continue
            matrix[rank], matrix[best] = matrix[best], matrix[rank]
            pivot = matrix[rank][col]
            matrix[rank] = [v / pivot for v in matrix[rank]]
            matrix[rank][col] = mpmath.mpc(1)
            for i in range(len(matrix)):
                if i != rank:
                    factor = matrix[i][col]
                    if factor != 0:
                        matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[rank])]
                    matrix[i][col] = mpmath.mpc(0)
            pivots.append(col)
            rank += 1
        return matrix[:rank], pivots


def echelon(rows: list[list[Any]], exact: bool, precision: int = DEFAULT_PRECISION, rel_tol: Any = None):
    if exact:
        return _echelon_exact(rows)
    return _echelon_numeric(rows, precision, default_tolerance(precision) if rel_tol is None else rel_tol)


def canonical_plane(basis: Sequence[Polynomial], rel_tol: Any = None) -> PPlane:
    """Reduced echelon form by leading monomials, sorted by degree."""

    basis = list(basis)
    if not basis or any(b.is_zero for b in basis):
        raise DegeneracyError("a basis cannot contain the zero polynomial")
    exact = all(b.is_exact for b in basis)
    precision = max((b.precision for b in basis if not b.is_exact), default=DEFAULT_PRECISION)
    if not exact:
        basis = [b.to_numeric(precision) for b in basis]
    top = max(int(b.degree) for b in basis)
    rows = [[b.coeffs[top - c] if top - c < len(b.coeffs) else 0 for c in range(top + 1)] for b in basis]
    reduced, pivots = echelon(rows, exact, precision, rel_tol)
    if len(pivots) < len(basis):
        raise DegeneracyError(f"basis of {len(basis)} polynomials spans only {len(pivots)} dimensions")

    polys: list[Polynomial] = []
    for row, pivot in zip(reduced, pivots):
        ascending = list(reversed(row[pivot:]))
        if exact:
            polys.append(ExactPoly.from_coeffs(ascending))
        else:
            cleaned = [mpmath.mpc(0) if c in pivots and c != pivot else v for c, v in zip(range(pivot, top + 1), row[pivot:])]
            polys.append(NumPoly(tuple(reversed(cleaned)), precision))
    polys.sort(key=lambda u: u.degree)
    return PPlane(tuple(polys))


def plane_from_coefficients(rows: Sequence[Sequence[Any]], precision: int | None = None) -> PPlane:
    """Canonical plane spanned by polynomials given as ascending coefficient lists."""

    if precision is None and all(is_exact_scalar(c) for row in rows for c in row):
        return canonical_plane([ExactPoly.from_coeffs(row) for row in rows])
    precision = precision or DEFAULT_PRECISION
    return canonical_plane([NumPoly(tuple(row), precision) for row in rows])


def root_orders_at(plane: PPlane, point: Any, rel_tol: Any = None) -> tuple[int, ...]:
    """Distinct vanishing orders at ``point`` realized by elements of the plane, ascending."""

    exact = plane.is_exact and is_exact_scalar(point)
    source = plane if exact else plane.to_numeric()
    top = max(plane.degrees)
    rows = [u.taylor(point, top) for u in source.basis]
    _, pivots = echelon(rows, exact, source.precision, rel_tol)
    return tuple(pivots)


def realized_degrees(plane: PPlane) -> tuple[int, ...]:
    return plane.degrees


def sub_plane(plane: PPlane, i: int) -> PPlane:
    """V(i), the span of the i lowest-degree canonical basis elements."""

    if not 1 <= i <= plane.p:
        raise DomainError(f"sub-plane index {i} outside 1..{plane.p}")
    return PPlane(plane.basis[:i])


def plane_distance(a: PPlane, b: PPlane) -> mpmath.mpf:
    """Largest relative coefficient difference between canonical bases; infinite on degree mismatch."""

    if a.degrees != b.degrees:
        return mpmath.inf
    if a.is_exact and b.is_exact:
        if a.basis == b.basis:
            return mpmath.mpf(0)
    precision = max(a.precision, b.precision)
    with mpmath.workprec(precision):
        worst = mpmath.mpf(0)
        for u, v in zip(a.to_numeric(precision).basis, b.to_numeric(precision).basis):
            scale = max(mpmath.mpf(1), v.norm())
            for x, y in zip(u.coeffs, v.coeffs):
                worst = max(worst, abs(x - y) / scale)
        return worst
