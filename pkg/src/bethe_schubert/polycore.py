"""Exact and numeric univariate polynomial algebra.

Two carriers share one method vocabulary: :class:`ExactPoly` wraps a sympy
``Poly`` over the Gaussian rationals, :class:`NumPoly` holds mpmath complex
coefficients at a stated precision.  Discriminants and resultants follow the
root-product definitions on monic normalizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations, permutations
import logging
from math import factorial
from typing import Any, Iterable, Iterator, Sequence, Union

import mpmath
import sympy
from sympy import QQ, QQ_I, ZZ, ZZ_I
from sympy.combinatorics import Permutation
from sympy.polys.polyerrors import BasePolynomialError

from .errors import DegeneracyError, DomainError, NumericError

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")
ZERO_DEGREE = sympy.S.NegativeInfinity
DEFAULT_PRECISION = 128
MIN_PRECISION = 53

_ROOT_ATTEMPTS = ((1, 100), (2, 400), (4, 1600))


def is_exact_scalar(value: Any) -> bool:
    if isinstance(value, (float, complex, mpmath.mpf, mpmath.mpc)):
        return False
    try:
        expr = sympy.sympify(value)
    except (sympy.SympifyError, TypeError):
        return False
    if expr.is_Float or expr.has(sympy.Float):
        return False
    re, im = expr.as_real_imag()
    return bool(re.is_Rational and im.is_Rational)


def exact_scalar(value: Any) -> sympy.Expr:
    """Convert ``value`` to a Gaussian rational or raise :class:`DomainError`."""

    if not is_exact_scalar(value):
        raise DomainError(f"{value!r} is not an exact Gaussian rational")
    re, im = sympy.sympify(value).as_real_imag()
    return re + im * sympy.I


def _to_mpf(expr: sympy.Expr) -> mpmath.mpf:
    if not expr.is_Rational:
        expr = sympy.Float(expr, mpmath.mp.dps + 5)
    return mpmath.mpf(expr)


def to_mpc(value: Any) -> mpmath.mpc:
    """Convert any supported scalar to an ``mpc`` at the current working precision."""

    if isinstance(value, (int, float, complex, mpmath.mpf, mpmath.mpc)):
        return mpmath.mpc(value)
    expr = sympy.sympify(value)
    re, im = expr.as_real_imag()
    return mpmath.mpc(_to_mpf(re), _to_mpf(im))


def _domain_of(values: Sequence[sympy.Expr]):
    return QQ_I if any(sympy.im(v) != 0 for v in values) else QQ


@dataclass(frozen=True, eq=False)
class ExactPoly:
    """Univariate polynomial in ``x`` over QQ or QQ_I."""

    poly: sympy.Poly

    def __post_init__(self) -> None:
        if self.poly.gens != (X,):
            raise DomainError(f"expected a polynomial in {X}, got gens {self.poly.gens}")
        domain = self.poly.get_domain()
        if domain in (ZZ, ZZ_I):
            object.__setattr__(self, "poly", self.poly.to_field())
        elif domain not in (QQ, QQ_I):
            raise DomainError(f"exact polynomials live over QQ or QQ_I, not {domain}")

    is_exact = True

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Any]) -> "ExactPoly":
        """Build from ascending coefficients."""

        values = [exact_scalar(c) for c in coeffs] or [sympy.Integer(0)]
        return cls(sympy.Poly.from_list(list(reversed(values)), X, domain=_domain_of(values)))

    @classmethod
    def from_expr(cls, expr: Any) -> "ExactPoly":
        expr = sympy.expand(sympy.sympify(expr))
        if expr.has(sympy.Float):
            raise DomainError(f"{expr} has inexact coefficients")
        return cls(sympy.Poly(expr, X))

    @classmethod
    def constant(cls, value: Any) -> "ExactPoly":
        return cls.from_coeffs([value])

    @classmethod
    def from_roots(cls, roots: Iterable[Any]) -> "ExactPoly":
        factors = [cls.from_coeffs([-exact_scalar(r), 1]) for r in roots]
        return reduce(lambda acc, f: acc * f, factors, cls.constant(1))

    @property
    def coeffs(self) -> tuple[sympy.Expr, ...]:
        if self.poly.is_zero:
            return ()
        return tuple(reversed(self.poly.all_coeffs()))

    @property
    def degree(self):
        return self.poly.degree()

    @property
    def is_zero(self) -> bool:
        return bool(self.poly.is_zero)

    @property
    def lc(self) -> sympy.Expr:
        return self.poly.LC()

    def as_expr(self) -> sympy.Expr:
        return self.poly.as_expr()

    def _lift(self, other: Any) -> sympy.Poly | None:
        if isinstance(other, ExactPoly):
            return other.poly
        if isinstance(other, NumPoly):
            return None
        if is_exact_scalar(other):
            return ExactPoly.constant(other).poly
        return None

    def __add__(self, other: Any):
        lifted = self._lift(other)
        return NotImplemented if lifted is None else ExactPoly(self.poly + lifted)

    __radd__ = __add__

    def __sub__(self, other: Any):
        lifted = self._lift(other)
        return NotImplemented if lifted is None else ExactPoly(self.poly - lifted)

    def __rsub__(self, other: Any):
        lifted = self._lift(other)
        return NotImplemented if lifted is None else ExactPoly(lifted - self.poly)

    def __mul__(self, other: Any):
        lifted = self._lift(other)
        return NotImplemented if lifted is None else ExactPoly(self.poly * lifted)

    __rmul__ = __mul__

    def __neg__(self) -> "ExactPoly":
        return ExactPoly(-self.poly)

    def __pow__(self, exponent: int) -> "ExactPoly":
        if exponent < 0:
            raise DomainError("negative powers are not polynomials")
        return ExactPoly(self.poly**exponent)

    def __truediv__(self, scalar: Any) -> "ExactPoly":
        value = exact_scalar(scalar)
        if value == 0:
            raise ZeroDivisionError("division of a polynomial by zero")
        return ExactPoly(self.poly * ExactPoly.constant(1 / value).poly)

    def __divmod__(self, other: "ExactPoly") -> tuple["ExactPoly", "ExactPoly"]:
        if isinstance(other, NumPoly):
            return divmod(self.to_numeric(other.precision), other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        quotient, remainder = self.poly.div(other.poly)
        return ExactPoly(quotient), ExactPoly(remainder)

    def __call__(self, value: Any):
        if is_exact_scalar(value):
            return sympy.expand(self.poly.eval(exact_scalar(value)))
        return self.to_numeric(mpmath.mp.prec)(value)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"ExactPoly({self.as_expr()})"

    def derivative(self, order: int = 1) -> "ExactPoly":
        if order == 0:
            return self
        return ExactPoly(self.poly.diff((X, order)))

    def integrate(self) -> "ExactPoly":
        """Antiderivative with zero constant term."""

        return ExactPoly(self.poly.integrate(X))

    def monic(self) -> "ExactPoly":
        if self.is_zero:
            raise DomainError("the zero polynomial has no monic normalization")
        return ExactPoly(self.poly.monic())

    def norm(self) -> mpmath.mpf:
        return max((abs(to_mpc(c)) for c in self.coeffs), default=mpmath.mpf(0))

    def taylor(self, point: Any, order: int) -> list[Any]:
        """Taylor coefficients at ``point`` up to ``order`` inclusive."""

        values = []
        current = self
        for r in range(order + 1):
            value = current(point) / factorial(r)
            values.append(sympy.expand(value) if is_exact_scalar(point) else value)
            current = current.derivative()
        return values

    def to_numeric(self, precision: int = DEFAULT_PRECISION) -> "NumPoly":
        with mpmath.workprec(precision):
            return NumPoly(tuple(to_mpc(c) for c in self.coeffs), precision)


@dataclass(frozen=True, eq=False)
class NumPoly:
    """Univariate polynomial with ``mpc`` coefficients (ascending) at ``precision`` bits."""

    coeffs: tuple[Any, ...]
    precision: int = DEFAULT_PRECISION

    is_exact = False

    def __post_init__(self) -> None:
        if self.precision < MIN_PRECISION:
            raise DomainError(f"precision must be >= {MIN_PRECISION} bits, got {self.precision}")
        with mpmath.workprec(self.precision):
            values = [to_mpc(c) for c in self.coeffs]
        for value in values:
            if not mpmath.isfinite(value):
                raise DomainError(f"non-finite coefficient {value}")
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values))

    @classmethod
    def from_roots(cls, roots: Iterable[Any], precision: int = DEFAULT_PRECISION) -> "NumPoly":
        with mpmath.workprec(precision):
            coeffs = [mpmath.mpc(1)]
            for root in roots:
                r = to_mpc(root)
                shifted = [mpmath.mpc(0)] + coeffs
                for i, c in enumerate(coeffs):
                    shifted[i] -= r * c
                coeffs = shifted
        return cls(tuple(coeffs), precision)

    @classmethod
    def constant(cls, value: Any, precision: int = DEFAULT_PRECISION) -> "NumPoly":
        return cls((value,), precision)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> mpmath.mpc:
        return self.coeffs[-1] if self.coeffs else mpmath.mpc(0)

    def _lift(self, other: Any) -> tuple[tuple[Any, ...], int] | None:
        if isinstance(other, NumPoly):
            return other.coeffs, max(self.precision, other.precision)
        if isinstance(other, ExactPoly):
            return other.to_numeric(self.precision).coeffs, self.precision
        if isinstance(other, (int, float, complex, mpmath.mpf, mpmath.mpc)) or is_exact_scalar(other):
            with mpmath.workprec(self.precision):
                return (to_mpc(other),), self.precision
        return None

    def __add__(self, other: Any):
        lifted = self._lift(other)
        if lifted is None:
            return NotImplemented
        coeffs, prec = lifted
        size = max(len(self.coeffs), len(coeffs))
        with mpmath.workprec(prec):
            out = [
                (self.coeffs[i] if i < len(self.coeffs) else 0) + (coeffs[i] if i < len(coeffs) else 0)
                for i in range(size)
            ]
        return NumPoly(tuple(out), prec)

    __radd__ = __add__

    def __neg__(self) -> "NumPoly":
        return NumPoly(tuple(-c for c in self.coeffs), self.precision)

    def __sub__(self, other: Any):
        lifted = self._lift(other)
        if lifted is None:
            return NotImplemented
        coeffs, prec = lifted
        return self + NumPoly(tuple(-c for c in coeffs), prec)

    def __rsub__(self, other: Any):
        return (-self) + other

    def __mul__(self, other: Any):
        lifted = self._lift(other)
        if lifted is None:
            return NotImplemented
        coeffs, prec = lifted
        if not self.coeffs or not coeffs:
            return NumPoly((), prec)
        with mpmath.workprec(prec):
            out = [mpmath.mpc(0)] * (len(self.coeffs) + len(coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(coeffs):
                    out[i + j] += a * b
        return NumPoly(tuple(out), prec)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "NumPoly":
        if exponent < 0:
            raise DomainError("negative powers are not polynomials")
        return reduce(lambda acc, _: acc * self, range(exponent), NumPoly.constant(1, self.precision))

    def __truediv__(self, scalar: Any) -> "NumPoly":
        with mpmath.workprec(self.precision):
            value = to_mpc(scalar)
            if value == 0:
                raise ZeroDivisionError("division of a polynomial by zero")
            return NumPoly(tuple(c / value for c in self.coeffs), self.precision)

    def __divmod__(self, other: Any) -> tuple["NumPoly", "NumPoly"]:
        lifted = self._lift(other)
        if lifted is None:
            return NotImplemented
        divisor, prec = lifted
        if not divisor:
            raise ZeroDivisionError("polynomial division by zero")
        with mpmath.workprec(prec):
            remainder = list(self.coeffs)
            shift = len(remainder) - len(divisor)
            quotient = [mpmath.mpc(0)] * max(shift + 1, 0)
            for k in range(shift, -1, -1):
                factor = remainder[k + len(divisor) - 1] / divisor[-1]
                quotient[k] = factor
                for i, c in enumerate(divisor):
                    remainder[k + i] -= factor * c
            remainder = remainder[: len(divisor) - 1]
        return NumPoly(tuple(quotient), prec), NumPoly(tuple(remainder), prec)

    def __rdivmod__(self, other: Any):
        if isinstance(other, ExactPoly):
            return divmod(other.to_numeric(self.precision), self)
        return NotImplemented

    def __call__(self, value: Any) -> mpmath.mpc:
        if not self.coeffs:
            return mpmath.mpc(0)
        with mpmath.workprec(self.precision):
            return mpmath.polyval(list(reversed(self.coeffs)), to_mpc(value))

    def __repr__(self) -> str:
        with mpmath.workprec(self.precision):
            terms = ", ".join(mpmath.nstr(c, 8) for c in self.coeffs)
        return f"NumPoly([{terms}], precision={self.precision})"

    def derivative(self, order: int = 1) -> "NumPoly":
        coeffs = list(self.coeffs)
        with mpmath.workprec(self.precision):
            for _ in range(order):
                coeffs = [k * c for k, c in enumerate(coeffs)][1:]
        return NumPoly(tuple(coeffs), self.precision)

    def integrate(self) -> "NumPoly":
        """Antiderivative with zero constant term."""

        with mpmath.workprec(self.precision):
            coeffs = [mpmath.mpc(0)] + [c / (k + 1) for k, c in enumerate(self.coeffs)]
        return NumPoly(tuple(coeffs), self.precision)

    def monic(self) -> "NumPoly":
        if self.is_zero:
            raise DomainError("the zero polynomial has no monic normalization")
        return self / self.lc

    def norm(self) -> mpmath.mpf:
        with mpmath.workprec(self.precision):
            return max((abs(c) for c in self.coeffs), default=mpmath.mpf(0))

    def trimmed(self, rel_tol: Any) -> "NumPoly":
        """Drop leading coefficients below ``rel_tol`` times the norm."""

        bound = self.norm() * rel_tol
        coeffs = list(self.coeffs)
        while coeffs and abs(coeffs[-1]) <= bound:
            coeffs.pop()
        return NumPoly(tuple(coeffs), self.precision)

    def taylor(self, point: Any, order: int) -> list[mpmath.mpc]:
        values = []
        current = self
        with mpmath.workprec(self.precision):
            for r in range(order + 1):
                values.append(current(point) / factorial(r))
                current = current.derivative()
        return values

    def with_precision(self, precision: int) -> "NumPoly":
        return NumPoly(self.coeffs, precision)

    def to_numeric(self, precision: int | None = None) -> "NumPoly":
        return self if precision is None or precision == self.precision else self.with_precision(precision)


Polynomial = Union[ExactPoly, NumPoly]


def as_numeric(poly: Polynomial, precision: int = DEFAULT_PRECISION) -> NumPoly:
    return poly.to_numeric(precision)


def one_like(poly: Polynomial) -> Polynomial:
    if poly.is_exact:
        return ExactPoly.constant(1)
    return NumPoly.constant(1, poly.precision)


@dataclass(frozen=True)
class MarkedPoints:
    """Pairwise distinct marked points z_1..z_n, exact when every entry is."""

    points: tuple[Any, ...]
    threshold: Any = None

    def __post_init__(self) -> None:
        if len(self.points) < 1:
            raise DomainError("at least one marked point is required")
        if all(is_exact_scalar(p) for p in self.points):
            values = tuple(exact_scalar(p) for p in self.points)
            for a, b in combinations(values, 2):
                if a == b:
                    raise DomainError(f"marked points must be distinct, {a} repeats")
        else:
            values = tuple(p if isinstance(p, mpmath.mpc) else to_mpc(p) for p in self.points)
            bound = mpmath.mpf(0) if self.threshold is None else mpmath.mpf(self.threshold)
            for a, b in combinations(values, 2):
                if abs(a - b) <= bound:
                    raise DomainError(
                        f"marked points {a} and {b} are closer than the separation threshold {bound}"
                    )
        object.__setattr__(self, "points", values)

    @property
    def is_exact(self) -> bool:
        return all(not isinstance(p, mpmath.mpc) for p in self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.points)

    def __getitem__(self, index: int) -> Any:
        return self.points[index]

    @property
    def sep(self) -> mpmath.mpf:
        """Minimal pairwise distance (infinite for a single point)."""

        if len(self.points) == 1:
            return mpmath.inf
        return min(abs(to_mpc(a) - to_mpc(b)) for a, b in combinations(self.points, 2))

    def numeric(self, precision: int = DEFAULT_PRECISION) -> tuple[mpmath.mpc, ...]:
        with mpmath.workprec(precision):
            return tuple(to_mpc(p) for p in self.points)

    def linear_factor(self, index: int, like: Polynomial | None = None) -> Polynomial:
        if self.is_exact and (like is None or like.is_exact):
            return ExactPoly.from_coeffs([-self.points[index], 1])
        precision = like.precision if isinstance(like, NumPoly) else DEFAULT_PRECISION
        return NumPoly.from_roots([self.points[index]], precision)


def _same_kind(polys: Sequence[Polynomial]) -> bool:
    kinds = {p.is_exact for p in polys}
    return len(kinds) == 1


def poly_det(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant of a square matrix of polynomials of one kind."""

    entries = [entry for row in matrix for entry in row]
    if not entries:
        raise DomainError("empty matrix")
    if not _same_kind(entries):
        raise DomainError("matrix mixes exact and numeric polynomials")
    size = len(matrix)
    if entries[0].is_exact:
        det = sympy.Matrix([[entry.as_expr() for entry in row] for row in matrix]).det(method="berkowitz")
        return ExactPoly.from_expr(det)

    precision = max(entry.precision for entry in entries)
    total = NumPoly((), precision)
    for perm in permutations(range(size)):
        term = NumPoly.constant(Permutation(list(perm)).signature(), precision)
        for row, col in enumerate(perm):
            term = term * matrix[row][col]
        total = total + term
    return total


def wronskian(basis: Sequence[Polynomial]) -> Polynomial:
    """det(basis[c]^{(r)}) over rows r and columns c."""

    if not basis:
        raise DomainError("the Wronskian needs a nonempty basis")
    if not _same_kind(basis):
        raise DomainError("Wronskian basis mixes exact and numeric polynomials")
    if basis[0].is_exact:
        return ExactPoly.from_expr(sympy.wronskian([b.as_expr() for b in basis], X))
    size = len(basis)
    return poly_det([[basis[c].derivative(r) for c in range(size)] for r in range(size)])


def monic_wronskian(basis: Sequence[Polynomial]) -> Polynomial:
    result = wronskian(basis)
    if not result.is_exact:
        result = result.trimmed(mpmath.ldexp(1, -(result.precision // 2)))
    if result.is_zero:
        raise DegeneracyError("the basis is linearly dependent (zero Wronskian)")
    return result.monic()


def _require_nonzero(*polys: Polynomial) -> None:
    for poly in polys:
        if poly.is_zero:
            raise DomainError("operation undefined for the zero polynomial")


def discriminant(poly: Polynomial):
    """Product over root pairs of (a_i - a_j)^2 for the monic normalization."""

    _require_nonzero(poly)
    monic = poly.monic()
    if monic.degree <= 1:
        return sympy.Integer(1) if poly.is_exact else mpmath.mpc(1)
    if monic.is_exact:
        return monic.poly.discriminant()
    found = roots(monic)
    with mpmath.workprec(monic.precision):
        return mpmath.fprod((a - b) ** 2 for a, b in combinations(found, 2))


def _product_over_roots(a: ExactPoly, b: ExactPoly) -> sympy.Expr:
    """prod b(alpha) over the roots of monic ``a``, as det b(C) for the companion matrix C of ``a``."""

    m = a.degree
    companion = sympy.zeros(m, m)
    for i, c in enumerate(a.coeffs[:m]):
        companion[i, m - 1] = -c
        if i + 1 < m:
            companion[i + 1, i] = 1
    value = sympy.zeros(m, m)
    for c in reversed(b.coeffs):
        value = value * companion + c * sympy.eye(m)
    return sympy.expand(value.det(method="berkowitz"))


def resultant(first: Polynomial, second: Polynomial):
    """Product of (a_i - b_j) over roots of the monic normalizations."""

    _require_nonzero(first, second)
    a, b = first.monic(), second.monic()
    exact = a.is_exact and b.is_exact
    if a.degree == 0 or b.degree == 0:
        return sympy.Integer(1) if exact else mpmath.mpc(1)
    if exact:
        return _product_over_roots(a, b)
    precision = max(p.precision for p in (a, b) if not p.is_exact)
    ra, rb = roots(a.to_numeric(precision)), roots(b.to_numeric(precision))
    with mpmath.workprec(precision):
        return mpmath.fprod(x - y for x in ra for y in rb)


def split_marked(poly: Polynomial, z: MarkedPoints) -> tuple[Polynomial, Polynomial]:
    """Split ``poly = lc * T * Z`` with T free of marked roots and Z supported on them."""

    _require_nonzero(poly)
    if poly.is_exact and z.is_exact:
        rest = poly.monic()
        marked = ExactPoly.constant(1)
        for index in range(len(z)):
            factor = z.linear_factor(index)
            while rest.degree > 0 and rest(z[index]) == 0:
                rest, _ = divmod(rest, factor)
                marked = marked * factor
        return rest, marked

    numeric = poly if not poly.is_exact else poly.to_numeric(DEFAULT_PRECISION)
    precision = numeric.precision
    with mpmath.workprec(precision):
        tol = mpmath.ldexp(1, -(precision // 3))
        free = list(roots(numeric))
        assigned: list[mpmath.mpc] = []
        for point in z.numeric(precision):
            # multiplicity at a marked point: leading Taylor coefficients that vanish
            taylor = numeric.taylor(point, numeric.degree)
            scale = max(abs(c) for c in taylor)
            mult = 0
            while mult < len(taylor) - 1 and abs(taylor[mult]) <= tol * scale:
                mult += 1
            for _ in range(min(mult, len(free))):
                free.pop(min(range(len(free)), key=lambda idx: abs(free[idx] - point)))
                assigned.append(point)
    return NumPoly.from_roots(free, precision), NumPoly.from_roots(assigned, precision)


def rel_discriminant(poly: Polynomial, z: MarkedPoints):
    """Delta(T) * Res(Z, T)^2 for the marked split of ``poly``."""

    free, marked = split_marked(poly, z)
    return discriminant(free) * resultant(marked, free) ** 2


def rel_resultant(first: Polynomial, second: Polynomial, z: MarkedPoints):
    """Res(T1, T2) * Res(T1, Z2) * Res(Z1, T2), equal to Res(P1, P2) / Res(Z1, Z2)."""

    t1, z1 = split_marked(first, z)
    t2, z2 = split_marked(second, z)
    return resultant(t1, t2) * resultant(t1, z2) * resultant(z1, t2)


def _polish(coeffs: list[Any], root: mpmath.mpc, tol: mpmath.mpf, steps: int = 8):
    best = root
    best_res = abs(mpmath.polyval(coeffs, best))
    for _ in range(steps):
        if best_res == 0:
            break
        value, slope = mpmath.polyval(coeffs, best, derivative=True)
        if slope == 0:
            break
        candidate = best - value / slope
        residual = abs(mpmath.polyval(coeffs, candidate))
        if residual >= best_res:
            break
        best, best_res = candidate, residual
        if best_res <= tol / 16:
            break
    return best, best_res


def _numeric_roots(poly: NumPoly) -> tuple[mpmath.mpc, ...]:
    precision = poly.precision
    with mpmath.workprec(precision):
        coeffs = list(reversed(poly.coeffs))
        tol = mpmath.ldexp(poly.norm(), -(precision - 10))
        worst = None
        for scale, maxsteps in _ROOT_ATTEMPTS:
            try:
                found = mpmath.polyroots(coeffs, maxsteps=maxsteps, extraprec=scale * precision)
            except mpmath.libmp.NoConvergence:
                logger.debug("polyroots did not converge (extraprec=%d, maxsteps=%d)", scale * precision, maxsteps)
                continue
            polished = [_polish(coeffs, mpmath.mpc(r), tol) for r in found]
            worst = max(res for _, res in polished)
            if worst <= tol:
                return tuple(r for r, _ in polished)
            logger.debug("root residual %s above %s, retrying", mpmath.nstr(worst, 5), mpmath.nstr(tol, 5))
    raise NumericError(
        f"root finding failed for a degree {poly.degree} polynomial at {precision} bits",
        worst_residual=worst,
    )


def roots(poly: Polynomial, precision: int | None = None) -> tuple[mpmath.mpc, ...]:
    """All roots with multiplicity, polished to |P(r)| <= 2^-(prec-10) * |P|."""

    _require_nonzero(poly)
    if poly.degree == 0:
        return ()
    if not poly.is_exact:
        return _numeric_roots(poly if precision is None else poly.with_precision(precision))

    precision = precision or DEFAULT_PRECISION
    try:
        _, factors = poly.poly.sqf_list()
    except (BasePolynomialError, NotImplementedError):
        return _numeric_roots(poly.to_numeric(precision))
    found: list[mpmath.mpc] = []
    for factor, multiplicity in factors:
        if factor.degree() <= 0:
            continue
        for root in _numeric_roots(ExactPoly(factor).to_numeric(precision)):
            found.extend([root] * multiplicity)
    return tuple(found)


@dataclass(frozen=True)
class PolyOperator:
    """Linear differential operator sum_r A_r(x) d^r/dx^r, coefficients A_0..A_p."""

    coefficients: tuple[Polynomial, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.coefficients)

    @property
    def leading(self) -> Polynomial:
        return self.coefficients[-1]

    def apply(self, u: Polynomial) -> Polynomial:
        total = None
        for r, coefficient in enumerate(self.coefficients):
            term = coefficient * u.derivative(r)
            total = term if total is None else total + term
        return total

    def max_degree_shift(self) -> int:
        """Largest deg A_r - r over nonzero coefficients."""

        return max(int(c.degree) - r for r, c in enumerate(self.coefficients) if not c.is_zero)


def _divides_at(poly: NumPoly, point: mpmath.mpc, tol: mpmath.mpf) -> bool:
    if poly.is_zero:
        return True
    scale = sum(abs(c) * abs(point) ** k for k, c in enumerate(poly.coeffs))
    return abs(poly(point)) <= tol * scale


def normalize_operator(
    coefficients: Sequence[Polynomial], candidates: Iterable[Any] = ()
) -> PolyOperator:
    """Remove the common polynomial factor and make the leading coefficient monic.

    Exact coefficients use a sympy gcd.  Numeric coefficients strip linear
    factors at the supplied candidate roots while every coefficient vanishes there.
    """

    coefficients = list(coefficients)
    nonzero = [c for c in coefficients if not c.is_zero]
    if not nonzero:
        raise DegeneracyError("operator with all-zero coefficients")
    if all(c.is_exact for c in coefficients):
        common = ExactPoly(reduce(lambda a, b: a.gcd(b), [c.poly for c in nonzero]))
        if common.degree > 0:
            coefficients = [divmod(c, common)[0] for c in coefficients]
    else:
        precision = max(c.precision for c in coefficients if not c.is_exact)
        coefficients = [c.to_numeric(precision) for c in coefficients]
        with mpmath.workprec(precision):
            tol = mpmath.ldexp(1, -(precision // 2))
            for candidate in candidates:
                point = to_mpc(candidate)
                factor = NumPoly.from_roots([point], precision)
                while all(_divides_at(c, point, tol) for c in coefficients) and any(
                    c.degree >= 1 for c in coefficients
                ):
                    coefficients = [divmod(c, factor)[0] if not c.is_zero else c for c in coefficients]
    leading = coefficients[-1]
    if leading.is_zero:
        raise DegeneracyError("operator has a vanishing leading coefficient")
    scale = leading.lc
    return PolyOperator(tuple(c / scale for c in coefficients))
