"""From a critical orbit to its Wronskian flag, Fuchsian operator and p-plane.

Two independent routes produce the plane: the polynomial kernel of the
expanded operator and the nested integrals over the flag.  Both are checked
against the defining properties of the Schubert intersection.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
import logging
from typing import Any, Sequence

import mpmath
import sympy

from .errors import DegeneracyError, ReconstructionError, StructuralError
from .master import (
    CriticalOrbit,
    SchubertProblem,
    flag_polynomials,
    refine_orbit,
    sep_tol,
)
from .planes import (
    PPlane,
    canonical_plane,
    default_tolerance,
    plane_distance,
    root_orders_at,
    sub_plane,
)
from .polycore import (
    DEFAULT_PRECISION,
    ExactPoly,
    NumPoly,
    PolyOperator,
    Polynomial,
    exact_scalar,
    is_exact_scalar,
    monic_wronskian,
    normalize_operator,
    one_like,
    roots,
    to_mpc,
)

logger = logging.getLogger(__name__)

CHECK_NAMES = (
    "wronskian_match",
    "flag_match",
    "exponents_match",
    "residue_identity",
    "nondegeneracy",
)


@dataclass(frozen=True)
class WronskianFlag:
    """W_0 = 1, W_1, ..., W_p together with the roots of each W_i."""

    W: tuple[Polynomial, ...]
    roots: tuple[tuple[tuple[Any, int], ...], ...]
    problem: SchubertProblem | None = field(default=None, repr=False, compare=False)
    orbit: CriticalOrbit | None = field(default=None, repr=False, compare=False)

    @property
    def p(self) -> int:
        return len(self.W) - 1

    @property
    def is_exact(self) -> bool:
        return all(w.is_exact for w in self.W)

    @property
    def precision(self) -> int:
        return max((w.precision for w in self.W if not w.is_exact), default=DEFAULT_PRECISION)


def _merge_roots(values: Sequence[tuple[Any, int]]) -> tuple[tuple[Any, int], ...]:
    merged: dict[Any, int] = defaultdict(int)
    for value, multiplicity in values:
        if multiplicity:
            merged[value] += multiplicity
    return tuple(merged.items())


def flag_from_orbit(prob: SchubertProblem, orbit: CriticalOrbit) -> WronskianFlag:
    """W_i = Z_i * T_{p-i}, with T_i the monic polynomial whose roots are group i."""

    exact = orbit.is_exact and prob.z.is_exact
    W = flag_polynomials(prob, orbit.rep, exact)
    flag_roots = []
    for i in range(prob.p + 1):
        level = prob.p - i
        group = orbit.rep.t[level - 1] if 1 <= level <= prob.p - 1 else ()
        marked = [(zj, row[i]) for zj, row in zip(prob.z, prob.mgrid)]
        flag_roots.append(_merge_roots(marked + [(t, 1) for t in group]))
    for i in range(1, prob.p + 1):
        expected = sum(prob.degs[:i]) - i * (i - 1) // 2
        if W[i].degree != expected:
            raise StructuralError(f"deg W_{i} = {W[i].degree}, expected {expected}", location=("flag", i))
    return WronskianFlag(tuple(W), tuple(flag_roots), prob, orbit)


def clustered_roots(poly: Polynomial, precision: int) -> tuple[tuple[Any, int], ...]:
    if poly.degree <= 0:
        return ()
    found = roots(poly, precision)
    with mpmath.workprec(precision):
        radius = mpmath.ldexp(1, -(precision // 8)) * max(mpmath.mpf(1), *(abs(r) for r in found))
        clusters: list[list[mpmath.mpc]] = []
        for root in found:
            for cluster in clusters:
                if abs(cluster[0] - root) <= radius:
                    cluster.append(root)
                    break
            else:
                clusters.append([root])
        return tuple((mpmath.fsum(c) / len(c), len(c)) for c in clusters)


def flag_from_plane(prob: SchubertProblem | None, plane: PPlane) -> WronskianFlag:
    """The flag of Wronskians of the canonical sub-planes V(1) in ... in V(p)."""

    precision = plane.precision
    W: list[Polynomial] = [one_like(plane.basis[0])]
    for i in range(1, plane.p + 1):
        W.append(monic_wronskian(list(sub_plane(plane, i).basis)))
    flag_roots = tuple(clustered_roots(w, precision) for w in W)
    return WronskianFlag(tuple(W), flag_roots, prob)


def _unmarked_roots(flag: WronskianFlag, level: int) -> list[Any]:
    marked = list(flag.problem.z) if flag.problem is not None else []
    precision = flag.precision
    out = []
    for root, multiplicity in flag.roots[level]:
        is_marked = any(
            (root == zj) if is_exact_scalar(root) and is_exact_scalar(zj) else abs(to_mpc(root) - to_mpc(zj)) <= sep_tol(precision)
            for zj in marked
        )
        if is_marked:
            continue
        if multiplicity != 1:
            raise StructuralError("unmarked root of a flag Wronskian is not simple", location=(level, root))
        out.append(root)
    return out


def residue_identity_defect(flag: WronskianFlag) -> mpmath.mpf:
    """max |W_l''/W_l' - W_{l+1}'/W_{l+1} - W_{l-1}'/W_{l-1}| over unmarked roots of W_1..W_{p-1}."""

    precision = flag.precision
    worst = mpmath.mpf(0)
    with mpmath.workprec(precision):
        for level in range(1, flag.p):
            W = flag.W[level].to_numeric(precision)
            below = flag.W[level - 1].to_numeric(precision)
            above = flag.W[level + 1].to_numeric(precision)
            for root in _unmarked_roots(flag, level):
                t = to_mpc(root)
                slope = W.derivative()(t)
                if slope == 0 or below(t) == 0 or above(t) == 0:
                    raise StructuralError("root of a flag Wronskian is shared with a neighbour", location=(level, root))
                defect = (
                    W.derivative(2)(t) / slope
                    - above.derivative()(t) / above(t)
                    - below.derivative()(t) / below(t)
                )
                worst = max(worst, abs(defect))
    return worst


def operator_from_flag(flag: WronskianFlag) -> PolyOperator:
    """Expand d/dx g_{p-1} ... d/dx g_1 d/dx (u / W_1), g_l = W_l^2 / (W_{l-1} W_{l+1})."""

    p = flag.p
    W = list(flag.W)
    derivatives = [w.derivative() for w in W]
    zero = W[0] * 0

    # terms: (order of u, exponents of W_1..W_p) -> numerator polynomial
    unit = tuple(-1 if i == 1 else 0 for i in range(1, p + 1))
    terms: dict[tuple[int, tuple[int, ...]], Polynomial] = {(0, unit): one_like(W[0])}

    def accumulate(target: dict, key: tuple[int, tuple[int, ...]], value: Polynomial) -> None:
        if value.is_zero:
            return
        target[key] = target[key] + value if key in target else value

    def differentiate(current: dict) -> dict:
        result: dict = {}
        for (order, exps), numerator in current.items():
            accumulate(result, (order + 1, exps), numerator)
            accumulate(result, (order, exps), numerator.derivative())
            for i, e in enumerate(exps):
                if e:
                    shifted = tuple(v - 1 if q == i else v for q, v in enumerate(exps))
                    accumulate(result, (order, shifted), numerator * derivatives[i + 1] * e)
        return result

    def multiply(current: dict, level: int) -> dict:
        result: dict = {}
        for (order, exps), numerator in current.items():
            shifted = list(exps)
            shifted[level - 1] += 2
            if level - 2 >= 0:
                shifted[level - 2] -= 1
            shifted[level] -= 1
            accumulate(result, (order, tuple(shifted)), numerator)
        return result

    terms = differentiate(terms)
    for level in range(1, p):
        terms = multiply(terms, level)
        terms = differentiate(terms)

    floor = [min(0, min(exps[i] for _, exps in terms)) for i in range(p)]
    coefficients: list[Polynomial] = [zero] * (p + 1)
    for (order, exps), numerator in terms.items():
        value = numerator
        for i, e in enumerate(exps):
            power = e - floor[i]
            if power:
                value = value * W[i + 1] ** power
        coefficients[order] = coefficients[order] + value
    candidates = [root for level in flag.roots[1:] for root, _ in level]
    return normalize_operator(coefficients, candidates)


def _action_matrix(operator: PolyOperator, d: int) -> list[list[Any]]:
    columns = []
    like = operator.leading
    for j in range(d + 1):
        monomial = ExactPoly.from_coeffs([0] * j + [1])
        image = operator.apply(monomial if like.is_exact else monomial.to_numeric(like.precision))
        columns.append(list(image.coeffs))
    height = max((len(c) for c in columns), default=0)
    return [[c[r] if r < len(c) else 0 for c in columns] for r in range(height)]


def kernel_plane(operator: PolyOperator, d: int, p: int | None = None) -> PPlane:
    """Polynomial solutions of degree <= d, in canonical form."""

    p = operator.order if p is None else p
    rows = _action_matrix(operator, d)
    size = d + 1
    if operator.is_exact:
        matrix = sympy.Matrix(rows) if rows else sympy.zeros(1, size)
        kernel = matrix.nullspace()
        if len(kernel) != p:
            raise ReconstructionError(f"kernel has dimension {len(kernel)}, expected {p}", dimension=len(kernel))
        basis = [ExactPoly.from_coeffs([exact_scalar(v) for v in vector]) for vector in kernel]
        return canonical_plane(basis)

    precision = operator.leading.precision
    with mpmath.workprec(precision):
        padded = [list(row) for row in rows] + [[0] * size for _ in range(max(0, size - len(rows)))]
        A = mpmath.matrix([[to_mpc(v) for v in row] for row in padded])
        _, S, V = mpmath.svd_c(A)
        order = sorted(range(size), key=lambda i: -abs(S[i]))
        values = [abs(S[i]) for i in order]
        s_max = values[0] if values else mpmath.mpf(0)
        small = [i for i in order if abs(S[i]) <= default_tolerance(precision) * s_max]
        gap = None
        if size - p >= 1 and values[size - p] != 0:
            gap = values[size - p - 1] / values[size - p]
        elif size - p >= 1:
            gap = mpmath.inf
        if len(small) != p or (gap is not None and gap < 10**6):
            raise ReconstructionError(
                f"numeric kernel has dimension {len(small)}, expected {p}", dimension=len(small), gap=gap
            )
        basis = [NumPoly(tuple(mpmath.conj(V[k, c]) for c in range(size)), precision) for k in order[size - p :]]
    return canonical_plane(basis)


def _scalar_div(a: Any, b: Any, exact: bool) -> Any:
    return exact_scalar(a / b) if exact else a / b


def _root_power(root: Any, power: int, like: Polynomial) -> Polynomial:
    if like.is_exact:
        return ExactPoly.from_roots([root] * power)
    return NumPoly.from_roots([root] * power, like.precision)


def _integrate_rational(
    numerator: Polynomial,
    denominator: dict[Any, int],
    stage: int,
    tolerance: Any,
) -> tuple[Polynomial, dict[Any, int]]:
    """Antiderivative of numerator / prod (x - r)^e with zero constant, as (N, den)."""

    exact = numerator.is_exact
    like = numerator
    full = one_like(like)
    for root, e in denominator.items():
        full = full * _root_power(root, e, like)
    polynomial_part, _ = divmod(numerator, full)

    reduced = {root: e - 1 for root, e in denominator.items() if e > 1}
    reduced_poly = one_like(like)
    for root, e in reduced.items():
        reduced_poly = reduced_poly * _root_power(root, e, like)
    result = polynomial_part.integrate() * reduced_poly

    for root, e in denominator.items():
        others = one_like(like)
        for other, f in denominator.items():
            if other != root:
                others = others * _root_power(other, f, like)
        a = numerator.taylor(root, e - 1)
        q = others.taylor(root, e - 1)
        series: list[Any] = []
        for k in range(e):
            value = a[k] - sum((q[i] * series[k - i] for i in range(1, k + 1)), 0)
            series.append(_scalar_div(value, q[0], exact))
        # c_{r,k} multiplies (x - r)^(-k); series[e - k] is its coefficient
        scale = max([mpmath.mpf(1)] + [abs(to_mpc(v)) for v in series])
        residue = series[e - 1]
        if (residue != 0) if exact else abs(to_mpc(residue)) > tolerance * scale:
            raise StructuralError("integrand has a nonzero residue", location=(stage, root))
        rest = one_like(like)
        for other, f in reduced.items():
            if other != root:
                rest = rest * _root_power(other, f, like)
        for k in range(2, e + 1):
            coefficient = series[e - k]
            if coefficient == 0:
                continue
            term = _root_power(root, e - k, like) * rest
            result = result + term * _scalar_div(coefficient, 1 - k, exact)
    return result, reduced


def iterated_integral_plane(flag: WronskianFlag, tolerance: Any = None) -> PPlane:
    """u_1 = W_1 and u_k = W_1 * int(W_0 W_2 / W_1^2 * int(... int W_{k-2} W_k / W_{k-1}^2))."""

    p = flag.p
    W = list(flag.W)
    tolerance = sep_tol(flag.precision) if tolerance is None else tolerance
    squares = [{root: 2 * mult for root, mult in level} for level in flag.roots]
    basis = [W[1]]
    for k in range(2, p + 1):
        numerator, denominator = one_like(W[1]), {}
        for j in range(k - 1, 0, -1):
            merged = dict(denominator)
            for root, e in squares[j].items():
                merged[root] = merged.get(root, 0) + e
            integrand = W[j - 1] * W[j + 1] * numerator
            numerator, denominator = _integrate_rational(integrand, merged, (k, j), tolerance)
        den = one_like(W[1])
        for root, e in denominator.items():
            den = den * _root_power(root, e, W[1])
        u, remainder = divmod(W[1] * numerator, den)
        if not remainder.is_zero and (remainder.is_exact or remainder.norm() > tolerance * max(1, u.norm())):
            raise StructuralError("nested integral is not a polynomial", location=(k, "final"))
        basis.append(u)
    return canonical_plane(basis)


@dataclass(frozen=True)
class Check:
    ok: bool
    defect: Any

    def to_dict(self) -> dict[str, Any]:
        defect = self.defect
        if not isinstance(defect, (int, str)):
            defect = mpmath.nstr(defect, 6) if isinstance(defect, (mpmath.mpf, mpmath.mpc)) else str(defect)
        return {"ok": self.ok, "defect": defect}


def _poly_defect(a: Polynomial, b: Polynomial) -> Any:
    a, b = a.monic(), b.monic()
    if a.degree != b.degree:
        return mpmath.inf
    if a.is_exact and b.is_exact and a == b:
        return mpmath.mpf(0)
    precision = max((q.precision for q in (a, b) if not q.is_exact), default=DEFAULT_PRECISION)
    with mpmath.workprec(precision):
        na, nb = a.to_numeric(precision), b.to_numeric(precision)
        scale = max(mpmath.mpf(1), nb.norm())
        return max((abs(x - y) / scale for x, y in zip(na.coeffs, nb.coeffs)), default=mpmath.mpf(0))


def _active_tolerance(plane: PPlane, flag: WronskianFlag | None) -> Any:
    if plane.is_exact and (flag is None or flag.is_exact):
        return mpmath.mpf(0)
    precision = plane.precision if not plane.is_exact else flag.precision
    return sep_tol(precision)


def verify_membership(
    prob: SchubertProblem, plane: PPlane, flag: WronskianFlag | None = None, tolerance: Any = None
) -> dict[str, Check]:
    """Wronskian, flag, exponent and nondegeneracy verdicts for ``plane``."""

    tol = _active_tolerance(plane, flag) if tolerance is None else tolerance
    checks: dict[str, Check] = {}
    if plane.p != prob.p:
        defect = abs(plane.p - prob.p)
        for name in ("wronskian_match", "exponents_match", "nondegeneracy"):
            checks[name] = Check(False, defect)
        return checks

    try:
        own = flag_from_plane(prob, plane)
    except DegeneracyError:
        for name in ("wronskian_match", "exponents_match", "nondegeneracy"):
            checks[name] = Check(False, mpmath.inf)
        return checks

    defect = _poly_defect(own.W[prob.p], prob.W_target)
    checks["wronskian_match"] = Check(defect <= tol, defect)

    if flag is not None:
        defect = max(_poly_defect(own.W[i], flag.W[i]) for i in range(1, prob.p + 1))
        checks["flag_match"] = Check(defect <= tol, defect)

    mismatches = 0
    for j, zj in enumerate(prob.z):
        if root_orders_at(plane, zj) != tuple(sorted(prob.rho[j])):
            mismatches += 1
    if plane.degrees != prob.degs:
        mismatches += 1
    checks["exponents_match"] = Check(mismatches == 0, mismatches)

    violations = 0
    for i in range(1, prob.p + 1):
        part = sub_plane(plane, i)
        for j, zj in enumerate(prob.z):
            if root_orders_at(part, zj) != tuple(sorted(prob.rho[j]))[:i]:
                violations += 1
        if part.degrees != prob.degs[:i]:
            violations += 1
    for i in range(1, prob.p - 1):
        above = own.W[i + 1]
        try:
            unmarked = _unmarked_roots(own, i)
        except StructuralError:
            violations += 1
            continue
        for root in unmarked:
            with mpmath.workprec(own.precision):
                value = abs(to_mpc(above(root)))
                if value <= max(tol, default_tolerance(own.precision)) * max(1, above.norm()):
                    violations += 1
    checks["nondegeneracy"] = Check(violations == 0, violations)
    for name, check in checks.items():
        if not check.ok:
            logger.info("check %s failed with defect %s", name, check.defect)
    return checks


@dataclass(frozen=True)
class ReconstructionReport:
    flag: WronskianFlag
    operator: PolyOperator
    plane: PPlane
    checks: dict[str, Check]
    integral_plane: PPlane | None = None

    @property
    def verified(self) -> bool:
        return all(check.ok for check in self.checks.values())

    @property
    def verdict(self) -> str:
        return "VERIFIED" if self.verified else "FAILED"

    def failures(self) -> list[str]:
        return [name for name, check in self.checks.items() if not check.ok]


def reconstruct_orbit(
    prob: SchubertProblem, orbit: CriticalOrbit, max_precision_bits: int = 1024
) -> ReconstructionReport:
    """flag -> operator -> kernel plane, cross-checked by the integral plane and verified."""

    while True:
        flag = flag_from_orbit(prob, orbit)
        tol = mpmath.mpf(0) if flag.is_exact else sep_tol(flag.precision)
        checks: dict[str, Check] = {}
        residue = residue_identity_defect(flag)
        checks["residue_identity"] = Check(residue <= sep_tol(flag.precision), residue)
        operator = operator_from_flag(flag)
        try:
            plane = kernel_plane(operator, prob.d, prob.p)
        except ReconstructionError as exc:
            if flag.is_exact or not checks["residue_identity"].ok or 2 * orbit.precision > max_precision_bits:
                raise
            logger.debug("kernel extraction failed at %d bits (%s); escalating", orbit.precision, exc)
            orbit = refine_orbit(prob, orbit, 2 * orbit.precision)
            continue
        break

    try:
        integral = iterated_integral_plane(flag, tol if not flag.is_exact else None)
    except StructuralError as exc:
        logger.info("integral path failed: %s", exc)
        integral = None
    checks.update(verify_membership(prob, plane, flag, tol))
    if integral is None:
        checks["path_agreement"] = Check(False, mpmath.inf)
    else:
        distance = plane_distance(plane, integral)
        checks["path_agreement"] = Check(distance <= tol, distance)
    return ReconstructionReport(flag, operator, plane, checks, integral)


def planes_distinct(planes: Sequence[PPlane], tolerance: Any) -> bool:
    return all(plane_distance(a, b) > tolerance for a, b in combinations(planes, 2))
