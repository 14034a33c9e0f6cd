"""Schubert problems, the master function and the Bethe system.

A :class:`SchubertProblem` carries the instance data and every derived
quantity.  :func:`solve_bethe` finds critical orbits by seeded multistart
Newton iteration and stops once the Littlewood-Richardson bound is reached.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
import logging
from typing import Any, Iterable, Iterator, Sequence

import mpmath
import numpy as np
import sympy

from .errors import BetheEvaluationError, DomainError, ProblemRejection, SchubertError
from .polycore import (
    DEFAULT_PRECISION,
    ExactPoly,
    MarkedPoints,
    NumPoly,
    Polynomial,
    exact_scalar,
    is_exact_scalar,
    rel_discriminant,
    rel_resultant,
    to_mpc,
)
from .schubert import LevelCounts, SchubertIndex, intersection_number

logger = logging.getLogger(__name__)


def sep_tol(precision: int) -> mpmath.mpf:
    """Clustering and admissibility tolerance 2^(-prec/3)."""

    return mpmath.ldexp(1, -(precision // 3))


def residual_target(precision: int) -> mpmath.mpf:
    with mpmath.workprec(precision):
        return mpmath.mpf(10) ** (-(precision // 4))


@dataclass(frozen=True)
class SolverBudget:
    starts: int = 64
    max_iter: int = 80
    precision_bits: int = DEFAULT_PRECISION
    max_precision_bits: int = 1024
    workers: int = 1


@dataclass(frozen=True)
class SchubertProblem:
    p: int
    d: int
    z: MarkedPoints
    w: tuple[SchubertIndex, ...]
    m: tuple[int, ...]
    mgrid: tuple[tuple[int, ...], ...]
    k: LevelCounts
    Z: tuple[Polynomial, ...]
    rho: tuple[tuple[int, ...], ...]
    degs: tuple[int, ...]
    W_target: Polynomial

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def w_inf(self) -> SchubertIndex:
        return self.w[-1]

    @property
    def groups(self) -> tuple[int, ...]:
        """Group sizes k_1..k_{p-1}."""

        return self.k.k

    def marked_exponent(self, group: int, j: int) -> int:
        """2 m_j(p-i) - m_j(p-i-1) - m_j(p-i+1) for group i (1-based)."""

        row = self.mgrid[j]
        level = self.p - group
        return 2 * row[level] - row[level - 1] - row[level + 1]

    def lr_bound(self) -> int:
        return int(intersection_number(self.w))

    def describe(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "d": self.d,
            "z": [str(v) for v in self.z],
            "w": [list(index.w) for index in self.w],
            "m": list(self.m),
            "k": list(self.k.k),
            "degs": list(self.degs),
        }


def _marked_points(z: MarkedPoints | Sequence[Any]) -> MarkedPoints:
    if isinstance(z, MarkedPoints):
        return z
    try:
        return MarkedPoints(tuple(z))
    except DomainError as exc:
        raise ProblemRejection("distinct-points", str(exc)) from exc


def _level_polynomial(z: MarkedPoints, exponents: Sequence[int]) -> Polynomial:
    result: Polynomial = ExactPoly.constant(1) if z.is_exact else NumPoly.constant(1)
    for j, power in enumerate(exponents):
        if power:
            result = result * z.linear_factor(j) ** power
    return result


def build_problem(
    p: int,
    d: int,
    z: MarkedPoints | Sequence[Any],
    w: Sequence[SchubertIndex | Sequence[int]],
) -> SchubertProblem:
    """Validate raw instance data and derive every quantity the solver needs."""

    if p < 2:
        raise ProblemRejection("shape", f"p must be at least 2, got {p}")
    if d + 1 - p < 0:
        raise ProblemRejection("box", f"G_{p}(Poly_{d}) is empty: d must be at least p-1")
    points = _marked_points(z)
    n = len(points)
    if len(w) != n + 1:
        raise ProblemRejection("shape", f"expected {n + 1} indices (one per marked point and infinity), got {len(w)}")

    indices: list[SchubertIndex] = []
    for position, raw in enumerate(w):
        values = raw.w if isinstance(raw, SchubertIndex) else tuple(raw)
        try:
            indices.append(SchubertIndex(tuple(values), p, d))
        except SchubertError as exc:
            raise ProblemRejection("box", f"index {position + 1}: {exc}") from exc

    for j, index in enumerate(indices[:-1]):
        if index.w[-1] != 0:
            raise ProblemRejection("base-point", f"w_p(z_{j + 1}) = {index.w[-1]} must be 0")
    if indices[-1].w[-1] != 0:
        raise ProblemRejection("degree-order", f"w_p(infinity) = {indices[-1].w[-1]} forces d_p < d")

    width = d + 1 - p
    total = sum(index.size for index in indices)
    if total != p * width:
        raise ProblemRejection(
            "codimension-sum", f"sum of |w| is {total}, expected dim G_p(Poly_d) = {p * width}"
        )

    # mgrid[j][i] = m_j(i), i = 0..p
    mgrid = tuple(
        tuple(sum(index.w[p - i :]) if i else 0 for i in range(p + 1)) for index in indices[:-1]
    )
    for j, row in enumerate(mgrid):
        for i in range(1, p):
            if 2 * row[i] - row[i - 1] - row[i + 1] > 0:
                raise ProblemRejection("exponent-gap", f"2m_{j + 1}({i}) - m_{j + 1}({i - 1}) - m_{j + 1}({i + 1}) > 0")

    w_inf = indices[-1].w
    levels = []
    for i in range(1, p):
        level = p - i
        value = level * width - sum(w_inf[:level]) - sum(row[level] for row in mgrid)
        if value < 0:
            raise ProblemRejection("negative-level", f"k_{i} = {value} is negative")
        levels.append(value)

    degs = tuple(d - w_inf[l] + (l + 1) - p for l in range(p))
    if degs[0] < 0 or any(a >= b for a, b in zip(degs, degs[1:])):
        raise ProblemRejection("degree-order", f"degrees {degs} are not 0 <= d_1 < ... < d_p")

    Z = tuple(_level_polynomial(points, [row[i] for row in mgrid]) for i in range(p + 1))
    rho = tuple(tuple(index.w[l] + p - (l + 1) for l in range(p)) for index in indices[:-1])
    problem = SchubertProblem(
        p=p,
        d=d,
        z=points,
        w=tuple(indices),
        m=tuple(index.size for index in indices[:-1]),
        mgrid=mgrid,
        k=LevelCounts(tuple(levels)),
        Z=Z,
        rho=rho,
        degs=degs,
        W_target=Z[p],
    )
    logger.debug("built problem p=%d d=%d n=%d k=%s", p, d, n, problem.k.k)
    return problem


def build_problem_from_levels(
    p: int,
    z: MarkedPoints | Sequence[Any],
    finite_indices: Sequence[Sequence[int]],
    k: LevelCounts | Sequence[int],
) -> SchubertProblem:
    """The (m, k) form: finite indices plus level counts determine d and w(infinity)."""

    levels = k.k if isinstance(k, LevelCounts) else tuple(int(v) for v in k)
    if len(levels) != p - 1:
        raise ProblemRejection("shape", f"expected {p - 1} level counts, got {len(levels)}")
    if any(v < 0 for v in levels):
        raise ProblemRejection("negative-level", f"level counts {levels} must be nonnegative")
    for j, index in enumerate(finite_indices):
        if len(index) != p:
            raise ProblemRejection("shape", f"index at z_{j + 1} must have {p} entries")

    def m_at(index: Sequence[int], i: int) -> int:
        return sum(index[p - i :]) if i else 0

    # level k_0 is zero here; deg W_p = sum m_j
    padded = (0,) + levels
    wdeg = [0] + [padded[p - i] + sum(m_at(index, i) for index in finite_indices) for i in range(1, p + 1)]
    degs = tuple(wdeg[i] - wdeg[i - 1] + i - 1 for i in range(1, p + 1))
    if degs[0] < 0 or any(a >= b for a, b in zip(degs, degs[1:])):
        raise ProblemRejection("degree-order", f"degrees {degs} derived from k={levels} are not increasing")
    d = degs[-1]
    w_inf = tuple(d - degs[l] + (l + 1) - p for l in range(p))
    return build_problem(p, d, z, [tuple(index) for index in finite_indices] + [w_inf])


@dataclass(frozen=True)
class BethePoint:
    """Ragged coordinates: group i holds k_i values t^(i)."""

    t: tuple[tuple[Any, ...], ...]
    precision: int = DEFAULT_PRECISION

    @property
    def is_exact(self) -> bool:
        return all(is_exact_scalar(v) for group in self.t for v in group)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(group) for group in self.t)

    def flat(self) -> list[Any]:
        return [v for group in self.t for v in group]

    @classmethod
    def from_flat(cls, values: Sequence[Any], sizes: Sequence[int], precision: int) -> "BethePoint":
        groups, start = [], 0
        for size in sizes:
            groups.append(tuple(values[start : start + size]))
            start += size
        return cls(tuple(groups), precision)

    def numeric(self, precision: int | None = None) -> "BethePoint":
        precision = precision or self.precision
        with mpmath.workprec(precision):
            return BethePoint(tuple(tuple(to_mpc(v) for v in group) for group in self.t), precision)

    def canonical(self) -> "BethePoint":
        def key(value: Any) -> tuple[Any, Any]:
            with mpmath.workprec(self.precision):
                c = to_mpc(value)
            return (c.real, c.imag)

        return BethePoint(tuple(tuple(sorted(group, key=key)) for group in self.t), self.precision)

    def as_strings(self, digits: int = 30) -> list[list[str]]:
        out = []
        for group in self.t:
            if self.is_exact:
                out.append([str(v) for v in group])
            else:
                with mpmath.workprec(self.precision):
                    out.append([mpmath.nstr(to_mpc(v), digits) for v in group])
        return out


def _as_point(prob: SchubertProblem, t: BethePoint | Sequence[Sequence[Any]]) -> BethePoint:
    point = t if isinstance(t, BethePoint) else BethePoint(tuple(tuple(g) for g in t))
    if point.sizes != prob.groups:
        raise DomainError(f"group sizes {point.sizes} do not match k = {prob.groups}")
    return point


@dataclass(frozen=True)
class MasterValue:
    """log of the master function with degeneracy flags."""

    log_value: mpmath.mpc | None
    has_zero: bool = False
    has_pole: bool = False

    @property
    def is_finite_nonzero(self) -> bool:
        return self.log_value is not None

    def value(self) -> mpmath.mpc | None:
        return None if self.log_value is None else mpmath.exp(self.log_value)


def master_log_value(prob: SchubertProblem, t: BethePoint | Sequence[Sequence[Any]]) -> MasterValue:
    point = _as_point(prob, t)
    precision = point.precision
    with mpmath.workprec(precision):
        groups = [[to_mpc(v) for v in group] for group in point.t]
        z = prob.z.numeric(precision)
        total = mpmath.mpc(0)
        has_zero = has_pole = False

        def add(factor: mpmath.mpc, exponent: int) -> None:
            nonlocal total, has_zero, has_pole
            if exponent == 0:
                return
            if factor == 0:
                if exponent > 0:
                    has_zero = True
                else:
                    has_pole = True
                return
            total += exponent * mpmath.log(factor)

        for i, group in enumerate(groups):
            for a, b in combinations(group, 2):
                add((a - b) ** 2, 1)
            if i + 1 < len(groups):
                for a in group:
                    for b in groups[i + 1]:
                        add(a - b, -1)
            for j, zj in enumerate(z):
                exponent = prob.marked_exponent(i + 1, j)
                for a in group:
                    add(a - zj, exponent)

        if has_zero or has_pole:
            return MasterValue(None, has_zero, has_pole)
        turns = mpmath.nint(total.imag / (2 * mpmath.pi))
        return MasterValue(mpmath.mpc(total.real, total.imag - 2 * mpmath.pi * turns))


def _neighbours(groups: Sequence[Sequence[Any]], i: int) -> Iterator[tuple[int, int, Any]]:
    for other in (i - 1, i + 1):
        if 0 <= other < len(groups):
            for s, value in enumerate(groups[other]):
                yield other, s, value


def bethe_residuals(prob: SchubertProblem, t: BethePoint | Sequence[Sequence[Any]]) -> tuple[tuple[Any, ...], ...]:
    """Logarithmic gradient of the master function, one entry per coordinate."""

    point = _as_point(prob, t)
    exact = point.is_exact and prob.z.is_exact

    if exact:
        groups = [[exact_scalar(v) for v in group] for group in point.t]
        z = list(prob.z)
        zero = sympy.Integer(0)

        def inverse(a: Any, b: Any, pair: tuple[Any, Any]) -> Any:
            if a == b:
                raise BetheEvaluationError(f"coordinates collide at {a}", pair=pair)
            return exact_scalar(1 / (a - b))

        return _residuals(prob, groups, z, inverse, zero, finish=lambda v: exact_scalar(sympy.expand(v)))

    with mpmath.workprec(point.precision):
        groups = [[to_mpc(v) for v in group] for group in point.t]
        z = list(prob.z.numeric(point.precision))

        def inverse(a: Any, b: Any, pair: tuple[Any, Any]) -> Any:
            diff = a - b
            if diff == 0:
                raise BetheEvaluationError(f"coordinates collide at {a}", pair=pair)
            return 1 / diff

        return _residuals(prob, groups, z, inverse, mpmath.mpc(0), finish=lambda v: v)


def _residuals(prob, groups, z, inverse, zero, finish) -> tuple[tuple[Any, ...], ...]:
    out = []
    for i, group in enumerate(groups):
        row = []
        for l, value in enumerate(group):
            total = zero
            for s, other in enumerate(group):
                if s != l:
                    total += 2 * inverse(value, other, ((i + 1, l), (i + 1, s)))
            for g, s, other in _neighbours(groups, i):
                total -= inverse(value, other, ((i + 1, l), (g + 1, s)))
            for j, zj in enumerate(z):
                exponent = prob.marked_exponent(i + 1, j)
                if exponent:
                    total += exponent * inverse(value, zj, ((i + 1, l), ("z", j + 1)))
            row.append(finish(total))
        out.append(tuple(row))
    return tuple(out)


def residual_norm(residuals: Iterable[Iterable[Any]]) -> mpmath.mpf:
    return max((abs(to_mpc(v)) for row in residuals for v in row), default=mpmath.mpf(0))


def jacobian(prob: SchubertProblem, t: BethePoint) -> mpmath.matrix:
    """Analytic Jacobian of :func:`bethe_residuals` over the flattened coordinates."""

    point = t.numeric()
    groups = [list(group) for group in point.t]
    offsets = np.cumsum((0,) + point.sizes).tolist()
    size = offsets[-1]
    with mpmath.workprec(point.precision):
        z = prob.z.numeric(point.precision)
        J = mpmath.matrix(size, size)
        for i, group in enumerate(groups):
            for l, value in enumerate(group):
                row = offsets[i] + l
                for s, other in enumerate(group):
                    if s == l:
                        continue
                    inv2 = 1 / (value - other) ** 2
                    J[row, row] -= 2 * inv2
                    J[row, offsets[i] + s] += 2 * inv2
                for g, s, other in _neighbours(groups, i):
                    inv2 = 1 / (value - other) ** 2
                    J[row, row] += inv2
                    J[row, offsets[g] + s] -= inv2
                for j, zj in enumerate(z):
                    exponent = prob.marked_exponent(i + 1, j)
                    if exponent:
                        J[row, row] -= exponent / (value - zj) ** 2
    return J


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def is_admissible(
    prob: SchubertProblem, t: BethePoint | Sequence[Sequence[Any]], tol: Any = None
) -> Admissibility:
    """Distinct within groups, disjoint across adjacent groups, away from the marked points."""

    point = _as_point(prob, t)
    exact = point.is_exact and prob.z.is_exact
    if exact:
        groups = [[exact_scalar(v) for v in group] for group in point.t]
        z = list(prob.z)

        def close(a: Any, b: Any) -> bool:
            return a == b

    else:
        precision = point.precision
        bound = sep_tol(precision) if tol is None else mpmath.mpf(tol)
        groups = [[to_mpc(v) for v in group] for group in point.numeric().t]
        z = list(prob.z.numeric(precision))

        def close(a: Any, b: Any) -> bool:
            with mpmath.workprec(precision):
                return abs(a - b) <= bound

    reasons: list[str] = []
    if any(close(a, b) for group in groups for a, b in combinations(group, 2)):
        reasons.append("intra-group collision")
    if any(close(a, b) for i in range(len(groups) - 1) for a in groups[i] for b in groups[i + 1]):
        reasons.append("adjacent-group collision")
    if any(close(a, zj) for group in groups for a in group for zj in z):
        reasons.append("marked-point collision")
    return Admissibility(not reasons, tuple(reasons))


@dataclass(frozen=True)
class CriticalOrbit:
    rep: BethePoint
    residual_norm: Any
    log_value: Any

    @property
    def precision(self) -> int:
        return self.rep.precision

    @property
    def is_exact(self) -> bool:
        return self.rep.is_exact


@dataclass(frozen=True)
class SolveResult:
    orbits: tuple[CriticalOrbit, ...]
    complete: bool
    bound: int
    starts_used: int
    precision: int

    @property
    def count(self) -> int:
        return len(self.orbits)


def generating_value(prob: SchubertProblem, t: BethePoint | Sequence[Sequence[Any]]):
    """prod Delta_z(W_i) / prod Res_z(W_i, W_{i+1}) over the flag built from ``t``."""

    point = _as_point(prob, t)
    exact = point.is_exact and prob.z.is_exact
    flag = flag_polynomials(prob, point, exact)
    numerator = 1
    denominator = 1
    for i in range(1, prob.p):
        numerator *= rel_discriminant(flag[i], prob.z)
        denominator *= rel_resultant(flag[i], flag[i + 1], prob.z)
    if exact:
        return exact_scalar(sympy.expand(numerator / denominator))
    with mpmath.workprec(point.precision):
        return to_mpc(numerator) / to_mpc(denominator)


def flag_polynomials(prob: SchubertProblem, point: BethePoint, exact: bool) -> list[Polynomial]:
    flag: list[Polynomial] = []
    for i in range(prob.p + 1):
        level = prob.p - i
        roots = point.t[level - 1] if 1 <= level <= prob.p - 1 else ()
        if exact:
            T = ExactPoly.from_roots(roots)
            Zi = prob.Z[i]
        else:
            T = NumPoly.from_roots(roots, point.precision)
            Zi = prob.Z[i].to_numeric(point.precision)
        flag.append(Zi * T)
    return flag


def rationalize_orbit(
    prob: SchubertProblem, orbit: CriticalOrbit, max_denominator: int = 10**6
) -> CriticalOrbit | None:
    """Exact orbit whose coordinates are small-denominator Gaussian rationals, if one matches."""

    if not prob.z.is_exact:
        return None
    def nearby(value: mpmath.mpf) -> sympy.Rational:
        man, exp = value.man_exp
        return (sympy.Integer(int(man)) * sympy.Integer(2) ** int(exp)).limit_denominator(max_denominator)

    with mpmath.workprec(orbit.precision):
        groups = []
        for group in orbit.rep.t:
            values = []
            for value in group:
                c = to_mpc(value)
                values.append(nearby(c.real) + sympy.I * nearby(c.imag))
            groups.append(tuple(values))
    candidate = BethePoint(tuple(groups), orbit.precision)
    if not is_admissible(prob, candidate):
        return None
    try:
        residuals = bethe_residuals(prob, candidate)
    except BetheEvaluationError:
        return None
    if any(v != 0 for row in residuals for v in row):
        return None
    return CriticalOrbit(candidate.canonical(), sympy.Integer(0), master_log_value(prob, candidate).log_value)


def orbit_distance(a: BethePoint, b: BethePoint) -> mpmath.mpf:
    """Greedy per-group matching distance between two orbit representatives."""

    precision = max(a.precision, b.precision)
    with mpmath.workprec(precision):
        worst = mpmath.mpf(0)
        for group_a, group_b in zip(a.numeric(precision).t, b.numeric(precision).t):
            unused = list(group_b)
            for value in group_a:
                best = min(range(len(unused)), key=lambda idx: abs(value - unused[idx]))
                worst = max(worst, abs(value - unused.pop(best)))
        return worst


@dataclass(frozen=True)
class _StartTask:
    prob: SchubertProblem
    seed: np.random.SeedSequence
    index: int
    max_iter: int
    precision: int
    center: Any = field(repr=False)
    radius: float = 1.0


def _initial_point(task: _StartTask) -> list[mpmath.mpc]:
    rng = np.random.default_rng(task.seed)
    size = task.prob.k.total
    radii = task.radius * np.sqrt(rng.random(size))
    angles = 2 * np.pi * rng.random(size)
    with mpmath.workprec(task.precision):
        center = to_mpc(task.center)
        return [center + mpmath.mpc(float(r * np.cos(a)), float(r * np.sin(a))) for r, a in zip(radii, angles)]


def _flat_residual(prob: SchubertProblem, values: Sequence[Any], precision: int) -> list[mpmath.mpc]:
    point = BethePoint.from_flat(values, prob.groups, precision)
    return [v for row in bethe_residuals(prob, point) for v in row]


def _damped_newton(
    prob: SchubertProblem,
    values: list[mpmath.mpc],
    max_iter: int,
    precision: int,
    center: Any = None,
    bound: Any = None,
):
    """Damped Newton on the log-gradient; steps leaving the disk |t - center| <= bound are shortened."""

    target = residual_target(precision) / 16
    with mpmath.workprec(precision):
        F = _flat_residual(prob, values, precision)
        norm = max(abs(v) for v in F)
        for _ in range(max_iter):
            if norm <= target:
                break
            J = jacobian(prob, BethePoint.from_flat(values, prob.groups, precision))
            try:
                step = mpmath.lu_solve(J, mpmath.matrix([-v for v in F]))
            except ZeroDivisionError:
                return values, norm
            damping = mpmath.mpf(1)
            while damping > mpmath.ldexp(1, -12):
                trial = [v + damping * step[r] for r, v in enumerate(values)]
                if bound is not None and any(abs(v - center) > bound for v in trial):
                    damping /= 2
                    continue
                try:
                    trial_F = _flat_residual(prob, trial, precision)
                except BetheEvaluationError:
                    damping /= 2
                    continue
                trial_norm = max(abs(v) for v in trial_F)
                if trial_norm < norm:
                    values, F, norm = trial, trial_F, trial_norm
                    break
                damping /= 2
            else:
                break
        return values, norm


def _cleared_system(prob: SchubertProblem, precision: int):
    """Bethe equations multiplied through by their pole factors."""

    sizes = prob.groups
    z = prob.z.numeric(precision)
    exponents = [[prob.marked_exponent(i + 1, j) for j in range(len(z))] for i in range(len(sizes))]

    def system(*values: Any) -> list[mpmath.mpc]:
        groups = BethePoint.from_flat(list(values), sizes, precision).t
        out = []
        for i, group in enumerate(groups):
            for l, value in enumerate(group):
                terms = [(2, value - other) for s, other in enumerate(group) if s != l]
                terms += [(-1, value - other) for _, _, other in _neighbours(groups, i)]
                terms += [(e, value - zj) for e, zj in zip(exponents[i], z) if e]
                factors = [factor for _, factor in terms]
                out.append(
                    mpmath.fsum(
                        weight * mpmath.fprod(factors[:q] + factors[q + 1 :])
                        for q, (weight, _) in enumerate(terms)
                    )
                )
        return out

    return system


def _cleared_newton(prob: SchubertProblem, values: list[mpmath.mpc], max_iter: int, precision: int):
    with mpmath.workprec(precision):
        try:
            found = mpmath.findroot(
                _cleared_system(prob, precision), values, solver="mdnewton", maxsteps=max_iter, verify=False
            )
        except (ValueError, ZeroDivisionError, mpmath.libmp.NoConvergence):
            return None
        if isinstance(found, mpmath.matrix):
            return [found[r] for r in range(found.rows)]
        return [found]


def _run_start(task: _StartTask) -> BethePoint | None:
    """One multistart attempt; returns an admissible certified point or None."""

    prob, precision = task.prob, task.precision
    start = _initial_point(task)
    target = residual_target(precision)
    with mpmath.workprec(precision):
        center = to_mpc(task.center)
        bound = 10 * mpmath.mpf(task.radius)
    try:
        values, norm = _damped_newton(prob, start, task.max_iter, precision, center, bound)
    except BetheEvaluationError:
        norm = mpmath.inf
    if norm > target:
        polished = _cleared_newton(prob, start, task.max_iter, precision)
        if polished is None:
            logger.debug("start %d: no convergence", task.index)
            return None
        try:
            values, norm = _damped_newton(prob, polished, 4, precision)
        except BetheEvaluationError:
            logger.debug("start %d: cleared system converged onto a collision", task.index)
            return None
    point = BethePoint.from_flat(values, prob.groups, precision)
    admissible = is_admissible(prob, point)
    if norm > target or not admissible:
        logger.debug("start %d rejected: residual %s, %s", task.index, mpmath.nstr(norm, 5), admissible.reasons)
        return None
    return point.canonical()


def _certify(prob: SchubertProblem, point: BethePoint, budget: SolverBudget) -> CriticalOrbit | None:
    precision = min(2 * point.precision, max(budget.max_precision_bits, point.precision))
    with mpmath.workprec(precision):
        lifted = point.numeric(precision)
        try:
            values, norm = _damped_newton(prob, lifted.flat(), 8, precision)
        except BetheEvaluationError:
            return None
    refined = BethePoint.from_flat(values, prob.groups, precision).canonical()
    if norm > residual_target(point.precision) or not is_admissible(prob, refined):
        return None
    value = master_log_value(prob, refined)
    if not value.is_finite_nonzero:
        return None
    return CriticalOrbit(refined, norm, value.log_value)


def refine_orbit(prob: SchubertProblem, orbit: CriticalOrbit, precision: int) -> CriticalOrbit:
    """Re-polish a numeric orbit at ``precision`` bits."""

    with mpmath.workprec(precision):
        values, norm = _damped_newton(prob, orbit.rep.numeric(precision).flat(), 8, precision)
    rep = BethePoint.from_flat(values, prob.groups, precision).canonical()
    logger.debug("refined orbit to %d bits, residual %s", precision, mpmath.nstr(norm, 5))
    return CriticalOrbit(rep, norm, master_log_value(prob, rep).log_value)


def _tasks(prob: SchubertProblem, budget: SolverBudget, seed: int) -> list[_StartTask]:
    precision = budget.precision_bits
    with mpmath.workprec(precision):
        z = prob.z.numeric(precision)
        center = mpmath.fsum(z) / len(z)
        radius = 2 * (1 + max(abs(v) for v in z))
    children = np.random.SeedSequence(seed).spawn(budget.starts)
    return [
        _StartTask(prob, child, index, budget.max_iter, precision, center, float(radius))
        for index, child in enumerate(children)
    ]


def _is_new(prob: SchubertProblem, candidate: BethePoint, found: list[CriticalOrbit], budget: SolverBudget) -> bool:
    for orbit in found:
        while True:
            distance = orbit_distance(candidate, orbit.rep)
            tol = sep_tol(candidate.precision)
            if distance <= tol:
                return False
            if distance > 10 * tol:
                break
            if 2 * candidate.precision > budget.max_precision_bits:
                logger.warning(
                    "orbits within %s stay ambiguous at %d bits; merging",
                    mpmath.nstr(distance, 5),
                    candidate.precision,
                )
                return False
            logger.debug("escalating to %d bits to separate close orbits", 2 * candidate.precision)
            refined = _certify(prob, candidate, budget)
            if refined is None:
                return False
            candidate = refined.rep
    return True


def solve_bethe(
    prob: SchubertProblem, budget: SolverBudget | None = None, seed: int = 0
) -> SolveResult:
    """Seeded multistart search for critical orbits, stopping at the LR bound."""

    budget = budget or SolverBudget()
    bound = prob.lr_bound()
    precision = budget.precision_bits
    if prob.k.total == 0:
        trivial = BethePoint(tuple(() for _ in prob.groups), precision)
        orbit = CriticalOrbit(trivial, mpmath.mpf(0), mpmath.mpc(0))
        return SolveResult((orbit,), bound == 1, bound, 0, precision)
    if bound == 0:
        return SolveResult((), True, 0, 0, precision)

    found: list[CriticalOrbit] = []
    used = 0
    tasks = _tasks(prob, budget, seed)

    def consume(results: Iterable[BethePoint | None]) -> None:
        nonlocal used
        for candidate in results:
            used += 1
            if candidate is None or not _is_new(prob, candidate, found, budget):
                continue
            orbit = _certify(prob, candidate, budget)
            if orbit is None:
                logger.debug("candidate failed recertification at doubled precision")
                continue
            found.append(orbit)
            logger.debug("orbit %d found after %d starts", len(found), used)
            if len(found) >= bound:
                return

    if budget.workers > 1:
        executor = ProcessPoolExecutor(max_workers=budget.workers)
        try:
            consume(executor.map(_run_start, tasks))
        finally:
            executor.shutdown(wait=True, cancel_futures=True)
    else:
        consume(_run_start(task) for task in tasks)

    complete = len(found) == bound
    if not complete:
        logger.warning("found %d of %d orbits after %d starts", len(found), bound, used)
    ordered = sorted(found, key=lambda orbit: [str(row) for row in orbit.rep.as_strings(20)])
    return SolveResult(tuple(ordered), complete, bound, used, precision)
