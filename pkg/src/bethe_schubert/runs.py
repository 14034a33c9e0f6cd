"""Run orchestration behind the CLI commands."""

from __future__ import annotations

from itertools import combinations
import logging
import time
from typing import Any, Callable, Sequence

import mpmath
import numpy as np
import sympy

from .config import SolverSettings
from .errors import DegeneracyError, NumericError, ProblemFileError, ReconstructionError, StructuralError
from .fuchsian import (
    complementary_degree_check,
    equation_from_plane,
    heine_stieltjes,
    profile,
    special_form_check,
)
from .master import CriticalOrbit, SchubertProblem, SolveResult, rationalize_orbit, sep_tol, solve_bethe
from .problem_file import ProblemFile, format_point
from .reconstruct import planes_distinct, reconstruct_orbit
from .report import (
    COMPLETE,
    FAILED,
    PARTIAL,
    VERIFIED,
    CountReport,
    OrbitRecord,
    ProfileReport,
    ReconstructionDigest,
    RunReport,
    SweepReport,
    operator_strings,
    polynomial_strings,
)
from .schubert import LevelCounts, WeightVector, dim_singular, dominant_weight_check

logger = logging.getLogger(__name__)

OrbitHook = Callable[[int, CriticalOrbit], CriticalOrbit]

SAMPLE_DENOMINATOR = 10**4
SAMPLE_MIN_DISTANCE = sympy.Rational(1, 100)


def finite_weights(indices: Sequence[Sequence[int]]) -> list[WeightVector]:
    return [WeightVector(tuple(a - b for a, b in zip(index, index[1:]))) for index in indices]


def _finite_indices(spec: ProblemFile, prob: SchubertProblem | None = None) -> list[tuple[int, ...]]:
    if spec.indices is not None:
        return [tuple(index) for index in spec.indices]
    if prob is not None:
        return [index.w for index in prob.w[:-1]]
    return [tuple(index) for index in (spec.w or [])[:-1]]


def count_run(spec: ProblemFile) -> CountReport:
    """LR bound and weight multiplicity for one problem; both must agree."""

    if spec.is_level_form:
        weights = finite_weights(spec.indices)
        if dominant_weight_check(weights, LevelCounts(spec.k)) is None:
            logger.info("weight is not dominant, the intersection is empty")
            return CountReport(spec.to_dict(), 0, 0, False, "empty: weight is not dominant")

    prob = spec.build()
    weights = finite_weights(_finite_indices(spec, prob))
    bound = prob.lr_bound()
    dominant = dominant_weight_check(weights, prob.k) is not None
    dim = dim_singular(weights, prob.k, prob.p) if dominant else 0
    verdict = "equal" if bound == dim else "mismatch"
    if bound != dim:
        logger.warning("intersection number %d differs from weight multiplicity %d", bound, dim)
    return CountReport(prob.describe(), bound, dim, dominant, verdict)


def _preferred(prob: SchubertProblem, orbit: CriticalOrbit) -> CriticalOrbit:
    if not prob.z.is_exact or orbit.is_exact:
        return orbit
    exact = rationalize_orbit(prob, orbit)
    return orbit if exact is None else exact


def _solve(prob: SchubertProblem, settings: SolverSettings) -> tuple[SolveResult, list[CriticalOrbit]]:
    result = solve_bethe(prob, settings.budget(), settings.seed)
    return result, [_preferred(prob, orbit) for orbit in result.orbits]


def solve_run(spec: ProblemFile, settings: SolverSettings) -> RunReport:
    started = time.perf_counter()
    prob = spec.build()
    result, orbits = _solve(prob, settings)
    report = RunReport(
        command="solve",
        problem=prob.describe(),
        bound=result.bound,
        verdict=COMPLETE if result.complete else PARTIAL,
        seed=settings.seed,
        precision_bits=result.precision,
        starts_used=result.starts_used,
        orbits=[OrbitRecord.from_orbit(orbit) for orbit in orbits],
    )
    report.wall_time = time.perf_counter() - started
    logger.info("solve: %d of %d orbits (%s)", report.count, report.bound, report.verdict)
    return report


def verify_run(spec: ProblemFile, settings: SolverSettings, orbit_hook: OrbitHook | None = None) -> RunReport:
    """Solve, then reconstruct and verify every orbit.

    ``orbit_hook`` may replace an orbit before reconstruction.
    """

    started = time.perf_counter()
    prob = spec.build()
    result, orbits = _solve(prob, settings)
    if orbit_hook is not None:
        orbits = [orbit_hook(index, orbit) for index, orbit in enumerate(orbits)]

    digests: list[ReconstructionDigest] = []
    planes = []
    for index, orbit in enumerate(orbits):
        try:
            reconstruction = reconstruct_orbit(prob, orbit, settings.max_precision_bits)
        except (DegeneracyError, NumericError, ReconstructionError, StructuralError) as exc:
            logger.info("orbit %d could not be reconstructed: %s", index, exc)
            digests.append(ReconstructionDigest.from_error(index, exc))
            continue
        digests.append(ReconstructionDigest.from_report(index, reconstruction))
        planes.append(reconstruction.plane)

    exact = all(plane.is_exact for plane in planes)
    distinct = planes_distinct(planes, mpmath.mpf(0) if exact else sep_tol(result.precision))
    if any(digest.failures for digest in digests) or not distinct:
        verdict = FAILED
    elif not result.complete:
        verdict = PARTIAL
    else:
        verdict = VERIFIED

    report = RunReport(
        command="verify",
        problem=prob.describe(),
        bound=result.bound,
        verdict=verdict,
        seed=settings.seed,
        precision_bits=result.precision,
        starts_used=result.starts_used,
        orbits=[OrbitRecord.from_orbit(orbit) for orbit in orbits],
        reconstructions=digests,
        planes_distinct=distinct,
    )
    report.wall_time = time.perf_counter() - started
    logger.info("verify: %d orbits, verdict %s", report.count, verdict)
    return report


def sample_points(rng: np.random.Generator, n: int) -> tuple[sympy.Expr, ...]:
    """n rationals in the unit box with denominator 10^4, pairwise at least 1/100 apart."""

    while True:
        re = rng.integers(0, SAMPLE_DENOMINATOR + 1, size=n)
        im = rng.integers(0, SAMPLE_DENOMINATOR + 1, size=n)
        points = tuple(
            sympy.Rational(int(a), SAMPLE_DENOMINATOR) + sympy.I * sympy.Rational(int(b), SAMPLE_DENOMINATOR)
            for a, b in zip(re, im)
        )
        if all(
            sympy.re(a - b) ** 2 + sympy.im(a - b) ** 2 >= SAMPLE_MIN_DISTANCE**2
            for a, b in combinations(points, 2)
        ):
            return points


def sweep_run(template: ProblemFile, trials: int, seed: int, settings: SolverSettings) -> SweepReport:
    """Resample the marked points ``trials`` times and count orbits each time."""

    if not template.is_level_form:
        raise ProblemFileError("sweep templates need the level form ('indices' or 'm' together with 'k')")
    if trials < 1:
        raise ProblemFileError(f"trials must be positive, got {trials}")
    started = time.perf_counter()
    expected = dim_singular(finite_weights(template.indices), LevelCounts(template.k), template.p)

    counts: list[int] = []
    points: list[list[Any]] = []
    for trial, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        z = sample_points(np.random.default_rng(child), len(template.indices))
        prob = template.with_points(z).build()
        trial_seed = int(child.generate_state(1)[0])
        result = solve_bethe(prob, settings.budget(), trial_seed)
        counts.append(result.count)
        points.append([format_point(v) for v in z])
        if result.count != expected:
            logger.warning("trial %d found %d orbits, expected %d", trial, result.count, expected)

    report = SweepReport(
        template=template.to_dict(),
        trials=trials,
        seed=seed,
        expected=expected,
        counts=counts,
        points=points,
    )
    report.wall_time = time.perf_counter() - started
    return report


def profile_run(spec: ProblemFile) -> ProfileReport:
    """Fuchsian profile of the plane in ``spec`` and its special-form verdicts."""

    plane = spec.build_plane()
    d = spec.d if spec.d is not None else max(plane.degrees)
    z = list(spec.z)
    analysis = profile(plane, d, z)
    report = ProfileReport(
        profile=analysis.to_dict(),
        operator=operator_strings(equation_from_plane(plane)),
    )
    if z:
        report.special_form = special_form_check(plane, z).to_dict()
    if plane.p == 2:
        report.complementary_degrees = complementary_degree_check(plane, z or None)
        data = heine_stieltjes(plane, z) if z else None
        if data is not None:
            report.heine_stieltjes = {
                name: polynomial_strings(getattr(data, name)) for name in ("A", "B", "C", "u")
            }
    return report
