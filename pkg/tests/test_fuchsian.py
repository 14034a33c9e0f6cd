"""Tests for Fuchsian equations read off p-planes."""

from __future__ import annotations

import pytest
import sympy

from bethe_schubert.errors import DomainError
from bethe_schubert.fuchsian import (
    complementary_degree_check,
    equation_from_plane,
    heine_stieltjes,
    hypergeometric_case,
    levels_from_degrees,
    ordinary_exponents,
    profile,
    special_equation_count,
    special_form_check,
)
from bethe_schubert.planes import PPlane, canonical_plane
from bethe_schubert.polycore import ExactPoly, PolyOperator, X
from bethe_schubert.schubert import LevelCounts, intersection_number

HALF = sympy.Rational(1, 2)


def exact(expr) -> ExactPoly:
    return ExactPoly.from_expr(expr)


@pytest.fixture
def worked_plane() -> PPlane:
    return canonical_plane([exact(X - HALF), exact(X**2)])


class TestEquationFromPlane:
    def test_worked_plane(self, worked_plane) -> None:
        """{x - 1/2, x^2} solves x(x-1)u'' - (2x-1)u' + 2u = 0."""
        expected = PolyOperator((exact(2), exact(1 - 2 * X), exact(X**2 - X)))
        assert equation_from_plane(worked_plane) == expected

    def test_annihilates_basis(self) -> None:
        """The operator kills every basis element."""
        plane = canonical_plane([exact(X + 2), exact(X**3 - X), exact(X**4 + 3)])
        operator = equation_from_plane(plane)
        assert operator.order == 3
        assert all(operator.apply(u).is_zero for u in plane.basis)

    def test_monomial_pair(self) -> None:
        """{1, x^3} gives x u'' - 2u'."""
        operator = equation_from_plane(canonical_plane([exact(1), exact(X**3)]))
        assert operator == PolyOperator((exact(0), exact(-2), exact(X)))

    def test_constant_wronskian(self) -> None:
        """{1, x} gives u'' = 0."""
        operator = equation_from_plane(canonical_plane([exact(1), exact(X)]))
        assert operator == PolyOperator((exact(0), exact(0), exact(1)))


class TestProfile:
    def test_worked_plane(self, worked_plane) -> None:
        """Simple Wronskian roots at 0 and 1 carry sigma_1; infinity carries nothing."""
        result = profile(worked_plane, 2)
        by_point = {point.point: point for point in result.points}
        assert set(by_point) == {0, 1}
        assert by_point[0].exponents == (2, 0)
        assert by_point[0].index.w == (1, 0)
        assert result.infinity.index.w == (0, 0)
        assert result.inf_multiplicity == 0
        assert result.total_codim == 2

    def test_extra_ordinary_point(self, worked_plane) -> None:
        """Requested ordinary points have exponents (1, 0) and a trivial index."""
        result = profile(worked_plane, 2, z=[5])
        five = next(point for point in result.points if point.point == 5)
        assert five.exponents == ordinary_exponents(2)
        assert five.codim == 0
        assert len(result.singular_points) == 2

    def test_infinity_absorbs_missing_degree(self) -> None:
        """Viewing {1, x} in Poly_2 puts a codimension-1 class at infinity."""
        plane = canonical_plane([exact(1), exact(X)])
        result = profile(plane, 2)
        assert result.points == ()
        assert result.infinity.index.w == (1, 1)
        assert result.inf_multiplicity == 2

    def test_hypergeometric_classes(self) -> None:
        """The (2,2,4) plane has class sigma_2 at 0, 1 and infinity, meeting once."""
        case = hypergeometric_case(3, 2, 2, 4)
        result = profile(case.plane(), 4)
        assert sorted(point.index.w for point in result.points) == [(2, 0, 0), (2, 0, 0)]
        assert result.infinity.index.w == (2, 0, 0)
        assert intersection_number(result.classes()) == 1

    def test_numeric_plane(self, worked_plane) -> None:
        """A numeric plane profiles like the exact one."""
        result = profile(worked_plane.to_numeric(128), 2)
        assert sorted(point.index.w for point in result.points) == [(1, 0), (1, 0)]
        assert result.total_codim == 2

    def test_degree_too_high(self, worked_plane) -> None:
        """Planes that do not fit in Poly_d are rejected."""
        with pytest.raises(DomainError):
            profile(worked_plane, 1)

    def test_to_dict(self, worked_plane) -> None:
        """Profiles serialize with string points."""
        payload = profile(worked_plane, 2).to_dict()
        assert payload["infinity"]["point"] == "inf"
        assert payload["total_codim"] == 2
        assert payload["wronskian"] == ["0", "-1", "1"]


class TestSpecialForm:
    def test_worked_plane(self, worked_plane) -> None:
        """The worked plane is special for z = (0, 1), m = (1, 1)."""
        verdict = special_form_check(worked_plane, (0, 1), m=(1, 1))
        assert verdict
        assert verdict.m == (1, 1)

    def test_wrong_multiplicities(self, worked_plane) -> None:
        """Declaring m = (2, 1) fails."""
        verdict = special_form_check(worked_plane, (0, 1), m=(2, 1))
        assert not verdict
        assert any("multiplicities" in reason for reason in verdict.reasons)

    def test_missing_marked_point(self, worked_plane) -> None:
        """A Wronskian root outside z breaks the special form."""
        verdict = special_form_check(worked_plane, (0,))
        assert not verdict
        assert "Wronskian has roots off the marked points" in verdict.reasons

    def test_hypergeometric_plane(self) -> None:
        """Kernel planes of the hypergeometric operator are special."""
        case = hypergeometric_case(3, 2, 2, 4)
        assert special_form_check(case.plane(), case.z, m=(2, 2))

    def test_numeric_plane(self, worked_plane) -> None:
        """Numeric planes are checked within tolerance."""
        assert special_form_check(worked_plane.to_numeric(128), (0, 1), m=(1, 1))

    def test_constant_wronskian_with_points(self) -> None:
        """{1, x} has no singular points, so any marked point breaks the form."""
        verdict = special_form_check(canonical_plane([exact(1), exact(X)]), (0,))
        assert not verdict
        assert "leading coefficient is not the product of (x - z_j)" in verdict.reasons

    def test_vanishing_coefficients(self) -> None:
        """{1, x, x^3} gives x u''' - u'' whose zero lower coefficients pass the degree bound."""
        verdict = special_form_check(canonical_plane([exact(1), exact(X), exact(X**3)]), (0,), m=(1,))
        assert verdict
        assert not any("degree -1" in reason for reason in verdict.reasons)


class TestHypergeometric:
    @pytest.mark.parametrize(
        "m1,m2,d,degrees,c",
        [
            (2, 2, 4, (0, 3, 4), 6),
            (1, 1, 3, (0, 2, 3), 2),
        ],
    )
    def test_cases(self, m1, m2, d, degrees, c) -> None:
        """Degrees and the constant coefficient of the third-order cases."""
        case = hypergeometric_case(3, m1, m2, d)
        assert case.degrees == degrees
        assert case.constant == c
        assert case.plane().degrees == degrees

    def test_empty_case(self) -> None:
        """(1, 1, 5) has no strictly increasing degree profile."""
        assert hypergeometric_case(3, 1, 1, 5) is None

    def test_multiplicity_too_large(self) -> None:
        """m_j above d + 1 - p cannot occur."""
        assert hypergeometric_case(3, 4, 1, 4) is None

    def test_bad_input(self) -> None:
        """Zero multiplicities are rejected."""
        with pytest.raises(DomainError):
            hypergeometric_case(3, 0, 1, 4)

    def test_operator_matches_plane(self) -> None:
        """Reading the kernel plane back gives the defining operator."""
        case = hypergeometric_case(3, 2, 2, 4)
        assert equation_from_plane(case.plane()) == case.operator

    @pytest.mark.parametrize("m1,m2", [(m1, m2) for m1 in range(1, 4) for m2 in range(1, 4)])
    def test_counts(self, m1, m2) -> None:
        """Every nonempty case is the only special plane with its data."""
        for d in range(2, m1 + m2 + 3):
            case = hypergeometric_case(3, m1, m2, d)
            if case is not None:
                assert special_equation_count(3, (m1, m2), case.degrees) == 1


class TestHeineStieltjes:
    def test_worked_plane(self, worked_plane) -> None:
        """A = x(x-1), B = 1 - 2x, C = 2 and u = x - 1/2."""
        data = heine_stieltjes(worked_plane, (0, 1))
        assert data.A == exact(X**2 - X)
        assert data.B == exact(1 - 2 * X)
        assert data.C == exact(2)
        assert data.u == exact(X - HALF)

    def test_not_special(self, worked_plane) -> None:
        """Without the point 1 the equation has no Heine-Stieltjes form."""
        assert heine_stieltjes(worked_plane, (0,)) is None

    def test_needs_two_plane(self) -> None:
        """Only 2-planes qualify."""
        with pytest.raises(DomainError):
            heine_stieltjes(hypergeometric_case(3, 2, 2, 4).plane(), (0, 1))

    def test_complementary_degrees(self, worked_plane) -> None:
        """d_1 + d_2 = M + 1."""
        assert complementary_degree_check(worked_plane)
        assert complementary_degree_check(worked_plane, (0, 1))
        assert not complementary_degree_check(worked_plane, (0,))


class TestLevels:
    @pytest.mark.parametrize(
        "p,degrees,levels",
        [
            (3, (0, 3, 4), (2, 0)),
            (3, (0, 2, 4), (1, 0)),
            (2, (2, 3), (2,)),
            (2, (1, 2), (1,)),
        ],
    )
    def test_levels_from_degrees(self, p, degrees, levels) -> None:
        """k_i = d_1 + ... + d_{p-i} - (p-i)(p-i-1)/2."""
        assert levels_from_degrees(p, degrees) == LevelCounts(levels)

    def test_not_increasing(self) -> None:
        """Degrees must be strictly increasing."""
        with pytest.raises(DomainError):
            levels_from_degrees(3, (0, 2, 2))

    def test_special_counts(self) -> None:
        """Three vector points in degrees (0, 2, 4) give two planes; four spin-1/2 points give two."""
        assert special_equation_count(3, (1, 1, 1), (0, 2, 4)) == 2
        assert special_equation_count(2, (1, 1, 1, 1), (2, 3)) == 2

    def test_ordinary_exponents(self) -> None:
        """An ordinary point has exponents p-1, ..., 0."""
        assert ordinary_exponents(3) == (2, 1, 0)
