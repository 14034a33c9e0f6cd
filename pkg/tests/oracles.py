"""Independent oracles for the combinatorial and polynomial tests.

None of these share code with the package: Schur products come from
bialternants, p=2 counts from the Pieri rule on two-row diagrams, and
Bethe counts from a Groebner basis of the Heine-Stieltjes system.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache, reduce
from itertools import combinations, product
from typing import Sequence

import sympy


def _variables(p: int) -> tuple[sympy.Symbol, ...]:
    return sympy.symbols(f"y1:{p + 1}")


def _alternant(exponents: Sequence[int], xs: Sequence[sympy.Symbol]) -> sympy.Expr:
    return sympy.Matrix([[x**e for e in exponents] for x in xs]).det()


@lru_cache(maxsize=None)
def _vandermonde(p: int) -> sympy.Poly:
    xs = _variables(p)
    return sympy.Poly(_alternant([p - 1 - i for i in range(p)], xs), *xs)


@lru_cache(maxsize=None)
def _schur(lam: tuple[int, ...], p: int) -> sympy.Poly:
    """Bialternant a_{lam+delta} / a_delta."""

    xs = _variables(p)
    numerator = sympy.Poly(_alternant([lam[i] + p - 1 - i for i in range(p)], xs), *xs)
    quotient, remainder = sympy.div(numerator, _vandermonde(p))
    assert remainder.is_zero
    return quotient


def schur_product(lam: Sequence[int], mu: Sequence[int], p: int) -> Counter[tuple[int, ...]]:
    """s_lam * s_mu in p variables expanded in Schur functions."""

    delta = [p - 1 - i for i in range(p)]
    numerator = _schur(tuple(lam), p) * _schur(tuple(mu), p) * _vandermonde(p)
    out: Counter[tuple[int, ...]] = Counter()
    for monomial, coefficient in numerator.terms():
        if all(a > b for a, b in zip(monomial, monomial[1:])):
            nu = tuple(e - d for e, d in zip(monomial, delta))
            out[nu] += int(coefficient)
    return out


def box_product(lam: Sequence[int], mu: Sequence[int], p: int, d: int) -> dict[tuple[int, ...], int]:
    width = d + 1 - p
    return {nu: c for nu, c in schur_product(lam, mu, p).items() if nu[0] <= width and c}


def box_intersection(classes: Sequence[Sequence[int]], p: int, d: int) -> int:
    width = d + 1 - p
    if sum(sum(c) for c in classes) != p * width:
        return 0
    current: Counter[tuple[int, ...]] = Counter({(0,) * p: 1})
    for cls in classes:
        following: Counter[tuple[int, ...]] = Counter()
        for lam, multiplicity in current.items():
            for nu, c in box_product(lam, tuple(cls), p, d).items():
                following[nu] += multiplicity * c
        current = following
    return current.get((width,) * p, 0)


def pieri_count(special: Sequence[int], d: int) -> int:
    """Coefficient of the top class in prod sigma_a over ``special`` for p = 2."""

    width = d - 1
    current: Counter[tuple[int, int]] = Counter({(0, 0): 1})
    for a in special:
        following: Counter[tuple[int, int]] = Counter()
        for (l1, l2), multiplicity in current.items():
            total = l1 + l2 + a
            for n1 in range(l1, width + 1):
                n2 = total - n1
                if l2 <= n2 <= l1:
                    following[(n1, n2)] += multiplicity
        current = following
    return current.get((width, width), 0)


def catalan(n: int) -> int:
    return sympy.binomial(2 * n, n) // (n + 1)


def _standard_monomials(leading: list[tuple[int, ...]], nvars: int) -> int:
    bounds = [None] * nvars
    for monomial in leading:
        support = [i for i, e in enumerate(monomial) if e]
        if len(support) == 1:
            i = support[0]
            bounds[i] = monomial[i] if bounds[i] is None else min(bounds[i], monomial[i])
    if any(b is None for b in bounds):
        raise ValueError("ideal is not zero-dimensional")
    count = 0
    for exponents in product(*(range(b) for b in bounds)):
        if not any(all(e >= l for e, l in zip(exponents, lm)) for lm in leading):
            count += 1
    return count


def groebner_orbit_count(z: Sequence[int | sympy.Rational], m: Sequence[int], k: int) -> int:
    """Number of monic degree-k y with simple roots off z such that A y'' + B y' is divisible by y.

    A = prod (x - z_j), B = -sum m_j prod_{j' != j} (x - z_j').  Solutions are
    counted as the dimension of the quotient ring after saturating by
    disc(y) * res(y, A) (Rabinowitsch variable).
    """

    x = sympy.Symbol("x")
    cs = sympy.symbols(f"c0:{k}")
    s = sympy.Symbol("s")
    y = x**k + sum(c * x**i for i, c in enumerate(cs))
    A = reduce(lambda acc, zj: acc * (x - zj), z, sympy.Integer(1))
    B = -sum(
        mj * reduce(lambda acc, zj: acc * (x - zj), [zz for jj, zz in enumerate(z) if jj != j], sympy.Integer(1))
        for j, mj in enumerate(m)
    )
    expression = sympy.expand(A * sympy.diff(y, x, 2) + B * sympy.diff(y, x))
    _, remainder = sympy.div(sympy.Poly(expression, x), sympy.Poly(y, x))
    equations = [sympy.expand(c) for c in remainder.all_coeffs() if sympy.expand(c) != 0]
    guard = sympy.expand(sympy.discriminant(y, x) * sympy.resultant(y, A, x)) if k > 1 else sympy.expand(
        sympy.resultant(y, A, x)
    )
    equations.append(sympy.expand(s * guard - 1))
    gens = list(cs) + [s]
    basis = sympy.groebner(equations, *gens, order="grevlex")
    if list(basis.exprs) == [1]:
        return 0
    leading = [sympy.Poly(g, *gens).monoms(order="grevlex")[0] for g in basis.exprs]
    return _standard_monomials(leading, len(gens))


def pairwise_distinct(values: Sequence[complex], tolerance: float) -> bool:
    return all(abs(a - b) > tolerance for a, b in combinations(values, 2))
