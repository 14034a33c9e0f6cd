"""Schubert calculus in G_p(Poly_d) and the sl_p weight dictionary.

Products come from lrcalc, restricted to partitions inside the p x (d+1-p)
box after every binary product.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import lrcalc

from .errors import SchubertError


@dataclass(frozen=True)
class SchubertIndex:
    """Weakly decreasing w with d+1-p >= w_1 >= ... >= w_p >= 0."""

    w: tuple[int, ...]
    p: int
    d: int

    def __post_init__(self) -> None:
        w = tuple(int(v) for v in self.w)
        object.__setattr__(self, "w", w)
        if self.p < 1 or self.d + 1 - self.p < 0:
            raise SchubertError(f"no Grassmannian G_{self.p}(Poly_{self.d})")
        if len(w) != self.p:
            raise SchubertError(f"index {w} must have exactly p={self.p} entries")
        if any(v < 0 for v in w):
            raise SchubertError(f"index {w} has negative entries")
        if any(a < b for a, b in zip(w, w[1:])):
            raise SchubertError(f"index {w} is not weakly decreasing")
        if w and w[0] > self.width:
            raise SchubertError(f"index {w} overflows the {self.p} x {self.width} box")

    @classmethod
    def zero(cls, p: int, d: int) -> "SchubertIndex":
        return cls((0,) * p, p, d)

    @classmethod
    def top(cls, p: int, d: int) -> "SchubertIndex":
        return cls((d + 1 - p,) * p, p, d)

    @classmethod
    def special(cls, m: int, p: int, d: int) -> "SchubertIndex":
        return cls((m,) + (0,) * (p - 1), p, d)

    @property
    def width(self) -> int:
        return self.d + 1 - self.p

    @property
    def box(self) -> tuple[int, int]:
        return (self.p, self.d)

    @property
    def size(self) -> int:
        return sum(self.w)

    def __str__(self) -> str:
        return f"sigma{self.w}"


@dataclass(frozen=True)
class WeightVector:
    a: tuple[int, ...]

    def __post_init__(self) -> None:
        a = tuple(int(v) for v in self.a)
        object.__setattr__(self, "a", a)
        if any(v < 0 for v in a):
            raise SchubertError(f"weight {a} has negative labels")


@dataclass(frozen=True)
class LevelCounts:
    k: tuple[int, ...]

    def __post_init__(self) -> None:
        k = tuple(int(v) for v in self.k)
        object.__setattr__(self, "k", k)
        if any(v < 0 for v in k):
            raise SchubertError(f"level counts {k} must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.k)


class IntersectionNumber(int):
    """Nonnegative integer carrying whether the codimensions failed to add up."""

    codim_mismatch: bool

    def __new__(cls, value: int, codim_mismatch: bool = False) -> "IntersectionNumber":
        obj = super().__new__(cls, value)
        obj.codim_mismatch = codim_mismatch
        return obj


@lru_cache(maxsize=None)
def cartan_matrix(p: int) -> tuple[tuple[int, ...], ...]:
    """Killing pairings (alpha_i, alpha_j) of the simple roots of sl_p."""

    size = p - 1
    return tuple(
        tuple(2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(size))
        for i in range(size)
    )


def _check_box(indices: Iterable[SchubertIndex]) -> tuple[int, int]:
    boxes = {index.box for index in indices}
    if len(boxes) > 1:
        raise SchubertError(f"indices live in different boxes: {sorted(boxes)}")
    return boxes.pop()


@lru_cache(maxsize=4096)
def _lr_mult(
    u: tuple[int, ...], v: tuple[int, ...], rows: int, width: int
) -> tuple[tuple[tuple[int, ...], int], ...]:
    product = lrcalc.mult([a for a in u if a], [b for b in v if b], rows, width)
    terms = ((tuple(outer) + (0,) * (rows - len(outer)), int(c)) for outer, c in product.items() if c)
    return tuple(sorted(terms, reverse=True))


def lr_product(u: SchubertIndex, v: SchubertIndex) -> dict[SchubertIndex, int]:
    """sigma_u * sigma_v expanded in Schubert classes of the same box."""

    p, d = _check_box((u, v))
    width = d + 1 - p
    if u.size + v.size > p * width:
        return {}
    return {SchubertIndex(outer, p, d): coefficient for outer, coefficient in _lr_mult(u.w, v.w, p, width)}


def intersection_number(ws: Sequence[SchubertIndex]) -> IntersectionNumber:
    """Coefficient of the top class in the product of the given classes."""

    if not ws:
        raise SchubertError("intersection_number needs at least one index")
    p, d = _check_box(ws)
    if sum(w.size for w in ws) != p * (d + 1 - p):
        return IntersectionNumber(0, codim_mismatch=True)

    current: Counter[SchubertIndex] = Counter({SchubertIndex.zero(p, d): 1})
    for w in sorted(ws, key=lambda index: -index.size):
        following: Counter[SchubertIndex] = Counter()
        for cls, multiplicity in current.items():
            for term, coefficient in lr_product(cls, w).items():
                following[term] += multiplicity * coefficient
        current = following
        if not current:
            break
    return IntersectionNumber(current.get(SchubertIndex.top(p, d), 0))


def dual_index(w: SchubertIndex) -> SchubertIndex:
    return SchubertIndex(tuple(w.width - v for v in reversed(w.w)), w.p, w.d)


def weight_of_index(w: SchubertIndex) -> WeightVector:
    """a_i = w_i - w_{i+1}, i = 1..p-1."""

    return WeightVector(tuple(a - b for a, b in zip(w.w, w.w[1:])))


def index_of_weight(a: WeightVector, size: int, d: int) -> SchubertIndex:
    """The index with labels ``a`` and |w| = ``size`` in G_p(Poly_d), p = len(a) + 1."""

    p = len(a.a) + 1
    tail = [sum(a.a[i:]) for i in range(p - 1)] + [0]
    base = sum(tail)
    if size < base or (size - base) % p:
        raise SchubertError(f"no index with weight {a.a} has size {size}")
    shift = (size - base) // p
    return SchubertIndex(tuple(t + shift for t in tail), p, d)


def _check_weights(weights: Sequence[WeightVector], k: LevelCounts) -> int:
    rank = len(k.k)
    for weight in weights:
        if len(weight.a) != rank:
            raise SchubertError(f"weight {weight.a} does not have {rank} labels")
    return rank + 1


def dominant_weight_check(weights: Sequence[WeightVector], k: LevelCounts) -> WeightVector | None:
    """Labels of sum(Lambda_a(j)) - sum(k_l alpha_l), or None when not dominant."""

    p = _check_weights(weights, k)
    cartan = cartan_matrix(p)
    labels = []
    for l in range(p - 1):
        value = sum(weight.a[l] for weight in weights)
        value -= sum(cartan[l][m] * k.k[m] for m in range(p - 1))
        labels.append(value)
    if any(v < 0 for v in labels):
        return None
    return WeightVector(tuple(labels))


def highest_diagram(weights: Sequence[WeightVector], k: LevelCounts) -> tuple[int, ...]:
    """Young diagram of the weight sum(Lambda_a(j)) - sum(k_l alpha_l) lifted to gl_p."""

    p = _check_weights(weights, k)
    rows = [sum(sum(weight.a[i:]) for weight in weights) for i in range(p - 1)] + [0]
    levels = (0,) + k.k + (0,)
    return tuple(rows[i] - levels[i + 1] + levels[i] for i in range(p))


def fitting_degree(weights: Sequence[WeightVector], k: LevelCounts) -> int:
    """Smallest d whose box holds every index dim_singular builds."""

    p = _check_weights(weights, k)
    widths = [sum(weight.a) for weight in weights]
    widths.append(max(highest_diagram(weights, k)[0], 0))
    return max(widths + [0]) + p - 1


def dim_singular(
    weights: Sequence[WeightVector], k: LevelCounts, p: int, d: int | None = None
) -> int:
    """Multiplicity of the weight prescribed by ``k`` in the tensor product of the weights."""

    if _check_weights(weights, k) != p:
        raise SchubertError(f"level counts {k.k} do not match p={p}")
    if dominant_weight_check(weights, k) is None:
        return 0
    d = fitting_degree(weights, k) if d is None else d
    indices = [
        index_of_weight(weight, sum((i + 1) * v for i, v in enumerate(weight.a)), d)
        for weight in weights
    ]
    top = SchubertIndex(highest_diagram(weights, k), p, d)
    return int(intersection_number(indices + [dual_index(top)]))
