"""Bethe critical points, Wronskian flags and Schubert intersection counts."""

from importlib import metadata

from .errors import BetheSchubertError
from .master import build_problem, build_problem_from_levels, solve_bethe
from .reconstruct import reconstruct_orbit
from .schubert import SchubertIndex, intersection_number, lr_product

try:
    __version__ = metadata.version("bethe-schubert")
except metadata.PackageNotFoundError:  # pragma: no cover - source checkout
    __version__ = "0.0.0"

__all__ = [
    "BetheSchubertError",
    "SchubertIndex",
    "__version__",
    "build_problem",
    "build_problem_from_levels",
    "intersection_number",
    "lr_product",
    "reconstruct_orbit",
    "solve_bethe",
]
