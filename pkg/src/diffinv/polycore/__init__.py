"""Exact polynomial and rational-function arithmetic over Q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..errors import DimensionError
from .linalg import det, jacobian, jacobian_det, solve_linear
from .multiindex import (
    MultiIndex,
    multi_factorial,
    multi_indices,
    multi_indices_upto,
)
from .parser import parse_expr, parse_poly
from .polynomial import Polynomial, qnorm
from .rational import RationalFunction


@dataclass(frozen=True)
class Point:
    """Coordinates tagged exact (ints/Fractions) or float."""

    coords: tuple
    exact: bool = True

    def __post_init__(self):
        coords = tuple(self.coords)
        if self.exact:
            coords = tuple(qnorm(c) for c in coords)
        else:
            coords = tuple(float(c) for c in coords)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, coords: Sequence) -> "Point":
        exact = all(isinstance(c, (int, Fraction)) for c in coords)
        return cls(tuple(coords), exact)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


def derive(f: RationalFunction, i: int | str) -> RationalFunction:
    return f.derive(i)


def substitute(f: RationalFunction, mapping: Mapping[str, RationalFunction], variables: Sequence[str] | None = None) -> RationalFunction:
    return f.substitute(mapping, variables)


def eval_at(f: RationalFunction | Polynomial, p: Point | Sequence, float_mode: bool = False):
    """Value of ``f`` at ``p``.

    Exact points give exact values unless ``float_mode`` is set, in which
    case the exact value is rounded once (correctly rounded). Float points
    are evaluated in floating point.
    """
    if not isinstance(p, Point):
        p = Point.of(p)
    if len(p) != len(f.variables):
        raise DimensionError(f"point has {len(p)} coordinates, ring has {len(f.variables)}")
    if p.exact:
        value = f.eval(p.coords)
        return float(value) if float_mode else value
    return f.eval_float(p.coords)


__all__ = [
    "MultiIndex",
    "Point",
    "Polynomial",
    "RationalFunction",
    "derive",
    "det",
    "eval_at",
    "jacobian",
    "jacobian_det",
    "multi_factorial",
    "multi_indices",
    "multi_indices_upto",
    "parse_expr",
    "parse_poly",
    "qnorm",
    "solve_linear",
    "substitute",
]
