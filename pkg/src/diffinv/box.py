"""Axis-aligned boxes with rational endpoints, grids and seeded sampling.

Sampling uses numpy's PCG64 bit generator, whose stream for a given seed is
fixed across platforms, so fingerprints are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .polycore import Polynomial


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12) if v != int(v) else Fraction(int(v))
    return Fraction(v)


@dataclass(frozen=True)
class Box:
    names: tuple[str, ...]
    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    def __post_init__(self):
        lo = tuple(_frac(v) for v in self.lower)
        hi = tuple(_frac(v) for v in self.upper)
        if not (len(self.names) == len(lo) == len(hi)):
            raise ValueError("box names and bounds differ in length")
        for name, a, b in zip(self.names, lo, hi):
            if a > b:
                raise ValueError(f"empty interval for {name}: [{a}, {b}]")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def from_intervals(cls, intervals: dict) -> "Box":
        names = tuple(intervals)
        return cls(names, tuple(intervals[k][0] for k in names), tuple(intervals[k][1] for k in names))

    @classmethod
    def parse(cls, text: str) -> "Box":
        """Parse ``"x1:1:2,x2:0:1"``; endpoints may be fractions like 1/2."""
        names, lo, hi = [], [], []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            bits = part.split(":")
            if len(bits) != 3:
                raise ValueError(f"bad box component {part!r}; expected name:lo:hi")
            name, a, b = (s.strip() for s in bits)
            try:
                names.append(name)
                lo.append(Fraction(a))
                hi.append(Fraction(b))
            except ValueError as exc:
                raise ValueError(f"bad endpoint in {part!r}") from exc
        if not names:
            raise ValueError("empty box string")
        return cls(tuple(names), tuple(lo), tuple(hi))

    def __str__(self) -> str:
        return ",".join(f"{n}:{a}:{b}" for n, a, b in zip(self.names, self.lower, self.upper))

    @property
    def dim(self) -> int:
        return len(self.names)

    def restrict(self, names: Sequence[str]) -> "Box":
        idx = [self.names.index(n) for n in names]
        return Box(tuple(names), tuple(self.lower[i] for i in idx), tuple(self.upper[i] for i in idx))

    def ordered(self, names: Sequence[str]) -> "Box":
        missing = [n for n in names if n not in self.names]
        if missing:
            raise ValueError(f"box has no interval for {missing}")
        return self.restrict(names)

    def contains(self, point: Sequence, slack: float = 0.0) -> bool:
        for v, a, b in zip(point, self.lower, self.upper):
            width = float(b - a)
            if v < float(a) - slack * max(width, 1.0) or v > float(b) + slack * max(width, 1.0):
                return False
        return True

    def grid(self, per_axis: int) -> list[tuple[Fraction, ...]]:
        """Exact tensor grid including the endpoints."""
        axes = []
        for a, b in zip(self.lower, self.upper):
            if per_axis == 1 or a == b:
                axes.append([(a + b) / 2] if per_axis == 1 else [a])
            else:
                axes.append([a + (b - a) * Fraction(i, per_axis - 1) for i in range(per_axis)])
        return [tuple(p) for p in product(*axes)]

    def float_grid(self, per_axis: int) -> np.ndarray:
        return np.array([[float(c) for c in p] for p in self.grid(per_axis)])

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        lo = np.array([float(a) for a in self.lower])
        hi = np.array([float(b) for b in self.upper])
        return lo + (hi - lo) * rng.random((m, self.dim))

    def to_json(self) -> dict:
        return {n: [str(a), str(b)] for n, a, b in zip(self.names, self.lower, self.upper)}


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def interval_bounds(p: Polynomial, box: Box) -> tuple[Fraction, Fraction]:
    """Sound (possibly loose) exact enclosure of p over the box."""
    idx = [box.names.index(v) if v in box.names else None for v in p.variables]
    lo_total = Fraction(0)
    hi_total = Fraction(0)
    for mono, c in p.terms.items():
        lo, hi = Fraction(c), Fraction(c)
        for i, e in enumerate(mono):
            if not e:
                continue
            j = idx[i]
            if j is None:
                raise ValueError(f"box has no interval for {p.variables[i]!r}")
            a, b = box.lower[j], box.upper[j]
            cands = [a**e, b**e]
            if e % 2 == 0 and a < 0 < b:
                cands.append(Fraction(0))
            ilo, ihi = min(cands), max(cands)
            prods = [lo * ilo, lo * ihi, hi * ilo, hi * ihi]
            lo, hi = min(prods), max(prods)
        lo_total += lo
        hi_total += hi
    return lo_total, hi_total
