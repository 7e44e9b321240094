"""Multi-indices as plain tuples of non-negative ints."""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterator, Sequence

MultiIndex = tuple[int, ...]


def order(alpha: Sequence[int]) -> int:
    return sum(alpha)


def multi_factorial(alpha: Sequence[int]) -> int:
    """alpha! = prod(alpha_i!) as an exact integer."""
    return prod(factorial(a) for a in alpha)


def multi_binomial(alpha: Sequence[int], beta: Sequence[int]) -> int:
    return prod(comb(a, b) for a, b in zip(alpha, beta))


def unit(n: int, i: int, times: int = 1) -> MultiIndex:
    return tuple(times if j == i else 0 for j in range(n))


def add(alpha: Sequence[int], beta: Sequence[int]) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


def sub(alpha: Sequence[int], beta: Sequence[int]) -> MultiIndex:
    return tuple(a - b for a, b in zip(alpha, beta))


def leq(beta: Sequence[int], alpha: Sequence[int]) -> bool:
    return all(b <= a for a, b in zip(alpha, beta))


@lru_cache(maxsize=None)
def _exact(n: int, k: int) -> tuple[MultiIndex, ...]:
    if n == 0:
        return ((),) if k == 0 else ()
    if n == 1:
        return ((k,),)
    out = []
    for first in range(k, -1, -1):
        for rest in _exact(n - 1, k - first):
            out.append((first,) + rest)
    return tuple(out)


def multi_indices(n: int, k: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of length n with |alpha| = k.

    Ordered lexicographically descending, so (k,0,..) comes first.
    """
    return _exact(n, k)


def multi_indices_upto(n: int, k: int) -> tuple[MultiIndex, ...]:
    """All multi-indices with |alpha| <= k, graded then lex-descending."""
    out: list[MultiIndex] = []
    for d in range(k + 1):
        out.extend(_exact(n, d))
    return tuple(out)


def sub_indices(alpha: Sequence[int]) -> Iterator[MultiIndex]:
    """Every gamma <= alpha componentwise."""
    if not alpha:
        yield ()
        return
    for g in range(alpha[0] + 1):
        for rest in sub_indices(alpha[1:]):
            yield (g,) + rest


def format_index(alpha: Sequence[int], sep: str = ",") -> str:
    return sep.join(str(a) for a in alpha)


def parse_index(text: str, n: int | None = None) -> MultiIndex:
    parts = [p.strip() for p in text.split(",")]
    try:
        alpha = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"bad multi-index {text!r}") from exc
    if any(a < 0 for a in alpha):
        raise ValueError(f"negative entry in multi-index {text!r}")
    if n is not None and len(alpha) != n:
        raise ValueError(f"multi-index {text!r} should have {n} entries")
    return alpha
