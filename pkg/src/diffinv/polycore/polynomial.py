"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial lives in a ring given by an ordered tuple of variable names.
Terms are stored as ``{exponent tuple: coefficient}`` with coefficients kept
as ``int`` whenever integral and as ``fractions.Fraction`` otherwise. Zero
coefficients are never stored.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from ..errors import DimensionError

Coeff = Union[int, Fraction]


def qnorm(c) -> Coeff:
    """Canonical exact scalar: ``int`` if integral, else ``Fraction``."""
    if type(c) is int:
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, Rational):
        return qnorm(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return qnorm(Fraction(c))
    raise TypeError(f"not an exact rational: {c!r}")


def _key_order(mono: tuple[int, ...]):
    return (sum(mono), mono)


class Polynomial:
    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping | None = None, *, _clean: bool = False):
        self.variables = tuple(variables)
        if _clean:
            self._terms = terms  # caller guarantees normalized, zero-free, private dict
        else:
            n = len(self.variables)
            clean = {}
            for mono, c in (terms or {}).items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != n:
                    raise DimensionError(f"monomial {mono} does not match {n} variables")
                if any(e < 0 for e in mono):
                    raise ValueError(f"negative exponent in {mono}")
                c = qnorm(c)
                if c:
                    clean[mono] = qnorm(clean.get(mono, 0) + c)
                    if not clean[mono]:
                        del clean[mono]
            self._terms = clean
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, c, variables: Sequence[str]) -> "Polynomial":
        c = qnorm(c)
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c} if c else {}, _clean=True)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(tuple(variables), {}, _clean=True)

    @classmethod
    def one(cls, variables: Sequence[str]) -> "Polynomial":
        return cls.constant(1, variables)

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        i = variables.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls(variables, {mono: 1}, _clean=True)

    @classmethod
    def monomial(cls, exponents: Sequence[int], variables: Sequence[str], coeff=1) -> "Polynomial":
        return cls(variables, {tuple(exponents): coeff})

    @classmethod
    def gens(cls, variables: Sequence[str]) -> list["Polynomial"]:
        return [cls.var(v, variables) for v in variables]

    # basic access -----------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, ...], Coeff]:
        return MappingProxyType(self._terms)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self.nvars, 0)

    def coeff(self, mono: Sequence[int]) -> Coeff:
        return self._terms.get(tuple(mono), 0)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def degree_in(self, i: int) -> int:
        if not self._terms:
            return -1
        return max(m[i] for m in self._terms)

    def degree_in_group(self, indices: Sequence[int]) -> int:
        if not self._terms:
            return -1
        return max(sum(m[i] for i in indices) for m in self._terms)

    def is_homogeneous(self, degree: int | None = None, indices: Sequence[int] | None = None) -> bool:
        idx = range(self.nvars) if indices is None else indices
        degs = {sum(m[i] for i in idx) for m in self._terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return degree is None or degs.pop() == degree

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Coeff]]:
        return sorted(self._terms.items(), key=lambda kv: _key_order(kv[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], Coeff]:
        """Leading term in graded lex order."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        mono = max(self._terms, key=_key_order)
        return mono, self._terms[mono]

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in {self.variables}") from None

    # ring coercion ----------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise DimensionError(f"ring mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return Polynomial.constant(other, self.variables)
        return NotImplemented

    def change_ring(self, variables: Sequence[str]) -> "Polynomial":
        """Re-express in another ring; every variable in use must exist there."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        used = [i for i in range(self.nvars) if any(m[i] for m in self._terms)]
        for i in used:
            if self.variables[i] not in pos:
                raise DimensionError(f"variable {self.variables[i]!r} missing from {variables}")
        n = len(variables)
        out = {}
        for mono, c in self._terms.items():
            new = [0] * n
            for i in used:
                new[pos[self.variables[i]]] = mono[i]
            out[tuple(new)] = c
        return Polynomial(variables, out, _clean=True)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other._terms) > len(self._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for mono, c in b.items():
            s = out.get(mono)
            if s is None:
                out[mono] = c
            else:
                s = qnorm(s + c)
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return Polynomial(self.variables, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {m: -c for m, c in self._terms.items()}, _clean=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = qnorm(c)
        if not c:
            return Polynomial.zero(self.variables)
        if c == 1:
            return self
        return Polynomial(self.variables, {m: qnorm(v * c) for m, v in self._terms.items()}, _clean=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial.zero(self.variables)
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                mono = tuple(x + y for x, y in zip(ma, mb))
                out[mono] = get(mono, 0) + ca * cb
        return Polynomial(
            self.variables,
            {m: qnorm(c) for m, c in out.items() if c},
            _clean=True,
        )

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.one(self.variables)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / qnorm(other))
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # calculus ---------------------------------------------------------
    def derive(self, var: int | str, times: int = 1) -> "Polynomial":
        i = self.index(var) if isinstance(var, str) else var
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        out = {}
        for mono, c in self._terms.items():
            e = mono[i]
            if e < times:
                continue
            f = 1
            for j in range(times):
                f *= e - j
            new = mono[:i] + (e - times,) + mono[i + 1:]
            out[new] = qnorm(c * f)
        return Polynomial(self.variables, out, _clean=True)

    def derive_multi(self, alpha: Sequence[int]) -> "Polynomial":
        """Mixed partial derivative d^alpha over the leading len(alpha) variables."""
        out = {}
        for mono, c in self._terms.items():
            f = 1
            ok = True
            for e, a in zip(mono, alpha):
                if e < a:
                    ok = False
                    break
                for j in range(a):
                    f *= e - j
            if not ok:
                continue
            new = tuple(e - a for e, a in zip(mono, alpha)) + mono[len(alpha):]
            out[new] = qnorm(c * f)
        return Polynomial(self.variables, out, _clean=True)

    # evaluation / substitution -----------------------------------------
    def eval(self, point: Sequence) -> Coeff:
        """Exact value at a point of exact rationals."""
        if len(point) != self.nvars:
            raise DimensionError(f"point has {len(point)} coordinates, ring has {self.nvars}")
        pt = [qnorm(p) for p in point]
        pows: list[dict[int, Coeff]] = [{0: 1, 1: p} for p in pt]
        total: Coeff = 0
        for mono, c in self._terms.items():
            term = c
            for i, e in enumerate(mono):
                if e:
                    cache = pows[i]
                    v = cache.get(e)
                    if v is None:
                        v = cache[e] = pt[i] ** e
                    term = term * v
            total += term
        return qnorm(total)

    def eval_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for mono, c in self._terms.items():
            term = float(c)
            for x, e in zip(point, mono):
                if e:
                    term *= x ** e
            total += term
        return total

    def substitute(self, mapping: Mapping[str, "Polynomial"], variables: Sequence[str] | None = None) -> "Polynomial":
        """Compose with polynomial values.

        Variables missing from ``mapping`` are kept and must exist in the
        target ring, which is taken from the mapping values (or ``variables``).
        """
        if variables is None:
            vals = [v for v in mapping.values() if isinstance(v, Polynomial)]
            variables = vals[0].variables if vals else self.variables
        variables = tuple(variables)
        images = []
        for i, name in enumerate(self.variables):
            if name in mapping:
                img = mapping[name]
                if not isinstance(img, Polynomial):
                    img = Polynomial.constant(img, variables)
                elif img.variables != variables:
                    img = img.change_ring(variables)
            else:
                if not any(m[i] for m in self._terms):
                    img = None
                elif name in variables:
                    img = Polynomial.var(name, variables)
                else:
                    raise KeyError(f"no image for variable {name!r}")
            images.append(img)
        pows: list[dict[int, Polynomial]] = [{} for _ in images]

        def power(i, e):
            cache = pows[i]
            if e not in cache:
                cache[e] = images[i] if e == 1 else power(i, e - 1) * images[i]
            return cache[e]

        acc: dict = {}
        for mono, c in self._terms.items():
            term = Polynomial.constant(c, variables)
            for i, e in enumerate(mono):
                if e:
                    term = term * power(i, e)
            for m, v in term._terms.items():
                acc[m] = acc.get(m, 0) + v
        return Polynomial(variables, {m: qnorm(v) for m, v in acc.items() if v}, _clean=True)

    def linear_substitute(self, matrix: Sequence[Sequence], indices: Sequence[int] | None = None) -> "Polynomial":
        """Replace v -> M v on the variables at ``indices`` (default: all)."""
        idx = list(range(self.nvars)) if indices is None else list(indices)
        gens = Polynomial.gens(self.variables)
        mapping = {}
        for r, i in enumerate(idx):
            img = Polynomial.zero(self.variables)
            for c, j in enumerate(idx):
                if matrix[r][c]:
                    img = img + gens[j].scale(matrix[r][c])
            mapping[self.variables[i]] = img
        return self.substitute(mapping, self.variables)

    # content / division -----------------------------------------------
    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        nums = 0
        dens = 1
        for c in self._terms.values():
            c = Fraction(c)
            nums = gcd(nums, c.numerator)
            dens = lcm(dens, c.denominator)
        return Fraction(nums, dens)

    def primitive(self) -> tuple[Fraction, "Polynomial"]:
        """Return (c, q) with self = c*q, q integral, primitive, positive leading coefficient."""
        if not self._terms:
            raise ZeroDivisionError("zero polynomial has no primitive part")
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return c, self.scale(1 / c)

    def divide_exact(self, other: "Polynomial") -> "Polynomial | None":
        """Quotient if ``other`` divides ``self`` exactly, else None."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        lm, lc = other.leading_term()
        rem = dict(self._terms)
        quot: dict = {}
        other_items = list(other._terms.items())
        # max-heap of remainder monomials; stale entries are skipped
        heap = [(-sum(m), tuple(-a for a in m)) for m in rem]
        heapq.heapify(heap)
        while rem:
            d, neg = heapq.heappop(heap)
            mono = tuple(-a for a in neg)
            if mono not in rem:
                continue
            shift = tuple(a - b for a, b in zip(mono, lm))
            if any(s < 0 for s in shift):
                return None
            q = qnorm(Fraction(rem[mono]) / lc)
            quot[shift] = q
            for m, c in other_items:
                t = tuple(a + b for a, b in zip(m, shift))
                v = qnorm(rem.get(t, 0) - q * c)
                if v:
                    if t not in rem:
                        heapq.heappush(heap, (-sum(t), tuple(-a for a in t)))
                    rem[t] = v
                else:
                    rem.pop(t, None)
        return Polynomial(self.variables, quot, _clean=True)

    # printing ----------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, (mono, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            factors = []
            for name, e in zip(self.variables, mono):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = f"{a}*" + "*".join(factors)
            if k == 0:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r}, variables={self.variables})"


def poly_sum(items: Iterable[Polynomial], variables: Sequence[str]) -> Polynomial:
    acc: dict = {}
    for p in items:
        for m, c in p._terms.items():
            acc[m] = acc.get(m, 0) + c
    return Polynomial(tuple(variables), {m: qnorm(c) for m, c in acc.items() if c}, _clean=True)
