"""n-ary forms, the alternating operator nabla and transvectants.

For forms f_1..f_n in n variables, nabla acts on f_1 (x) ... (x) f_n as

    sum over permutations s of sign(s) * d_{s(1)} f_1 (x) ... (x) d_{s(n)} f_n

and the transvectant of order l is mu(nabla^l(f_1 (x) ... (x) f_n)), mu being
multiplication. Two routes are implemented:

* ``transvectant_naive`` materializes the tensor product as one polynomial in
  n disjoint groups of variables and applies nabla l times literally;
* ``transvectant`` expands nabla^l with the multinomial theorem (the n!
  summands commute) and multiplies cached derivatives of the factors.

A form may carry extra *parameter* variables after its n form variables; its
coefficients are then polynomials in the parameters, which is how symbols
with x-dependent coefficients are handled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import comb, factorial
from typing import Sequence

from .errors import DimensionError
from .polycore import Polynomial, parse_poly
from .polycore.polynomial import poly_sum, qnorm

DEFAULT_NAMES = ("x", "y", "z", "w")


def form_variables(n: int, avoid: Sequence[str] = ()) -> tuple[str, ...]:
    """Default names for the n form variables, avoiding clashes."""
    if n <= len(DEFAULT_NAMES):
        names = DEFAULT_NAMES[:n]
        if not set(names) & set(avoid):
            return names
    stem = "xi"
    while True:
        names = tuple(f"{stem}{i + 1}" for i in range(n))
        if not set(names) & set(avoid):
            return names
        stem += "_"


@dataclass(frozen=True)
class NAryForm:
    """Homogeneous polynomial of a given degree in the first ``n`` variables.

    Any further variables of ``poly`` are parameters.
    """

    poly: Polynomial
    n: int
    degree: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("forms need at least one variable")
        if self.poly.nvars < self.n:
            raise DimensionError(f"polynomial has {self.poly.nvars} variables, form needs {self.n}")
        if not self.poly.is_homogeneous(self.degree, range(self.n)):
            raise ValueError(f"{self.poly} is not homogeneous of degree {self.degree} in {self.variables}")

    @classmethod
    def from_poly(cls, poly: Polynomial, n: int | None = None) -> "NAryForm":
        n = poly.nvars if n is None else n
        deg = poly.degree_in_group(range(n))
        return cls(poly, n, max(deg, 0))

    @classmethod
    def parse(cls, text: str, variables: Sequence[str], degree: int | None = None, params: Sequence[str] = ()) -> "NAryForm":
        poly = parse_poly(text, tuple(variables) + tuple(params))
        if degree is None:
            return cls.from_poly(poly, len(variables))
        return cls(poly, len(variables), degree)

    @classmethod
    def zero(cls, variables: Sequence[str], degree: int, n: int | None = None) -> "NAryForm":
        n = len(variables) if n is None else n
        return cls(Polynomial.zero(variables), n, degree)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.poly.variables[: self.n]

    @property
    def params(self) -> tuple[str, ...]:
        return self.poly.variables[self.n:]

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def coefficient(self, alpha: Sequence[int]):
        """Coefficient of the monomial x^alpha (a parameter polynomial, or a scalar)."""
        alpha = tuple(alpha)
        if not self.params:
            return self.poly.coeff(alpha)
        k = len(alpha)
        terms = {m[k:]: c for m, c in self.poly.terms.items() if m[:k] == alpha}
        return Polynomial(self.params, terms)

    def scalar(self):
        """Value of a degree-0 form: exact rational, or polynomial in the parameters."""
        if self.degree != 0 and not self.is_zero():
            raise ValueError(f"form of degree {self.degree} is not a scalar")
        return self.coefficient((0,) * self.n)

    def act(self, matrix: Sequence[Sequence]) -> "NAryForm":
        """(g.f)(v) = f(g v) for an n x n matrix g."""
        if len(matrix) != self.n or any(len(r) != self.n for r in matrix):
            raise DimensionError(f"need a {self.n}x{self.n} matrix")
        return NAryForm(self.poly.linear_substitute(matrix, range(self.n)), self.n, self.degree)

    def __add__(self, other: "NAryForm") -> "NAryForm":
        self._check(other)
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError("cannot add forms of different degrees")
        deg = other.degree if self.is_zero() else self.degree
        return NAryForm(self.poly + other.poly, self.n, deg)

    def __mul__(self, other):
        if isinstance(other, NAryForm):
            self._check(other)
            return NAryForm(self.poly * other.poly, self.n, self.degree + other.degree)
        return NAryForm(self.poly.scale(other), self.n, self.degree)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "NAryForm":
        return NAryForm(self.poly**e, self.n, self.degree * e)

    def __eq__(self, other):
        if not isinstance(other, NAryForm):
            return NotImplemented
        return self.n == other.n and self.poly == other.poly and (self.degree == other.degree or self.is_zero())

    def __hash__(self):
        return hash((self.n, self.poly))

    def _check(self, other: "NAryForm"):
        if other.n != self.n or other.poly.variables != self.poly.variables:
            raise DimensionError("forms live in different rings")

    def __str__(self):
        return str(self.poly)

    # json -------------------------------------------------------------
    def to_json(self) -> dict:
        return {"variables": list(self.variables), "degree": self.degree, "polynomial": str(self.poly)}

    @classmethod
    def from_json(cls, data: dict | str) -> "NAryForm":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            variables = data["variables"]
            degree = int(data["degree"])
            text = data["polynomial"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed form JSON: {exc}") from exc
        if not isinstance(variables, list) or not variables or not all(isinstance(v, str) for v in variables):
            raise ValueError("form JSON 'variables' must be a non-empty list of names")
        return cls(parse_poly(text, variables), len(variables), degree)


# -- permutations ---------------------------------------------------------


def perm_sign(p: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def signed_permutations(n: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    return tuple((p, perm_sign(p)) for p in permutations(range(n)))


def _check_forms(fs: Sequence[NAryForm]) -> int:
    if not fs:
        raise DimensionError("no forms given")
    n = fs[0].n
    if len(fs) != n:
        raise DimensionError(f"a transvectant of {n}-ary forms takes exactly {n} arguments, got {len(fs)}")
    ring = fs[0].poly.variables
    for f in fs:
        if f.n != n or f.poly.variables != ring:
            raise DimensionError("forms must share dimension and variable names")
    return n


# -- tensor products (literal route) -----------------------------------------


class TensorProduct:
    """An element of S^(x)n stored as one polynomial in n disjoint variable groups.

    Group i occupies internal variables ``i*n .. i*n+n-1``; parameters follow.
    """

    __slots__ = ("n", "form_vars", "params", "poly")

    def __init__(self, n: int, form_vars: Sequence[str], params: Sequence[str], poly: Polynomial):
        self.n = n
        self.form_vars = tuple(form_vars)
        self.params = tuple(params)
        self.poly = poly

    @staticmethod
    def internal_variables(n: int, form_vars: Sequence[str], params: Sequence[str]) -> tuple[str, ...]:
        return tuple(f"{v}__{i}" for i in range(n) for v in form_vars) + tuple(params)

    @classmethod
    def from_forms(cls, fs: Sequence[NAryForm]) -> "TensorProduct":
        n = _check_forms(fs)
        form_vars, params = fs[0].variables, fs[0].params
        ivars = cls.internal_variables(n, form_vars, params)
        acc = Polynomial.one(ivars)
        for i, f in enumerate(fs):
            terms = {}
            for m, c in f.poly.terms.items():
                mono = [0] * (n * n)
                mono[i * n:(i + 1) * n] = m[:n]
                terms[tuple(mono) + m[n:]] = c
            acc = acc * Polynomial(ivars, terms)
        return cls(n, form_vars, params, acc)

    def group_degrees(self) -> tuple[int, ...]:
        n = self.n
        return tuple(self.poly.degree_in_group(range(i * n, (i + 1) * n)) for i in range(n))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __eq__(self, other):
        if not isinstance(other, TensorProduct):
            return NotImplemented
        return self.n == other.n and self.poly == other.poly


def nabla_apply(t: TensorProduct) -> TensorProduct:
    """Apply the n!-term signed derivation once."""
    n = t.n
    out: dict = {}
    for mono, c in t.poly.terms.items():
        for p, sign in signed_permutations(n):
            coeff = c * sign
            new = list(mono)
            for i in range(n):
                pos = i * n + p[i]
                e = new[pos]
                if e == 0:
                    coeff = 0
                    break
                coeff *= e
                new[pos] = e - 1
            if coeff:
                key = tuple(new)
                out[key] = out.get(key, 0) + coeff
    poly = Polynomial(t.poly.variables, {m: qnorm(c) for m, c in out.items() if c}, _clean=True)
    return TensorProduct(n, t.form_vars, t.params, poly)


def mu(t: TensorProduct) -> Polynomial:
    """Multiplication map: identify all groups with the form variables."""
    n = t.n
    variables = t.form_vars + t.params
    out: dict = {}
    for mono, c in t.poly.terms.items():
        key = tuple(sum(mono[i * n + j] for i in range(n)) for j in range(n)) + mono[n * n:]
        out[key] = out.get(key, 0) + c
    return Polynomial(variables, {m: qnorm(c) for m, c in out.items() if c}, _clean=True)


def _result_form(fs: Sequence[NAryForm], l: int, poly: Polynomial) -> NAryForm:
    n = fs[0].n
    degree = sum(f.degree for f in fs) - n * l
    if poly.is_zero():
        return NAryForm(poly, n, max(degree, 0))
    return NAryForm(poly, n, degree)


def transvectant_naive(fs: Sequence[NAryForm], l: int) -> NAryForm:
    """{f_1..f_n}_l by literally applying nabla l times, then mu."""
    if l < 0:
        raise ValueError("transvectant order must be non-negative")
    t = TensorProduct.from_forms(fs)
    for _ in range(l):
        if t.is_zero():
            break
        t = nabla_apply(t)
    return _result_form(fs, l, mu(t))


# -- multinomial route ---------------------------------------------------------


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def derivative_pattern(n: int, l: int) -> tuple[tuple[tuple[tuple[int, ...], ...], int], ...]:
    """Expansion of nabla^l as {(d_1..d_n): integer coefficient}.

    d_i is the multi-index of derivatives hitting factor i; the coefficient
    collects multinomial weights and signs of all permutation multisets that
    give the same pattern.
    """
    perms = signed_permutations(n)
    fact_l = factorial(l)
    acc: dict = {}
    for comp in _compositions(l, len(perms)):
        coeff = fact_l
        sign = 1
        ds = [[0] * n for _ in range(n)]
        for (p, s), m in zip(perms, comp):
            if not m:
                continue
            coeff //= factorial(m)
            if s < 0 and m % 2:
                sign = -sign
            for i in range(n):
                ds[i][p[i]] += m
        key = tuple(tuple(d) for d in ds)
        acc[key] = acc.get(key, 0) + sign * coeff
    return tuple((k, v) for k, v in acc.items() if v)


def transvectant(fs: Sequence[NAryForm], l: int) -> NAryForm:
    """{f_1, ..., f_n}_l = mu(nabla^l(f_1 (x) ... (x) f_n))."""
    if l < 0:
        raise ValueError("transvectant order must be non-negative")
    n = _check_forms(fs)
    variables = fs[0].poly.variables
    if any(f.degree < l for f in fs) or any(f.is_zero() for f in fs):
        return _result_form(fs, l, Polynomial.zero(variables))
    cache: list[dict] = [{} for _ in fs]

    def deriv(i, d):
        got = cache[i].get(d)
        if got is None:
            got = cache[i][d] = fs[i].poly.derive_multi(d)
        return got

    parts = []
    for ds, coeff in derivative_pattern(n, l):
        factors = [deriv(i, d) for i, d in enumerate(ds)]
        if any(f.is_zero() for f in factors):
            continue
        term = factors[0]
        for f in factors[1:]:
            term = term * f
        parts.append(term.scale(coeff))
    return _result_form(fs, l, poly_sum(parts, variables))


def binary_transvectant(f: NAryForm, g: NAryForm, l: int) -> NAryForm:
    """Two-variable transvectant with binomial weights:

    {f, g}_l = sum_k (-1)^k C(l, k) d^l f/dx^(l-k) dy^k * d^l g/dx^k dy^(l-k)
    """
    if f.n != 2 or g.n != 2:
        raise DimensionError("binary_transvectant needs binary forms")
    _check_forms([f, g])
    variables = f.poly.variables
    if f.degree < l or g.degree < l:
        return _result_form([f, g], l, Polynomial.zero(variables))
    parts = []
    for k in range(l + 1):
        a = f.poly.derive_multi((l - k, k))
        if a.is_zero():
            continue
        b = g.poly.derive_multi((k, l - k))
        if b.is_zero():
            continue
        parts.append((a * b).scale((-1) ** k * comb(l, k)))
    return _result_form([f, g], l, poly_sum(parts, variables))


def self_transvectant_J(f: NAryForm):
    """J(f) = {f, ..., f}_{deg f} as a scalar."""
    return transvectant([f] * f.n, f.degree).scalar()


def product_degree(degrees: Sequence[int], l: int) -> int:
    return sum(degrees) - len(degrees) * l


__all__ = [
    "NAryForm",
    "TensorProduct",
    "binary_transvectant",
    "derivative_pattern",
    "form_variables",
    "mu",
    "nabla_apply",
    "perm_sign",
    "self_transvectant_J",
    "transvectant",
    "transvectant_naive",
]
