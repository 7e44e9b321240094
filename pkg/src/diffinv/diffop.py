"""Linear scalar differential operators with rational-function coefficients.

An operator ``A = sum_alpha a_alpha d^alpha`` differentiates along its
``coords``; its coefficients may additionally depend on parameter variables
(for example the fibre coordinate ``u`` of a nonlinear operator, or an
auxiliary epsilon), which are never differentiated.

Diffeomorphisms are restricted to maps with exact polynomial inverses
(affine and triangular maps and their composites), so pushforwards are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .box import Box, interval_bounds
from .errors import DimensionError, PoleError, SingularMatrixError
from .polycore import Point, Polynomial, RationalFunction, parse_expr, parse_poly
from .polycore.multiindex import (
    add as mi_add,
    format_index,
    multi_binomial,
    parse_index,
    sub as mi_sub,
    sub_indices,
    unit,
)
from .transvect import NAryForm, form_variables


def _derivatives(f: RationalFunction, alphas, coord_index: Sequence[int]) -> dict:
    """d^alpha f for every alpha in ``alphas``, sharing intermediate results."""
    memo = {(0,) * len(coord_index): f}

    def get(alpha):
        got = memo.get(alpha)
        if got is None:
            i = next(j for j, a in enumerate(alpha) if a)
            prev = get(alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:])
            got = memo[alpha] = prev.derive(coord_index[i])
        return got

    return {alpha: get(alpha) for alpha in alphas}


class LinearDiffOp:
    __slots__ = ("coords", "ring", "_coeffs")

    def __init__(self, coords: Sequence[str], coeffs: Mapping, params: Sequence[str] = ()):
        self.coords = tuple(coords)
        self.ring = self.coords + tuple(params)
        n = len(self.coords)
        clean = {}
        for alpha, c in coeffs.items():
            alpha = tuple(alpha)
            if len(alpha) != n or any(a < 0 for a in alpha):
                raise DimensionError(f"bad multi-index {alpha} for {n} coordinates")
            c = RationalFunction.lift(c, self.ring)
            if not c.is_zero():
                clean[alpha] = c
        self._coeffs = clean

    # construction -----------------------------------------------------------
    @classmethod
    def _raw(cls, coords, ring, coeffs) -> "LinearDiffOp":
        obj = cls.__new__(cls)
        obj.coords = coords
        obj.ring = ring
        obj._coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, coords: Sequence[str], params: Sequence[str] = ()) -> "LinearDiffOp":
        return cls(coords, {}, params)

    @classmethod
    def identity(cls, coords: Sequence[str], params: Sequence[str] = ()) -> "LinearDiffOp":
        return cls(coords, {(0,) * len(coords): 1}, params)

    @classmethod
    def partial(cls, coords: Sequence[str], i: int, times: int = 1, params: Sequence[str] = ()) -> "LinearDiffOp":
        return cls(coords, {unit(len(coords), i, times): 1}, params)

    @classmethod
    def multiplication(cls, f, coords: Sequence[str], params: Sequence[str] = ()) -> "LinearDiffOp":
        return cls(coords, {(0,) * len(coords): f}, params)

    @classmethod
    def parse(cls, coeffs: Mapping[str, str], coords: Sequence[str], params: Sequence[str] = ()) -> "LinearDiffOp":
        """Build from ``{"2,0": "1+x1", ...}``."""
        ring = tuple(coords) + tuple(params)
        return cls(
            coords,
            {parse_index(k, len(coords)): parse_expr(v, ring) for k, v in coeffs.items()},
            params,
        )

    # access -----------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def params(self) -> tuple[str, ...]:
        return self.ring[len(self.coords):]

    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    @property
    def order(self) -> int:
        return max((sum(a) for a in self._coeffs), default=0)

    def coeff(self, alpha: Sequence[int]) -> RationalFunction:
        alpha = tuple(alpha)
        got = self._coeffs.get(alpha)
        return got if got is not None else RationalFunction.constant(0, self.ring)

    @property
    def free_term(self) -> RationalFunction:
        return self.coeff((0,) * self.n)

    def is_zero(self) -> bool:
        return not self._coeffs

    def with_params(self, params: Sequence[str]) -> "LinearDiffOp":
        ring = self.coords + tuple(params)
        return LinearDiffOp._raw(self.coords, ring, {a: c.change_ring(ring) for a, c in self._coeffs.items()})

    def map_coeffs(self, fn) -> "LinearDiffOp":
        out = {}
        ring = None
        for a, c in self._coeffs.items():
            v = fn(c)
            ring = v.variables
            if not v.is_zero():
                out[a] = v
        if ring is None:
            ring = self.ring
        return LinearDiffOp._raw(self.coords, ring, out)

    # algebra ----------------------------------------------------------------
    def _check(self, other: "LinearDiffOp"):
        if other.coords != self.coords or other.ring != self.ring:
            raise DimensionError("operators live on different coordinate rings")

    def __add__(self, other: "LinearDiffOp") -> "LinearDiffOp":
        self._check(other)
        out = dict(self._coeffs)
        for a, c in other._coeffs.items():
            s = out[a] + c if a in out else c
            if s.is_zero():
                out.pop(a, None)
            else:
                out[a] = s
        return LinearDiffOp._raw(self.coords, self.ring, out)

    def __neg__(self) -> "LinearDiffOp":
        return LinearDiffOp._raw(self.coords, self.ring, {a: -c for a, c in self._coeffs.items()})

    def __sub__(self, other: "LinearDiffOp") -> "LinearDiffOp":
        return self + (-other)

    def scale(self, f) -> "LinearDiffOp":
        """Left multiplication by a function (or scalar)."""
        f = RationalFunction.lift(f, self.ring)
        if f.is_zero():
            return LinearDiffOp.zero(self.coords, self.params)
        return LinearDiffOp._raw(self.coords, self.ring, {a: f * c for a, c in self._coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, LinearDiffOp):
            return NotImplemented
        if other.coords != self.coords or other.ring != self.ring:
            return False
        keys = set(self._coeffs) | set(other._coeffs)
        return all(self.coeff(a) == other.coeff(a) for a in keys)

    __hash__ = None

    # action -----------------------------------------------------------------
    def apply(self, f) -> RationalFunction:
        """A(f) = sum_alpha a_alpha d^alpha f."""
        f = RationalFunction.lift(f, self.ring)
        if not self._coeffs:
            return RationalFunction.constant(0, self.ring)
        ders = _derivatives(f, self._coeffs.keys(), range(self.n))
        acc = RationalFunction.constant(0, self.ring)
        for a, c in self._coeffs.items():
            d = ders[a]
            if not d.is_zero():
                acc = acc + c * d
        return acc

    __call__ = apply

    def compose(self, other: "LinearDiffOp") -> "LinearDiffOp":
        """(A o B)(f) = A(B(f)), expanded with the Leibniz rule."""
        self._check(other)
        gammas = set()
        for a in self._coeffs:
            gammas.update(sub_indices(a))
        out: dict = {}
        for b, cb in other._coeffs.items():
            ders = _derivatives(cb, gammas, range(self.n))
            for a, ca in self._coeffs.items():
                for g in sub_indices(a):
                    d = ders[g]
                    if d.is_zero():
                        continue
                    key = mi_add(mi_sub(a, g), b)
                    term = (ca * d) * multi_binomial(a, g)
                    out[key] = out[key] + term if key in out else term
        return LinearDiffOp._raw(self.coords, self.ring, {k: v for k, v in out.items() if not v.is_zero()})

    def symbol(self, k: int | None = None) -> "SymbolField":
        k = self.order if k is None else k
        top = {a: c for a, c in self._coeffs.items() if sum(a) == k}
        return SymbolField(self.coords, k, top, self.params)

    # pushforward --------------------------------------------------------------
    def pushforward(self, phi: "DiffMap") -> "LinearDiffOp":
        return pushforward(self, phi)

    # io -------------------------------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "variables": list(self.coords),
            "order": self.order,
            "coefficients": {format_index(a): str(c) for a, c in sorted(self._coeffs.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0])))},
        }
        if self.params:
            out["parameters"] = list(self.params)
        return out

    @classmethod
    def from_json(cls, data, params: Sequence[str] = ()) -> "LinearDiffOp":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            variables = list(data["variables"])
            order = int(data["order"])
            coeffs = dict(data["coefficients"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed operator JSON: {exc}") from exc
        params = tuple(data.get("parameters", ())) or tuple(params)
        op = cls.parse(coeffs, variables, params)
        if any(sum(a) > order for a in op._coeffs):
            raise ValueError(f"coefficient of order above declared order {order}")
        if order and not any(sum(a) == order for a in op._coeffs):
            raise ValueError(f"declared order {order} but the top-order part vanishes")
        return op

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for a, c in sorted(self._coeffs.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0]))):
            d = "*".join(f"d{v}" if e == 1 else f"d{v}^{e}" for v, e in zip(self.coords, a) if e)
            parts.append(f"({c})" + (f"*{d}" if d else ""))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"LinearDiffOp({self})"


@dataclass
class SymbolField:
    """Top-order part of an operator: a k-symmetric vector field."""

    coords: tuple[str, ...]
    k: int
    coeffs: dict
    params: tuple[str, ...] = ()

    def __post_init__(self):
        self.coords = tuple(self.coords)
        self.params = tuple(self.params)
        ring = self.coords + self.params
        clean = {}
        for a, c in self.coeffs.items():
            a = tuple(a)
            if sum(a) != self.k or len(a) != len(self.coords):
                raise DimensionError(f"symbol key {a} is not of order {self.k}")
            c = RationalFunction.lift(c, ring)
            if not c.is_zero():
                clean[a] = c
        self.coeffs = clean

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def ring(self) -> tuple[str, ...]:
        return self.coords + self.params

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, alpha) -> RationalFunction:
        return self.coeffs.get(tuple(alpha), RationalFunction.constant(0, self.ring))

    def __add__(self, other: "SymbolField") -> "SymbolField":
        if other.coords != self.coords or other.k != self.k:
            raise DimensionError("symbols of different type")
        keys = set(self.coeffs) | set(other.coeffs)
        return SymbolField(self.coords, self.k, {a: self.coeff(a) + other.coeff(a) for a in keys}, self.params)

    def __eq__(self, other):
        if not isinstance(other, SymbolField):
            return NotImplemented
        if other.coords != self.coords or other.k != self.k:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeff(a) == other.coeff(a) for a in keys)

    def operator(self) -> LinearDiffOp:
        return LinearDiffOp(self.coords, self.coeffs, self.params)

    def form_variables(self) -> tuple[str, ...]:
        return form_variables(self.n, avoid=self.ring)

    def as_form(self) -> tuple[NAryForm, RationalFunction]:
        """(F, D) with sigma = F / D, F a form whose coefficients are polynomials in the ring."""
        ring = self.ring
        common: dict = {}
        for c in self.coeffs.values():
            for q, e in c.factors:
                if common.get(q, 0) < e:
                    common[q] = e
        den = RationalFunction.constant(1, ring)
        for q, e in common.items():
            den = den * RationalFunction.lift(q, ring) ** e
        fvars = self.form_variables()
        full = fvars + ring
        terms: dict = {}
        for a, c in self.coeffs.items():
            scaled = (c * den).as_polynomial()
            for m, v in scaled.terms.items():
                key = tuple(a) + m
                terms[key] = terms.get(key, 0) + v
        return NAryForm(Polynomial(full, terms), self.n, self.k), den

    def form_at(self, p) -> NAryForm:
        return symbol_form_at(self, p)


@dataclass
class DiffMap:
    """Polynomial diffeomorphism y = forward(x) with stored polynomial inverse.

    Domain and target use the same coordinate names.
    """

    kind: str
    coords: tuple[str, ...]
    forward: tuple[Polynomial, ...]
    inverse: tuple[Polynomial, ...]
    _checked: bool = field(default=False, repr=False)

    def __post_init__(self):
        self.coords = tuple(self.coords)
        self.forward = tuple(p.change_ring(self.coords) for p in self.forward)
        self.inverse = tuple(p.change_ring(self.coords) for p in self.inverse)
        if not (len(self.forward) == len(self.inverse) == len(self.coords)):
            raise DimensionError("map components do not match the coordinates")
        if not self._checked:
            self.check_roundtrip()
            self._checked = True

    def check_roundtrip(self):
        ident = tuple(Polynomial.gens(self.coords))
        fwd = dict(zip(self.coords, self.forward))
        inv = dict(zip(self.coords, self.inverse))
        if tuple(p.substitute(inv, self.coords) for p in self.forward) != ident:
            raise ValueError("forward o inverse is not the identity")
        if tuple(p.substitute(fwd, self.coords) for p in self.inverse) != ident:
            raise ValueError("inverse o forward is not the identity")

    # constructors ------------------------------------------------------------
    @classmethod
    def identity(cls, coords: Sequence[str]) -> "DiffMap":
        g = tuple(Polynomial.gens(coords))
        return cls("affine", tuple(coords), g, g)

    @classmethod
    def affine(cls, matrix: Sequence[Sequence], shift: Sequence, coords: Sequence[str]) -> "DiffMap":
        """y = M x + b; the inverse x = M^-1 (y - b) is computed exactly."""
        coords = tuple(coords)
        n = len(coords)
        M = [[Fraction(v) for v in row] for row in matrix]
        b = [Fraction(v) for v in shift]
        if len(M) != n or any(len(r) != n for r in M) or len(b) != n:
            raise DimensionError("affine map shape does not match the coordinates")
        Minv = _matrix_inverse(M)
        gens = Polynomial.gens(coords)

        def lin(A, v):
            out = []
            for i in range(n):
                acc = Polynomial.constant(v[i], coords)
                for j in range(n):
                    if A[i][j]:
                        acc = acc + gens[j].scale(A[i][j])
                out.append(acc)
            return tuple(out)

        shift_inv = [-sum(Minv[i][j] * b[j] for j in range(n)) for i in range(n)]
        return cls("affine", coords, lin(M, b), lin(Minv, shift_inv))

    @classmethod
    def triangular(cls, components: Sequence, coords: Sequence[str]) -> "DiffMap":
        """y_i = c_i x_i + p_i(x_1..x_{i-1}) with nonzero constants c_i."""
        coords = tuple(coords)
        n = len(coords)
        comps = [parse_poly(c, coords) if isinstance(c, str) else c.change_ring(coords) for c in components]
        if len(comps) != n:
            raise DimensionError("need one component per coordinate")
        gens = Polynomial.gens(coords)
        scales, lower = [], []
        for i, p in enumerate(comps):
            rest_terms = {}
            c_i = Fraction(0)
            for m, v in p.terms.items():
                if any(m[j] for j in range(i + 1, n)):
                    raise ValueError(f"component {i} depends on later coordinates")
                if m[i]:
                    if m == unit(n, i):
                        c_i = Fraction(v)
                        continue
                    raise ValueError(f"component {i} is not linear in {coords[i]}")
                rest_terms[m] = v
            if c_i == 0:
                raise SingularMatrixError(f"component {i} has zero coefficient on {coords[i]}")
            scales.append(c_i)
            lower.append(Polynomial(coords, rest_terms))
        inverse: list[Polynomial] = []
        for i in range(n):
            # x_i = (y_i - p_i(x_1(y), ..., x_{i-1}(y))) / c_i
            sub = {coords[j]: inverse[j] for j in range(i)}
            p_of_y = lower[i].substitute(sub, coords) if sub else lower[i]
            inverse.append((gens[i] - p_of_y).scale(1 / scales[i]))
        return cls("triangular", coords, tuple(comps), tuple(inverse))

    # operations -------------------------------------------------------------------
    def then(self, other: "DiffMap") -> "DiffMap":
        """other o self."""
        if other.coords != self.coords:
            raise DimensionError("maps on different coordinates")
        fwd = dict(zip(self.coords, self.forward))
        inv = dict(zip(self.coords, other.inverse))
        forward = tuple(p.substitute(fwd, self.coords) for p in other.forward)
        inverse = tuple(p.substitute(inv, self.coords) for p in self.inverse)
        kind = "affine" if self.kind == other.kind == "affine" else "composite"
        return DiffMap(kind, self.coords, forward, inverse)

    def inverted(self) -> "DiffMap":
        kind = self.kind if self.kind == "affine" else "composite"
        return DiffMap(kind, self.coords, self.inverse, self.forward, _checked=True)

    def __call__(self, point: Sequence):
        return tuple(p.eval(point) for p in self.forward)

    def jacobian(self, ring: Sequence[str] | None = None) -> list[list[RationalFunction]]:
        ring = tuple(ring) if ring else self.coords
        return [[RationalFunction.lift(p.derive(j), ring) for j in range(len(self.coords))] for p in self.forward]

    def forward_map(self, ring: Sequence[str]) -> dict:
        return {c: RationalFunction.lift(p.change_ring(ring), ring) for c, p in zip(self.coords, self.forward)}

    def inverse_map(self, ring: Sequence[str]) -> dict:
        return {c: RationalFunction.lift(p.change_ring(ring), ring) for c, p in zip(self.coords, self.inverse)}

    def image_box(self, box: Box) -> Box:
        """Axis-aligned exact enclosure of the image of ``box``."""
        b = box.ordered(self.coords)
        lo, hi = zip(*(interval_bounds(p, b) for p in self.forward))
        extra = [n for n in box.names if n not in self.coords]
        out = Box(self.coords, lo, hi)
        if extra:
            rest = box.restrict(extra)
            out = Box(out.names + rest.names, out.lower + rest.lower, out.upper + rest.upper)
        return out


def _matrix_inverse(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("affine map has a singular linear part")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [v / p for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


# -- module-level operations -------------------------------------------------------


def apply_op(A: LinearDiffOp, f) -> RationalFunction:
    return A.apply(f)


def compose(A: LinearDiffOp, B: LinearDiffOp) -> LinearDiffOp:
    return A.compose(B)


def symbol(A: LinearDiffOp, k: int | None = None) -> SymbolField:
    return A.symbol(k)


def symbol_form_at(sigma: SymbolField, p) -> NAryForm:
    """The symbol at a point as a numeric form; monomial x^alpha carries u_alpha(p)."""
    coords = p.coords if isinstance(p, Point) else tuple(p)
    if len(coords) != len(sigma.ring):
        raise DimensionError(f"point has {len(coords)} coordinates, symbol ring has {len(sigma.ring)}")
    fvars = form_variables(sigma.n)
    terms = {}
    for a, c in sigma.coeffs.items():
        terms[a] = c.eval(coords)  # PoleError propagates
    return NAryForm(Polynomial(fvars, terms), sigma.n, sigma.k)


def invert_map(phi: DiffMap) -> DiffMap:
    return phi.inverted()


def pushforward(A: LinearDiffOp, phi: DiffMap) -> LinearDiffOp:
    """phi_* A, defined by (phi_* A)(g) = A(g o phi) o phi^-1.

    Each d/dx_i becomes sum_j (d phi_j/dx_i o phi^-1) d/dy_j; d^alpha is the
    composite of these first-order operators; coefficients are composed with
    phi^-1.
    """
    if phi.coords != A.coords:
        raise DimensionError("map and operator use different coordinates")
    ring = A.ring
    n = A.n
    inv = phi.inverse_map(ring)
    firsts = []
    for i in range(n):
        coeffs = {}
        for j, p in enumerate(phi.forward):
            d = RationalFunction.lift(p.derive(i).change_ring(ring), ring)
            if not d.is_zero():
                coeffs[unit(n, j)] = d.substitute(inv, ring)
        firsts.append(LinearDiffOp(A.coords, coeffs, A.params))
    memo = {(0,) * n: LinearDiffOp.identity(A.coords, A.params)}

    def power(alpha):
        got = memo.get(alpha)
        if got is None:
            i = next(j for j, a in enumerate(alpha) if a)
            prev = power(alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:])
            got = memo[alpha] = firsts[i].compose(prev)
        return got

    out = LinearDiffOp.zero(A.coords, A.params)
    for a, c in A.coeffs.items():
        out = out + power(a).scale(c.substitute(inv, ring))
    return out


def transport_function(f: RationalFunction, phi: DiffMap) -> RationalFunction:
    """phi_* f = f o phi^-1."""
    return f.substitute(phi.inverse_map(f.variables), f.variables)


def pullback_function(f: RationalFunction, phi: DiffMap) -> RationalFunction:
    """f o phi."""
    return f.substitute(phi.forward_map(f.variables), f.variables)


__all__ = [
    "DiffMap",
    "LinearDiffOp",
    "PoleError",
    "SymbolField",
    "apply_op",
    "compose",
    "invert_map",
    "pullback_function",
    "pushforward",
    "symbol",
    "symbol_form_at",
    "transport_function",
]
