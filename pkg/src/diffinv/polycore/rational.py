"""Rational functions over Q with a factored denominator.

The denominator is kept as a product of primitive polynomials (integer
coefficients, positive leading coefficient) raised to positive powers. No
multivariate gcd is ever taken: factors only merge when they are equal as
polynomials, and a numerator is reduced only by exact trial division against
the known factors. Equality is decided by cross-multiplication.

Keeping the factor list makes repeated differentiation grow the denominator
exponent by one per step instead of squaring it.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Callable, Mapping, Sequence

from ..errors import DimensionError, PoleError, ZeroDenominatorError
from .polynomial import Coeff, Polynomial, qnorm

Factors = dict  # Polynomial -> positive int


def _expand(factors: Mapping[Polynomial, int], variables) -> Polynomial:
    out = Polynomial.one(variables)
    for q, e in factors.items():
        out = out * q**e
    return out


def _normalize_den(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Factors]:
    if den.is_zero():
        raise ZeroDenominatorError("denominator is identically zero")
    if den.is_constant():
        return num.scale(Fraction(1) / Fraction(den.constant_value())), {}
    c, q = den.primitive()
    return num.scale(1 / c), {q: 1}


def _cancel(num: Polynomial, factors: Factors) -> tuple[Polynomial, Factors]:
    if num.is_zero():
        return num, {}
    if not factors:
        return num, factors
    out = {}
    for q, e in factors.items():
        while e and len(num) >= len(q) and num.total_degree() >= q.total_degree():
            quo = num.divide_exact(q)
            if quo is None:
                break
            num = quo
            e -= 1
        if e:
            out[q] = e
    return num, out


class RationalFunction:
    __slots__ = ("num", "_factors")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            self.num, self._factors = num, {}
        else:
            if den.variables != num.variables:
                raise DimensionError("numerator and denominator rings differ")
            n, f = _normalize_den(num, den)
            self.num, self._factors = _cancel(n, f)

    @classmethod
    def _raw(cls, num: Polynomial, factors: Factors) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.num = num
        obj._factors = {} if num.is_zero() else factors
        return obj

    @classmethod
    def constant(cls, c, variables: Sequence[str]) -> "RationalFunction":
        return cls._raw(Polynomial.constant(c, variables), {})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "RationalFunction":
        return cls._raw(Polynomial.var(name, variables), {})

    @classmethod
    def lift(cls, value, variables: Sequence[str]) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            if value.variables != tuple(variables):
                return value.change_ring(variables)
            return value
        if isinstance(value, Polynomial):
            return cls._raw(value.change_ring(variables), {})
        return cls.constant(value, variables)

    # access -------------------------------------------------------------
    @property
    def variables(self) -> tuple[str, ...]:
        return self.num.variables

    @property
    def factors(self) -> tuple[tuple[Polynomial, int], ...]:
        return tuple(self._factors.items())

    @property
    def numerator(self) -> Polynomial:
        return self.num

    @property
    def denominator(self) -> Polynomial:
        return _expand(self._factors, self.variables)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self._factors

    def as_polynomial(self) -> Polynomial:
        if self._factors:
            num, f = _cancel(self.num, dict(self._factors))
            if f:
                raise ValueError("rational function is not a polynomial")
            return num
        return self.num

    def is_constant(self) -> bool:
        return self.is_polynomial() and self.num.is_constant()

    def constant_value(self) -> Coeff:
        return self.as_polynomial().constant_value()

    def depends_on(self, var: int | str) -> bool:
        i = self.num.index(var) if isinstance(var, str) else var
        if any(m[i] for m in self.num.terms):
            return True
        return any(any(m[i] for m in q.terms) for q in self._factors)

    def change_ring(self, variables: Sequence[str]) -> "RationalFunction":
        variables = tuple(variables)
        if variables == self.variables:
            return self
        return RationalFunction._raw(
            self.num.change_ring(variables),
            {q.change_ring(variables): e for q, e in self._factors.items()},
        )

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.variables != self.variables:
                raise DimensionError(f"ring mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise DimensionError(f"ring mismatch: {self.variables} vs {other.variables}")
            return RationalFunction._raw(other, {})
        if isinstance(other, (int, Fraction, Rational)):
            return RationalFunction.constant(other, self.variables)
        return NotImplemented

    def _over(self, target: Factors) -> Polynomial:
        """Numerator rescaled to sit over the larger denominator ``target``."""
        extra = {q: e - self._factors.get(q, 0) for q, e in target.items()}
        extra = {q: e for q, e in extra.items() if e}
        return self.num * _expand(extra, self.variables) if extra else self.num

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if not self._factors and not other._factors:
            return RationalFunction._raw(self.num + other.num, {})
        lcm = dict(self._factors)
        for q, e in other._factors.items():
            if lcm.get(q, 0) < e:
                lcm[q] = e
        num = self._over(lcm) + other._over(lcm)
        num, lcm = _cancel(num, lcm)
        return RationalFunction._raw(num, lcm)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self.num, self._factors)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction._raw(self.num.scale(other), self._factors)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return RationalFunction.constant(0, self.variables)
        a_num, b_f = _cancel(self.num, dict(other._factors))
        b_num, a_f = _cancel(other.num, dict(self._factors))
        factors = dict(a_f)
        for q, e in b_f.items():
            factors[q] = factors.get(q, 0) + e
        return RationalFunction._raw(a_num * b_num, factors)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        num = _expand(self._factors, self.variables)
        if self.num.is_constant():
            return RationalFunction._raw(num.scale(Fraction(1) / Fraction(self.num.constant_value())), {})
        c, q = self.num.primitive()
        return RationalFunction._raw(num.scale(1 / c), {q: 1})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return RationalFunction._raw(self.num.scale(Fraction(1) / qnorm(other)), self._factors)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise TypeError("rational function powers must be integers")
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return RationalFunction.constant(1, self.variables)
        return RationalFunction._raw(self.num**e, {q: k * e for q, k in self._factors.items()})

    def __eq__(self, other):
        if not isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            return NotImplemented
        try:
            other = self._coerce(other)
        except DimensionError:
            return False
        if not self._factors and not other._factors:
            return self.num == other.num
        lcm = dict(self._factors)
        for q, e in other._factors.items():
            if lcm.get(q, 0) < e:
                lcm[q] = e
        return self._over(lcm) == other._over(lcm)

    __hash__ = None

    # calculus -----------------------------------------------------------
    def derive(self, var: int | str) -> "RationalFunction":
        i = self.num.index(var) if isinstance(var, str) else var
        if not 0 <= i < len(self.variables):
            raise IndexError(f"variable index {i} out of range")
        dnum = self.num.derive(i)
        moving = [(q, e, q.derive(i)) for q, e in self._factors.items()]
        moving = [(q, e, dq) for q, e, dq in moving if not dq.is_zero()]
        if not moving:
            return RationalFunction._raw(dnum, self._factors)
        # d(N / prod q^e) = (N' Q - N sum e q' Q/q) / (prod q^e * Q), Q = prod of moving q
        big_q = Polynomial.one(self.variables)
        for q, _, _ in moving:
            big_q = big_q * q
        num = dnum * big_q
        for j, (q, e, dq) in enumerate(moving):
            rest = Polynomial.one(self.variables)
            for k, (q2, _, _) in enumerate(moving):
                if k != j:
                    rest = rest * q2
            num = num - self.num * dq * rest.scale(e)
        factors = dict(self._factors)
        for q, _, _ in moving:
            factors[q] += 1
        num, factors = _cancel(num, factors)
        return RationalFunction._raw(num, factors)

    def derive_multi(self, alpha: Sequence[int]) -> "RationalFunction":
        out = self
        for i, a in enumerate(alpha):
            for _ in range(a):
                out = out.derive(i)
        return out

    # composition ----------------------------------------------------------
    def substitute(self, mapping: Mapping[str, "RationalFunction | Polynomial"], variables: Sequence[str] | None = None) -> "RationalFunction":
        """Compose with rational-function values for (some of) the variables.

        Unmapped variables are kept as themselves in the target ring.
        """
        if variables is None:
            vals = [v for v in mapping.values() if isinstance(v, (RationalFunction, Polynomial))]
            variables = vals[0].variables if vals else self.variables
        variables = tuple(variables)
        images: dict[str, RationalFunction] = {}
        for name in self.variables:
            if name in mapping:
                images[name] = RationalFunction.lift(mapping[name], variables)
            elif name in variables:
                images[name] = RationalFunction.var(name, variables)
        # bring all images over one common factored denominator D
        common: Factors = {}
        for img in images.values():
            for q, e in img._factors.items():
                if common.get(q, 0) < e:
                    common[q] = e
        img_num = {name: img._over(common) for name, img in images.items()}
        d_poly = _expand(common, variables) if common else None

        def homogenize(p: Polynomial) -> tuple[Polynomial, int]:
            missing = [v for i, v in enumerate(p.variables) if v not in img_num and any(m[i] for m in p.terms)]
            if missing:
                raise KeyError(f"no image for variable(s) {missing}")
            if d_poly is None:
                return p.substitute(img_num, variables), 0
            deg = p.total_degree()
            dpows = [Polynomial.one(variables)]
            for _ in range(max(deg, 0)):
                dpows.append(dpows[-1] * d_poly)
            acc = Polynomial.zero(variables)
            # group terms by total degree so each group is one substitution
            by_deg: dict[int, dict] = {}
            for m, c in p.terms.items():
                by_deg.setdefault(sum(m), {})[m] = c
            for d, terms in by_deg.items():
                part = Polynomial(p.variables, terms).substitute(img_num, variables)
                acc = acc + part * dpows[deg - d]
            return acc, max(deg, 0)

        num, d_exp = homogenize(self.num)
        factors: Factors = {}
        for q, e in self._factors.items():
            qh, qd = homogenize(q)
            if qh.is_zero():
                raise ZeroDenominatorError(f"denominator factor {q} vanishes identically after substitution")
            d_exp -= qd * e
            if qh.is_constant():
                num = num.scale(Fraction(1) / Fraction(qh.constant_value()) ** e)
            else:
                c, qq = qh.primitive()
                num = num.scale(Fraction(1) / c**e)
                factors[qq] = factors.get(qq, 0) + e
        if d_exp > 0:
            for q, e in common.items():
                factors[q] = factors.get(q, 0) + e * d_exp
        elif d_exp < 0:
            num = num * _expand(common, variables) ** (-d_exp)
        num, factors = _cancel(num, factors)
        return RationalFunction._raw(num, factors)

    # evaluation -----------------------------------------------------------
    def eval(self, point: Sequence) -> Coeff:
        """Exact value at a point of exact rationals; PoleError at a pole."""
        den = 1
        for q, e in self._factors.items():
            v = q.eval(point)
            if v == 0:
                raise PoleError(f"pole of {self} at {tuple(point)}")
            den = den * v**e
        return qnorm(Fraction(self.num.eval(point)) / den)

    def eval_float(self, point: Sequence[float]) -> float:
        den = 1.0
        for q, e in self._factors.items():
            v = q.eval_float(point)
            if v == 0.0:
                raise PoleError(f"pole of {self} at {tuple(point)}")
            den *= v**e
        return self.num.eval_float(point) / den

    def to_float_function(self) -> Callable[..., float]:
        """Compile to a plain float function of the ring variables (positional)."""
        args = [f"_a{i}" for i in range(len(self.variables))]
        num_src = _poly_source(self.num, args)
        if self._factors:
            den_src = " * ".join(f"({_poly_source(q, args)})**{e}" for q, e in self._factors.items())
            src = f"lambda {', '.join(args)}: ({num_src}) / ({den_src})"
        else:
            src = f"lambda {', '.join(args)}: {num_src}"
        return eval(src, {"__builtins__": {}})  # generated from our own term tables only

    # printing -------------------------------------------------------------
    def __str__(self) -> str:
        if not self._factors:
            return str(self.num)
        den = "*".join(f"({q})" if e == 1 else f"({q})^{e}" for q, e in self._factors.items())
        if len(self._factors) > 1:
            den = f"({den})"
        return f"({self.num})/{den}"

    def __repr__(self) -> str:
        return f"RationalFunction({str(self)!r}, variables={self.variables})"


def _poly_source(p: Polynomial, args: Sequence[str]) -> str:
    if p.is_zero():
        return "0.0"
    parts = []
    for mono, c in p.terms.items():
        factors = [repr(float(c))]
        for a, e in zip(args, mono):
            if e == 1:
                factors.append(a)
            elif e:
                factors.append(f"{a}**{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def as_rational(value, variables: Sequence[str]) -> RationalFunction:
    return RationalFunction.lift(value, variables)
