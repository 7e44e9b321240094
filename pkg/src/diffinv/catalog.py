"""Named invariants of binary quartics, binary quintics and ternary cubics.

Binary quartic, written classically as

    P = p4 x^4 + 4 p3 x^3 y + 6 p2 x^2 y^2 + 4 p1 x y^3 + p0 y^4,

has SL2-invariants

    J2 = p0 p4 - 4 p1 p3 + 3 p2^2                 = {P,P}_4 / (2^7 3^2)
    J3 = p0 p2 p4 - p0 p3^2 - p1^2 p4 + 2 p1 p2 p3 - p2^3
                                                  = {{P,P}_2,P}_4 / (2^11 3^5)

and both routes are always computed and compared. The remaining invariants
are defined by transvectant chains only.

Every function accepts forms with parameter variables; values are then
polynomials (SL-invariants) or rational functions (GL-invariants) of the
parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import DegenerateError, DimensionError, PathMismatchError
from .polycore import Polynomial, RationalFunction
from .transvect import NAryForm, transvectant, transvectant_naive

J2_NORMALIZATION = 2**7 * 3**2
J3_NORMALIZATION = 2**11 * 3**5

# degree of each invariant as a polynomial in the form's coefficients
WEIGHTS = {
    "J2q": 2,
    "J3q": 3,
    "Jq": 0,
    "discriminant": 6,
    "J4": 4,
    "J8": 8,
    "J12": 12,
    "I1quintic": 0,
    "I2quintic": 0,
    "J1c": 6,
    "J2c": 9,
    "Jc": 0,
}

SHAPES = {
    "J2q": (2, 4),
    "J3q": (2, 4),
    "Jq": (2, 4),
    "discriminant": (2, 4),
    "J4": (2, 5),
    "J8": (2, 5),
    "J12": (2, 5),
    "I1quintic": (2, 5),
    "I2quintic": (2, 5),
    "J1c": (3, 3),
    "J2c": (3, 3),
    "Jc": (3, 3),
}


@dataclass(frozen=True)
class QuarticClassicalCoeffs:
    p0: Any
    p1: Any
    p2: Any
    p3: Any
    p4: Any

    def as_tuple(self):
        return (self.p0, self.p1, self.p2, self.p3, self.p4)

    def reconstruct(self, variables=("x", "y")) -> NAryForm:
        """p4 x^4 + 4 p3 x^3 y + 6 p2 x^2 y^2 + 4 p1 x y^3 + p0 y^4 (scalar coefficients only)."""
        terms = {
            (4, 0): self.p4,
            (3, 1): 4 * self.p3,
            (2, 2): 6 * self.p2,
            (1, 3): 4 * self.p1,
            (0, 4): self.p0,
        }
        return NAryForm(Polynomial(tuple(variables), terms), 2, 4)


@dataclass(frozen=True)
class InvariantReport:
    name: str
    value: Any
    path: str  # "explicit", "transvectant" or "both"
    regular: bool | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "value": _exact_str(self.value), "path": self.path}
        if self.regular is not None:
            out["regular"] = self.regular
        return out


def _exact_str(value) -> str | None:
    if value is None:
        return None
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    return str(value)


def _require(P: NAryForm, n: int, degree: int, what: str):
    if P.n != n or P.degree != degree:
        raise DimensionError(f"{what} needs a form with n={n}, degree {degree}; got n={P.n}, degree {P.degree}")


def _is_zero(v) -> bool:
    if isinstance(v, (Polynomial, RationalFunction)):
        return v.is_zero()
    return v == 0


def _ratio(num, den, which: str):
    """num/den as an exact scalar, or as a rational function of the parameters."""
    if _is_zero(den):
        raise DegenerateError(f"{which} vanishes, invariant undefined", which=which)
    if isinstance(num, Polynomial) or isinstance(den, Polynomial):
        variables = (num if isinstance(num, Polynomial) else den).variables
        return RationalFunction.lift(num, variables) / RationalFunction.lift(den, variables)
    return _q(Fraction(num) / Fraction(den))


def _q(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


# -- binary quartic ----------------------------------------------------------


def quartic_classical_coeffs(P: NAryForm) -> QuarticClassicalCoeffs:
    _require(P, 2, 4, "quartic_classical_coeffs")
    c = P.coefficient
    return QuarticClassicalCoeffs(
        p0=c((0, 4)),
        p1=_scale(c((1, 3)), Fraction(1, 4)),
        p2=_scale(c((2, 2)), Fraction(1, 6)),
        p3=_scale(c((3, 1)), Fraction(1, 4)),
        p4=c((4, 0)),
    )


def quartic_J2_explicit(P: NAryForm):
    p0, p1, p2, p3, p4 = quartic_classical_coeffs(P).as_tuple()
    return _q(p0 * p4 - 4 * p1 * p3 + 3 * p2 * p2)


def quartic_J3_explicit(P: NAryForm):
    p0, p1, p2, p3, p4 = quartic_classical_coeffs(P).as_tuple()
    return _q(p0 * p2 * p4 - p0 * p3 * p3 - p1 * p1 * p4 + 2 * p1 * p2 * p3 - p2 * p2 * p2)


def _scale(v, c):
    if isinstance(v, Polynomial):
        return v.scale(c)
    return _q(Fraction(v) * c)


def quartic_J2_transvectant(P: NAryForm):
    _require(P, 2, 4, "quartic_J2")
    return _scale(transvectant([P, P], 4).scalar(), Fraction(1, J2_NORMALIZATION))


def quartic_J3_transvectant(P: NAryForm):
    _require(P, 2, 4, "quartic_J3")
    c = transvectant([P, P], 2)
    return _scale(transvectant([c, P], 4).scalar(), Fraction(1, J3_NORMALIZATION))


def _both(name, explicit, via_transvectant):
    if explicit != via_transvectant:
        raise PathMismatchError(f"{name}: explicit {explicit} != transvectant {via_transvectant}")
    return explicit


def quartic_J2(P: NAryForm):
    return _both("J2", quartic_J2_explicit(P), quartic_J2_transvectant(P))


def quartic_J3(P: NAryForm):
    return _both("J3", quartic_J3_explicit(P), quartic_J3_transvectant(P))


def quartic_discriminant(P: NAryForm):
    j2, j3 = quartic_J2(P), quartic_J3(P)
    return _q(256 * j2**3 - 6912 * j3**2)


def quartic_J(P: NAryForm):
    """GL2-invariant J2^3 / J3^2; DegenerateError when J3 = 0."""
    j2, j3 = quartic_J2(P), quartic_J3(P)
    return _ratio(j2**3, j3**2, "J3")


def quartic_is_regular(P: NAryForm) -> bool:
    """True iff J3 != 0 and J != 27."""
    if P.params:
        raise ValueError("regularity is only defined for forms with numeric coefficients")
    if quartic_J3(P) == 0:
        return False
    return quartic_J(P) != 27


def quartic_invariants(P: NAryForm) -> dict[str, InvariantReport]:
    j2, j3 = quartic_J2(P), quartic_J3(P)
    disc = _q(256 * j2**3 - 6912 * j3**2)
    out = {
        "J2": InvariantReport("J2", j2, "both"),
        "J3": InvariantReport("J3", j3, "both"),
        "discriminant": InvariantReport("discriminant", disc, "explicit"),
    }
    if _is_zero(j3):
        out["J"] = InvariantReport("J", None, "explicit", regular=False)
    else:
        J = _ratio(j2**3, j3**2, "J3")
        out["J"] = InvariantReport("J", J, "explicit", regular=None if P.params else J != 27)
    return out


# -- binary quintic -----------------------------------------------------------


def quintic_covariants(P: NAryForm, naive: bool = False) -> dict[str, NAryForm]:
    _require(P, 2, 5, "quintic invariants")
    T = transvectant_naive if naive else transvectant
    c21 = T([P, P], 4)
    c3 = T([P, c21], 2)
    c22 = T([c3, c3], 2)
    for name, form, deg in (("c21", c21, 2), ("c3", c3, 3), ("c22", c22, 2)):
        if form.degree != deg:
            raise AssertionError(f"{name} has degree {form.degree}, expected {deg}")
    return {"c21": c21, "c3": c3, "c22": c22}


def quintic_sl_invariants(P: NAryForm, naive: bool = False) -> dict[str, Any]:
    cov = quintic_covariants(P, naive)
    T = transvectant_naive if naive else transvectant
    c21, c22 = cov["c21"], cov["c22"]
    return {
        "J4": T([c21, c21], 2).scalar(),
        "J8": T([c21, c22], 2).scalar(),
        "J12": T([c22, c22], 2).scalar(),
    }


def quintic_invariants(P: NAryForm, naive: bool = False) -> dict[str, InvariantReport]:
    """J4, J8, J12 and, when defined, I1 = J8/J4^2 and I2 = J12/(J4 J8).

    A vanishing denominator leaves I1/I2 as None with ``regular=False``;
    use :func:`quintic_I1` / :func:`quintic_I2` to get a DegenerateError naming it.
    """
    path = "transvectant"
    sl = quintic_sl_invariants(P, naive)
    out = {k: InvariantReport(k, v, path) for k, v in sl.items()}
    j4, j8, j12 = sl["J4"], sl["J8"], sl["J12"]
    out["I1"] = InvariantReport("I1", None if _is_zero(j4) else _ratio(j8, j4**2, "J4"), path, regular=not _is_zero(j4))
    ok2 = not (_is_zero(j4) or _is_zero(j8))
    out["I2"] = InvariantReport("I2", _ratio(j12, j4 * j8, "J4*J8") if ok2 else None, path, regular=ok2)
    return out


def quintic_I1(P: NAryForm):
    sl = quintic_sl_invariants(P)
    return _ratio(sl["J8"], sl["J4"] ** 2, "J4")


def quintic_I2(P: NAryForm):
    sl = quintic_sl_invariants(P)
    if _is_zero(sl["J4"]):
        raise DegenerateError("J4 vanishes, I2 undefined", which="J4")
    return _ratio(sl["J12"], sl["J4"] * sl["J8"], "J8")


# -- ternary cubic -------------------------------------------------------------


def cubic_covariants(P: NAryForm, naive: bool = False) -> dict[str, NAryForm]:
    _require(P, 3, 3, "ternary cubic invariants")
    T = transvectant_naive if naive else transvectant
    c1 = T([P, P, P], 2)
    c2 = T([P, P, c1], 2)
    for name, form in (("c1", c1), ("c2", c2)):
        if form.degree != 3:
            raise AssertionError(f"{name} has degree {form.degree}, expected 3")
    return {"c1": c1, "c2": c2}


def cubic_sl_invariants(P: NAryForm, naive: bool = False) -> dict[str, Any]:
    cov = cubic_covariants(P, naive)
    T = transvectant_naive if naive else transvectant
    P2 = P**2
    return {
        "J1": T([P2, P2, P2], 6).scalar(),
        "J2": T([P, cov["c1"], cov["c2"]], 3).scalar(),
    }


def ternary_cubic_invariants(P: NAryForm, naive: bool = False) -> dict[str, InvariantReport]:
    sl = cubic_sl_invariants(P, naive)
    j1, j2 = sl["J1"], sl["J2"]
    out = {k: InvariantReport(k, v, "transvectant") for k, v in sl.items()}
    ok = not _is_zero(j1)
    out["J"] = InvariantReport("J", _ratio(j2**2, j1**3, "J1") if ok else None, "transvectant", regular=ok)
    return out


def cubic_J(P: NAryForm):
    sl = cubic_sl_invariants(P)
    return _ratio(sl["J2"] ** 2, sl["J1"] ** 3, "J1")


# -- dispatch by frame-DSL token ---------------------------------------------------

CATALOGS = {"quartic": (2, 4), "quintic": (2, 5), "ternary-cubic": (3, 3)}


def evaluate(name: str, P: NAryForm):
    """Evaluate a catalog invariant by its frame-DSL token."""
    if name not in SHAPES:
        raise KeyError(f"unknown catalog invariant {name!r}")
    n, k = SHAPES[name]
    _require(P, n, k, name)
    if name == "J2q":
        return quartic_J2(P)
    if name == "J3q":
        return quartic_J3(P)
    if name == "Jq":
        return quartic_J(P)
    if name == "discriminant":
        return quartic_discriminant(P)
    if name in ("J4", "J8", "J12"):
        return quintic_sl_invariants(P)[name]
    if name == "I1quintic":
        return quintic_I1(P)
    if name == "I2quintic":
        return quintic_I2(P)
    if name in ("J1c", "J2c"):
        return cubic_sl_invariants(P)[name[:2]]
    if name == "Jc":
        return cubic_J(P)
    raise KeyError(name)


def catalog_report(P: NAryForm, catalog: str) -> dict[str, InvariantReport]:
    if catalog not in CATALOGS:
        raise KeyError(f"unknown catalog {catalog!r}; expected one of {sorted(CATALOGS)}")
    n, k = CATALOGS[catalog]
    _require(P, n, k, f"catalog {catalog}")
    if catalog == "quartic":
        return quartic_invariants(P)
    if catalog == "quintic":
        return quintic_invariants(P)
    return ternary_cubic_invariants(P)
