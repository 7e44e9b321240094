import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffinv.box import Box
from diffinv.catalog import evaluate
from diffinv.diffop import (
    DiffMap,
    LinearDiffOp,
    SymbolField,
    apply_op,
    compose,
    invert_map,
    pullback_function,
    pushforward,
    symbol,
    symbol_form_at,
    transport_function,
)
from diffinv.errors import PoleError, SingularMatrixError
from diffinv.polycore import Point, Polynomial, RationalFunction, parse_expr
from diffinv.polycore.multiindex import multi_indices_upto
from diffinv.transvect import NAryForm

from conftest import random_operator

X12 = ("x1", "x2")
X123 = ("x1", "x2", "x3")


def op(coeffs, coords=X12, params=()):
    return LinearDiffOp.parse(coeffs, coords, params)


def rf(text, ring=X12):
    return parse_expr(text, ring)


def monomials(coords, degree):
    return [RationalFunction.lift(Polynomial.monomial(a, coords), coords) for a in multi_indices_upto(len(coords), degree)]


SCENARIO_A = {"4,0": "1+x1", "2,2": "6", "0,4": "1", "0,0": "x2"}


def random_map(rng: random.Random, coords):
    n = len(coords)
    if rng.random() < 0.5:
        while True:
            M = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            b = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)]
            try:
                return DiffMap.affine(M, b, coords)
            except SingularMatrixError:
                continue
    comps = []
    for i, c in enumerate(coords):
        text = f"{rng.choice([1, 2, -1, Fraction(1, 2)])}*{c}"
        for j in range(i):
            text += f" + {rng.randint(-2, 2)}*{coords[j]}^{rng.randint(1, 2)}"
        comps.append(text)
    return DiffMap.triangular(comps, coords)


# -- apply / compose / symbol ---------------------------------------------------------


def test_apply_examples():
    A = op({"2,0": "1", "0,1": "x1", "0,0": "x1+x2"})
    assert apply_op(A, RationalFunction.constant(1, X12)) == rf("x1 + x2")
    assert apply_op(op({"2,0": "1"}), rf("x1^2")) == RationalFunction.constant(2, X12)
    assert apply_op(op({"1,0": "1"}), rf("1/(1-x1)")) == rf("1/(1-x1)^2")


def test_compose_examples():
    d1 = LinearDiffOp.partial(X12, 0)
    d2 = LinearDiffOp.partial(X12, 1)
    x1 = LinearDiffOp.multiplication(rf("x1"), X12)
    assert compose(d1, x1) == op({"1,0": "x1", "0,0": "1"})
    A = op(SCENARIO_A)
    assert compose(A, LinearDiffOp.identity(X12)) == A
    assert compose(d1, d2) == op({"1,1": "1"})


@given(st.integers(0, 10**6))
def test_compose_matches_sequential_application(seed):
    rng = random.Random(seed)
    A = random_operator(rng, X12, rng.randint(0, 2), rational=True)
    B = random_operator(rng, X12, rng.randint(0, 2), rational=True)
    AB = compose(A, B)
    assert AB.order <= A.order + B.order
    for g in monomials(X12, A.order + B.order + 2):
        assert apply_op(AB, g) == apply_op(A, apply_op(B, g))


def test_symbol_examples_and_linearity():
    A = op({"2,0": "1", "0,1": "x1"})
    assert symbol(A).coeffs == {(2, 0): RationalFunction.constant(1, X12)}
    B = op({"2,0": "x2", "1,1": "3", "0,0": "1"})
    assert symbol(A + B) == symbol(A) + symbol(B)
    assert symbol(op({"1,0": "1"}), 2).is_zero()


def test_symbol_form_at_examples():
    sigma = symbol(op(SCENARIO_A))
    assert symbol_form_at(sigma, (0, 5)) == NAryForm.parse("x^4 + 6*x^2*y^2 + y^4", ("x", "y"))
    assert symbol_form_at(sigma, Point((1, 0))) == NAryForm.parse("2*x^4 + 6*x^2*y^2 + y^4", ("x", "y"))
    with pytest.raises(PoleError):
        symbol_form_at(SymbolField(X12, 1, {(1, 0): rf("1/x1")}), (0, 1))


def test_symbol_as_form_clears_denominators():
    sigma = symbol(op({"2,0": "1/x1", "0,2": "x2/(x1+1)"}))
    F, D = sigma.as_form()
    assert F.n == 2 and F.degree == 2
    for p in [(1, 2), (3, 5)]:
        at = symbol_form_at(sigma, p)
        for alpha in [(2, 0), (1, 1), (0, 2)]:
            assert at.coefficient(alpha) * D.eval(p) == F.coefficient(alpha).eval(p)


# -- maps ------------------------------------------------------------------------------


def test_invert_map_examples():
    phi = DiffMap.affine([[1, 2], [0, 3]], [1, -1], X12)
    inv = invert_map(phi)
    for p in [(0, 0), (2, 5), (Fraction(1, 3), -4)]:
        assert inv(phi(p)) == tuple(Fraction(c) for c in p)
    tri = DiffMap.triangular(["x1", "x2 + x1^3 - x1"], X12)
    assert tri.inverse[1] == rf("x2 - x1^3 + x1").as_polynomial()
    with pytest.raises(SingularMatrixError):
        DiffMap.affine([[1, 2], [2, 4]], [0, 0], X12)
    with pytest.raises(ValueError):
        DiffMap.triangular(["x1 + x2", "x2"], X12)


def test_map_composition():
    rng = random.Random(3)
    phi, psi = random_map(rng, X12), random_map(rng, X12)
    both = phi.then(psi)
    p = (Fraction(1, 2), Fraction(-3, 4))
    assert both(p) == psi(phi(p))


def test_image_box_encloses_images():
    phi = DiffMap.triangular(["x1", "x2 + 1/4*x1^2"], X12)
    b = Box.parse("x1:1:2,x2:0:1")
    img = phi.image_box(b)
    assert str(img) == "x1:1:2,x2:1/4:2"
    for p in b.grid(5):
        assert img.contains([float(v) for v in phi(p)])


# -- pushforward -------------------------------------------------------------------------


def test_pushforward_examples():
    x = ("x",)
    phi = DiffMap.affine([[2]], [0], x)
    assert pushforward(LinearDiffOp.partial(x, 0), phi) == LinearDiffOp.parse({"1": "2"}, x)
    tri = DiffMap.triangular(["x1", "x2 + x1^2"], X12)
    assert pushforward(LinearDiffOp.partial(X12, 0), tri) == op({"1,0": "1", "0,1": "2*x1"})
    A = op(SCENARIO_A)
    assert pushforward(A, DiffMap.identity(X12)) == A


@given(st.integers(0, 10**6))
def test_pushforward_apply_compatibility(seed):
    rng = random.Random(seed)
    A = random_operator(rng, X12, rng.randint(1, 3), rational=True)
    phi = random_map(rng, X12)
    B = pushforward(A, phi)
    assert B.order == A.order
    for g in monomials(X12, 4)[::2]:
        assert apply_op(B, g) == transport_function(apply_op(A, pullback_function(g, phi)), phi)


@given(st.integers(0, 10**6))
def test_functoriality(seed):
    rng = random.Random(seed)
    coords = X123 if rng.random() < 0.3 else X12
    k = rng.randint(1, 2 if len(coords) == 3 else 4)
    A = random_operator(rng, coords, k, density=0.3)
    phi, psi = random_map(rng, coords), random_map(rng, coords)
    assert pushforward(pushforward(A, phi), psi) == pushforward(A, phi.then(psi))


@given(st.integers(0, 10**6))
def test_symbol_naturality_via_gl_invariant(seed):
    rng = random.Random(seed)
    A = op(SCENARIO_A)
    phi = random_map(rng, X12)
    B = pushforward(A, phi)
    p = (Fraction(rng.randint(1, 9), 4), Fraction(rng.randint(-4, 4), 3))
    before = symbol_form_at(symbol(A), p)
    after = symbol_form_at(symbol(B), phi(p))
    assert evaluate("Jq", after) == evaluate("Jq", before)


def test_pushforward_preserves_order_filtration():
    rng = random.Random(11)
    A = random_operator(rng, X12, 3)
    low = random_operator(rng, X12, 1)
    phi = random_map(rng, X12)
    assert symbol(pushforward(A + low, phi)) == symbol(pushforward(A, phi))


def test_params_are_not_differentiated():
    A = op({"1,0": "u*x1", "0,0": "u^2"}, params=("u",))
    ring = A.ring
    assert apply_op(A, rf("x1*u", ring)) == rf("u^2*x1 + u^3*x1", ring)
    phi = DiffMap.triangular(["x1", "x2 + x1^2"], X12)
    B = pushforward(A, phi)
    assert B.coeff((0, 0)) == rf("u^2", ring)


# -- JSON --------------------------------------------------------------------------------


def test_operator_json_roundtrip():
    A = op(SCENARIO_A)
    data = A.to_json()
    assert data == {"variables": ["x1", "x2"], "order": 4, "coefficients": {"4,0": "x1 + 1", "2,2": "6", "0,4": "1", "0,0": "x2"}}
    assert LinearDiffOp.from_json(data) == A


def test_operator_json_validation():
    with pytest.raises(ValueError):
        LinearDiffOp.from_json({"variables": ["x1", "x2"], "order": 2, "coefficients": {"3,0": "1"}})
    with pytest.raises(ValueError):
        LinearDiffOp.from_json({"variables": ["x1", "x2"], "order": 2, "coefficients": {"1,0": "1"}})
    with pytest.raises(ValueError):
        LinearDiffOp.from_json({"variables": ["x1", "x2"], "coefficients": {}})
