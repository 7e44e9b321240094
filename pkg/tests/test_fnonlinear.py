import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffinv.box import Box
from diffinv.diffop import DiffMap, LinearDiffOp, pushforward, transport_function
from diffinv.errors import DegenerateFrameError, DimensionError, ParseError, ZeroDenominatorError
from diffinv.fnonlinear import (
    AdjustedTriple,
    extended_equivalence_check,
    extended_model_map,
    make_foperator,
    nonlinear_apply,
    pushforward_extended,
    restrict_at_function,
    verify_adjusted,
    vertical_derivative,
)
from diffinv.natinv import CompiledModel, Tolerances, coordinate_frame, eval_invariant, parse_invariant
from diffinv.polycore import RationalFunction, parse_expr

from conftest import random_operator
from test_diffop import random_map

X12 = ("x1", "x2")
XU = ("x1", "x2", "u")
SCENARIO_B = {"4,0": "1+x1", "2,2": "6", "0,4": "1", "0,0": "x2*u"}
BOX_B = Box.parse("x1:1:2,x2:0:1,u:1:2")
FRAME_B = "u, Jq(sym), free/u"


def rf(text, ring=X12):
    return parse_expr(text, ring)


def scenario_b_triple(coeffs=SCENARIO_B, box=BOX_B):
    A = make_foperator(coeffs, X12)
    return AdjustedTriple(A, box, AdjustedTriple.parse_frame(FRAME_B, X12))


def random_foperator(rng, k=2):
    return random_operator(rng, X12, k, params=("u",))


# -- restriction and the nonlinear action ------------------------------------------------


def test_restrict_examples():
    A = make_foperator({"1,0": "u*x1", "0,2": "1"}, X12)
    Af = restrict_at_function(A, rf("x2"))
    assert Af.coeff((1, 0)) == rf("x2*x1")
    assert Af.params == ()
    B = make_foperator({"2,0": "x1", "0,0": "x2^2"}, X12)
    for f in ("x1", "1/(1+x2)", "x1*x2^3"):
        assert restrict_at_function(B, rf(f)) == LinearDiffOp.parse({"2,0": "x1", "0,0": "x2^2"}, X12)
    with pytest.raises(ZeroDenominatorError):
        restrict_at_function(make_foperator({"1,0": "1/(1-u)"}, X12), rf("1"))


def test_make_foperator_reserves_u():
    with pytest.raises(DimensionError):
        make_foperator({"1,0": "1"}, ("x1", "u"))
    with pytest.raises(DimensionError):
        restrict_at_function(LinearDiffOp.parse({"1,0": "1"}, X12), rf("x1"))


def test_nonlinear_apply_examples():
    burgers = make_foperator({"1,0": "u"}, X12)
    assert nonlinear_apply(burgers, rf("x1")) == rf("x1")
    assert nonlinear_apply(burgers, rf("x1^2")) == rf("2*x1^3")
    lin = {"2,0": "x2", "0,1": "1", "0,0": "x1"}
    f = rf("x1^3 + x2/(2 - x1)")
    assert nonlinear_apply(make_foperator(lin, X12), f) == LinearDiffOp.parse(lin, X12).apply(f)


def test_nonlinear_apply_additive_in_u_independent_part():
    rng = random.Random(11)
    for _ in range(10):
        A = random_foperator(rng)
        B = random_operator(rng, X12, 2)
        f = rf("x1*x2 + 1")
        lifted = B.with_params(("u",))
        assert nonlinear_apply(A + lifted, f) == nonlinear_apply(A, f) + B.apply(f)


# -- vertical derivative ---------------------------------------------------------------------


def test_vertical_derivative_examples():
    free = parse_invariant("free", XU)
    A = make_foperator({"1,0": "1", "0,0": "u^2"}, X12)
    assert vertical_derivative(free, A, rf("x1")) == rf("2*x1")
    B = make_foperator({"2,0": "1+x1", "0,0": "x2"}, X12)
    for text in ("free", "box(free)", "free^2 + x1"):
        e = parse_invariant(text, XU)
        assert vertical_derivative(e, B, rf("x1*x2")).is_zero()


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_vertical_derivative_is_a_derivation(seed):
    rng = random.Random(seed)
    A = random_foperator(rng) + make_foperator({"0,0": "u*x1 + 1"}, X12)
    f = rf(rng.choice(["x1", "x2^2 + 1", "x1*x2 - 3"]))
    d = lambda text: vertical_derivative(parse_invariant(text, XU), A, f)
    g, h = "free", "box(free)"
    restricted = restrict_at_function(A, f)
    gv, hv = restricted.free_term, restricted.apply(restricted.free_term)
    assert d(f"{g} + {h}") == d(g) + d(h)
    assert d(f"({g})*({h})") == d(g) * hv + gv * d(h)
    assert d(f"3*{g}") == d(g) * 3


# -- adjusted triples -----------------------------------------------------------------------


def test_triple_frame_parsing_and_json():
    t = scenario_b_triple()
    assert t.frame_string() == "u, " + ", ".join(str(e) for e in t.frame)
    back = AdjustedTriple.from_json(t.to_json())
    assert back.operator == t.operator and back.frame == t.frame and back.box == t.box
    with pytest.raises(ParseError):
        AdjustedTriple.parse_frame("Jq, free/u", X12)
    with pytest.raises(DimensionError):
        AdjustedTriple(t.operator, BOX_B, t.frame[:1])


def test_verify_adjusted_examples():
    cert = verify_adjusted(scenario_b_triple())
    assert cert.ok and cert.reason == "ok"
    assert cert.determinant == rf("(x1^4 - 48*x1^2 - 128*x1)/x1^4", XU)
    A = make_foperator(SCENARIO_B, X12)
    bad = AdjustedTriple(A, BOX_B, AdjustedTriple.parse_frame("u, Jq, u*x2", X12))
    cert = verify_adjusted(bad)
    assert not cert.ok and cert.reason == "u_dependent" and "slot 2" in cert.detail
    plain = make_foperator({"4,0": "1+x1", "2,2": "6", "0,4": "1", "0,0": "x2"}, X12)
    cert = verify_adjusted(AdjustedTriple(plain, BOX_B, AdjustedTriple.parse_frame("u, Jq, free", X12)))
    assert cert.ok
    flat = AdjustedTriple(plain, BOX_B, AdjustedTriple.parse_frame("u, Jq, Jq^2", X12))
    assert verify_adjusted(flat).reason == "identically_zero"


def test_extended_model_rows():
    t = scenario_b_triple()
    fp = extended_model_map(t, m=12, seed=2)
    assert fp.header[:6] == ["x1", "x2", "u", "I0", "I1", "I2"]
    zero = fp.alphas.index((0, 0))
    for p, b, y in fp.rows:
        x1, x2, u = p
        assert b[0] == u
        assert b[1] == pytest.approx((4 + x1) ** 3 / x1**2, rel=1e-14)
        assert b[2] == pytest.approx(x2, rel=1e-14, abs=1e-15)
        assert y[zero] == pytest.approx(x2 * u, rel=1e-14, abs=1e-15)
    with pytest.raises(DegenerateFrameError):
        extended_model_map(AdjustedTriple(t.operator, BOX_B, AdjustedTriple.parse_frame("u, Jq, u*x2", X12)))


def test_extended_model_matches_restriction_at_constant_u():
    # on the slice u = u0 the extended model is the model of the restriction at the constant u0
    t = scenario_b_triple()
    fp = extended_model_map(t, m=6, seed=8)
    jq = parse_invariant("Jq", X12)
    for p, b, y in fp.rows:
        u0 = Fraction(p[2])
        A0 = restrict_at_function(t.operator, RationalFunction.constant(u0, X12))
        cm = CompiledModel.build(A0, [eval_invariant(jq, A0), A0.free_term / u0])
        b2, y2 = cm.row(p[:2])
        assert np.allclose(b[1:], b2, rtol=1e-13) and np.allclose(y, y2, rtol=1e-12, atol=1e-14)


def test_u_independent_operator_projects_to_linear_model():
    coeffs = {"2,0": "1+x1", "1,1": "x2", "0,2": "2", "0,0": "x2"}
    t = AdjustedTriple(make_foperator(coeffs, X12), BOX_B, AdjustedTriple.parse_frame("u, x1, x2", X12))
    fp = extended_model_map(t, m=10, seed=5)
    lin = LinearDiffOp.parse(coeffs, X12)
    cm = CompiledModel.build(lin, coordinate_frame(lin))
    assert cm.alphas == fp.alphas
    for p, b, y in fp.rows:
        b2, y2 = cm.row(p[:2])
        assert list(b[1:]) == list(b2) and list(y) == list(y2)


# -- naturality ---------------------------------------------------------------------------


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_restriction_naturality(seed):
    rng = random.Random(seed)
    A = random_foperator(rng)
    phi = random_map(rng, X12)
    f = rf(rng.choice(["x1", "x2^2 + x1", "x1*x2 + 2", "3"]))
    try:
        lhs = restrict_at_function(pushforward_extended(A, phi), transport_function(f, phi))
        rhs_op = restrict_at_function(A, f)
    except ZeroDenominatorError:
        return
    assert lhs == pushforward(rhs_op, phi)
    assert nonlinear_apply(pushforward_extended(A, phi), transport_function(f, phi)) == transport_function(
        nonlinear_apply(A, f), phi
    )


# -- Scenario B ---------------------------------------------------------------------------

PHI_B = DiffMap.triangular(["x1", "x2 + 1/4*x1^2"], X12)


def pushed_triple(t, phi):
    B = pushforward_extended(t.operator, phi)
    xbox = phi.image_box(Box.from_intervals({n: (t.box.lower[i], t.box.upper[i]) for i, n in enumerate(t.box.names) if n != "u"}))
    ui = t.box.names.index("u")
    box = Box.from_intervals({**{n: (xbox.lower[i], xbox.upper[i]) for i, n in enumerate(xbox.names)}, "u": (t.box.lower[ui], t.box.upper[ui])})
    return AdjustedTriple(B, box, t.frame)


def test_scenario_b_equivalent_and_distinct():
    t1 = scenario_b_triple()
    t2 = pushed_triple(t1, PHI_B)
    assert verify_adjusted(t2).ok
    v = extended_equivalence_check(t1, t2)
    assert v.verdict == "Equivalent" and v.matched >= 0.95 * v.samples
    perturbed = scenario_b_triple({**SCENARIO_B, "1,0": "u"})
    v = extended_equivalence_check(t1, perturbed)
    assert v.verdict == "Distinct" and v.separator["coordinate"].startswith("Y_(")
    far = scenario_b_triple(box=Box.parse("x1:1:2,x2:0:1,u:5:6"))
    v = extended_equivalence_check(t1, far, Tolerances(samples=16))
    assert v.verdict == "Inconclusive"


def test_extended_check_requires_same_frame():
    t1 = scenario_b_triple()
    other = AdjustedTriple(t1.operator, BOX_B, AdjustedTriple.parse_frame("u, Jq, free/u + 1", X12))
    with pytest.raises(ValueError):
        extended_equivalence_check(t1, other)
