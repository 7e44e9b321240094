"""An operator whose free coefficient depends on the unknown's value u."""

from diffinv.box import Box
from diffinv.diffop import DiffMap
from diffinv.fnonlinear import (
    AdjustedTriple,
    extended_equivalence_check,
    make_foperator,
    nonlinear_apply,
    pushforward_extended,
    verify_adjusted,
)
from diffinv.polycore import parse_expr

coords = ("x1", "x2")
coeffs = {"4,0": "1+x1", "2,2": "6", "0,4": "1", "0,0": "x2*u"}
A = make_foperator(coeffs, coords)
print("A acting on x1*x2 through its graph:", nonlinear_apply(A, parse_expr("x1*x2", coords)))

frame = AdjustedTriple.parse_frame("u, Jq(sym), free/u", coords)
t1 = AdjustedTriple(A, Box.parse("x1:1:2,x2:0:1,u:1:2"), frame)
cert = verify_adjusted(t1)
print("adjusted:", cert.reason, "det =", cert.determinant)

phi = DiffMap.triangular(["x1", "x2 + 1/4*x1^2"], coords)
xbox = phi.image_box(Box.parse("x1:1:2,x2:0:1"))
t2 = AdjustedTriple(pushforward_extended(A, phi), Box.parse(f"{xbox},u:1:2"), frame)
print(extended_equivalence_check(t1, t2).verdict)

t3 = AdjustedTriple(make_foperator({**coeffs, "1,0": "u"}, coords), t1.box, frame)
v = extended_equivalence_check(t1, t3)
print(v.verdict, "separated by", v.separator["coordinate"])
