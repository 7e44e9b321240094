"""Two fourth-order operators on the plane: equivalent under a change of variables, then not."""

import time

from diffinv.box import Box
from diffinv.diffop import DiffMap, LinearDiffOp, pushforward
from diffinv.natinv import equivalence_check, eval_frame, general_position_check, parse_frame

coords = ("x1", "x2")
A1 = LinearDiffOp.parse({"4,0": "1+x1", "2,2": "6", "0,4": "1", "0,0": "x2"}, coords)
box = Box.parse("x1:1:2,x2:0:1")
frame = parse_frame("Jq(sym), free", coords)

print("frame values:", [str(v) for v in eval_frame(frame, A1)])
cert = general_position_check(frame, A1, box)
print("general position:", cert.reason, "det =", cert.determinant)

phi = DiffMap.triangular(["x1", "x2 + 1/4*x1^2"], coords)
A2 = pushforward(A1, phi)
print("pushed operator:", A2)

t = time.perf_counter()
v = equivalence_check(A1, box, A2, phi.image_box(box), frame)
print(f"{v.verdict}: {v.reason} ({time.perf_counter() - t:.2f}s)")

v = equivalence_check(A1, box, A1 + LinearDiffOp.partial(coords, 0), box, frame)
print(f"{v.verdict}: separated by {v.separator['coordinate']}")

v = equivalence_check(A1, box, A1, Box.parse("x1:10:11,x2:0:1"), frame)
print(f"{v.verdict}: {v.reason}")
