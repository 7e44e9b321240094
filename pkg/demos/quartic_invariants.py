"""Binary quartic invariants: normalizations, the degenerate witness and orbit separation."""

from diffinv.catalog import quartic_invariants
from diffinv.transvect import NAryForm, transvectant

for text in ["x^4 + 6*x^2*y^2 + y^4", "(x^2 - y^2)^2", "x^4 + x^3*y + y^4"]:
    P = NAryForm.parse(text, ("x", "y"))
    report = quartic_invariants(P)
    values = ", ".join(f"{k}={r.value}" for k, r in report.items())
    print(f"{text:24s} {values}  regular={report['J'].regular}")

# {P,P}_4 and {{P,P}_2,P}_4 are fixed multiples of J2 and J3
P = NAryForm.parse("3*x^4 - x^3*y + 2*x*y^3 + 5*y^4", ("x", "y"))
r = quartic_invariants(P)
print("{P,P}_4 / J2 =", transvectant([P, P], 4).scalar() / r["J2"].value)
print("{{P,P}_2,P}_4 / J3 =", transvectant([transvectant([P, P], 2), P], 4).scalar() / r["J3"].value)
