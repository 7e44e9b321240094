"""Operators whose coefficients depend rationally on the unknown's value u.

Such an operator is stored as a ``LinearDiffOp`` with the single parameter
``u``: derivatives act on the coordinates only, so it commutes with
multiplication by u by construction. It acts on a function f through its
restriction to the graph u = f(x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .box import Box
from .diffop import DiffMap, LinearDiffOp, pushforward
from .errors import DegenerateFrameError, DimensionError, ParseError
from .natinv.core import Certificate, eval_frame, eval_invariant, grid_nonvanishing
from .natinv.equiv import Tolerances, Verdict, match_models
from .natinv.expr import Expr, Var, frame_to_str, parse_frame
from .natinv.model import CompiledModel, ModelFingerprint, sample_rows
from .polycore import RationalFunction, jacobian_det

U = "u"
FOperator = LinearDiffOp


def make_foperator(coeffs: dict, coords: Sequence[str]) -> LinearDiffOp:
    """Parse ``{"2,0": "1+u*x1", ...}`` into an operator over (coords, u)."""
    if U in coords:
        raise DimensionError("'u' is reserved for the value of the unknown")
    return LinearDiffOp.parse(coeffs, coords, (U,))


def _require_u(A: LinearDiffOp) -> None:
    if A.params != (U,):
        raise DimensionError(f"expected an operator over (coordinates, u); parameters are {A.params}")


def _fresh(name: str, taken: Sequence[str]) -> str:
    while name in taken:
        name += "_"
    return name


def restrict_at_function(A: LinearDiffOp, f) -> LinearDiffOp:
    """A_f: coefficients a(x, f(x)), a linear operator in x."""
    _require_u(A)
    coords = A.coords
    f = RationalFunction.lift(f, coords)
    mapping = {c: RationalFunction.var(c, coords) for c in coords}
    mapping[U] = f
    # ZeroDenominatorError propagates when the graph lies in a pole set
    return LinearDiffOp(coords, {a: c.substitute(mapping, coords) for a, c in A.coeffs.items()})


def nonlinear_apply(A: LinearDiffOp, f) -> RationalFunction:
    """A_w(f) = A_f(f)."""
    Af = restrict_at_function(A, f)
    return Af.apply(RationalFunction.lift(f, A.coords))


def vertical_derivative(e: Expr, A: LinearDiffOp, f) -> RationalFunction:
    """d/d eps of e(A restricted at f + eps), at eps = 0, computed exactly."""
    _require_u(A)
    coords = A.coords
    eps = _fresh("eps", coords)
    ring = coords + (eps,)
    shifted = RationalFunction.lift(f, coords).change_ring(ring) + RationalFunction.var(eps, ring)
    mapping = {c: RationalFunction.var(c, ring) for c in coords}
    mapping[U] = shifted
    Aeps = LinearDiffOp(coords, {a: c.substitute(mapping, ring) for a, c in A.coeffs.items()}, (eps,))
    value = eval_invariant(e, Aeps).derive(eps)
    at_zero = {c: RationalFunction.var(c, coords) for c in coords}
    at_zero[eps] = RationalFunction.constant(0, coords)
    return value.substitute(at_zero, coords)


def pushforward_extended(A: LinearDiffOp, phi: DiffMap) -> LinearDiffOp:
    """Push by (x, u) -> (phi(x), u); u is untouched by the coordinate change."""
    _require_u(A)
    return pushforward(A, phi)


@dataclass
class AdjustedTriple:
    """Operator over (x, u), a box in (x, u), and the frame I_1..I_n.

    The u slot is implicit and always first in the extended base.
    """

    operator: LinearDiffOp
    box: Box
    frame: tuple[Expr, ...]

    def __post_init__(self):
        _require_u(self.operator)
        self.box = self.box.ordered(self.operator.ring)
        self.frame = tuple(self.frame)
        if len(self.frame) != self.operator.n:
            raise DimensionError(f"need {self.operator.n} frame invariants besides u, got {len(self.frame)}")

    @classmethod
    def parse_frame(cls, text: str, coords: Sequence[str]) -> tuple[Expr, ...]:
        """Frame strings list u first, e.g. ``"u, Jq(sym), free/u"``."""
        items = parse_frame(text, coords, (U,))
        if not items or items[0] != Var(U, coordinate=False):
            raise ParseError("an extended frame must start with the slot 'u'", 0, text)
        return items[1:]

    def frame_string(self) -> str:
        return "u, " + frame_to_str(self.frame)

    def to_json(self) -> dict:
        out = self.operator.to_json()
        out["frame"] = self.frame_string()
        out["box"] = str(self.box)
        return out

    @classmethod
    def from_json(cls, data) -> "AdjustedTriple":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            coords = list(data["variables"])
            A = make_foperator(dict(data["coefficients"]), coords)
            order = int(data["order"])
            frame = cls.parse_frame(data["frame"], coords)
            box = Box.parse(data["box"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed triple JSON: {exc}") from exc
        if A.order != order:
            raise ValueError(f"declared order {order} but coefficients have order {A.order}")
        return cls(A, box, frame)


def verify_adjusted(triple: AdjustedTriple, per_axis: int = 9) -> Certificate:
    """u-independence of each frame invariant, and general position of (u, I) on the box grid."""
    A = triple.operator
    try:
        inv = eval_frame(triple.frame, A)
    except (ArithmeticError, ZeroDivisionError) as exc:
        return Certificate(False, "degenerate", detail=str(exc), grid=per_axis)
    for i, I in enumerate(inv):
        if not I.derive(U).is_zero():
            return Certificate(
                False, "u_dependent", detail=f"frame slot {i + 1} ({triple.frame[i]}) depends on u", grid=per_axis
            )
    base = [RationalFunction.var(U, A.ring)] + inv
    d = jacobian_det(base, list(A.coords) + [U])
    if d.is_zero():
        return Certificate(False, "identically_zero", d, grid=per_axis)
    reason, witness, failure = grid_nonvanishing(d, triple.box, per_axis)
    return Certificate(reason == "ok", reason, d, witness, failure, per_axis)


def _compiled(triple: AdjustedTriple) -> CompiledModel:
    A = triple.operator
    u = RationalFunction.var(U, A.ring)
    return CompiledModel.build(A, triple.frame, pinned_base=[u], pinned={A.ring.index(U): 0})


def extended_model_map(triple: AdjustedTriple, m: int = 64, seed: int = 0, per_axis: int = 9, jobs: int = 1) -> ModelFingerprint:
    """Rows (x, u; u, I_1..I_n; J_alpha) with J_alpha taken on the u-slice through each sample."""
    cert = verify_adjusted(triple, per_axis)
    if not cert.ok:
        raise DegenerateFrameError(f"triple is not adjusted on its box: {cert.reason}", cert)
    model = _compiled(triple)
    rows, rejections = sample_rows(model, triple.box, m, seed, jobs)
    A = triple.operator
    return ModelFingerprint(
        variables=A.ring,
        base_names=("I0",) + tuple(f"I{i + 1}" for i in range(A.n)),
        alphas=model.alphas,
        rows=rows,
        frame=triple.frame_string(),
        box=triple.box,
        seed=seed,
        rejections=rejections,
        certificate=cert.to_json(),
        config={"grid_per_axis": per_axis},
    )


def extended_equivalence_check(t1: AdjustedTriple, t2: AdjustedTriple, tol: Tolerances | None = None) -> Verdict:
    """Model comparison in the n+1 base coordinates (u, I); u is matched exactly."""
    tol = tol or Tolerances()
    if t1.frame != t2.frame:
        raise ValueError("both triples must use the same frame expressions")
    if t1.operator.coords != t2.operator.coords or t1.operator.order != t2.operator.order:
        raise DimensionError("operators must share coordinates and order")
    certs = []
    for t in (t1, t2):
        cert = verify_adjusted(t, tol.grid)
        if not cert.ok:
            raise DegenerateFrameError(f"triple is not adjusted: {cert.reason}", cert)
        certs.append(cert.to_json())
    config = {
        "frame": t1.frame_string(),
        "box1": str(t1.box),
        "box2": str(t2.box),
        "tolerances": tol.to_json(),
        "certificates": certs,
    }
    return match_models(_compiled(t1), t1.box, _compiled(t2), t2.box, tol, config)


__all__ = [
    "AdjustedTriple",
    "FOperator",
    "extended_equivalence_check",
    "extended_model_map",
    "make_foperator",
    "nonlinear_apply",
    "pushforward_extended",
    "restrict_at_function",
    "verify_adjusted",
    "vertical_derivative",
]
