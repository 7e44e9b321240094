"""Evaluation of invariant expressions on an operator, and frame calculus."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .. import catalog
from ..box import Box
from ..diffop import LinearDiffOp, SymbolField
from ..errors import DegenerateError, DimensionError, PoleError, SingularMatrixError
from ..polycore import RationalFunction, jacobian_det, multi_factorial, solve_linear
from ..polycore.multiindex import multi_indices, multi_indices_upto, sub as mi_sub, sub_indices
from .expr import BinOp, BoxApply, CatalogInv, Const, Expr, FreeTerm, Neg, Pow, Tresse, Var, frame_to_str

Frame = Sequence[Expr]


class _Evaluator:
    """Memoizing evaluator bound to one operator."""

    def __init__(self, A: LinearDiffOp):
        self.A = A
        self.memo: dict = {}
        self._symbol_form = None

    def symbol_form(self):
        if self._symbol_form is None:
            self._symbol_form = self.A.symbol().as_form()
        return self._symbol_form

    def const(self, v) -> RationalFunction:
        return RationalFunction.constant(v, self.A.ring)

    def __call__(self, e: Expr) -> RationalFunction:
        got = self.memo.get(e)
        if got is None:
            got = self.memo[e] = self._eval(e)
        return got

    def _eval(self, e: Expr) -> RationalFunction:
        A = self.A
        if isinstance(e, Const):
            return self.const(e.value)
        if isinstance(e, Var):
            if e.name not in A.ring:
                raise DimensionError(f"{e.name!r} is not a variable of the operator ring {A.ring}")
            return RationalFunction.var(e.name, A.ring)
        if isinstance(e, FreeTerm):
            return A.free_term
        if isinstance(e, BoxApply):
            return A.apply(self(e.arg))
        if isinstance(e, CatalogInv):
            return self._catalog(e.name)
        if isinstance(e, Tresse):
            if e.frame is None:
                raise ValueError(f"unbound tresse in {e}")
            return self.tresse(self(e.arg), e.frame)[e.slot]
        if isinstance(e, Neg):
            return -self(e.arg)
        if isinstance(e, Pow):
            base = self(e.base)
            if e.exp < 0 and base.is_zero():
                raise DegenerateError(f"{e.base} vanishes identically", which=str(e.base))
            return base**e.exp
        if isinstance(e, BinOp):
            a, b = self(e.left), self(e.right)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if b.is_zero():
                raise DegenerateError(f"{e.right} vanishes identically", which=str(e.right))
            return a / b
        raise TypeError(f"unknown expression node {e!r}")

    def _catalog(self, name: str) -> RationalFunction:
        A = self.A
        n, k = catalog.SHAPES[name]
        if (A.n, A.order) != (n, k):
            raise DimensionError(f"{name} needs an operator with n={n}, order {k}; got n={A.n}, order {A.order}")
        form, den = self.symbol_form()
        value = catalog.evaluate(name, form)
        value = RationalFunction.lift(value, A.ring)
        weight = catalog.WEIGHTS[name]
        return value / den**weight if weight else value

    def tresse(self, f: RationalFunction, frame: Frame) -> list[RationalFunction]:
        A = self.A
        if len(frame) != A.n:
            raise DimensionError(f"frame has {len(frame)} entries, operator dimension is {A.n}")
        inv = [self(e) for e in frame]
        # rows: d/dx_j; columns: frame slots
        m = [[I.derive(j) for I in inv] for j in range(A.n)]
        grad = [f.derive(j) for j in range(A.n)]
        try:
            return solve_linear(m, grad)
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"frame ({frame_to_str(frame)}) is not in general position") from exc


def eval_invariant(e: Expr, A: LinearDiffOp) -> RationalFunction:
    """Restriction of the invariant ``e`` to the operator ``A``, exact."""
    return _Evaluator(A)(e)


def eval_frame(frame: Frame, A: LinearDiffOp) -> list[RationalFunction]:
    ev = _Evaluator(A)
    return [ev(e) for e in frame]


def box_apply(A: LinearDiffOp, g) -> RationalFunction:
    return A.apply(g)


def _frame_values(frame, A: LinearDiffOp) -> list[RationalFunction]:
    if frame and isinstance(frame[0], RationalFunction):
        return [RationalFunction.lift(f, A.ring) for f in frame]
    return eval_frame(frame, A)


def j_alpha(A: LinearDiffOp, frame, alpha: Sequence[int]) -> RationalFunction:
    """(1/alpha!) A(I_1^alpha_1 ... I_n^alpha_n); ``frame`` holds expressions or their values."""
    alpha = tuple(alpha)
    if len(alpha) != A.n:
        raise DimensionError(f"multi-index {alpha} does not match dimension {A.n}")
    inv = _frame_values(frame, A)
    return _j_alpha_values(A, inv, alpha)


def _j_alpha_values(A: LinearDiffOp, inv: Sequence[RationalFunction], alpha) -> RationalFunction:
    prod = RationalFunction.constant(1, A.ring)
    for I, a in zip(inv, alpha):
        if a:
            prod = prod * I**a
    return A.apply(prod) / multi_factorial(alpha)


def all_j_alpha(A: LinearDiffOp, frame, k: int | None = None) -> dict:
    """J_alpha for every |alpha| <= k, in graded order."""
    k = A.order if k is None else k
    inv = _frame_values(frame, A)
    return {alpha: _j_alpha_values(A, inv, alpha) for alpha in multi_indices_upto(A.n, k)}


def symbol_j_alpha(sigma: SymbolField, frame: Sequence, alpha: Sequence[int]) -> RationalFunction:
    """Full contraction of the symbol with dh_1^alpha_1 ... dh_n^alpha_n.

    Permanent-sum convention: the symbol monomial u_beta d^beta pairs with the
    covector product p(t) = prod_i (dh_i . t)^alpha_i as u_beta * beta! * [t^beta] p.
    With sigma = (d/dx_1)^k and coordinate h this gives k!.
    """
    alpha = tuple(alpha)
    if sum(alpha) != sigma.k:
        raise DimensionError(f"|alpha| = {sum(alpha)} but the symbol has order {sigma.k}")
    ring = sigma.ring
    hs = [RationalFunction.lift(h, ring) for h in frame]
    if len(hs) != sigma.n:
        raise DimensionError("frame length differs from the dimension")
    n = sigma.n
    grads = [[h.derive(j) for j in range(n)] for h in hs]
    # polynomial in t as {exponent tuple: coefficient}
    poly = {(0,) * n: RationalFunction.constant(1, ring)}
    for i, a in enumerate(alpha):
        for _ in range(a):
            nxt: dict = {}
            for mono, c in poly.items():
                for j in range(n):
                    g = grads[i][j]
                    if g.is_zero():
                        continue
                    key = mono[:j] + (mono[j] + 1,) + mono[j + 1:]
                    term = c * g
                    nxt[key] = nxt[key] + term if key in nxt else term
            poly = nxt
    acc = RationalFunction.constant(0, ring)
    for beta in multi_indices(n, sigma.k):
        u = sigma.coeff(beta)
        c = poly.get(beta)
        if c is None or u.is_zero():
            continue
        acc = acc + u * c * multi_factorial(beta)
    return acc


@dataclass
class Certificate:
    ok: bool
    reason: str
    determinant: RationalFunction | None = None
    witness: tuple | None = None
    failure: tuple | None = None
    grid: int = 9
    detail: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        pt = lambda p: None if p is None else [str(Fraction(c)) for c in p]
        out = {
            "ok": self.ok,
            "reason": self.reason,
            "determinant": None if self.determinant is None else str(self.determinant),
            "witness": pt(self.witness),
            "failure": pt(self.failure),
            "grid_per_axis": self.grid,
        }
        if self.detail:
            out["detail"] = self.detail
        out.update(self.extra)
        return out


def grid_nonvanishing(f: RationalFunction, box: Box, per_axis: int) -> tuple[str, tuple | None, tuple | None]:
    """('ok', witness, None) or ('vanishes'|'pole', None, point) on the exact grid."""
    b = box.ordered(f.variables)
    witness = None
    for p in b.grid(per_axis):
        try:
            v = f.eval(p)
        except PoleError:
            return "pole", None, p
        if v == 0:
            return "vanishes", None, p
        if witness is None:
            witness = p
    return "ok", witness, None


def general_position_check(frame, A: LinearDiffOp, box: Box, per_axis: int = 9) -> Certificate:
    """Exact Jacobian determinant of the frame values, plus a grid scan of the box.

    The box must give intervals for every ring variable of ``A`` (coordinates
    and parameters).
    """
    try:
        inv = _frame_values(frame, A)
    except (DegenerateError, ZeroDivisionError) as exc:
        return Certificate(False, "degenerate", detail=str(exc), grid=per_axis)
    if len(inv) != A.n:
        raise DimensionError(f"frame has {len(inv)} entries, operator dimension is {A.n}")
    d = jacobian_det(inv, list(range(A.n)))
    if d.is_zero():
        return Certificate(False, "identically_zero", d, grid=per_axis)
    reason, witness, failure = grid_nonvanishing(d, box, per_axis)
    return Certificate(reason == "ok", reason, d, witness, failure, per_axis)


def tresse_derivative(f, frame, A: LinearDiffOp) -> list[RationalFunction]:
    """Solve sum_i (df/dI_i) dI_i/dx_j = df/dx_j for the n Tresse derivatives."""
    ev = _Evaluator(A)
    value = ev(f) if isinstance(f, Expr) else RationalFunction.lift(f, A.ring)
    if frame and isinstance(frame[0], RationalFunction):
        inv = [RationalFunction.lift(I, A.ring) for I in frame]
        m = [[I.derive(j) for I in inv] for j in range(A.n)]
        return solve_linear(m, [value.derive(j) for j in range(A.n)])
    return ev.tresse(value, frame)


def coordinate_frame(A: LinearDiffOp) -> tuple[Expr, ...]:
    return tuple(Var(c) for c in A.coords)



def frame_coefficients(js: dict, inv: Sequence[RationalFunction]) -> dict:
    """Coefficients of the operator in the frame coordinates, from its J_alpha values.

    J_alpha = sum_{beta <= alpha} A_beta I^(alpha-beta)/(alpha-beta)! is
    triangular, so A_alpha = sum_{beta <= alpha} J_beta (-I)^(alpha-beta)/(alpha-beta)!.
    A_alpha = J_alpha only where every I_i vanishes.
    """
    out = {}
    for alpha in js:
        acc = None
        for beta in sub_indices(alpha):
            if beta not in js:
                continue
            gap = mi_sub(alpha, beta)
            term = js[beta] / multi_factorial(gap)
            for I, g in zip(inv, gap):
                if g:
                    term = term * (-I) ** g
            acc = term if acc is None else acc + term
        out[alpha] = acc
    return out
