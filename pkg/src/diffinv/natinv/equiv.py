"""Sampling-based equivalence decision between two adjusted operators.

Distinct verdicts rest on a concrete separating sample. Equivalent verdicts
are numerical evidence; ``certify_equivalence`` checks a supplied map exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from ..box import Box, make_rng
from ..diffop import DiffMap, LinearDiffOp, pushforward
from ..errors import DegenerateFrameError, DimensionError
from ..polycore.multiindex import format_index
from .core import general_position_check
from .expr import Expr, frame_to_str
from .model import CompiledModel, alpha_label

EXIT_CODES = {"Equivalent": 0, "Distinct": 1, "Inconclusive": 2}


@dataclass
class Tolerances:
    tol_root: float = 1e-12
    tol_match: float = 1e-9
    abs_floor: float = 1e-12
    max_iter: int = 50
    seeds_per_axis: int = 5
    min_match: float = 0.95
    samples: int = 64
    seed: int = 0
    grid: int = 9

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class Verdict:
    verdict: str
    reason: str
    matched: int
    samples: int
    witnesses: list = field(default_factory=list)
    separator: dict | None = None
    config: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "matched": self.matched,
            "samples": self.samples,
            "witnesses": self.witnesses,
            "separator": self.separator,
            "config": self.config,
        }


def newton_solve(model: CompiledModel, target: np.ndarray, start: np.ndarray, tol: Tolerances):
    """Solve base(y) = target for the free variables from ``start``.

    The residual is measured as max|base - target| / max(1, max|target|).
    Returns (y, residual) or None.
    """
    y = np.array(start, dtype=float)
    solve = list(model.solve_vars)
    scale = max(1.0, float(np.max(np.abs(target))))
    for _ in range(tol.max_iter + 1):
        try:
            F = model.residual(y, target)
        except (ZeroDivisionError, OverflowError, ValueError):
            return None
        if not np.all(np.isfinite(F)):
            return None
        res = float(np.max(np.abs(F))) / scale if len(F) else 0.0
        if res < tol.tol_root:
            return y, res
        try:
            Jm = model.jacobian(y)
            step = np.linalg.solve(Jm, F)
        except (ZeroDivisionError, OverflowError, ValueError, np.linalg.LinAlgError):
            return None
        if not np.all(np.isfinite(step)):
            return None
        y[solve] -= step
    return None


def _seeds(box: Box, solve_vars, per_axis: int) -> list[np.ndarray]:
    axes = []
    for j in solve_vars:
        a, b = float(box.lower[j]), float(box.upper[j])
        axes.append([a + (b - a) * (i + 0.5) / per_axis for i in range(per_axis)])
    return [np.array(p) for p in product(*axes)]


def _close(a: float, b: float, tol: Tolerances) -> bool:
    return abs(a - b) <= max(tol.tol_match * max(abs(a), abs(b)), tol.abs_floor)


def match_models(model1: CompiledModel, box1: Box, model2: CompiledModel, box2: Box, tol: Tolerances, config: dict) -> Verdict:
    """Sample box1, locate each base point in box2 by Newton, compare Y columns."""
    rng = make_rng(tol.seed)
    seeds = _seeds(box2, model2.solve_vars, tol.seeds_per_axis)
    widths = np.array([float(b - a) for a, b in zip(box2.lower, box2.upper)])
    slack = 1e-9 * np.maximum(widths, 1.0)
    lo2 = np.array([float(a) for a in box2.lower]) - slack
    hi2 = np.array([float(b) for b in box2.upper]) + slack
    alphas = model1.alphas
    witnesses, matched, drawn = [], 0, 0
    separator = None
    attempts = 0
    while drawn < tol.samples:
        attempts += 1
        if attempts > 1000 * max(tol.samples, 1):
            raise ValueError("too many rejected samples in the first box")
        x = box1.sample(rng, 1)[0]
        r1 = model1.row(x)
        if r1 is None:
            continue
        drawn += 1
        t, Y1 = r1
        found = None
        for s in seeds:
            start = np.empty(len(model2.ring))
            for j, v in enumerate(box2.lower):
                start[j] = float(v)
            for var, slot in model2.pinned.items():
                start[var] = t[slot]
            start[list(model2.solve_vars)] = s
            if any(not (lo2[v] <= start[v] <= hi2[v]) for v in model2.pinned):
                break
            got = newton_solve(model2, t, start, tol)
            if got is None:
                continue
            y, res = got
            if np.all(y >= lo2) and np.all(y <= hi2):
                found = (y, res)
                break
        if found is None:
            continue
        y, res = found
        r2 = model2.row(y)
        if r2 is None:
            continue
        matched += 1
        _, Y2 = r2
        bad = [i for i in range(len(alphas)) if not _close(Y1[i], Y2[i], tol)]
        if bad and separator is None:
            first = alphas[bad[0]]
            separator = {
                "coordinate": "Y_(" + format_index(first) + ")",
                "column": alpha_label(first),
                "x": [float(v) for v in x],
                "y": [float(v) for v in y],
                "residual": res,
                "mismatched": [
                    {"alpha": format_index(alphas[i]), "first": float(Y1[i]), "second": float(Y2[i])} for i in bad
                ],
            }
        elif not bad:
            witnesses.append({"x": [float(v) for v in x], "y": [float(v) for v in y], "residual": res})
    if separator is not None:
        return Verdict("Distinct", f"{separator['coordinate']} differs at a matched base point", matched, drawn, witnesses, separator, config)
    if matched == 0:
        return Verdict("Inconclusive", "range mismatch: no sampled base point was reached in the second box", 0, drawn, [], None, config)
    if matched < tol.min_match * drawn:
        return Verdict("Inconclusive", f"only {matched}/{drawn} samples matched (Newton failures or partial range overlap)", matched, drawn, witnesses, None, config)
    return Verdict("Equivalent", f"{matched}/{drawn} samples matched with all Y columns equal", matched, drawn, witnesses, None, config)


def equivalence_check(
    A1: LinearDiffOp,
    box1: Box,
    A2: LinearDiffOp,
    box2: Box,
    frame: Sequence[Expr],
    tol: Tolerances | None = None,
) -> Verdict:
    tol = tol or Tolerances()
    if A1.coords != A2.coords or A1.order != A2.order:
        raise DimensionError("operators must share coordinates and order")
    box1 = box1.ordered(A1.ring)
    box2 = box2.ordered(A2.ring)
    certs = []
    for A, box in ((A1, box1), (A2, box2)):
        cert = general_position_check(frame, A, box, tol.grid)
        if not cert.ok:
            raise DegenerateFrameError(f"frame is not in general position: {cert.reason}", cert)
        certs.append(cert.to_json())
    config = {
        "frame": frame_to_str(frame),
        "box1": str(box1),
        "box2": str(box2),
        "tolerances": tol.to_json(),
        "certificates": certs,
    }
    m1 = CompiledModel.build(A1, frame)
    m2 = CompiledModel.build(A2, frame)
    return match_models(m1, box1, m2, box2, tol, config)


def certify_equivalence(A1: LinearDiffOp, A2: LinearDiffOp, phi: DiffMap) -> bool:
    """Exact check that phi pushes A1 to A2."""
    return pushforward(A1, phi) == A2
