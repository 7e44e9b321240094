"""Model fingerprints: sampled images of the map x -> (I(x), J_alpha(x))."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..box import Box, make_rng
from ..diffop import LinearDiffOp
from ..errors import DegenerateFrameError, DimensionError
from ..polycore import RationalFunction
from ..polycore.multiindex import format_index
from .core import all_j_alpha, eval_frame, general_position_check
from .expr import Expr, frame_to_str

MAX_REJECTION_FACTOR = 1000


def alpha_label(alpha: Sequence[int]) -> str:
    return "Y_" + "_".join(str(a) for a in alpha)


@dataclass
class CompiledModel:
    """Exact base and J_alpha functions over a ring, compiled to float callables.

    ``pinned`` maps a ring-variable index to the base slot that equals it
    (the u-slot of an extended model); Newton keeps those variables fixed.
    """

    ring: tuple[str, ...]
    base: list[RationalFunction]
    js: dict
    solve_vars: tuple[int, ...]
    pinned: dict = field(default_factory=dict)

    def __post_init__(self):
        self._base_f = [f.to_float_function() for f in self.base]
        self._js_f = {a: f.to_float_function() for a, f in self.js.items()}
        self._free_slots = [i for i in range(len(self.base)) if i not in self.pinned.values()]
        self._jac_f = [[self.base[i].derive(j).to_float_function() for j in self.solve_vars] for i in self._free_slots]

    @classmethod
    def build(cls, A: LinearDiffOp, frame, pinned_base: Sequence[RationalFunction] = (), pinned: dict | None = None) -> "CompiledModel":
        inv = eval_frame(frame, A) if frame and isinstance(frame[0], Expr) else [RationalFunction.lift(f, A.ring) for f in frame]
        js = all_j_alpha(A, inv)
        base = list(pinned_base) + inv
        pinned = dict(pinned or {})
        solve_vars = tuple(i for i in range(len(A.coords)))
        return cls(A.ring, base, js, solve_vars, pinned)

    @property
    def alphas(self) -> list:
        return list(self.js)

    def base_values(self, p) -> np.ndarray:
        return np.array([f(*p) for f in self._base_f], dtype=float)

    def y_values(self, p) -> np.ndarray:
        return np.array([f(*p) for f in self._js_f.values()], dtype=float)

    def row(self, p):
        """(base, Y) at p, or None at a pole or non-finite value."""
        try:
            b = self.base_values(p)
            y = self.y_values(p)
        except (ZeroDivisionError, OverflowError, ValueError):
            return None
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(y))):
            return None
        return b, y

    def residual(self, p, target) -> np.ndarray:
        b = self.base_values(p)
        return np.array([b[i] - target[i] for i in self._free_slots])

    def jacobian(self, p) -> np.ndarray:
        return np.array([[f(*p) for f in row] for row in self._jac_f], dtype=float)


@dataclass
class ModelFingerprint:
    variables: tuple[str, ...]
    base_names: tuple[str, ...]
    alphas: list
    rows: list  # (point, base values, Y values)
    frame: str
    box: Box
    seed: int
    rejections: int
    certificate: dict
    config: dict = field(default_factory=dict)

    @property
    def header(self) -> list[str]:
        return list(self.variables) + list(self.base_names) + [alpha_label(a) for a in self.alphas]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for p, b, y in self.rows:
            w.writerow([format(float(v), ".17g") for v in (*p, *b, *y)])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "frame": self.frame,
            "box": self.box.to_json(),
            "seed": self.seed,
            "samples": len(self.rows),
            "rejections": self.rejections,
            "prng": "numpy PCG64",
            "columns": self.header,
            "alphas": [format_index(a) for a in self.alphas],
            "certificate": self.certificate,
            **self.config,
        }

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n"

    def point_set(self) -> np.ndarray:
        return np.array([np.concatenate([b, y]) for _, b, y in self.rows])


def sample_rows(model: CompiledModel, box: Box, m: int, seed: int, jobs: int = 1):
    """First ``m`` valid rows from the PCG64 stream; returns (rows, rejections).

    Candidates are drawn in order and accepted in order, so the result does
    not depend on ``jobs``.
    """
    rng = make_rng(seed)
    rows: list = []
    rejections = 0
    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while len(rows) < m:
            need = m - len(rows)
            cands = box.sample(rng, need)
            results = list(pool.map(model.row, cands)) if pool else [model.row(p) for p in cands]
            for p, r in zip(cands, results):
                if r is None:
                    rejections += 1
                    continue
                rows.append((tuple(float(c) for c in p), r[0], r[1]))
            if rejections > MAX_REJECTION_FACTOR * max(m, 1):
                raise ValueError(f"too many rejected samples ({rejections}); the box mostly hits poles")
    finally:
        if pool:
            pool.shutdown()
    return rows, rejections


def model_map(
    A: LinearDiffOp,
    frame: Sequence[Expr],
    box: Box,
    m: int = 64,
    seed: int = 0,
    per_axis: int = 9,
    jobs: int = 1,
) -> ModelFingerprint:
    """Sample the model of ``A`` over ``box``; the frame must be certified first."""
    if len(frame) != A.n:
        raise DimensionError(f"frame has {len(frame)} entries, operator dimension is {A.n}")
    box = box.ordered(A.ring)
    cert = general_position_check(frame, A, box, per_axis)
    if not cert.ok:
        raise DegenerateFrameError(f"frame is not in general position on the box: {cert.reason}", cert)
    model = CompiledModel.build(A, frame)
    rows, rejections = sample_rows(model, box, m, seed, jobs)
    return ModelFingerprint(
        variables=A.ring,
        base_names=tuple(f"I{i + 1}" for i in range(A.n)),
        alphas=model.alphas,
        rows=rows,
        frame=frame_to_str(frame),
        box=box,
        seed=seed,
        rejections=rejections,
        certificate=cert.to_json(),
        config={"grid_per_axis": per_axis},
    )


def min_base_separation(fp: ModelFingerprint) -> float:
    pts = np.array([b for _, b, _ in fp.rows])
    if len(pts) < 2:
        return math.inf
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    d[np.diag_indices(len(pts))] = np.inf
    return float(d.min())
