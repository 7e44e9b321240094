"""Command-line interface.

Exit codes: 0 success or Equivalent, 1 Distinct, 2 Inconclusive or degenerate
frame, 64 usage error, 65 malformed or unsuitable input data.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .box import Box
from .catalog import CATALOGS, catalog_report
from .diffop import LinearDiffOp
from .errors import DegenerateError, DegenerateFrameError, DiffInvError, ParseError
from .fnonlinear import AdjustedTriple, extended_equivalence_check
from .natinv import Tolerances, equivalence_check, model_map, parse_frame
from .transvect import NAryForm, transvectant

EX_OK, EX_DISTINCT, EX_INCONCLUSIVE, EX_USAGE, EX_DATAERR = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    frame: str | None = None
    box: str | None = None
    box2: str | None = None
    samples: int = 64
    seed: int = 0
    tol_root: float = 1e-12
    tol_match: float = 1e-9
    output: str | None = None
    format: str = "json"
    jobs: int = 1
    catalog: str | None = None
    l: int | None = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        cmd = ns.command if ns.command != "form" else f"form {ns.form_command}"
        inputs = list(ns.input or [])
        if getattr(ns, "input2", None):
            inputs.append(ns.input2)
        cfg = cls(
            command=cmd,
            inputs=inputs,
            frame=getattr(ns, "frame", None),
            box=getattr(ns, "box", None),
            box2=getattr(ns, "box2", None),
            samples=getattr(ns, "samples", 64),
            seed=getattr(ns, "seed", 0),
            tol_root=getattr(ns, "tol_root", 1e-12),
            tol_match=getattr(ns, "tol_match", 1e-9),
            output=ns.output,
            format=ns.format or ("csv" if cmd == "model" else "json"),
            jobs=getattr(ns, "jobs", 1),
            catalog=getattr(ns, "catalog", None),
            l=getattr(ns, "l", None),
        )
        cfg.validate()
        return cfg

    def validate(self):
        if not self.inputs:
            raise UsageError(f"{self.command}: --input is required")
        if self.samples < 1:
            raise UsageError("--samples must be positive")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")
        if not (self.tol_root > 0 and self.tol_match > 0):
            raise UsageError("tolerances must be positive")
        if self.command in ("model", "equiv") and not self.frame:
            raise UsageError(f"{self.command}: --frame is required")
        if self.command in ("model", "equiv") and not self.box:
            raise UsageError(f"{self.command}: --box is required")
        if self.command in ("equiv", "fequiv") and len(self.inputs) != 2:
            raise UsageError(f"{self.command}: needs --input and --input2")
        if self.command == "form transvect" and self.l is None:
            raise UsageError("form transvect: --l is required")
        if self.command == "form invariants" and self.catalog is None:
            raise UsageError("form invariants: --catalog is required")

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    def tolerances(self) -> Tolerances:
        return Tolerances(tol_root=self.tol_root, tol_match=self.tol_match, samples=self.samples, seed=self.seed)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="diffinv", description="Invariants of forms and differential operators, and operator equivalence.")
    p.add_argument("--version", action="version", version=f"diffinv {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=["json", "csv"])

    form = sub.add_parser("form", help="invariants and transvectants of n-ary forms")
    fsub = form.add_subparsers(dest="form_command", parser_class=_Parser)
    fsub.required = True
    inv = fsub.add_parser("invariants", help="catalog invariants of a form")
    inv.add_argument("--input", action="append", required=True, help="form JSON file")
    inv.add_argument("--catalog", choices=sorted(CATALOGS), required=True)
    common(inv)
    tv = fsub.add_parser("transvect", help="transvectant of n forms")
    tv.add_argument("--input", action="append", required=True, help="form JSON file; repeat once per form")
    tv.add_argument("--input2", help="second form (same as a second --input)")
    tv.add_argument("--l", type=int, required=True, help="transvectant order")
    common(tv)

    def sampling(sp):
        sp.add_argument("--frame", help='frame DSL, e.g. "Jq(sym), free"')
        sp.add_argument("--box", help='domain box, e.g. "x1:1:2,x2:0:1"')
        sp.add_argument("--samples", type=int, default=64)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)

    model = sub.add_parser("model", help="sampled model fingerprint of an operator")
    model.add_argument("--input", action="append", required=True, help="operator JSON file")
    sampling(model)
    common(model)

    for name, what in (("equiv", "operator"), ("fequiv", "adjusted-triple")):
        sp = sub.add_parser(name, help=f"decide equivalence of two {what}s")
        sp.add_argument("--input", action="append", required=True, help=f"first {what} JSON file")
        sp.add_argument("--input2", required=True, help=f"second {what} JSON file")
        if name == "equiv":
            sampling(sp)
            sp.add_argument("--box2", help="box for the second operator (defaults to --box)")
        else:
            sp.add_argument("--samples", type=int, default=64)
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol-root", type=float, default=1e-12)
        sp.add_argument("--tol-match", type=float, default=1e-9)
        common(sp)
    return p


# -- input helpers ------------------------------------------------------------


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc


def _data(fn, *args):
    """Run a parsing step, mapping input errors to DataError."""
    try:
        return fn(*args)
    except (ValueError, KeyError, TypeError, ParseError, DiffInvError) as exc:
        raise DataError(str(exc)) from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------


def cmd_form_invariants(cfg: RunConfig) -> int:
    P = _data(NAryForm.from_json, _load_json(cfg.inputs[0]))
    reports = _data(catalog_report, P, cfg.catalog)
    out = {
        "catalog": cfg.catalog,
        "form": P.to_json(),
        "invariants": {k: r.to_json() for k, r in reports.items()},
        "regular": all(r.regular is not False for r in reports.values()),
        "config": cfg.to_json(),
    }
    for k, r in reports.items():
        out[k] = r.to_json()["value"]
    _emit(_dump(out), cfg.output)
    return EX_OK


def cmd_transvect(cfg: RunConfig) -> int:
    forms = [_data(NAryForm.from_json, _load_json(p)) for p in cfg.inputs]
    result = _data(transvectant, forms, cfg.l)
    _emit(_dump(result.to_json()), cfg.output)
    return EX_OK


def _operator(path: str) -> LinearDiffOp:
    return _data(LinearDiffOp.from_json, _load_json(path))


def cmd_model(cfg: RunConfig) -> int:
    A = _operator(cfg.inputs[0])
    frame = _data(parse_frame, cfg.frame, A.coords, A.params)
    box = _data(lambda: Box.parse(cfg.box).ordered(A.ring))
    try:
        fp = model_map(A, frame, box, cfg.samples, cfg.seed, jobs=cfg.jobs)
    except (DegenerateFrameError, DegenerateError) as exc:
        cert = getattr(exc, "certificate", None)
        report = {"error": "degenerate frame", "detail": str(exc), "config": cfg.to_json()}
        if cert is not None:
            report["certificate"] = cert.to_json()
        sys.stderr.write(_dump(report))
        return EX_INCONCLUSIVE
    meta = fp.metadata()
    meta["config"] = cfg.to_json()
    if cfg.format == "csv":
        _emit(fp.to_csv(), cfg.output)
        sidecar = _dump(meta)
        if cfg.output:
            Path(cfg.output + ".json").write_text(sidecar)
        else:
            sys.stderr.write(sidecar)
    else:
        meta["rows"] = [{"x": list(p), "I": list(map(float, b)), "Y": list(map(float, y))} for p, b, y in fp.rows]
        _emit(_dump(meta), cfg.output)
    return EX_OK


def _verdict_exit(verdict, cfg: RunConfig) -> int:
    report = verdict.to_json()
    report["config"]["run"] = cfg.to_json()
    _emit(_dump(report), cfg.output)
    return verdict.exit_code


def _degenerate(exc, cfg: RunConfig) -> int:
    cert = getattr(exc, "certificate", None)
    report = {
        "verdict": "Inconclusive",
        "reason": f"degenerate frame: {exc}",
        "certificate": cert.to_json() if cert is not None else None,
        "config": {"run": cfg.to_json()},
    }
    _emit(_dump(report), cfg.output)
    return EX_INCONCLUSIVE


def cmd_equiv(cfg: RunConfig) -> int:
    A1, A2 = _operator(cfg.inputs[0]), _operator(cfg.inputs[1])
    frame = _data(parse_frame, cfg.frame, A1.coords, A1.params)
    box1 = _data(lambda: Box.parse(cfg.box).ordered(A1.ring))
    box2 = _data(lambda: Box.parse(cfg.box2 or cfg.box).ordered(A2.ring))
    if A1.coords != A2.coords or A1.order != A2.order:
        raise DataError("operators must share variables and order")
    try:
        verdict = equivalence_check(A1, box1, A2, box2, frame, cfg.tolerances())
    except (DegenerateFrameError, DegenerateError) as exc:
        return _degenerate(exc, cfg)
    return _verdict_exit(verdict, cfg)


def cmd_fequiv(cfg: RunConfig) -> int:
    t1 = _data(AdjustedTriple.from_json, _load_json(cfg.inputs[0]))
    t2 = _data(AdjustedTriple.from_json, _load_json(cfg.inputs[1]))
    if t1.frame != t2.frame:
        raise DataError("both triples must use the same frame expressions")
    try:
        verdict = extended_equivalence_check(t1, t2, cfg.tolerances())
    except (DegenerateFrameError, DegenerateError) as exc:
        return _degenerate(exc, cfg)
    return _verdict_exit(verdict, cfg)


COMMANDS = {
    "form invariants": cmd_form_invariants,
    "form transvect": cmd_transvect,
    "model": cmd_model,
    "equiv": cmd_equiv,
    "fequiv": cmd_fequiv,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig.from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EX_USAGE
    except DataError as exc:
        sys.stderr.write(f"diffinv: {exc}\n")
        return EX_DATAERR
    except (ValueError, ArithmeticError, DiffInvError) as exc:
        sys.stderr.write(f"diffinv: {exc}\n")
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
