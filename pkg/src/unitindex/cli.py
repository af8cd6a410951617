"""Command line front end.

Exit codes: 0 pass, 1 property failure, 2 input error, 3 I/O error.
JSON reports go to stdout, human-readable tables to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys as _sys
from pathlib import Path

import numpy as np

from .algebra import Algebra, Element
from .errors import SymmetryError, UnitIndexError
from .index import check_skp, index_report
from .kernels import check_ccpd
from .systemfile import (
    SCHEMA_VERSION,
    ExprSyntaxError,
    SchemaError,
    dumps,
    element_literal,
    parse_expr,
    system_from_dict,
    system_to_dict,
)
from .tensor import tensor_system
from .units import base_labels, check_module_axioms

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3

EXAMPLES = ("fock-demo", "twisted-demo", "random-ce")


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _jsonable(obj):
    if isinstance(obj, Element):
        return element_literal(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(doc: dict) -> None:
    _sys.stdout.write(json.dumps(doc, indent=1, default=_jsonable, ensure_ascii=False) + "\n")


def _err(msg: str) -> None:
    print(msg, file=_sys.stderr)


def _load(path: str):
    """Read and build a system; symmetry failures are returned, not raised."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Exit(EXIT_INPUT, f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return system_from_dict(doc), None
    except SymmetryError as exc:
        return None, exc
    except (SchemaError, UnitIndexError, ValueError) as exc:
        raise _Exit(EXIT_INPUT, f"{path}: {exc}") from None


def _require_valid(path: str):
    system, sym = _load(path)
    if sym is not None:
        raise _Exit(EXIT_INPUT, f"{path}: {sym}")
    return system


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from None


# -- commands ------------------------------------------------------------------

def cmd_validate(args) -> int:
    system, sym = _load(args.file)
    if sym is not None:
        _emit({"pass": False, "symmetry": {"pass": False, "message": str(sym), "witness": sym.witness}})
        _err(f"symmetry: FAIL  {sym}")
        return EXIT_FAIL
    sym_rep = system.symmetry_report()
    ccpd = check_ccpd(system, sample_count=args.samples, seed=args.seed)
    modules = check_module_axioms(system, samples=max(1, args.samples // 4), seed=args.seed, tol=args.tol)
    skp = check_skp(system, samples=max(1, args.samples // 2), seed=args.seed, tol=10 * args.tol)
    ok = ccpd.passed and modules.passed and skp.passed
    _emit({
        "pass": ok,
        "symmetry": {"pass": True, **sym_rep},
        "ccpd": ccpd.to_dict(),
        "module_axioms": modules.to_dict(),
        "skp": skp.to_dict(),
    })
    _err(f"{'suite':<22}{'item':<22}{'max residual':>14}  result")
    _err(f"{'symmetry':<22}{'':<22}{sym_rep['max_residual']:>14.3e}  PASS")
    _err(f"{'ccpd':<22}{'min eigenvalue':<22}{ccpd.min_eigenvalue:>14.3e}  {'PASS' if ccpd.passed else 'FAIL'}")
    for suite, rep in (("module_axioms", modules), ("skp", skp)):
        for it in rep.items.values():
            _err(f"{suite:<22}{it.name:<22}{it.max_residual:>14.3e}  {'PASS' if it.passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_index(args) -> int:
    system = _require_valid(args.file)
    exprs = None
    if args.exprs:
        try:
            exprs = [parse_expr(text, system) for text in args.exprs]
        except (ExprSyntaxError, SchemaError, UnitIndexError) as exc:
            raise _Exit(EXIT_INPUT, f"bad expression: {exc}") from None
        unknown = sorted(set().union(*(base_labels(e) for e in exprs)) - set(system.labels))
        if unknown:
            raise _Exit(EXIT_INPUT, f"unknown label(s) in expressions: {', '.join(unknown)}")
    try:
        rep = index_report(system, exprs, args.tol)
    except UnitIndexError as exc:
        _err(f"index: {exc}")
        return EXIT_FAIL
    _emit(rep.to_dict())
    _err(f"{'expression':<40}{'|<x,x>|':>12}  null")
    for e, row, null in zip(rep.gram.exprs, rep.gram.entries, rep.null_mask):
        ii = row[rep.gram.exprs.index(e)]
        _err(f"{str(e)[:39]:<40}{ii.norm():>12.3e}  {'yes' if null else 'no'}")
    _err(f"numerical rank: {rep.numerical_rank}")
    return EXIT_OK


def cmd_tensor(args) -> int:
    a, b = _require_valid(args.file_a), _require_valid(args.file_b)
    ts = tensor_system(a, b)
    _write(args.out, dumps(system_to_dict(ts.system)))
    _err(f"wrote {len(ts.system.labels)} product units over {list(ts.algebra.block_sizes)} to {args.out}")
    return EXIT_OK


def example_document(name: str, seed: int) -> dict:
    """SystemFile contents for a named example family.

    fock-demo: B = C, m = 3, units with zeta = e1, e2, e3 and e1 + e2 and
    seeded real beta's; three independent zeta's, so index rank 3.
    twisted-demo: B = M_2, h = diag(1, -1) + off-diagonal 1/2, three seeded
    A's; index rank 0.
    random-ce: B = M_2, m = 2, four units (reference included).
    """
    rng = np.random.default_rng(seed)
    if name == "fock-demo":
        zetas = {"e1": [1, 0, 0], "e2": [0, 1, 0], "e3": [0, 0, 1], "e12": [1, 1, 0]}
        units = {
            k: {"zeta": [[[[[float(c), 0.0]]]] for c in z], "beta": [[[[round(float(rng.normal()), 6), 0.0]]]]}
            for k, z in zetas.items()
        }
        return {"schema_version": SCHEMA_VERSION, "algebra": [1], "reference": "omega",
                "generator": {"fock": {"fock_dim": 3, "units": units}}}
    if name == "twisted-demo":
        alg = Algebra((2,))
        h = alg.element(np.array([[1.0, 0.5], [0.5, -1.0]]))
        units = {f"xi{k}": element_literal(alg.random_element(rng)) for k in (1, 2, 3)}
        return {"schema_version": SCHEMA_VERSION, "algebra": [2], "reference": "omega",
                "generator": {"twisted": {"h": element_literal(h), "units": units}}}
    if name == "random-ce":
        return {"schema_version": SCHEMA_VERSION, "algebra": [2], "reference": "omega",
                "generator": {"random_ce": {"fock_dim": 2, "unit_count": 4, "seed": seed}}}
    raise _Exit(EXIT_INPUT, f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")


def cmd_examples(args) -> int:
    doc = example_document(args.name, args.seed)
    system_from_dict(doc)  # fail early if a default is broken
    _write(args.out, dumps(doc))
    _err(f"wrote {args.name} to {args.out}")
    return EXIT_OK


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unitindex", description="Kernel systems of units and their index.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="run symmetry, CCPD, module and inner product suites")
    v.add_argument("file")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_validate)

    i = sub.add_parser("index", help="Gram data and numerical rank of units")
    i.add_argument("file")
    i.add_argument("--exprs", nargs="+", metavar="LITERAL")
    i.add_argument("--tol", type=float, default=1e-9)
    i.set_defaults(func=cmd_index)

    t = sub.add_parser("tensor", help="outer tensor product of two systems")
    t.add_argument("file_a")
    t.add_argument("file_b")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_tensor)

    e = sub.add_parser("examples", help="write an example system file")
    e.add_argument("name")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except _Exit as exc:
        _err(f"error: {exc}")
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
