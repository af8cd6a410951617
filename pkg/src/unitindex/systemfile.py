"""JSON system files, element literals and the prefix expression syntax.

A system file looks like::

    {
      "schema_version": 1,
      "algebra": [2],
      "reference": "omega",
      "kernels": {"labels": ["omega", "x"],
                  "table": [{"x": "omega", "y": "omega", "matrix": [[[re, im], ...], ...]}, ...]}
    }

or, instead of ``kernels``, a ``generator`` object with exactly one of the
keys ``fock``, ``twisted`` or ``random_ce``. Complex numbers are ``[re, im]``
pairs; an element literal is a list of blocks, each a list of rows of pairs.
Floats are written with the shortest repr that round-trips, so writing and
reading back reproduces every kernel bit for bit.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .algebra import Algebra, Element, SuperOp
from .examples import (
    FockSpec,
    FockUnit,
    TwistedSpec,
    fock_system,
    random_ce_system,
    twisted_system,
)
from .kernels import KernelSystem
from .units import Base, LeftCombo, RightCombo, Shift, add, mul_left, mul_right, neg

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """The file parses but does not follow the schema."""


class ExprSyntaxError(ValueError):
    pass


# -- literals --------------------------------------------------------------------

def complex_literal(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_literal(m: np.ndarray) -> list:
    return [[complex_literal(z) for z in row] for row in np.asarray(m)]


def element_literal(a: Element) -> list:
    return [matrix_literal(b) for b in a.blocks]


def _parse_complex(v, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in v):
        return complex(v[0], v[1])
    raise SchemaError(f"{where}: expected [re, im], got {v!r}")


def parse_matrix(lit, rows: int, cols: int, where: str) -> np.ndarray:
    if not isinstance(lit, list) or len(lit) != rows:
        raise SchemaError(f"{where}: expected {rows} rows")
    out = np.empty((rows, cols), dtype=complex)
    for i, row in enumerate(lit):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"{where}: row {i} must have {cols} entries")
        for j, v in enumerate(row):
            out[i, j] = _parse_complex(v, f"{where}[{i}][{j}]")
    return out


def parse_element(lit, alg: Algebra, where: str = "element") -> Element:
    if isinstance(lit, (int, float)) and not isinstance(lit, bool):
        return alg.scalar(lit)
    if not isinstance(lit, list) or len(lit) != len(alg.block_sizes):
        raise SchemaError(f"{where}: expected a list of {len(alg.block_sizes)} blocks")
    return Element(alg, [parse_matrix(b, n, n, f"{where} block {i}") for i, (b, n) in enumerate(zip(lit, alg.block_sizes))])


# -- system files ----------------------------------------------------------------

def system_to_dict(sys: KernelSystem) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "algebra": list(sys.algebra.block_sizes),
        "reference": sys.reference,
        "kernels": {
            "labels": list(sys.labels),
            "table": [
                {"x": x, "y": y, "matrix": matrix_literal(sys.kernel(x, y).matrix)}
                for x in sys.labels
                for y in sys.labels
            ],
        },
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def write_system(sys: KernelSystem, path) -> None:
    Path(path).write_text(dumps(system_to_dict(sys)), encoding="utf-8")


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing key {key!r}")
    v = doc[key]
    if not isinstance(v, kind) or isinstance(v, bool):
        raise SchemaError(f"{where}.{key}: wrong type {type(v).__name__}")
    return v


def system_from_dict(doc) -> KernelSystem:
    """Build a validated system; symmetry violations propagate as SymmetryError."""
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    version = _require(doc, "schema_version", int, "file")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version}")
    sizes = _require(doc, "algebra", list, "file")
    try:
        alg = Algebra(tuple(sizes))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"file.algebra: {exc}") from None
    if ("kernels" in doc) == ("generator" in doc):
        raise SchemaError("exactly one of 'kernels' and 'generator' must be present")
    if "kernels" in doc:
        return _explicit(doc, alg)
    return _generated(doc, alg)


def _explicit(doc: dict, alg: Algebra) -> KernelSystem:
    ref = _require(doc, "reference", str, "file")
    kern = _require(doc, "kernels", dict, "file")
    labels = _require(kern, "labels", list, "kernels")
    if not all(isinstance(x, str) for x in labels) or len(set(labels)) != len(labels):
        raise SchemaError("kernels.labels must be unique strings")
    table = {}
    for k, entry in enumerate(_require(kern, "table", list, "kernels")):
        where = f"kernels.table[{k}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: expected an object")
        x, y = _require(entry, "x", str, where), _require(entry, "y", str, where)
        if x not in labels or y not in labels:
            raise SchemaError(f"{where}: unknown label in pair ({x!r}, {y!r})")
        if (x, y) in table:
            raise SchemaError(f"{where}: duplicate pair ({x!r}, {y!r})")
        table[(x, y)] = SuperOp(alg, parse_matrix(entry.get("matrix"), alg.dim, alg.dim, f"{where}.matrix"))
    return KernelSystem(alg, labels, table, ref)


def _generated(doc: dict, alg: Algebra) -> KernelSystem:
    gen = _require(doc, "generator", dict, "file")
    if len(gen) != 1:
        raise SchemaError("generator must have exactly one of 'fock', 'twisted', 'random_ce'")
    (kind, body), = gen.items()
    if not isinstance(body, dict):
        raise SchemaError(f"generator.{kind} must be an object")
    ref = doc.get("reference", "omega")
    if kind == "fock":
        m = _require(body, "fock_dim", int, "fock")
        units = {}
        for name, u in _require(body, "units", dict, "fock").items():
            where = f"fock.units.{name}"
            zeta = _require(u, "zeta", list, where)
            if len(zeta) != m:
                raise SchemaError(f"{where}.zeta must have {m} components")
            units[name] = FockUnit([parse_element(z, alg, f"{where}.zeta") for z in zeta],
                                   parse_element(u.get("beta", 0), alg, f"{where}.beta"))
        return fock_system(FockSpec(alg, m, units, reference=ref))
    if kind == "twisted":
        if len(alg.block_sizes) != 1:
            raise SchemaError("twisted systems live over a single block M_n")
        n = alg.block_sizes[0]
        h = parse_element(_require(body, "h", list, "twisted"), alg, "twisted.h")
        units = {name: parse_element(a, alg, f"twisted.units.{name}")
                 for name, a in _require(body, "units", dict, "twisted").items()}
        try:
            spec = TwistedSpec(n, h, units, reference=ref)
        except ValueError as exc:
            raise SchemaError(f"twisted: {exc}") from None
        return twisted_system(spec)
    if kind == "random_ce":
        return random_ce_system(
            alg,
            _require(body, "fock_dim", int, "random_ce"),
            _require(body, "unit_count", int, "random_ce"),
            _require(body, "seed", int, "random_ce"),
        )
    raise SchemaError(f"unknown generator {kind!r}")


def read_system(path) -> KernelSystem:
    """Raises OSError, json.JSONDecodeError, SchemaError or SymmetryError."""
    text = Path(path).read_text(encoding="utf-8")
    return system_from_dict(json.loads(text))


# -- expressions -----------------------------------------------------------------
# (base x) | x | (shift E ELEM) | (rcombo (E K) ...) | (lcombo (K E) ...)
# | (add E E) | (neg E) | (rmul E K) | (lmul K E)
# ELEM is a JSON element literal or a real number (a multiple of the unit).

_TOKEN = re.compile(r"\s*(?:(\()|(\))|(\[)|([^\s()\[\]]+))")


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character at {pos}")
        if m.group(3):
            start = m.start(3)
            dec = json.JSONDecoder()
            try:
                lit, end = dec.raw_decode(text, start)
            except json.JSONDecodeError as exc:
                raise ExprSyntaxError(f"bad element literal at {start}: {exc.msg}") from None
            out.append(("lit", lit))
            pos = end
            continue
        if m.group(1):
            out.append(("(", None))
        elif m.group(2):
            out.append((")", None))
        else:
            out.append(("sym", m.group(4)))
        pos = m.end()
    return out


def _read(tokens, i):
    kind, val = tokens[i]
    if kind == "(":
        items, i = [], i + 1
        while i < len(tokens) and tokens[i][0] != ")":
            item, i = _read(tokens, i)
            items.append(item)
        if i >= len(tokens):
            raise ExprSyntaxError("unbalanced parentheses")
        return items, i + 1
    if kind == ")":
        raise ExprSyntaxError("unexpected ')'")
    if kind == "lit":
        return ("lit", val), i + 1
    return ("sym", val), i + 1


def _elem(node, sys: KernelSystem) -> Element:
    if isinstance(node, tuple) and node[0] == "lit":
        return parse_element(node[1], sys.algebra)
    if isinstance(node, tuple) and node[0] == "sym":
        try:
            return sys.algebra.scalar(float(node[1]))
        except ValueError:
            pass
    raise ExprSyntaxError(f"expected an element literal, got {node!r}")


def _build(node, sys: KernelSystem):
    if isinstance(node, tuple):
        if node[0] == "sym":
            return Base(node[1])
        raise ExprSyntaxError(f"expected an expression, got literal {node[1]!r}")
    if not node or not (isinstance(node[0], tuple) and node[0][0] == "sym"):
        raise ExprSyntaxError("expected (operator ...)")
    op, args = node[0][1], node[1:]

    def arity(k):
        if len(args) != k:
            raise ExprSyntaxError(f"({op} ...) takes {k} arguments")

    if op == "base":
        arity(1)
        if not (isinstance(args[0], tuple) and args[0][0] == "sym"):
            raise ExprSyntaxError("(base NAME)")
        return Base(args[0][1])
    if op == "shift":
        arity(2)
        return Shift(_build(args[0], sys), _elem(args[1], sys))
    if op == "add":
        arity(2)
        return add(sys, _build(args[0], sys), _build(args[1], sys))
    if op == "neg":
        arity(1)
        return neg(sys, _build(args[0], sys))
    if op == "rmul":
        arity(2)
        return mul_right(sys, _build(args[0], sys), _elem(args[1], sys))
    if op == "lmul":
        arity(2)
        return mul_left(sys, _elem(args[0], sys), _build(args[1], sys))
    if op in ("rcombo", "lcombo"):
        if not args or not all(isinstance(t, list) and len(t) == 2 for t in args):
            raise ExprSyntaxError(f"({op} (a b) ...) needs pairs")
        if op == "rcombo":
            return RightCombo(tuple((_build(e, sys), _elem(k, sys)) for e, k in args))
        return LeftCombo(tuple((_elem(k, sys), _build(e, sys)) for k, e in args))
    raise ExprSyntaxError(f"unknown operator {op!r}")


def parse_expr(text: str, sys: KernelSystem):
    """Parse one prefix expression; labels are resolved at evaluation."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExprSyntaxError("empty expression")
    node, i = _read(tokens, 0)
    if i != len(tokens):
        raise ExprSyntaxError("trailing input after expression")
    return _build(node, sys)
