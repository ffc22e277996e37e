"""JSON encodings for polynomials, matrices and graphs, plus bundled schemas."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from typing import Any

from .poly import FLOAT, RATIONAL, SparsePoly


class InputError(ValueError):
    """Malformed user input (bad JSON shape, duplicates, invalid values)."""


def _coef_to_json(c, mode: str):
    if mode == FLOAT:
        return float(c)
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _coef_from_json(raw, mode: str):
    if mode == RATIONAL:
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            raise InputError(f"rational coefficient must be a 'num/den' string or int, got {raw!r}")
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational coefficient {raw!r}") from exc
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise InputError(f"float coefficient must be a number, got {raw!r}")
    return float(raw)


def poly_to_json(p: SparsePoly) -> dict:
    return {
        "arity": p.arity,
        "mode": p.mode,
        "terms": [{"exp": list(e), "coef": _coef_to_json(c, p.mode)}
                  for e, c in sorted(p.terms.items())],
    }


def poly_from_json(data: Any) -> SparsePoly:
    if not isinstance(data, dict):
        raise InputError("polynomial JSON must be an object")
    try:
        arity = data["arity"]
        terms = data["terms"]
    except KeyError as exc:
        raise InputError(f"polynomial JSON missing {exc.args[0]!r}") from exc
    mode = data.get("mode", RATIONAL)
    if mode not in (RATIONAL, FLOAT):
        raise InputError(f"unknown mode {mode!r}")
    if not isinstance(arity, int) or arity < 0:
        raise InputError("arity must be a nonnegative integer")
    out = {}
    for t in terms:
        exp = tuple(t["exp"])
        if len(exp) != arity or not all(isinstance(v, int) and v >= 0 for v in exp):
            raise InputError(f"bad exponent {list(exp)} for arity {arity}")
        if exp in out:
            raise InputError(f"duplicate exponent {list(exp)}")
        out[exp] = _coef_from_json(t["coef"], mode)
    try:
        return SparsePoly(arity, out, mode)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def matrix_to_json(entries) -> dict:
    rows = [list(r) for r in entries]
    enc = [[_coef_to_json(v, RATIONAL if isinstance(v, (int, Fraction)) else FLOAT) for v in r]
           for r in rows]
    return {"rows": len(rows), "cols": len(rows[0]) if rows else 0, "entries": enc}


def matrix_from_json(data: Any) -> list:
    try:
        m, n, entries = data["rows"], data["cols"], data["entries"]
    except (KeyError, TypeError) as exc:
        raise InputError("matrix JSON needs rows, cols, entries") from exc
    if len(entries) != m or any(len(r) != n for r in entries):
        raise InputError("matrix entries do not match declared shape")
    out = []
    for r in entries:
        row = []
        for v in r:
            row.append(_coef_from_json(v, RATIONAL if isinstance(v, (str, int)) else FLOAT))
        out.append(row)
    return out


def graph_from_json(data: Any):
    try:
        m, n, edges = int(data["left"]), int(data["right"]), data["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("graph JSON needs left, right, edges") from exc
    return m, n, [tuple(int(v) for v in e) for e in edges]


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_schema(name: str) -> dict:
    text = resources.files("capkit.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(instance: Any, name: str) -> None:
    """Validate against a bundled schema; raises InputError on mismatch."""
    import jsonschema

    try:
        jsonschema.validate(instance, load_schema(name))
    except jsonschema.ValidationError as exc:
        raise InputError(f"{name}: {exc.message}") from exc
