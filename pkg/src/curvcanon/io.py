"""Curve files.

A curve file is JSON::

    {"kind": "hyperelliptic", "coeffs": [[-1, 0], [0, 0], ..., [1, 0]],
     "tolerances": {"root_sep": 1e-8}}

``coeffs`` are ``[re, im]`` pairs (plain numbers are accepted as real) in
ascending powers of ``x`` for hyperelliptic curves and in graded-lex order
of ``(x, y)`` for plane quartics.  ``tolerances`` is optional.
"""

import json
from dataclasses import fields

from .curve import Tolerances, construct_curve
from .errors import ParseError, ValidationError

KINDS = ("hyperelliptic", "plane_quartic")


def _fail(msg, text=None, key=None):
    # best-effort location of a key in the source text
    line, col = 1, 1
    if text is not None and key is not None:
        pos = text.find(f'"{key}"')
        if pos >= 0:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    raise ParseError(msg, line, col)


def parse_curve_text(text):
    """Parse curve-file text into ``(kind, coeffs, Tolerances)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON: {exc.msg}",
            exc.lineno,
            exc.colno,
        ) from None
    if not isinstance(doc, dict):
        _fail("top level must be an object", text)
    unknown = set(doc) - {"kind", "coeffs", "tolerances"}
    if unknown:
        key = sorted(unknown)[0]
        _fail(f"unknown key {key!r}", text, key)
    kind = doc.get("kind")
    if kind not in KINDS:
        _fail(f"kind must be one of {KINDS}, got {kind!r}", text, "kind")
    coeffs = doc.get("coeffs")
    if not isinstance(coeffs, list) or not coeffs:
        _fail("coeffs must be a nonempty list", text, "coeffs")
    out = []
    for k, c in enumerate(coeffs):
        if isinstance(c, bool):
            _fail(f"coeffs[{k}] is not a number", text, "coeffs")
        if isinstance(c, (int, float)):
            out.append(complex(c))
        elif (
            isinstance(c, list)
            and len(c) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in c)
        ):
            out.append(complex(c[0], c[1]))
        else:
            _fail(f"coeffs[{k}] must be [re, im]", text, "coeffs")
    tol = Tolerances()
    if "tolerances" in doc:
        t = doc["tolerances"]
        names = {f.name for f in fields(Tolerances)}
        if not isinstance(t, dict) or set(t) - names:
            _fail(f"tolerances must be an object with keys from {sorted(names)}", text, "tolerances")
        try:
            tol = Tolerances(**{k: float(v) for k, v in t.items()})
        except (TypeError, ValueError):
            _fail("tolerance values must be numbers", text, "tolerances")
    return kind, out, tol


def load_curve_spec(path):
    """Read and validate a curve file.

    Raises
    ------
    ParseError
        Malformed file, with line and column.
    ValidationError
        Invalid curve; the message echoes the coefficients.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    kind, coeffs, tol = parse_curve_text(text)
    try:
        return construct_curve(kind, coeffs, tol)
    except ValidationError as exc:
        shown = ", ".join(f"{c.real:g}{c.imag:+g}j" for c in coeffs)
        exc.args = (f"{exc.args[0]} [curve {kind}: {shown}]",) + exc.args[1:]
        raise
