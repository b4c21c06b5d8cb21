"""Argument types for the wshift command line"""
from __future__ import annotations

import ast
import json
import math
from argparse import ArgumentTypeError
from ast import literal_eval
from typing import Any, Dict

from .criteria import Rho
from .weights import FAMILIES, WeightSpecError


def p_value(s: str) -> float:
    """An exponent in [1, inf]; "inf" and "c0" mean the c_0 space"""
    if s.strip().lower() in ("inf", "infinity", "c0", "c_0"):
        return math.inf
    try:
        value = float(s)
    except ValueError:
        raise ArgumentTypeError(f"invalid p: {s!r}") from None
    if math.isnan(value) or value < 1:
        raise ArgumentTypeError(f"p must be in [1, inf], got {s}")
    return value


def tolerance(s: str) -> float:
    """A tolerance given as a magnitude, returned as its log"""
    try:
        value = float(s)
    except ValueError:
        raise ArgumentTypeError(f"invalid tolerance: {s!r}") from None
    if not 0 < value < math.inf:
        raise ArgumentTypeError(f"tolerance must be positive, got {s}")
    return math.log(value)


def positive_int(s: str) -> int:
    try:
        value = int(s)
    except ValueError:
        raise ArgumentTypeError(f"invalid integer: {s!r}") from None
    if value < 1:
        raise ArgumentTypeError(f"must be positive, got {value}")
    return value


def nonnegative_int(s: str) -> int:
    try:
        value = int(s)
    except ValueError:
        raise ArgumentTypeError(f"invalid integer: {s!r}") from None
    if value < 0:
        raise ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def positive_float(s: str) -> float:
    try:
        value = float(s)
    except ValueError:
        raise ArgumentTypeError(f"invalid number: {s!r}") from None
    if not 0 < value < math.inf:
        raise ArgumentTypeError(f"must be positive, got {s}")
    return value


def family(s: str) -> Dict[str, Any]:
    try:
        return parse_family(s)
    except WeightSpecError as exc:
        raise ArgumentTypeError(str(exc)) from None


def parse_family(s: str) -> Dict[str, Any]:
    """An inline weight spec: 'beauzamy(1, 2)', 'supexp(gamma=1)' or JSON

    Positional parameters follow the family's parameter order. The result
    is a spec mapping; building the sequence is left to `from_spec`, so
    domain errors surface with the field they concern.
    """
    text = s.strip()
    if text.startswith("{"):
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise WeightSpecError("family", f"malformed JSON: {exc}") from None
        if not isinstance(spec, dict):
            raise WeightSpecError("family", "expected a JSON object")
        return spec

    name, paren, rest = text.partition("(")
    name = name.strip()
    if not paren:
        return {"family": name}
    if not rest.rstrip().endswith(")"):
        raise WeightSpecError("family", f"unbalanced parentheses in {s!r}")

    args, kwargs = _split_call(rest.rstrip()[:-1])
    cls = FAMILIES.get(name)
    if cls is None:
        raise WeightSpecError(
            "family", f"unknown family {name!r}, expected one of {sorted(FAMILIES)}"
        )
    if len(args) > len(cls.params):
        raise WeightSpecError(
            "family", f"{name} takes at most {len(cls.params)} parameters"
        )
    spec: Dict[str, Any] = {"family": name}
    spec.update(zip(cls.params, args))
    for key, value in kwargs.items():
        if key in spec:
            raise WeightSpecError(key, "given twice")
        spec[key] = value
    return spec


def _split_call(body: str) -> tuple:
    """Parse 'a, b, c=1' into ([a, b], {c: 1}) with literal values"""
    try:
        call = ast.parse(f"f({body})", mode="eval").body
    except SyntaxError:
        raise WeightSpecError(
            "family", f"cannot parse parameters: {body!r}"
        ) from None
    try:
        args = [literal_eval(arg) for arg in call.args]
        kwargs = {kw.arg: literal_eval(kw.value) for kw in call.keywords}
    except ValueError:
        raise WeightSpecError(
            "family", f"parameters must be literals: {body!r}"
        ) from None
    return args, kwargs


def rho(s: str) -> Rho:
    try:
        return Rho.parse(s)
    except ValueError as exc:
        raise ArgumentTypeError(str(exc)) from None
