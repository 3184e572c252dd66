"""Closed-form expression strings compiled to jet-valued scalar fields.

Grammar: ``+ - * /``, ``^`` (or ``**``) with integer or real exponents,
``sqrt exp log sin cos``, numeric literals, chart variables and named
parameters.  Parsing goes through :mod:`ast` with a node whitelist; nothing
is ever passed to ``eval``.
"""

from __future__ import annotations

import ast
from typing import Callable, Mapping, Sequence

from . import jets
from .errors import ConfigError

_FUNCS = {
    "sqrt": jets.sqrt,
    "exp": jets.exp,
    "log": jets.log,
    "sin": jets.sin,
    "cos": jets.cos,
}


def _pow(base, exponent):
    if isinstance(exponent, jets.Jet):
        raise ConfigError("exponents must be constants")
    exponent = float(exponent)
    if exponent.is_integer():
        return jets.powi(base, int(exponent))
    return jets.power(base, exponent)


def _compile(node, variables: Sequence[str], params: Mapping[str, float]) -> Callable:
    if isinstance(node, ast.Expression):
        return _compile(node.body, variables, params)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ConfigError(f"unsupported literal {node.value!r}")
        v = float(node.value)
        return lambda c: v
    if isinstance(node, ast.Name):
        if node.id in variables:
            i = variables.index(node.id)
            return lambda c: c[i]
        if node.id in params:
            v = float(params[node.id])
            return lambda c: v
        raise ConfigError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp):
        inner = _compile(node.operand, variables, params)
        if isinstance(node.op, ast.USub):
            return lambda c: -inner(c)
        if isinstance(node.op, ast.UAdd):
            return inner
    if isinstance(node, ast.BinOp):
        left = _compile(node.left, variables, params)
        right = _compile(node.right, variables, params)
        op = node.op
        if isinstance(op, ast.Add):
            return lambda c: left(c) + right(c)
        if isinstance(op, ast.Sub):
            return lambda c: left(c) - right(c)
        if isinstance(op, ast.Mult):
            return lambda c: left(c) * right(c)
        if isinstance(op, ast.Div):
            return lambda c: _div(left(c), right(c))
        if isinstance(op, ast.Pow):
            return lambda c: _pow(left(c), right(c))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        fn = _FUNCS.get(node.func.id)
        if fn is None or len(node.args) != 1 or node.keywords:
            raise ConfigError(f"unsupported call {ast.unparse(node)!r}")
        arg = _compile(node.args[0], variables, params)
        return lambda c: fn(arg(c))
    raise ConfigError(f"unsupported syntax {ast.unparse(node)!r}")


def _div(a, b):
    if isinstance(b, jets.Jet):
        return a * jets.recip(b)
    return a / b if isinstance(a, jets.Jet) else a * jets.recip(b)


def parse_expression(text: str, variables: Sequence[str] = ("x", "y", "z"),
                     params: Mapping[str, float] | None = None) -> Callable:
    """Compile ``text`` into ``f(coords) -> Jet | float``.

    ``coords`` is any indexable of jets (or floats) ordered like ``variables``.
    """
    try:
        # '^' is XOR to Python, with the wrong precedence
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}") from None
    return _compile(tree, list(variables), dict(params or {}))
