"""Coframes given as expression strings in X1, X2, X3 and t."""
import logging
from typing import Callable, Optional, Sequence

import numpy as np
import sympy
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import (convert_xor, parse_expr,
                                        standard_transformations)

from src.exceptions import ConfigParseError
from src.frames.base import CoframeSpec

logger = logging.getLogger(__name__)

COORDINATE_SYMBOLS = sympy.symbols("X1 X2 X3 t")
PROFILE_SYMBOLS = sympy.symbols("s t")
ALLOWED_FUNCTIONS = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp}
# parse_expr needs these constructors; nothing else from sympy is visible to expressions
_GLOBALS = {"Integer": sympy.Integer, "Float": sympy.Float, "Rational": sympy.Rational,
            "Symbol": sympy.Symbol, "Function": sympy.Function}
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


def compile_expression(text: str, field: Optional[str] = None,
                       symbols: Sequence[sympy.Symbol] = COORDINATE_SYMBOLS) -> Callable[..., np.ndarray]:
    """Parse ``text`` and return a numpy function of ``symbols``, by default (X1, X2, X3, t).

    Grammar: ``+ - * / ^``, ``sin cos exp``, ``pi`` and the symbols.

    Raises:
        ConfigParseError: syntax error, unknown symbol or unknown function.
    """
    try:
        local_dict = {**{str(s): s for s in symbols}, **ALLOWED_FUNCTIONS, "pi": sympy.pi}
        expr = parse_expr(str(text), local_dict=local_dict, global_dict=dict(_GLOBALS),
                          transformations=_TRANSFORMATIONS)
    except Exception as e:
        raise ConfigParseError(f"cannot parse expression '{text}': {e}", field=field) from e

    expr = sympy.sympify(expr)
    unknown = expr.free_symbols - set(symbols)
    if unknown:
        names = ", ".join(sorted(str(s) for s in unknown))
        raise ConfigParseError(f"unknown symbol(s) {names} in '{text}'", field=field)
    undefined = expr.atoms(AppliedUndef)
    if undefined:
        names = ", ".join(sorted(str(f.func) for f in undefined))
        raise ConfigParseError(f"unknown function(s) {names} in '{text}'", field=field)
    if expr.has(sympy.I):
        raise ConfigParseError(f"complex constant in '{text}'", field=field)

    return sympy.lambdify(symbols, expr, modules="numpy")


class ExpressionCoframe(CoframeSpec):
    """Coframe from a 3×3 table of expression strings, row a holding e^a_1, e^a_2, e^a_3.

    Partials come from 4th-order stencils; expressions are never differentiated symbolically.
    """
    name = "expression"

    def __init__(self, rows: Sequence[Sequence[str]], t: float = 0.0, field: str = "frame.coframe"):
        rows = [list(r) for r in rows]
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ConfigParseError("coframe needs 3 rows of 3 expressions", field=field)
        super().__init__(rows=rows, t=float(t))
        self.rows = rows
        self.t = float(t)
        self._functions = [[compile_expression(text, f"{field}[{a}][{A}]") for A, text in enumerate(row)]
                           for a, row in enumerate(rows)]
        logger.debug(f"Compiled expression coframe {rows}")

    def at_time(self, t: float) -> "ExpressionCoframe":
        return ExpressionCoframe(self.rows, t=t)

    def components(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        batch = points.shape[:-1]
        x1, x2, x3 = points[..., 0], points[..., 1], points[..., 2]
        e = np.empty(batch + (3, 3))
        for a in range(3):
            for A in range(3):
                e[..., a, A] = np.broadcast_to(self._functions[a][A](x1, x2, x3, self.t), batch)
        return e


def compile_point_function(texts, field: str) -> Callable[[np.ndarray, float], np.ndarray]:
    """Nested lists of expression strings as a function ``(points, t) -> (..., *shape)``."""
    table = np.asarray(texts, dtype=object)
    functions = [compile_expression(text, f"{field}{list(index)}") for index, text in np.ndenumerate(table)]
    indices = [index for index, _ in np.ndenumerate(table)]

    def evaluate(points, t: float) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        batch = points.shape[:-1]
        out = np.empty(batch + table.shape)
        for index, func in zip(indices, functions):
            out[(...,) + index] = np.broadcast_to(func(points[..., 0], points[..., 1], points[..., 2], t), batch)
        return out

    return evaluate
