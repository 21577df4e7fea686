"""Exact polynomial arithmetic, parsing, evaluation and minors."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .matrix import PolyMatrix, determinant, minor_columns, minors
from .parser import ParseError, UnknownIdentifier, parse_poly
from .polynomial import Polynomial, VariableMismatch, grevlex_key

__all__ = [
    "ParseError",
    "PolyMatrix",
    "Polynomial",
    "UnknownIdentifier",
    "VariableMismatch",
    "derive",
    "determinant",
    "evaluate",
    "grevlex_key",
    "minor_columns",
    "minors",
    "parse_poly",
    "poly_arith",
]


def poly_arith(op: str, a: Polynomial, b) -> Polynomial:
    """Apply ``add``, ``sub``, ``mul`` or ``pow`` (``b`` is then an int)."""
    if op == "pow":
        return a ** b
    if not isinstance(b, Polynomial):
        raise TypeError("second operand must be a Polynomial")
    if a.variables != b.variables:
        raise VariableMismatch(f"variables {a.variables} vs {b.variables}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def derive(p: Polynomial, i: int) -> Polynomial:
    """Partial derivative with respect to x_i, with ``i`` counted from 1."""
    if not 1 <= i <= p.nvars:
        raise IndexError(f"variable index {i} out of range 1..{p.nvars}")
    return p.derive(i - 1)


def evaluate(p: Polynomial, z: Sequence[complex]) -> complex:
    """Value of ``p`` at one complex point; overflow gives infinite parts."""
    try:
        return complex(p.evaluate([complex(c) for c in z]))
    except OverflowError:
        with np.errstate(over="ignore", invalid="ignore"):
            return complex(p.evaluate([np.complex128(c) for c in z]))


def evaluate_many(p: Polynomial, points: np.ndarray) -> np.ndarray:
    """Values at each row of a ``(N, n)`` array of (complex) points."""
    points = np.asarray(points)
    return np.asarray(p.evaluate([points[..., k] for k in range(p.nvars)]))
