"""Polynomial matrices and their minors."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .polynomial import Polynomial


@dataclass(frozen=True)
class PolyMatrix:
    rows: int
    cols: int
    entries: tuple[Polynomial, ...]  # row-major

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Polynomial]]) -> "PolyMatrix":
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("rows must be non-empty and of equal length")
        return cls(len(rows), len(rows[0]), tuple(e for r in rows for e in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Polynomial]]) -> "PolyMatrix":
        cols = [list(c) for c in columns]
        if not cols:
            raise ValueError("need at least one column")
        return cls.from_rows([[c[i] for c in cols] for i in range(len(cols[0]))])

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Polynomial]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def column(self, j: int) -> list[Polynomial]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_strings(self) -> list[list[str]]:
        return [[str(e) for e in self.row(i)] for i in range(self.rows)]


def determinant(m: Sequence[Sequence[Polynomial]], expand_row: int = 0) -> Polynomial:
    """Laplace expansion along ``expand_row`` (recursing along row 0)."""
    k = len(m)
    if k == 1:
        return m[0][0]
    if k == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = Polynomial.zero(m[0][0].variables)
    rest = [r for i, r in enumerate(m) if i != expand_row]
    for j, a in enumerate(m[expand_row]):
        if a.is_zero():
            continue
        sub = [[x for jj, x in enumerate(r) if jj != j] for r in rest]
        term = a * determinant(sub)
        total = total + term if (expand_row + j) % 2 == 0 else total - term
    return total


def minors(m: PolyMatrix, k: int, expand_row: int = 0) -> list[Polynomial]:
    """All k x k minors, rows and columns in lexicographic subset order.

    For the maximal-minor case (``k == rows``) the order is lexicographic in
    the chosen column indices.
    """
    if not 1 <= k <= min(m.rows, m.cols):
        raise ValueError(f"minor size {k} out of range for a {m.rows}x{m.cols} matrix")
    if not 0 <= expand_row < k:
        raise ValueError("expand_row must index a row of the minor")
    out = []
    for rows in combinations(range(m.rows), k):
        for cols in combinations(range(m.cols), k):
            sub = [[m[i, j] for j in cols] for i in rows]
            out.append(determinant(sub, expand_row))
    return out


def minor_columns(m: PolyMatrix, k: int) -> list[tuple[int, ...]]:
    """Column subsets matching the order of ``minors(m, k)`` when k == rows."""
    return list(combinations(range(m.cols), k))
