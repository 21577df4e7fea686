"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored as a mapping ``exponent tuple -> Fraction``.  Monomials are
compared with the graded reverse lexicographic order (grevlex), which is also
the order used for printing and by the Groebner machinery.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

Monomial = tuple[int, ...]


class VariableMismatch(ValueError):
    """Raised when two polynomials live in rings with different variables."""


@lru_cache(maxsize=200_000)
def grevlex_key(m: Monomial) -> tuple:
    """Sort key: a larger key means a larger monomial in grevlex."""
    return (sum(m), tuple(-e for e in reversed(m)))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_quotient(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


class Polynomial:
    """Immutable polynomial in a fixed, ordered list of variables."""

    __slots__ = ("variables", "terms", "_hash", "_lead", "_compiled")

    def __init__(self, variables: Sequence[str], terms: Mapping[Monomial, object] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[Monomial, Fraction] = {}
        for mono, coef in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n or any(e < 0 for e in mono):
                raise ValueError(f"bad exponent vector {mono} for {n} variables")
            c = _as_fraction(coef)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean
        self._hash = None
        self._lead = None
        self._compiled = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Monomial, Fraction]) -> "Polynomial":
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.variables = variables
        obj.terms = terms
        obj._hash = None
        obj._lead = None
        obj._compiled = None
        return obj

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> "Polynomial":
        variables = tuple(variables)
        c = _as_fraction(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def variable(cls, variables: Sequence[str], index: int) -> "Polynomial":
        variables = tuple(variables)
        mono = tuple(1 if k == index else 0 for k in range(len(variables)))
        return cls._raw(variables, {mono: Fraction(1)})

    @classmethod
    def monomial(cls, variables: Sequence[str], mono: Monomial, coef=1) -> "Polynomial":
        return cls(variables, {mono: coef})

    # -- basic queries -----------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in decreasing grevlex order."""
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        if self._lead is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            self._lead = max(self.terms, key=grevlex_key)
        return self._lead

    def leading_coefficient(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if self.variables != other.variables:
            raise VariableMismatch(f"variables {self.variables} vs {other.variables}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return Polynomial.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.variables, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Polynomial.zero(self.variables)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m)
                out[m] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial._raw(self.variables, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        c = _as_fraction(c)
        if not c:
            return Polynomial.zero(self.variables)
        return Polynomial._raw(self.variables, {m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono: Monomial, coef: Fraction) -> "Polynomial":
        """Multiply by the single term ``coef * x^mono``."""
        if not coef:
            return Polynomial.zero(self.variables)
        return Polynomial._raw(
            self.variables,
            {tuple(a + b for a, b in zip(m, mono)): c * coef for m, c in self.terms.items()},
        )

    def derive(self, i: int) -> "Polynomial":
        """Formal partial derivative with respect to the variable at 0-based index ``i``."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                out[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Polynomial._raw(self.variables, out)

    def gradient(self) -> list["Polynomial"]:
        return [self.derive(i) for i in range(self.nvars)]

    def substitute_ring(self, variables: Sequence[str]) -> "Polynomial":
        """Re-embed into a ring whose variable list contains ours."""
        variables = tuple(variables)
        pos = [variables.index(v) for v in self.variables]
        out = {}
        for m, c in self.terms.items():
            e = [0] * len(variables)
            for k, p in enumerate(pos):
                e[p] = m[k]
            out[tuple(e)] = c
        return Polynomial._raw(variables, out)

    # -- normalisation -----------------------------------------------------
    def content(self) -> Fraction:
        """Positive rational c with self / c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive_part(self) -> "Polynomial":
        """Integer-coprime multiple with positive leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return self.scale(1 / c)

    def monic(self) -> "Polynomial":
        return self.scale(1 / self.leading_coefficient())

    # -- comparison / hashing ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.variables, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, tuple(self.sorted_terms())))
        return self._hash

    # -- printing ----------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for k, (m, c) in enumerate(self.sorted_terms()):
            factors = [
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, m) if e
            ]
            mag = abs(c)
            if factors:
                body = "*".join(factors)
                if mag != 1:
                    body = f"{_fmt(mag)}*{body}"
            else:
                body = _fmt(mag)
            if k == 0:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r}, vars={list(self.variables)})"

    # -- numerical evaluation ---------------------------------------------
    def _horner(self):
        if self._compiled is None:
            self._compiled = _compile_horner(
                {m: float(c) for m, c in self.terms.items()}, self.nvars, 0
            )
        return self._compiled

    def evaluate(self, z: Sequence) -> complex | np.ndarray:
        """Horner evaluation at a point, or at arrays of points (broadcasting).

        ``z`` holds one entry per variable; entries may be complex scalars or
        numpy arrays of a common shape.  Coefficients are rounded to the
        nearest double.  Overflow yields ``inf`` rather than raising.
        """
        if len(z) != self.nvars:
            raise ValueError(f"point has {len(z)} coordinates, expected {self.nvars}")
        with np.errstate(over="ignore", invalid="ignore"):
            return _eval_horner(self._horner(), z)


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _compile_horner(terms: dict[Monomial, float], nvars: int, var: int):
    """Sparse nested Horner scheme.

    A scheme is either a float constant or ``(var, [(power, sub), ...])`` with
    powers of variable ``var`` in decreasing order.
    """
    while var < nvars and all(m[var] == 0 for m in terms):
        var += 1
    if var == nvars:
        return sum(terms.values()) if terms else 0.0
    groups: dict[int, dict[Monomial, float]] = {}
    for m, c in terms.items():
        groups.setdefault(m[var], {})[m] = c
    return (var, [(p, _compile_horner(g, nvars, var + 1)) for p, g in sorted(groups.items(), reverse=True)])


def _eval_horner(scheme, z):
    if not isinstance(scheme, tuple):
        return scheme
    var, branches = scheme
    x = z[var]
    p_prev, sub = branches[0]
    acc = _eval_horner(sub, z)
    for p, sub in branches[1:]:
        acc = acc * x ** (p_prev - p) + _eval_horner(sub, z)
        p_prev = p
    if p_prev:
        acc = acc * x ** p_prev
    return acc


def poly_from_terms(variables: Sequence[str], items: Iterable[tuple[Monomial, object]]) -> Polynomial:
    out: dict[Monomial, Fraction] = {}
    for m, c in items:
        out[m] = out.get(m, Fraction(0)) + _as_fraction(c)
    return Polynomial(variables, out)
