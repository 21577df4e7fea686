"""Shared fixtures: sympy conversions and hypothesis strategies for polynomials."""

from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import strategies as st

from determinacy.algebra import Polynomial, parse_poly

X2 = ("x1", "x2")
X3 = ("x1", "x2", "x3")


def P(text, variables=X2) -> Polynomial:
    return parse_poly(text, variables)


def to_sympy(p: Polynomial):
    syms = sympy.symbols(p.variables)
    expr = sympy.Integer(0)
    for mono, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, mono):
            term *= s ** e
        expr += term
    return expr


def from_sympy(expr, variables) -> Polynomial:
    poly = sympy.Poly(sympy.expand(expr), *sympy.symbols(variables))
    return Polynomial(variables, {m: Fraction(int(c.p), int(c.q)) for m, c in poly.terms()})


def polynomials(variables=X2, max_deg=3, max_terms=4, allow_zero=True):
    n = len(variables)
    mono = st.tuples(*[st.integers(0, max_deg)] * n).filter(lambda m: sum(m) <= max_deg)
    coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    terms = st.dictionaries(mono, coef, min_size=0 if allow_zero else 1, max_size=max_terms)
    out = terms.map(lambda t: Polynomial(variables, t))
    return out if allow_zero else out.filter(lambda p: not p.is_zero())


@pytest.fixture(scope="session")
def plane_quartic_kf():
    """f = (x1^2+x2^4)^2 with psi the coordinates."""
    from determinacy.fitting import MapGerm, kf_pipeline

    f = P("(x1^2+x2^4)^2")
    psi = MapGerm([P("x1"), P("x2")])
    return f, psi, kf_pipeline(psi, f)


@pytest.fixture(scope="session")
def space_sextic_kf():
    """f = (x1^2+x2^2+x3^4)^2 (x1^2+x2^2) with psi = (x1, x2)."""
    from determinacy.fitting import MapGerm, kf_pipeline

    f = P("(x1^2+x2^2+x3^4)^2*(x1^2+x2^2)", X3)
    psi = MapGerm([P("x1", X3), P("x2", X3)])
    return f, psi, kf_pipeline(psi, f)


EXAMPLES = __import__("pathlib").Path(__file__).resolve().parents[1] / "worked_examples"


@pytest.fixture(scope="session")
def worked_reports():
    """Reports of ``analyze`` on the two shipped configs, computed once."""
    from determinacy.config import load_problem
    from determinacy.pipeline import analyze

    return {name: analyze(load_problem(EXAMPLES / f"{name}.json")) for name in ("plane_quartic", "space_sextic")}


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
