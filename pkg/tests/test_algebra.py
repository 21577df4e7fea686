from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from determinacy.algebra import (
    ParseError,
    PolyMatrix,
    Polynomial,
    UnknownIdentifier,
    VariableMismatch,
    derive,
    determinant,
    evaluate,
    minors,
    parse_poly,
    poly_arith,
)

from conftest import X2, X3, P, from_sympy, polynomials, to_sympy


# -- parsing -----------------------------------------------------------------

def test_parse_expands_binomial():
    assert P("(x1^2+x2^4)^2") == P("x1^4 + 2*x1^2*x2^4 + x2^8")


def test_parse_commutativity_cancels():
    assert P("x1*x2 - x2*x1").is_zero()


def test_parse_unknown_identifier():
    with pytest.raises(UnknownIdentifier, match="y"):
        P("x1 + y")


@pytest.mark.parametrize("text", ["x1 +", "(x1", "x1 ^ -2", "x1 ** 2", "2 x1", "x1 / x2"])
def test_parse_syntax_errors(text):
    with pytest.raises(ParseError):
        P(text)


def test_parse_rationals_and_unary_minus():
    p = P("-3/4*x1^2 + 1/2 - (x2)")
    assert p.terms == {(2, 0): Fraction(-3, 4), (0, 0): Fraction(1, 2), (0, 1): Fraction(-1)}


def test_parse_matches_sympy_on_example():
    text = "(x1^2+x2^2+x3^4)^2*(3*x1^2+3*x2^2+x3^4)^2"
    ours = P(text, X3)
    oracle = from_sympy(sympy.sympify(text.replace("^", "**")), X3)
    assert ours == oracle


@settings(max_examples=60, deadline=None)
@given(polynomials(X3, max_deg=4, max_terms=6))
def test_print_parse_roundtrip(p):
    assert parse_poly(str(p), X3) == p


# -- arithmetic --------------------------------------------------------------

def test_arith_examples():
    x1, x2 = P("x1"), P("x2")
    assert poly_arith("add", x1, -x1).is_zero()
    assert poly_arith("pow", x1 + x2, 2) == P("x1^2 + 2*x1*x2 + x2^2")
    q = P("x1^2+x2^4")
    assert poly_arith("mul", q, q) == P("x1^4+2*x1^2*x2^4+x2^8")


def test_arith_variable_mismatch():
    with pytest.raises(VariableMismatch):
        poly_arith("add", P("x1"), P("x1", X3))


def test_pow_rejects_negative():
    with pytest.raises(ValueError):
        P("x1") ** -1


@settings(max_examples=80, deadline=None)
@given(polynomials(), polynomials(), polynomials())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a - a).is_zero()


@settings(max_examples=40, deadline=None)
@given(polynomials(), polynomials())
def test_product_matches_sympy(a, b):
    assert a * b == from_sympy(to_sympy(a) * to_sympy(b), X2)


@settings(max_examples=40, deadline=None)
@given(polynomials(), st.integers(0, 4))
def test_power_is_repeated_product(a, k):
    expect = Polynomial.constant(X2, 1)
    for _ in range(k):
        expect = expect * a
    assert a ** k == expect


# -- derivatives -------------------------------------------------------------

def test_derive_examples():
    f = P("(x1^2+x2^4)^2")
    assert derive(f, 1) == P("4*x1*(x1^2+x2^4)")
    assert derive(f, 2) == P("8*x2^3*(x1^2+x2^4)")


def test_derive_space_sextic_against_sympy():
    f = P("(x1^2+x2^2+x3^4)^2*(x1^2+x2^2)", X3)
    hand = P("2*x1*(x1^2+x2^2+x3^4)*(3*x1^2+3*x2^2+x3^4)", X3)
    x1 = sympy.Symbol("x1")
    assert derive(f, 1) == hand == from_sympy(sympy.diff(to_sympy(f), x1), X3)


def test_derive_index_range():
    with pytest.raises(IndexError):
        derive(P("x1"), 3)
    with pytest.raises(IndexError):
        derive(P("x1"), 0)


@settings(max_examples=60, deadline=None)
@given(polynomials(), polynomials(), st.integers(1, 2), st.fractions(-3, 3, max_denominator=3))
def test_derive_linear_and_leibniz(a, b, i, c):
    assert derive(a + b.scale(c), i) == derive(a, i) + derive(b, i).scale(c)
    assert derive(a * b, i) == derive(a, i) * b + a * derive(b, i)


# -- evaluation --------------------------------------------------------------

def test_evaluate_examples():
    q = P("x1^2+x2^4")
    assert evaluate(q, [1j, 0]) == pytest.approx(-1)
    t = 0.3
    assert abs(evaluate(q, [1j * t * t, t])) < 1e-15
    f = P("(x1^2+x2^4)^2")
    # (0.01 + 0.0016)^2
    assert evaluate(f, [0.1, 0.2]) == pytest.approx(1.3456e-4, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(polynomials(X3, max_deg=4, max_terms=6),
       st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=3, max_size=3))
def test_evaluate_matches_sympy(p, z):
    syms = sympy.symbols(X3)
    oracle = complex(to_sympy(p).subs(dict(zip(syms, z))))
    assert evaluate(p, z) == pytest.approx(oracle, rel=1e-9, abs=1e-9)


def test_evaluate_overflow_gives_infinity():
    v = evaluate(P("x1^400"), [1e10, 0])
    assert v.real == float("inf")


# -- minors ------------------------------------------------------------------

def test_minors_identity_and_equal_columns():
    one, zero = P("1"), P("0")
    assert minors(PolyMatrix.from_rows([[one, zero], [zero, one]]), 2) == [one]
    a, b = P("x1"), P("x2")
    assert minors(PolyMatrix.from_rows([[a, a], [b, b]]), 2) == [zero]


def test_minors_lambda_matrix_example():
    q = "(x1^2+x2^4)"
    lam = PolyMatrix.from_rows([
        [P(f"4*{q}"), P("0"), P("x2")],
        [P("0"), P(f"8*x2^2*{q}"), P("-x1")],
    ])
    expect = [P(f"32*x2^2*{q}^2"), P(f"-4*x1*{q}"), P(f"-8*x2^3*{q}")]
    assert minors(lam, 2) == expect


def test_minors_size_out_of_range():
    m = PolyMatrix.from_rows([[P("x1"), P("x2")]])
    with pytest.raises(ValueError):
        minors(m, 2)


@settings(max_examples=30, deadline=None)
@given(st.lists(polynomials(max_deg=2, max_terms=3), min_size=9, max_size=9))
def test_laplace_expansion_row_independent(entries):
    rows = [entries[0:3], entries[3:6], entries[6:9]]
    dets = [determinant(rows, expand_row=r) for r in range(3)]
    assert dets[0] == dets[1] == dets[2]
    oracle = sympy.Matrix([[to_sympy(e) for e in row] for row in rows]).det()
    assert dets[0] == from_sympy(oracle, X2)
