import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from determinacy.algebra import PolyMatrix, Polynomial
from determinacy.errors import DegenerateIdeal, NotInIdeal, NotPrimitive
from determinacy.fitting import (
    MapGerm,
    assemble,
    attach_minors,
    build_lambda,
    dol_failures,
    fitting_ideal,
    kf_pipeline,
    primitive_member,
    sigma_apply,
)
from determinacy.groebner import Ideal, ideal_equal, normal_form

from conftest import X2, X3, P, polynomials


def coords(variables):
    return MapGerm([Polynomial.variable(variables, k) for k in range(len(variables))])


def test_map_germ_requires_vanishing_components():
    with pytest.raises(ValueError, match="vanish"):
        MapGerm([P("x1+1")])


def test_sigma_apply_examples():
    psi = coords(X2)
    assert sigma_apply((P("x2"), P("-x1")), psi).is_zero()
    assert sigma_apply((P("4*(x1^2+x2^4)"), P("0")), psi) == P("4*x1*(x1^2+x2^4)")
    assert sigma_apply((P("0"), P("0")), psi).is_zero()


def test_primitive_member_examples():
    m = Ideal([P("x1", X3), P("x2", X3)])
    assert primitive_member(P("x1^2", X3), m)
    assert primitive_member(P("(x1^2+x2^2+x3^4)^2*(x1^2+x2^2)", X3), m)
    res = primitive_member(P("x1"), Ideal([P("x1"), P("x2")]))
    assert not res and res.which == 1 and res.witness == P("1")


def test_primitive_member_rejects_constant_term():
    with pytest.raises(ValueError):
        primitive_member(P("x1+1"), Ideal([P("x1")]))


def test_integral_of_coordinate_ideal():
    m = Ideal([P("x1", X3), P("x2", X3)])
    for text in ("x1^2", "x1*x2", "x2^2", "x3*x1^2"):
        assert primitive_member(P(text, X3), m)
    for text in ("x1", "x2", "x1*x3"):
        assert not primitive_member(P(text, X3), m)


def test_build_lambda_plane_quartic(plane_quartic_kf):
    f, psi, _ = plane_quartic_kf
    res = build_lambda(psi, MapGerm(f.gradient()))
    for h, phi in zip(res.lifts, f.gradient()):
        assert sigma_apply(h, psi) == phi
    assert len(res.relations) == 1
    assert res.lam.rows == 2 and res.lam.cols == 3
    # same ideal as the hand-built matrix with lifts (4q, 0), (0, 8 x2^2 q)
    q = "(x1^2+x2^4)"
    hand = assemble([(P(f"4*{q}"), P("0")), (P("0"), P(f"8*x2^2*{q}"))], [(P("x2"), P("-x1"))])
    assert ideal_equal(attach_minors(res).ideal, attach_minors(hand).ideal)


def test_build_lambda_identity_lifts():
    res = build_lambda(coords(X2), coords(X2))
    assert res.lam.row(0)[:2] == [P("1"), P("0")] and res.lam.row(1)[:2] == [P("0"), P("1")]


def test_build_lambda_single_lift_column():
    psi = coords(X3).components[:2]
    res = build_lambda(MapGerm(psi), MapGerm([P("x3*x1", X3)]))
    assert res.lifts == [(P("x3", X3), P("0", X3))]


def test_build_lambda_missing_lift():
    with pytest.raises(NotInIdeal) as exc:
        build_lambda(MapGerm([P("x1")]), MapGerm([P("x2")]))
    assert exc.value.witness == P("x2")


def test_fitting_ideal_plane_quartic(plane_quartic_kf):
    _, _, res = plane_quartic_kf
    expect = Ideal([P("x1*(x1^2+x2^4)"), P("x2^3*(x1^2+x2^4)")])
    assert ideal_equal(res.ideal, expect)


def test_fitting_ideal_morse_point_is_unit():
    res = kf_pipeline(coords(X2), P("x1^2+x2^2"))
    assert res.minors[0] == P("4") and res.ideal.is_unit()


def test_fitting_ideal_space_sextic_contains_g(space_sextic_kf):
    _, _, res = space_sextic_kf
    g = P("(x1^2+x2^2+x3^4)^2*(3*x1^2+3*x2^2+x3^4)^2", X3)
    assert normal_form(g, res.ideal).is_zero()


def test_degenerate_ideal():
    # phi = 0 lifts to zero columns; with one variable psi has no relations
    psi = MapGerm([P("x1", ("x1",))])
    with pytest.raises(DegenerateIdeal):
        fitting_ideal(psi, MapGerm([P("0", ("x1",))]))


def test_kf_pipeline_not_primitive():
    with pytest.raises(NotPrimitive) as exc:
        kf_pipeline(coords(X2), P("x1"))
    assert exc.value.which == 1


@pytest.mark.parametrize("which", ["plane_quartic_kf", "space_sextic_kf"])
def test_lift_and_relation_soundness(which, request):
    f, psi, res = request.getfixturevalue(which)
    for h, phi in zip(res.lifts, f.gradient()):
        assert sigma_apply(h, psi) == phi
    for k in res.relations:
        assert sigma_apply(k, psi).is_zero()
    assert len(res.minors) == len(res.minor_labels)


@pytest.mark.parametrize("which", ["plane_quartic_kf", "space_sextic_kf"])
def test_minors_times_psi_in_jacobian_ideal(which, request):
    f, psi, res = request.getfixturevalue(which)
    assert dol_failures(res, psi, MapGerm(f.gradient())) == []


@pytest.mark.parametrize("seed", range(3))
def test_lift_independence(plane_quartic_kf, seed):
    _, _, res = plane_quartic_kf
    rng = random.Random(seed)
    mult = [P(t) for t in ("1", "x1", "x2", "x1^2 - 3*x2", "2*x1*x2")]
    lifts = []
    for h in res.lifts:
        extra = [P("0"), P("0")]
        for k in res.relations:
            c = rng.choice(mult)
            extra = [e + c * ki for e, ki in zip(extra, k)]
        lifts.append(tuple(a + b for a, b in zip(h, extra)))
    other = attach_minors(assemble(lifts, res.relations))
    assert ideal_equal(other.ideal, res.ideal)


def kf_with_identity_contains_multiples(f):
    n = f.nvars
    res = kf_pipeline(coords(f.variables), f)
    for k in range(n):
        xk = Polynomial.variable(f.variables, k) ** (n - 2)
        for d in f.gradient():
            if not normal_form(xk * d, res.ideal).is_zero():
                return False
    return True


def test_identity_psi_specialization():
    assert kf_with_identity_contains_multiples(P("(x1^2+x2^4)^2"))
    assert kf_with_identity_contains_multiples(P("x1^2*x2 + x2^3*x3 + x3^4", X3))


@settings(max_examples=15, deadline=None)
@given(polynomials(X2, max_deg=4, max_terms=3, allow_zero=False))
def test_identity_psi_specialization_random(h):
    f = h * P("x1^2") + P("x2^3")  # starts in degree >= 2, so grad f vanishes at 0
    if f.constant_term() != 0 or any(d.constant_term() != 0 for d in f.gradient()):
        return
    try:
        ok = kf_with_identity_contains_multiples(f)
    except DegenerateIdeal:
        return
    assert ok
