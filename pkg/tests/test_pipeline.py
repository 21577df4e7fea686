from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from determinacy.algebra import parse_poly
from determinacy.carleman import GevreyLog
from determinacy.config import parse_problem
from determinacy.errors import NotInFittingIdeal, NotInJacobian, NotPrimitive, SeparationUnverified
from determinacy.groebner import Ideal, ideal_equal, ideal_member
from determinacy.lojasiewicz import Branch, SamplePlan
from determinacy.pipeline import analyze, beta_table, isolated_pipeline, jsonable, round_exponent

from conftest import X2, X3, P

BRANCHES = [{"params": ["u"], "z": ["I*u^2", "u"]}, {"params": ["u"], "z": ["-I*u^2", "u"]}]
SMALL_PLAN = {"radii": {"hi": 0.0625, "lo": 3.814697265625e-06, "count": 29}, "directions": 16}


def curve_problem(mu, alpha="1", **extra):
    obj = {"variables": list(X2), "f": "(x1^2+x2^4)^2", "psi": list(X2),
           "Y": {"type": "power_curve", "mu": mu}, "sequence": {"alpha": alpha, "beta": 0},
           "strategy": "user", "g": "(x1^2+x2^4)^2", "branches": BRANCHES, "plan": SMALL_PLAN}
    obj.update(extra)
    return parse_problem(obj)


# -- beta table and rounding -------------------------------------------------

def test_beta_table_examples():
    assert beta_table(1, Fraction(1, 2)) == 2
    assert beta_table(1, Fraction(3, 2)) == Fraction(4, 3)
    assert beta_table(1, 3) == 1


@pytest.mark.parametrize("alpha,mu", [(0, 1), (1, 0), (-1, 2), (1, -0.5)])
def test_beta_table_rejects_nonpositive(alpha, mu):
    with pytest.raises(ValueError):
        beta_table(alpha, mu)


@settings(max_examples=100, deadline=None)
@given(st.fractions(Fraction(1, 10), 5, max_denominator=10),
       st.fractions(Fraction(1, 20), 6, max_denominator=20),
       st.fractions(Fraction(1, 20), 6, max_denominator=20))
def test_beta_table_non_increasing(alpha, m1, m2):
    lo, hi = sorted((m1, m2))
    assert beta_table(alpha, hi) <= beta_table(alpha, lo)


@pytest.mark.parametrize("edge", [Fraction(1), Fraction(2)])
def test_beta_table_continuous_at_breakpoints(edge):
    eps = Fraction(1, 10 ** 9)
    left, right = beta_table(1, edge - eps), beta_table(1, edge + eps)
    assert abs(left - beta_table(1, edge)) < 1e-8 and abs(right - beta_table(1, edge)) < 1e-8


def test_round_exponent():
    assert round_exponent(1.3408) == Fraction(4, 3)
    assert round_exponent(2.00003) == 2
    assert isinstance(round_exponent(1.0 + 1 / 26), Fraction)
    assert round_exponent(1.5, max_den=1) == 1.5  # no integer within 0.05


@settings(max_examples=200, deadline=None)
@given(st.floats(1, 3))
def test_round_exponent_is_nearest_small_fraction(s):
    q = round_exponent(s)
    best = min(abs(Fraction(k, d) - Fraction(s)) for d in range(1, 13) for k in range(d, 3 * d + 1))
    assert isinstance(q, Fraction)  # denominators up to 12 leave no gap of 0.1 in [1, 3]
    assert abs(q - Fraction(s)) == best


def test_jsonable():
    import numpy as np

    out = jsonable({"a": Fraction(4, 3), "b": Fraction(2), "c": float("inf"), "d": np.float64(0.5),
                    "e": [np.int64(3), np.bool_(True)], "f": P("x1^2")})
    assert out == {"a": "4/3", "b": 2, "c": "inf", "d": 0.5, "e": [3, True], "f": "x1^2"}


# -- analyze -----------------------------------------------------------------

def test_analyze_unit_ideal():
    spec = parse_problem({"variables": list(X2), "f": "x1^2+x2^2", "Y": {"type": "origin"}})
    rep = analyze(spec)
    assert rep.g == "1" and rep.s == "1"
    assert rep.theta == {"c": 1, "mu": 1, "nu": 0}
    assert rep.target == GevreyLog(1, 0).describe()
    assert "no loss" in rep.conclusion


def test_analyze_not_primitive_keeps_partial_report():
    spec = parse_problem({"variables": list(X2), "f": "x1"})
    with pytest.raises(NotPrimitive) as exc:
        analyze(spec)
    rep = exc.value.report
    assert rep.conclusion is None
    assert [c.passed for c in rep.checks if c.name == "f in Int<psi>"] == [False]


def test_analyze_user_g_outside_kf():
    spec = curve_problem(1.5, g="x1^2+x2^4")
    with pytest.raises(NotInFittingIdeal):
        analyze(spec)


def test_lowest_degree_minor_has_real_zeros():
    # the lowest-degree minor -4 x1 (x1^2 + x2^4) vanishes on the real x2-axis
    spec = curve_problem(1.5, strategy="lowest-degree-minor")
    spec.strategy = "lowest-degree-minor"
    with pytest.raises(SeparationUnverified) as exc:
        analyze(spec)
    rep = exc.value.report
    assert parse_poly(rep.g, X2) == P("x1^3 + x1*x2^4")
    assert rep.conclusion is None


def test_all_minors_strategy_reports_each_candidate():
    spec = curve_problem(1.5, strategy="all-minors-best-fit")
    with pytest.raises(SeparationUnverified) as exc:
        analyze(spec)
    assert len(exc.value.report.candidates) == 3


def test_space_sextic_report(worked_reports):
    rep = worked_reports["space_sextic"]
    g = P("(x1^2+x2^2+x3^4)^2*(3*x1^2+3*x2^2+x3^4)^2", X3)
    assert parse_poly(rep.g, X3) == g
    assert rep.s == "4/3"
    assert rep.target == GevreyLog(Fraction(4, 3), 0).describe()
    assert rep.conclusion and rep.verification["ok"]


def test_plane_quartic_report(worked_reports):
    rep = worked_reports["plane_quartic"]
    assert rep.s == "4/3"
    assert rep.target == GevreyLog(Fraction(4, 3), 0).describe()
    assert rep.conclusion


@pytest.mark.parametrize("name,variables", [("plane_quartic", X2), ("space_sextic", X3)])
def test_report_soundness(worked_reports, name, variables):
    rep = worked_reports[name]
    gens = [parse_poly(m, variables) for m in rep.kf_generators]
    basis = Ideal([parse_poly(b, variables) for b in rep.kf_basis])
    for m in gens:
        assert ideal_member(m, basis).is_member
    assert ideal_equal(Ideal(gens), basis)
    # the g certificate reconstructs g over the listed generators
    cof = [parse_poly(c, variables) for c in rep.g_cofactors]
    total = sum((c * m for c, m in zip(cof, gens)), parse_poly("0", variables))
    assert total == parse_poly(rep.g, variables)
    # every piece of evidence names a passed check
    passed = {c.name for c in rep.checks if c.passed}
    assert rep.evidence and set(rep.evidence) <= passed
    assert len(rep.evidence) == len(rep.checks)


@pytest.mark.parametrize("mu", ["1/2", "1", "3/2", "2", "3"])
def test_rounded_exponent_matches_beta_table(mu):
    alpha = Fraction(3, 2)
    rep = analyze(curve_problem(mu, alpha="3/2"))
    assert alpha * Fraction(rep.s) == beta_table(alpha, Fraction(mu))
    assert rep.target["alpha"] == beta_table(alpha, Fraction(mu))


def test_log_corrected_target_heuristic():
    """Y carries a log factor: expect GevreyLog(2 alpha / mu, 2 nu / mu).

    Sampled and best effort: the log correction only shows at very small
    radii, so this run samples 2^-14..2^-30.
    """
    mu, nu = Fraction(3, 2), 1
    spec = curve_problem("3/2", Y={"type": "power_curve", "mu": "3/2", "log_power": nu}, fit_nu=True,
                         plan={"radii": {"hi": 2 ** -14, "lo": 2 ** -30, "count": 65}, "directions": 16})
    rep = analyze(spec)
    assert rep.target["alpha"] == 2 / mu
    assert rep.target["beta"] == pytest.approx(float(2 * nu / mu), rel=0.15)
    assert rep.conclusion


# -- isolated singularities --------------------------------------------------

def test_isolated_example_gives_square():
    f = P("(x1^2+x2^4)^2")
    branches = [Branch.parse(b["params"], b["z"]) for b in BRANCHES]
    plan = SamplePlan(radii=SamplePlan().radii[::2], directions=16)
    rep = isolated_pipeline(f, GevreyLog(1, 0), f, plan, branches)
    assert rep.s == "2"
    assert rep.target == GevreyLog(2, 0).describe()
    assert all(c.passed for c in rep.checks)
    assert any(c.name == "x_k^(n-2) df/dx_j in K_f" for c in rep.checks)


def test_isolated_morse_no_loss():
    f = P("x1^2+x2^2")
    rep = isolated_pipeline(f, GevreyLog(1, 0), f, SamplePlan(directions=16))
    assert rep.s == "1" and rep.target == GevreyLog(1, 0).describe()
    assert rep.fit["s_hat"] == pytest.approx(1.0, abs=1e-6)


def test_isolated_requires_gamma_in_jacobian_ideal():
    f = P("(x1^2+x2^4)^2")
    with pytest.raises(NotInJacobian):
        isolated_pipeline(f, GevreyLog(1, 0), P("x1"))
