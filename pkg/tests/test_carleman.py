import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from determinacy.carleman import (
    AdmissibleFunction,
    GevreyLog,
    Tabulated,
    check_admissible,
    check_nonqa,
    check_tame,
    compare_sequences,
    find_hsq_constant,
    h_eval,
    log_h,
    mtheta_closed,
    mtheta_numeric,
    remark_bound,
    sandwich_constants,
)

gevrey = st.builds(GevreyLog, st.fractions(0, 3, max_denominator=4), st.fractions(0, 2, max_denominator=4))


# -- tameness ----------------------------------------------------------------

def test_check_tame_examples():
    rep = check_tame(GevreyLog(1, 0), 50)
    assert rep.ok and rep.A == 2
    assert check_tame(GevreyLog(1, 1), 50).ok
    bad = check_tame(Tabulated.from_values([1, 0.5, 2, 8]), 3)
    assert not bad.ok and "increas" in bad.violation


def test_check_tame_detects_concavity():
    rep = check_tame(Tabulated.from_values([1, 4, 5, 6]), 3)
    assert not rep.ok


def test_moderate_growth_constant_is_a_true_bound():
    # (j+k)! <= A^(j+k) j! k! for every j, k <= 25 with the reported A
    A = check_tame(GevreyLog(1, 0), 50).A
    for j in range(26):
        for k in range(26):
            assert math.factorial(j + k) <= A ** (j + k) * math.factorial(j) * math.factorial(k)


def test_gevrey_log_values_no_overflow():
    L = GevreyLog(2, 1).log_values(500)
    assert np.all(np.isfinite(L)) and L[0] == 0


# -- non-quasianalyticity ----------------------------------------------------

def test_nonqa_examples():
    rep = check_nonqa(GevreyLog(1, 0), 100)
    assert rep.verdict == "non-quasianalytic" and not rep.heuristic
    assert check_nonqa(GevreyLog(0, 0), 100).verdict == "quasianalytic"
    assert check_nonqa(GevreyLog(0, 2), 100).verdict == "non-quasianalytic"
    assert check_nonqa(GevreyLog(0, 1), 100).verdict == "quasianalytic"


def test_nonqa_term_formula():
    sums = check_nonqa(GevreyLog(1, 0), 50).partial_sums
    exact = np.cumsum([1 / (j + 1) ** 2 for j in range(51)])
    assert np.allclose(sums, exact, rtol=1e-12)


def test_nonqa_tabulated_is_heuristic():
    seq = Tabulated(tuple(GevreyLog(1, 0).log_values(60)))
    rep = check_nonqa(seq, 40)
    assert rep.heuristic and rep.verdict == "non-quasianalytic"


def test_nonqa_rejects_short_range():
    with pytest.raises(ValueError):
        check_nonqa(GevreyLog(1, 0), 5)


# -- h_M ---------------------------------------------------------------------

def test_h_eval_examples():
    assert h_eval(GevreyLog(1, 0), 1.0) == 1.0
    assert h_eval(GevreyLog(2, 1), 3.0) == 1.0
    assert h_eval(GevreyLog(1, 0), 0.1) == pytest.approx(math.factorial(10) * 1e-10, rel=1e-9)


def test_h_eval_rejects_nonpositive():
    with pytest.raises(ValueError):
        h_eval(GevreyLog(1, 0), 0.0)


def test_h_exact_infimum_matches_brute_force():
    M = GevreyLog(Fraction(3, 2), Fraction(1, 2))
    t = np.logspace(-3, 0, 60)
    exact = log_h(M, t).log_h
    brute = log_h(M, t, jmax=2000)
    assert not brute.truncated
    assert np.allclose(exact, brute.log_h, rtol=1e-12, atol=1e-12)


def test_h_truncation_is_flagged():
    assert log_h(GevreyLog(1, 0), [1e-6], jmax=20).truncated


@settings(max_examples=30, deadline=None)
@given(gevrey)
def test_h_monotone_bounded(M):
    t = np.logspace(-6, 1, 200)
    lh = log_h(M, t).log_h
    # -inf marks values below double range; comparisons stay valid there
    assert np.all(lh[1:] >= lh[:-1] - 1e-12)
    assert np.all(lh <= 1e-15)
    assert np.all(lh[t >= 1] == 0)


def test_recovery_identity_on_tabulated_sequence():
    M = Tabulated(tuple(GevreyLog(1, Fraction(1, 2)).log_values(40)))
    t = np.logspace(-12, 0, 4000)
    lh = log_h(M, t).log_h
    for j in range(21):
        rec = np.max(-j * np.log(t) + lh)
        assert math.exp(rec - M.logs[j]) == pytest.approx(1.0, rel=1e-2)


def test_hsq_constant_examples():
    assert find_hsq_constant(GevreyLog(1, 0)) <= 2
    assert find_hsq_constant(GevreyLog(0, 0)) == 1
    assert find_hsq_constant(GevreyLog(2, 0)) <= 4


# -- admissible functions ----------------------------------------------------

def test_check_admissible_examples():
    rep = check_admissible(AdmissibleFunction(1, 2, 0))
    assert rep.ok and rep.s == pytest.approx(2)
    assert not check_admissible(AdmissibleFunction(1, 0.5, 0)).ok
    rep = check_admissible(AdmissibleFunction(1, 1.5, 1))
    assert rep.ok and rep.s <= rep.s_bound == 3.5


def test_theta_inverse_roundtrip():
    th = AdmissibleFunction(0.3, 1.5, 2)
    t = np.logspace(-9, -1, 20)
    assert np.allclose(th.inverse(th(t)), t, rtol=1e-9)


# -- M^(theta) ---------------------------------------------------------------

def test_mtheta_closed_examples():
    a = Fraction(3, 2)
    assert mtheta_closed(GevreyLog(a, 0), AdmissibleFunction(2, Fraction(4, 3), 0)) == GevreyLog(2, 0)
    got = mtheta_closed(GevreyLog(a, Fraction(1, 3)), AdmissibleFunction(1, Fraction(3, 2), 2))
    assert got == GevreyLog(Fraction(9, 4), Fraction(5, 2))
    assert mtheta_closed(GevreyLog(a, 1), AdmissibleFunction(1, 1, 0)) == GevreyLog(a, 1)


@settings(max_examples=50, deadline=None)
@given(gevrey, st.fractions(1, 3, max_denominator=6), st.fractions(1, 3, max_denominator=6))
def test_mtheta_closed_composes(M, a, b):
    once = mtheta_closed(M, AdmissibleFunction(1, a * b, 0))
    twice = mtheta_closed(mtheta_closed(M, AdmissibleFunction(1, a, 0)), AdmissibleFunction(1, b, 0))
    assert once == twice


@pytest.mark.parametrize("M,theta,closed", [
    (GevreyLog(1, 0), AdmissibleFunction(1, 2, 0), GevreyLog(2, 0)),
    (GevreyLog(1, 1), AdmissibleFunction(1, 1.5, 1), GevreyLog(1.5, 2.5)),
    (GevreyLog(1, 0), AdmissibleFunction(1, 1, 0), GevreyLog(1, 0)),
])
def test_mtheta_numeric_against_closed_form(M, theta, closed):
    num = mtheta_numeric(M, theta, jmax=30)
    cmp = compare_sequences(num.sequence, closed, 30)
    assert np.all((cmp.ratios >= 0.25) & (cmp.ratios <= 4))
    assert cmp.verdict == "equivalent"


def test_compare_sequences_examples():
    M = GevreyLog(1, 0)
    assert np.all(compare_sequences(M, M).ratios == 1)
    cmp = compare_sequences(GevreyLog(2, 0), M, 60)
    assert cmp.verdict == "inequivalent"
    assert np.all(np.diff(cmp.ratios) > 0)


@pytest.mark.parametrize("M,theta", [
    (GevreyLog(1, 0), AdmissibleFunction(1, 2, 0)),
    (GevreyLog(1, 1), AdmissibleFunction(1, 1.5, 1)),
])
def test_sandwich_and_remark_bounds(M, theta):
    target = mtheta_closed(M, theta)
    rep = sandwich_constants(M, target, theta)
    assert rep.ok and 2 ** -10 <= rep.c <= rep.c_prime <= 2 ** 10
    s = check_admissible(theta).s
    assert remark_bound(M, target, s) is not None
