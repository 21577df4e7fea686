"""End-to-end analysis: hypotheses, K_f, choice of g, separation fit, target class.

The run is a chain of checks.  Exact ones (ideal memberships) either pass
or stop the run with a witness; sampled ones (the separation inequality,
non-quasianalyticity of tabulated data) are marked heuristic.  A conclusion
is written only when every check passed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Polynomial
from .carleman import (
    AdmissibleFunction,
    GevreyLog,
    TameSequence,
    check_admissible,
    check_nonqa,
    check_tame,
    compare_sequences,
    mtheta_closed,
    mtheta_numeric,
)
from .config import ProblemSpec
from .errors import (
    DeterminacyError,
    InsufficientData,
    NotInFittingIdeal,
    NotInJacobian,
    NotPrimitive,
    SeparationUnverified,
)
from .fitting import FittingResult, MapGerm, dol_failures, fitting_ideal, primitive_member
from .groebner import Ideal, ideal_member, ideal_subset
from .lojasiewicz import (
    ExponentFit,
    Origin,
    SamplePlan,
    SetDescriptor,
    VarietyDescriptor,
    fit_separation,
    verify_separation,
    write_csv,
)

ROUND_DENOMINATOR = 12
ROUND_WINDOW = 0.05
TARGET_JMAX = 30


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    heuristic: bool = False  # decided on finite data rather than exactly

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "heuristic": self.heuristic}


@dataclass
class DeterminacyReport:
    problem: dict
    checks: list[Check] = field(default_factory=list)
    kf_generators: list[str] = field(default_factory=list)
    kf_basis: list[str] = field(default_factory=list)
    g: str | None = None
    g_source: str | None = None
    g_cofactors: list[str] | None = None
    candidates: list[dict] = field(default_factory=list)
    fit: dict | None = None
    s: str | None = None
    theta: dict | None = None
    verification: dict | None = None
    target: dict | None = None
    target_check: dict | None = None
    conclusion: str | None = None
    evidence: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "", heuristic: bool = False) -> Check:
        c = Check(name, bool(passed), detail, heuristic)
        self.checks.append(c)
        return c

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return jsonable({
            "problem": self.problem,
            "checks": [c.to_dict() for c in self.checks],
            "kf_generators": self.kf_generators,
            "kf_basis": self.kf_basis,
            "g": self.g,
            "g_source": self.g_source,
            "g_cofactors": self.g_cofactors,
            "candidates": self.candidates,
            "fit": self.fit,
            "s": self.s,
            "theta": self.theta,
            "verification": self.verification,
            "target": self.target,
            "target_check": self.target_check,
            "conclusion": self.conclusion,
            "evidence": self.evidence,
            "warnings": self.warnings,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        out = ["problem"]
        for k, v in self.to_dict()["problem"].items():
            out.append(f"  {k}: {json.dumps(v)}")
        out.append("checks")
        for c in self.checks:
            mark = "pass" if c.passed else "FAIL"
            tag = " (sampled)" if c.heuristic else ""
            out.append(f"  [{mark}] {c.name}{tag}" + (f": {c.detail}" if c.detail else ""))
        if self.kf_generators:
            out.append("K_f generators (nonzero maximal minors)")
            out.extend(f"  {m}" for m in self.kf_generators)
            out.append("K_f reduced Groebner basis")
            out.extend(f"  {b}" for b in self.kf_basis)
        if self.g is not None:
            out.append(f"g = {self.g}  [{self.g_source}]")
        for cand in self.candidates:
            out.append(f"  candidate {cand['g']}: {cand['outcome']}")
        if self.fit:
            f = self.fit
            out.append(f"fit: s_hat = {f['s_hat']!r}, c_hat = {f['c_hat']!r}, residual = {f['residual']!r}, "
                       f"bins = {f['bins']}, samples = {f['samples']}")
        if self.s is not None:
            out.append(f"s = {self.s}")
        if self.theta:
            t = jsonable(self.theta)
            tail = f" * log(1 + 1/t)^(-{t['nu']})" if t["nu"] else ""
            out.append(f"theta(t) = {t['c']!r} * t^({t['mu']}){tail}")
        if self.verification:
            out.append(f"verification: {json.dumps(jsonable(self.verification))}")
        if self.target:
            out.append(f"target M^(theta): {json.dumps(jsonable(self.target))}")
        if self.target_check:
            out.append(f"target cross-check: {json.dumps(jsonable(self.target_check))}")
        for w in self.warnings:
            out.append(f"warning: {w}")
        if self.conclusion:
            out.append(f"conclusion: {self.conclusion}")
            out.append(f"  evidence: {', '.join(self.evidence)}")
        else:
            out.append("conclusion: none (a check failed)")
        return "\n".join(out) + "\n"


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(obj, Polynomial):
        return str(obj)
    return obj


# ---------------------------------------------------------------------------
# small pieces
# ---------------------------------------------------------------------------

def beta_table(alpha, mu):
    """Gevrey exponent of the target class for ``Y = {|x1| = |x2|^mu}`` and ``f = (x1^2 + x2^4)^2``.

    Exact when the inputs are ints or Fractions.
    """
    if not alpha > 0 or not mu > 0:
        raise ValueError("alpha and mu must be positive")
    exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in (alpha, mu))
    a = Fraction(alpha) if exact else float(alpha)
    if mu <= 1:
        return 2 * a
    if mu <= 2:
        return 2 * a / mu
    return a


def round_exponent(s_hat: float, max_den: int = ROUND_DENOMINATOR, window: float = ROUND_WINDOW):
    """Nearest rational with denominator <= max_den if within ``window``, else ``s_hat``."""
    q = Fraction(s_hat).limit_denominator(max_den)
    if abs(float(q) - s_hat) <= window:
        return q
    return float(s_hat)


def separation_constant(fit: ExponentFit, s, nu: float = 0.0) -> float:
    """Largest c with d >= c t^s log(1+1/t)^-nu on the envelope points."""
    env = fit.envelope
    unit = AdmissibleFunction(1, s, nu)
    return float(np.exp(np.min(np.log(env[:, 1]) - unit.log_value(env[:, 0]))))


def describe_sequence(M: TameSequence) -> dict:
    return M.describe()


def _fit_dict(fit: ExponentFit) -> dict:
    return {"s_hat": fit.s_hat, "c_hat": fit.c_hat, "residual": fit.residual, "bins": fit.bins,
            "samples": int(len(fit.samples)), "zero_hits": fit.zero_hits,
            "nu_hat": fit.nu_hat, "s_joint": fit.s_joint}


def _real_zero_witness(g: Polynomial, Y: SetDescriptor, plan: SamplePlan, n: int):
    """A sample point off Y where g vanishes exactly, if any: no theta can work there."""
    X = plan.points(n)
    gv = np.asarray(g.evaluate([X[:, k] for k in range(n)]), dtype=float)
    r = Y.distances(X)
    hit = np.nonzero((np.broadcast_to(gv, r.shape) == 0) & (r > 0))[0]
    if len(hit):
        return X[hit[0]], float(r[hit[0]])
    return None


class _UnionDistance:
    """Distances to a union of sets given by their own distance functions."""

    def __init__(self, parts, n):
        self.parts = parts
        self.n = n

    def distances(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(len(X), np.inf)
        for p in self.parts:
            out = np.minimum(out, p(X))
        return out


def _quadric_cone_distance(X: np.ndarray) -> np.ndarray:
    """Distance from real x to {z : z_1^2 + ... + z_n^2 = 0} in C^n.

    Writing z = a + ib, the cone is |a| = |b|, a.b = 0 and
    |x - z|^2 = |x - a|^2 + |a|^2 >= |x|^2 / 2, with equality at a = x/2
    (b orthogonal to x) as soon as n >= 2.
    """
    norm = np.linalg.norm(X, axis=1)
    return norm / math.sqrt(2) if X.shape[1] >= 2 else norm


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def _sequence_checks(rep: DeterminacyReport, M: TameSequence) -> None:
    tame = check_tame(M)
    rep.add("M is tame", tame.ok, f"moderate growth constant A = {tame.A}" if tame.ok else tame.violation)
    nqa = check_nonqa(M)
    rep.add("M is non-quasianalytic", nqa.verdict == "non-quasianalytic",
            f"{nqa.rule}; partial sum up to j = {len(nqa.partial_sums) - 1}: {nqa.final_sum!r}",
            heuristic=nqa.heuristic)
    if nqa.heuristic:
        rep.warnings.append("non-quasianalyticity judged from finitely many terms")


def _algebra_stage(rep: DeterminacyReport, f: Polynomial, psi: MapGerm) -> FittingResult:
    I = psi.ideal()
    prim = primitive_member(f, I)
    if prim:
        rep.add("f in Int<psi>", True, "f and all df/dx_j lie in <psi>")
    else:
        label = "f" if prim.which == "f" else f"df/dx{prim.which}"
        rep.add("f in Int<psi>", False, f"{label} = {prim.witness} has remainder {prim.remainder}")
        raise NotPrimitive(prim.which, prim.witness, prim.remainder)
    grad = MapGerm(f.gradient())
    sub = ideal_subset(grad.ideal(), I)
    rep.add("<grad f> in <psi>", bool(sub), "" if sub else f"witness {sub.witness}")
    res = fitting_ideal(psi, grad)
    rep.kf_generators = [str(m) for m in res.minors]
    rep.kf_basis = [str(b) for b in res.ideal.basis]
    bad = dol_failures(res, psi, grad)
    detail = f"{len(res.minors)} minors x {len(psi)} components" if not bad else \
        "; ".join(f"minor {a + 1} * psi_{i + 1}" for a, i in bad)
    rep.add("minor * psi_i in <grad f>", not bad, detail)
    return res


def _membership(rep: DeterminacyReport, g: Polynomial, K: Ideal, name: str = "g in K_f") -> None:
    cert = ideal_member(g, K)
    rep.add(name, cert.is_member, "cofactors over the K_f generators" if cert.is_member
            else f"remainder {cert.remainder}")
    if not cert.is_member:
        raise NotInFittingIdeal(g, cert.remainder)
    rep.g_cofactors = [str(c) for c in cert.cofactors]


def _prescreen(rep, g, Y, plan, n) -> None:
    hit = _real_zero_witness(g, Y, plan, n)
    if hit is not None:
        x, r = hit
        msg = f"g vanishes at the real point {[float(v) for v in x]}, at distance {r!r} from Y"
        rep.add("Z_g meets R^n only inside Y (on samples)", False, msg, heuristic=True)
        raise SeparationUnverified(msg)


def _separation_stage(rep: DeterminacyReport, variety, Y: SetDescriptor, M: TameSequence,
                      plan: SamplePlan, n: int, fit_nu: bool = False, csv_path=None,
                      fit: ExponentFit | None = None) -> AdmissibleFunction:
    if fit is None:
        fit = fit_separation(variety, Y, plan, n, with_nu=fit_nu)
    if csv_path:
        write_csv(csv_path, fit)
    rep.fit = _fit_dict(fit)
    s_raw = fit.s_joint if fit_nu else fit.s_hat
    s = round_exponent(s_raw)
    if isinstance(s, float):
        rep.warnings.append(f"s_hat = {s_raw!r} is not within {ROUND_WINDOW} of a rational "
                            f"with denominator <= {ROUND_DENOMINATOR}; kept as is")
    if s < 1:
        rep.warnings.append(f"fitted exponent {s} is below 1; using s = 1")
        s = Fraction(1)
    nu = max(float(fit.nu_hat), 0.0) if fit_nu else 0
    rep.s = str(s) if isinstance(s, Fraction) else repr(s)
    c = separation_constant(fit, s, nu) / 2
    theta = AdmissibleFunction(c, s, nu)
    rep.theta = theta.describe()
    adm = check_admissible(theta)
    rep.add("theta is admissible", adm.ok, adm.violation or f"theta(t)/t^{adm.s:g} decreasing")
    fresh = plan.fresh()
    ver = verify_separation(variety, Y, theta, fresh, n)
    rep.verification = {"ok": ver.ok, "worst_margin": ver.worst_margin, "worst_point": ver.worst_point,
                        "samples": ver.samples, "plan": fresh.describe()}
    rep.add("dist(x, Z_g) >= theta(dist(x, Y)) on fresh samples", ver.ok,
            f"worst log margin {ver.worst_margin!r} over {ver.samples} points", heuristic=True)
    if not ver.ok:
        raise SeparationUnverified(
            f"dist(x, Z_g) < theta(dist(x, Y)) at x = {ver.worst_point} (log margin {ver.worst_margin!r})")
    return theta


def _target_stage(rep: DeterminacyReport, M: TameSequence, theta: AdmissibleFunction) -> TameSequence:
    if isinstance(M, GevreyLog):
        target = mtheta_closed(M, theta)
        num = mtheta_numeric(M, theta, jmax=TARGET_JMAX)
        cmp = compare_sequences(num.sequence, target, TARGET_JMAX)
        rep.target_check = {"jmax": TARGET_JMAX, "max_ratio": cmp.sup, "verdict": cmp.verdict}
        if cmp.verdict != "equivalent":
            rep.warnings.append("numeric M^(theta) does not match the closed form on the checked range")
    else:
        jmax = min(M.jmax, TARGET_JMAX) if hasattr(M, "jmax") else TARGET_JMAX
        num = mtheta_numeric(M, theta, jmax=jmax)
        target = num.sequence
    rep.warnings.extend(num.warnings)
    rep.target = target.describe()
    return target


def _conclude(rep: DeterminacyReport, target_text: str, note: str = "separation checked on samples, not proved") -> None:
    if not rep.all_passed:
        return
    rep.conclusion = f"f + Int<psi> * flat(Y, M) is contained in f o R({target_text}) ({note})"
    rep.evidence = [c.name for c in rep.checks]


def _target_text(target: TameSequence) -> str:
    d = jsonable(target.describe())
    if d.get("family") == "gevrey_log":
        return f"GevreyLog(alpha={d['alpha']}, beta={d['beta']})"
    return "tabulated M^(theta)"


# ---------------------------------------------------------------------------
# g selection
# ---------------------------------------------------------------------------

def _lowest_minor(res: FittingResult) -> int:
    return min(range(len(res.minors)), key=lambda k: (res.minors[k].total_degree(), k))


def _best_minor(rep: DeterminacyReport, spec: ProblemSpec, res: FittingResult, method: str):
    """Fit every minor; keep the smallest exponent that survives the real-zero screen."""
    n = len(spec.variables)
    best = None
    for k, m in enumerate(res.minors):
        g = m.primitive_part()
        hit = _real_zero_witness(g, spec.Y, spec.plan, n)
        if hit is not None:
            rep.candidates.append({"g": str(g), "outcome": "vanishes at a real sample point off Y"})
            continue
        V = VarietyDescriptor(g, [], method)
        try:
            fit = fit_separation(V, spec.Y, spec.plan, n, with_nu=spec.fit_nu)
        except InsufficientData as exc:
            rep.candidates.append({"g": str(g), "outcome": f"no fit ({exc})"})
            continue
        rep.candidates.append({"g": str(g), "outcome": f"s_hat = {fit.s_hat!r}"})
        if best is None or fit.s_hat < best[2].s_hat - 1e-9:
            best = (k, g, fit, V)
    if best is None:
        raise SeparationUnverified("every minor of K_f vanishes at real points off Y")
    return best


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def describe_problem(spec: ProblemSpec) -> dict:
    return {
        "variables": list(spec.variables),
        "f": str(spec.f),
        "psi": [str(p) for p in spec.psi],
        "Y": spec.Y.describe(),
        "sequence": describe_sequence(spec.M),
        "strategy": spec.strategy,
        "distance_method": spec.distance_method,
        "plan": spec.plan.describe(),
    }


def analyze(spec: ProblemSpec, csv_path=None) -> DeterminacyReport:
    """Run every stage; failures raise with the partial report attached as ``.report``."""
    rep = DeterminacyReport(describe_problem(spec))
    try:
        _analyze(rep, spec, csv_path)
    except DeterminacyError as exc:
        exc.report = rep
        raise
    return rep


def _analyze(rep: DeterminacyReport, spec: ProblemSpec, csv_path) -> None:
    n = len(spec.variables)
    _sequence_checks(rep, spec.M)
    res = _algebra_stage(rep, spec.f, spec.psi)
    K = res.ideal
    if K.is_unit():
        rep.g, rep.g_source = "1", "K_f is the unit ideal"
        rep.g_cofactors = None
        rep.add("g in K_f", True, "K_f = (1)")
        rep.verification = {"ok": True, "note": "Z_g is empty, dist(x, Z_g) = +inf"}
        rep.add("dist(x, Z_g) >= theta(dist(x, Y))", True, "vacuous: Z_g is empty")
        theta = AdmissibleFunction(1, 1, 0)
        rep.s = "1"
        rep.theta = theta.describe()
        rep.target = spec.M.describe()
        _conclude(rep, _target_text(spec.M), "target = M, no loss: Z_g is empty")
        return
    fit = None
    if spec.strategy == "user":
        g = spec.g.primitive_part()
        rep.g_source = "user"
        method = spec.distance_method
        V = VarietyDescriptor(g, spec.branches if method == "parametrized" else [], method)
    else:
        # branches describe the user's g only; minors are measured by the penalty method
        method = spec.method if spec.method in ("penalty", "grid") else "penalty"
        if spec.strategy == "lowest-degree-minor":
            k = _lowest_minor(res)
            g = res.minors[k].primitive_part()
            V = VarietyDescriptor(g, [], method)
        else:
            k, g, fit, V = _best_minor(rep, spec, res, method)
        cols = ", ".join(str(c + 1) for c in res.minor_labels[k])
        rep.g_source = f"{spec.strategy}: minor {k + 1} (columns {cols})"
    rep.g = str(g)
    _membership(rep, g, K)
    if V.branches:
        V.validate()
        rep.warnings.append("distances use the supplied branches; they are assumed to cover Z_g")
    _prescreen(rep, g, spec.Y, spec.plan, n)
    theta = _separation_stage(rep, V, spec.Y, spec.M, spec.plan, n, spec.fit_nu, csv_path, fit)
    target = _target_stage(rep, spec.M, theta)
    _conclude(rep, _target_text(target))


def isolated_pipeline(f: Polynomial, M: TameSequence, gamma: Polynomial, plan: SamplePlan | None = None,
                      branches: Sequence = (), method: str | None = None, csv_path=None) -> DeterminacyReport:
    """Isolated-singularity route: psi = identity, g = (x1^2 + ... + xn^2)^n * gamma, Y = {0}.

    ``branches`` parametrize the zero set of ``gamma``; the quadric factor is
    handled in closed form.
    """
    plan = plan or SamplePlan()
    n = f.nvars
    variables = f.variables
    coords = [Polynomial.variable(variables, i) for i in range(n)]
    psi = MapGerm(coords)
    Y = SetDescriptor([Origin()])
    method = method or ("parametrized" if branches else "penalty")
    rep = DeterminacyReport({
        "variables": list(variables), "f": str(f), "psi": [str(c) for c in coords], "gamma": str(gamma),
        "Y": Y.describe(), "sequence": M.describe(), "strategy": "isolated", "distance_method": method,
        "plan": plan.describe(),
    })
    try:
        _isolated(rep, f, M, gamma, plan, list(branches), method, psi, Y, csv_path)
    except DeterminacyError as exc:
        exc.report = rep
        raise
    return rep


def _isolated(rep, f, M, gamma, plan, branches, method, psi, Y, csv_path) -> None:
    n = f.nvars
    _sequence_checks(rep, M)
    J = Ideal(f.gradient())
    cert = ideal_member(gamma, J)
    rep.add("gamma in <grad f>", cert.is_member, "" if cert.is_member else f"remainder {cert.remainder}")
    if not cert.is_member:
        raise NotInJacobian(gamma, cert.remainder)
    res = _algebra_stage(rep, f, psi)
    K = res.ideal
    coords = list(psi)
    q = coords[0] * coords[0]
    for c in coords[1:]:
        q = q + c * c
    g = (q ** n) * gamma
    rep.g, rep.g_source = str(g), "(x1^2 + ... + xn^2)^n * gamma"
    _membership(rep, g, K)
    # the germs x_k^(n-2) df/dx_j lie in K_f
    missing = [(k + 1, j + 1) for k in range(n) for j, d in enumerate(f.gradient())
               if not ideal_member((coords[k] ** (n - 2)) * d, K).is_member]
    rep.add("x_k^(n-2) df/dx_j in K_f", not missing,
            f"all {n * n} products" if not missing else f"fails for (k, j) = {missing[0]}")
    Vg = VarietyDescriptor(gamma, branches if method == "parametrized" else [], method)
    if Vg.branches:
        Vg.validate()
        rep.warnings.append("distances use the supplied branches; they are assumed to cover Z_gamma")
    parts = [_quadric_cone_distance]
    if not Vg.empty:
        parts.append(Vg.distances)
    variety = _UnionDistance(parts, n)
    _prescreen(rep, g, Y, plan, n)
    theta = _separation_stage(rep, variety, Y, M, plan, n, csv_path=csv_path)
    target = _target_stage(rep, M, theta)
    _conclude(rep, _target_text(target))
