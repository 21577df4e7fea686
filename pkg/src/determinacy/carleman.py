"""Denjoy-Carleman sequence calculus.

Sequences are handled through their natural logarithms ``L_j = log M_j`` so
that factorial growth never overflows.  Two representations exist:

* ``GevreyLog(alpha, beta)``: ``M_j = j!^alpha * log(e + j)^(beta * j)``,
  defined for every j, with an exact (convexity based) evaluation of
  ``h_M(t) = inf_j t^j M_j``;
* ``Tabulated``: finitely many values ``M_0..M_jmax``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.special import gammaln

DEFAULT_JMAX = 60
_CAP = 2.0 ** 62  # largest index considered by the exact infimum search


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GevreyLog:
    alpha: float = 1
    beta: float = 0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")

    def log_values(self, jmax: int) -> np.ndarray:
        return self.log_at(np.arange(jmax + 1, dtype=float))

    def log_at(self, j) -> np.ndarray:
        j = np.asarray(j, dtype=float)
        out = float(self.alpha) * gammaln(j + 1)
        if self.beta:
            out = out + float(self.beta) * j * np.log(np.log(np.e + j))
        return out

    def log_step(self, j) -> np.ndarray:
        """``L_{j+1} - L_j`` evaluated without cancellation."""
        j = np.asarray(j, dtype=float)
        out = float(self.alpha) * np.log1p(j)
        if self.beta:
            ll1 = np.log(np.log(np.e + j + 1))
            dll = np.log1p(np.log1p(1.0 / (np.e + j)) / np.log(np.e + j))
            out = out + float(self.beta) * (ll1 + j * dll)
        return out

    def describe(self) -> dict:
        return {"family": "gevrey_log", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Tabulated:
    logs: tuple[float, ...]  # natural logarithms of M_0..M_jmax

    def __post_init__(self):
        if len(self.logs) < 2:
            raise ValueError("a tabulated sequence needs at least two values")
        if not all(math.isfinite(x) for x in self.logs):
            raise ValueError("tabulated values must be positive and finite")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Tabulated":
        vals = [float(v) for v in values]
        if any(v <= 0 for v in vals):
            raise ValueError("tabulated values must be positive")
        return cls(tuple(math.log(v) for v in vals))

    @property
    def jmax(self) -> int:
        return len(self.logs) - 1

    @property
    def values(self) -> list[float]:
        return [math.exp(x) for x in self.logs]

    def log_values(self, jmax: int) -> np.ndarray:
        if jmax > self.jmax:
            raise ValueError(f"sequence tabulated only up to j = {self.jmax}")
        return np.array(self.logs[: jmax + 1])

    def describe(self) -> dict:
        return {"family": "tabulated", "log_values": list(self.logs)}


TameSequence = Union[GevreyLog, Tabulated]


# ---------------------------------------------------------------------------
# tameness and non-quasianalyticity
# ---------------------------------------------------------------------------

def _tol(x) -> np.ndarray:
    return 1e-9 * (1 + np.abs(x))


@dataclass
class TameReport:
    ok: bool
    A: int | None
    violation: str | None = None


def check_tame(M: TameSequence, jmax: int = DEFAULT_JMAX) -> TameReport:
    """Monotonicity, log-convexity, super-multiplicativity and moderate growth."""
    if jmax < 2:
        raise ValueError("jmax must be at least 2")
    L = M.log_values(jmax)
    if abs(L[0]) > 1e-12:
        return TameReport(False, None, f"M_0 = {math.exp(L[0])!r}, expected 1")
    d = np.diff(L)
    bad = np.nonzero(d < -_tol(L[1:]))[0]
    if bad.size:
        j = int(bad[0])
        return TameReport(False, None, f"not increasing: M_{j + 1} < M_{j}")
    dd = np.diff(d)
    bad = np.nonzero(dd < -_tol(d[1:]))[0]
    if bad.size:
        j = int(bad[0])
        return TameReport(False, None, f"not log-convex at j = {j + 1}")
    need = 0.0
    for n in range(1, jmax + 1):
        k = np.arange(0, n + 1)
        excess = L[n] - L[k] - L[n - k]
        if excess.min() > _tol(L[n]):
            j0 = int(k[np.argmax(excess)])
            return TameReport(False, None, f"M_{j0} M_{n - j0} > M_{n}")
        need = max(need, float(excess.max()) / n)
    # smallest power of two A with M_{j+k} <= A^{j+k} M_j M_k
    kA = 0
    while kA * math.log(2) < need - 1e-12:
        kA += 1
    return TameReport(True, 2 ** kA)


@dataclass
class NonQAReport:
    verdict: str  # "non-quasianalytic" | "quasianalytic"
    heuristic: bool
    rule: str
    partial_sums: np.ndarray = field(repr=False)

    @property
    def final_sum(self) -> float:
        return float(self.partial_sums[-1])


def nonqa_terms(M: TameSequence, jmax: int) -> np.ndarray:
    """``M_j / ((j+1) M_{j+1})`` for j = 0..jmax."""
    j = np.arange(jmax + 1, dtype=float)
    if isinstance(M, GevreyLog):
        step = M.log_step(j)
    else:
        step = np.diff(M.log_values(jmax + 1))
    return np.exp(-step - np.log1p(j))


def check_nonqa(M: TameSequence, jmax: int = 1000) -> NonQAReport:
    if jmax < 10:
        raise ValueError("jmax must be at least 10")
    terms = nonqa_terms(M, jmax)
    sums = np.cumsum(terms)
    if isinstance(M, GevreyLog):
        conv = M.alpha > 0 or M.beta > 1
        rule = "alpha > 0, or alpha = 0 and beta > 1"
        return NonQAReport("non-quasianalytic" if conv else "quasianalytic", False, rule, sums)
    # tail exponent p in term_j ~ j^-p over the upper half of the table
    j = np.arange(jmax + 1, dtype=float)
    half = slice(jmax // 2, jmax + 1)
    p = -np.polyfit(np.log1p(j[half]), np.log(terms[half]), 1)[0]
    verdict = "non-quasianalytic" if p > 1.1 else "quasianalytic"
    return NonQAReport(verdict, True, f"tail decay exponent {p:.3f} (finite data, inconclusive)", sums)


# ---------------------------------------------------------------------------
# h_M
# ---------------------------------------------------------------------------

@dataclass
class HValues:
    log_h: np.ndarray
    argmin: np.ndarray
    truncated: bool


def log_h(M: TameSequence, t, jmax: int | None = None) -> HValues:
    """``log inf_j t^j M_j`` for an array of t > 0.

    For a family and ``jmax=None`` the infimum over all j is exact: the map
    j -> j log t + L_j is convex, so its minimum sits at the first j whose
    increment ``L_{j+1} - L_j`` reaches ``-log t``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    lt = np.log(t)
    if isinstance(M, GevreyLog) and jmax is None:
        x = -lt
        below = (M.log_step(0.0) >= x) | (x <= 0)
        lo = np.zeros_like(x)  # invariant: step(lo) < x unless below
        hi = np.ones_like(x)
        grow = ~below
        while True:
            active = grow & (M.log_step(hi) < x) & (hi < _CAP)
            if not active.any():
                break
            lo = np.where(active, hi, lo)
            hi = np.where(active, hi * 2, hi)
        unreachable = grow & (M.log_step(hi) < x)
        for _ in range(64):
            mid = np.floor((lo + hi) / 2)
            done = hi - lo <= 1
            if done.all():
                break
            ok = M.log_step(mid) >= x
            hi = np.where(~done & ok, mid, hi)
            lo = np.where(~done & ~ok, mid, lo)
        j = np.where(below, 0.0, hi)
        val = j * lt + M.log_at(j)
        val = np.where(below, 0.0, val)
        val = np.where(unreachable, -np.inf, val)
        return HValues(val, j, bool(unreachable.any()))
    if jmax is None:
        jmax = M.jmax if isinstance(M, Tabulated) else DEFAULT_JMAX
    L = M.log_values(jmax)
    js = np.arange(jmax + 1, dtype=float)
    table = lt[:, None] * js[None, :] + L[None, :]
    arg = np.argmin(table, axis=1)
    val = table[np.arange(len(t)), arg]
    return HValues(val, arg.astype(float), bool(np.any((arg == jmax) & (lt < 0))))


def h_eval(M: TameSequence, t: float, jmax: int | None = None) -> float:
    """``inf_j t^j M_j`` in [0, 1]."""
    return float(np.exp(log_h(M, [t], jmax).log_h[0]))


def default_grid(n: int = 512, lo: float = 1e-8, hi: float = 1.0) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _le(a, b) -> np.ndarray:
    """Elementwise ``a <= b`` with a relative tolerance, valid for infinite values."""
    a = np.asarray(a)
    b = np.asarray(b)
    fin = np.isfinite(b) & np.isfinite(a)
    with np.errstate(invalid="ignore"):
        close = a <= b + 1e-9 * (1 + np.abs(b))
    return np.where(fin, close, a <= b)


def find_hsq_constant(M: TameSequence, grid=None, kmax: int = 20) -> int | None:
    """Smallest B = 2^k (k <= kmax) with h_M(t) <= h_M(B t)^2 on the grid."""
    grid = default_grid(512, 1e-8, 0.999) if grid is None else np.asarray(grid, dtype=float)
    if np.any((grid <= 0) | (grid >= 1)):
        raise ValueError("grid must lie in (0, 1)")
    lh = log_h(M, grid).log_h
    for k in range(kmax + 1):
        rhs = 2 * log_h(M, grid * 2.0 ** k).log_h
        if np.all(_le(lh, rhs)):
            return 2 ** k
    return None


# ---------------------------------------------------------------------------
# admissible functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleFunction:
    """theta(t) = c * t^mu * log(1 + 1/t)^(-nu)."""

    c: float = 1
    mu: float = 1
    nu: float = 0

    def __post_init__(self):
        if self.c <= 0 or self.mu <= 0 or self.nu < 0:
            raise ValueError("need c > 0, mu > 0, nu >= 0")

    def log_value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = math.log(self.c) + float(self.mu) * np.log(t)
        if self.nu:
            out = out - float(self.nu) * np.log(np.log1p(1.0 / t))
        return out

    def __call__(self, t) -> np.ndarray:
        return np.exp(self.log_value(t))

    def inverse(self, tau, lo: float = 1e-12, hi: float = 1.0) -> np.ndarray:
        """theta^{-1} by bisection in log t on [lo, hi], clamped to the bracket."""
        ltau = np.log(np.asarray(tau, dtype=float))
        a = np.full_like(ltau, math.log(lo))
        b = np.full_like(ltau, math.log(hi))
        for _ in range(100):
            m = 0.5 * (a + b)
            up = self.log_value(np.exp(m)) < ltau
            a = np.where(up, m, a)
            b = np.where(up, b, m)
            if np.all(b - a < 1e-12):
                break
        return np.exp(0.5 * (a + b))

    def describe(self) -> dict:
        return {"c": self.c, "mu": self.mu, "nu": self.nu}


@dataclass
class AdmissibleReport:
    ok: bool
    s: float  # smallest exponent with theta/t^s decreasing on the grid (at least 1)
    s_bound: float  # mu + nu + 1, always sufficient for this family
    violation: str | None = None


def check_admissible(theta: AdmissibleFunction, grid=None) -> AdmissibleReport:
    grid = default_grid(512, 1e-8, 0.1) if grid is None else np.sort(np.asarray(grid, dtype=float))
    lt = np.log(grid)
    lth = theta.log_value(grid)
    # d log theta / d log t
    slope = float(theta.mu) + float(theta.nu) / ((1 + grid) * np.log1p(1 / grid))
    s = max(1.0, float(slope.max()))
    s_bound = float(theta.mu) + float(theta.nu) + 1
    inc = np.diff(lth - lt)
    if np.any(inc < -1e-12 * (1 + np.abs(lth[1:]))):
        k = int(np.nonzero(inc < 0)[0][0])
        return AdmissibleReport(False, s, s_bound, f"theta(t)/t decreases near t = {grid[k]:.3g}")
    for label, e in (("s", s), ("mu + nu + 1", s_bound)):
        dec = np.diff(lth - e * lt)
        if np.any(dec > 1e-9 * (1 + np.abs(lth[1:]))):
            return AdmissibleReport(False, s, s_bound, f"theta(t)/t^{label} increases on the grid")
    return AdmissibleReport(True, s, s_bound)


# ---------------------------------------------------------------------------
# the transformed sequence M^(theta)
# ---------------------------------------------------------------------------

def mtheta_closed(M: GevreyLog, theta: AdmissibleFunction) -> GevreyLog:
    """Closed form in the Gevrey-log family: parameters (alpha mu, beta mu + nu)."""
    if not isinstance(M, GevreyLog):
        raise TypeError("closed form exists only for the Gevrey-log family")
    return GevreyLog(M.alpha * theta.mu, M.beta * theta.mu + theta.nu)


@dataclass
class NumericMTheta:
    sequence: Tabulated
    warnings: list[str]


def mtheta_numeric(M: TameSequence, theta: AdmissibleFunction, jmax: int = DEFAULT_JMAX,
                   tau_grid=None) -> NumericMTheta:
    """``M^(theta)_j = sup_tau tau^-j h_M(theta^{-1}(tau))`` on a tau grid, normalized to M_0 = 1."""
    tau = default_grid() if tau_grid is None else np.asarray(tau_grid, dtype=float)
    t = theta.inverse(tau)
    warnings = []
    lh = log_h(M, t)
    if lh.truncated:
        warnings.append("h_M truncated at the end of the tabulated range")
    # points with theta^{-1}(tau) clamped to 1 have h = 1 exactly
    lh_vals = np.where(theta.log_value(np.ones(1))[0] <= np.log(tau), 0.0, lh.log_h)
    lt = np.log(tau)
    js = np.arange(jmax + 1, dtype=float)
    table = -js[:, None] * lt[None, :] + lh_vals[None, :]
    arg = np.argmax(table, axis=1)
    L = table[np.arange(jmax + 1), arg]
    if np.any(arg == 0):
        edge = [int(j) for j in np.nonzero(arg == 0)[0] if j > 0]
        if edge:
            warnings.append(f"supremum reached at the smallest tau for j >= {edge[0]}; grid too short")
    L = L - L[0]
    return NumericMTheta(Tabulated(tuple(float(x) for x in L)), warnings)


@dataclass
class Comparison:
    ratios: np.ndarray  # r_j for j = 1..jmax
    sup: float
    trend: float
    verdict: str  # "equivalent" | "inequivalent"


def compare_sequences(M1: TameSequence, M2: TameSequence, jmax: int = 30) -> Comparison:
    """``r_j = max(M1_j/M2_j, M2_j/M1_j)^(1/j)`` and a growth-trend verdict."""
    L1 = M1.log_values(jmax)
    L2 = M2.log_values(jmax)
    j = np.arange(1, jmax + 1, dtype=float)
    lr = np.abs(L1[1:] - L2[1:]) / j
    half = slice(len(j) // 2, len(j))
    # log r_j grows like log j for factorial-type gaps and stays bounded otherwise
    if np.ptp(lr[half]) == 0:
        trend = 0.0
    else:
        trend = float(np.polyfit(np.log(j[half]), lr[half], 1)[0])
    ratios = np.exp(lr)
    sup = float(ratios.max())
    verdict = "inequivalent" if (trend > 0.25 or sup > 2.0 ** 10) else "equivalent"
    return Comparison(ratios, sup, trend, verdict)


@dataclass
class SandwichReport:
    ok: bool
    c: float | None
    c_prime: float | None


def sandwich_constants(M: TameSequence, target: TameSequence, theta: AdmissibleFunction,
                       grid=None, kmax: int = 10) -> SandwichReport:
    """Powers of two c <= c' with h_M(c t) <= h_target(theta(t)) <= h_M(c' t) on the grid.

    ``c`` is the largest admissible power of two and ``c'`` the smallest.
    """
    grid = np.logspace(-6, -1, 512) if grid is None else np.asarray(grid, dtype=float)
    mid = log_h(target, theta(grid)).log_h
    c = cp = None
    for k in range(kmax, -kmax - 1, -1):
        if np.all(_le(log_h(M, grid * 2.0 ** k).log_h, mid)):
            c = 2.0 ** k
            break
    for k in range(-kmax, kmax + 1):
        if np.all(_le(mid, log_h(M, grid * 2.0 ** k).log_h)):
            cp = 2.0 ** k
            break
    return SandwichReport(c is not None and cp is not None, c, cp)


def remark_bound(M: TameSequence, target: TameSequence, s: float, jmax: int = 30,
                 kmax: int = 10) -> int | None:
    """Smallest C = 2^k with C^-j M_j <= target_j <= C^j M_j^s for j <= jmax."""
    L = M.log_values(jmax)
    T = target.log_values(jmax)
    j = np.arange(jmax + 1, dtype=float)
    for k in range(kmax + 1):
        lc = k * math.log(2)
        if np.all(_le(L - j * lc, T)) and np.all(_le(T, j * lc + s * L)):
            return 2 ** k
    return None
