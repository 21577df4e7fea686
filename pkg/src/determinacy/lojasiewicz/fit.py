"""Fitting and checking separation inequalities ``dist(x, Z) >= theta(dist(x, Y))``.

Sample points ``x = r u`` are taken over geometric radii and a scrambled
Sobol set of unit directions (plus the coordinate axes).  Each point gives
a pair ``(r_Y, d_Z)`` of distances to the two sets.  Since the inequality is
a worst-case statement, the exponent is read off the lower envelope of the
cloud in log-log coordinates, not from a mean regression.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Protocol, Sequence

import numpy as np
from scipy.stats import norm, qmc

from ..carleman import AdmissibleFunction
from ..errors import InsufficientData

MIN_BINS = 5


class HasDistances(Protocol):
    def distances(self, X: np.ndarray) -> np.ndarray: ...


def default_radii() -> tuple[float, ...]:
    """2^-4 down to 2^-18 in steps of 2^-1/4."""
    return tuple(2.0 ** (-4 - k / 4) for k in range(57))


@dataclass(frozen=True)
class SamplePlan:
    radii: tuple[float, ...] = field(default_factory=default_radii)
    directions: int = 64
    seed: int = 42
    axes: bool = True

    def __post_init__(self):
        if not self.radii or any(not 0 < r <= 0.5 for r in self.radii):
            raise ValueError("radii must lie in (0, 0.5]")
        if self.directions < 0:
            raise ValueError("direction count must be non-negative")

    def unit_directions(self, n: int) -> np.ndarray:
        dirs = []
        if self.directions:
            sob = qmc.Sobol(d=n, scramble=True, seed=self.seed)
            u = sob.random(self.directions)
            g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
            dirs.append(g / np.linalg.norm(g, axis=1, keepdims=True))
        if self.axes:
            eye = np.eye(n)
            dirs.append(np.concatenate([eye, -eye]))
        if not dirs:
            raise ValueError("the plan yields no directions")
        return np.concatenate(dirs)

    def points(self, n: int) -> np.ndarray:
        U = self.unit_directions(n)
        R = np.asarray(self.radii)
        return (R[:, None, None] * U[None, :, :]).reshape(-1, n)

    def fresh(self) -> "SamplePlan":
        """A disjoint plan: next seed, radii shifted by half a step."""
        radii = self.radii
        if len(radii) > 1:
            ratio = math.sqrt(radii[1] / radii[0])
            radii = tuple(r * ratio for r in radii)
        else:
            radii = (radii[0] * 2 ** -0.125,)
        return replace(self, radii=radii, seed=self.seed + 1)

    def describe(self) -> dict:
        return {"radii": [min(self.radii), max(self.radii), len(self.radii)],
                "directions": self.directions, "seed": self.seed, "axes": self.axes}


@dataclass
class ExponentFit:
    s_hat: float
    c_hat: float
    residual: float
    samples: np.ndarray = field(repr=False)  # columns r, d
    envelope: np.ndarray = field(repr=False)  # rows (r, d) used in the regression
    nu_hat: float | None = None
    s_joint: float | None = None  # slope of the joint fit with a log-log term
    zero_hits: int = 0  # samples with d = 0 but r > 0

    @property
    def bins(self) -> int:
        return len(self.envelope)


def sample_pairs(variety: HasDistances, Y: HasDistances, plan: SamplePlan, n: int):
    X = plan.points(n)
    r = np.asarray(Y.distances(X), dtype=float)
    d = np.asarray(variety.distances(X), dtype=float)
    return X, r, d


def envelope_points(r: np.ndarray, d: np.ndarray, floor: float = 0.0,
                    norms: np.ndarray | None = None) -> np.ndarray:
    """Lower envelope of the cloud, one point per tenth of a decade of r.

    The sampled envelope is trusted only where the points realizing the
    infimum of d were actually sampled.  Below the smallest radius
    (``floor``) they cannot be: the origin lies in Y, so r <= |x|.  At the
    top, once the extremal family would need |x| beyond the largest radius,
    records start coming from points closer to the origin; given ``norms``
    (the |x| of each sample), bins above the one attained farthest out are
    dropped.
    """
    if norms is None:
        norms = np.zeros_like(r)
    ok = (r > 0) & (d > 0) & np.isfinite(r) & np.isfinite(d) & (r >= floor)
    r, d, norms = r[ok], d[ok], norms[ok]
    if not len(r):
        return np.empty((0, 2))
    # records: smaller d than every sample further from Y
    order = np.lexsort((d, -r))
    keep = np.zeros(len(r), dtype=bool)
    best = np.inf
    for i in order:
        if d[i] < best:
            keep[i] = True
            best = d[i]
    # the outermost octave is dominated by non-asymptotic geometry
    keep &= r <= r.max() / 2
    r, d, norms = r[keep], d[keep], norms[keep]
    bins = np.floor(10 * np.log10(r)).astype(int)
    out = []
    for b in np.unique(bins):
        sel = np.nonzero(bins == b)[0]
        i = sel[np.argmin(d[sel])]
        out.append((r[i], d[i], norms[i]))
    out.sort()
    far = max(range(len(out)), key=lambda k: (out[k][2], k)) if out else -1
    return np.array([(a, b) for a, b, _ in out[: far + 1]]).reshape(-1, 2)


def fit_envelope(r: np.ndarray, d: np.ndarray, with_nu: bool = False,
                 floor: float = 0.0, norms: np.ndarray | None = None) -> ExponentFit:
    env = envelope_points(r, d, floor, norms)
    zero_hits = int(np.sum((d == 0) & (r > 0)))
    if len(env) < MIN_BINS:
        raise InsufficientData(f"only {len(env)} usable bins (need {MIN_BINS})")
    lr, ld = np.log(env[:, 0]), np.log(env[:, 1])
    A = np.column_stack([lr, np.ones_like(lr)])
    coef, *_ = np.linalg.lstsq(A, ld, rcond=None)
    s_hat, logc = float(coef[0]), float(coef[1])
    resid = ld - A @ coef
    fit = ExponentFit(s_hat, math.exp(logc), float(np.sqrt(np.mean(resid ** 2))),
                      np.column_stack([r, d]), env, zero_hits=zero_hits)
    if with_nu:
        # log d = log c + s log r - nu log log(1 + 1/r)
        B = np.column_stack([lr, -np.log(np.log1p(1 / env[:, 0])), np.ones_like(lr)])
        cj, *_ = np.linalg.lstsq(B, ld, rcond=None)
        fit.s_joint, fit.nu_hat = float(cj[0]), float(cj[1])
    return fit


def fit_separation(variety: HasDistances, Y: HasDistances, plan: SamplePlan | None = None,
                   n: int | None = None, with_nu: bool = False) -> ExponentFit:
    plan = plan or SamplePlan()
    n = n if n is not None else _dimension(variety)
    X, r, d = sample_pairs(variety, Y, plan, n)
    return fit_envelope(r, d, with_nu, floor=min(plan.radii), norms=np.linalg.norm(X, axis=1))


def _dimension(variety) -> int:
    g = getattr(variety, "g", None)
    if g is None:
        raise ValueError("cannot infer the dimension; pass n explicitly")
    return g.nvars


def refit_constant(fit: ExponentFit, s: float) -> float:
    """Largest c with d >= c r^s on the envelope points, for a fixed exponent."""
    env = fit.envelope
    return float(np.exp(np.min(np.log(env[:, 1]) - s * np.log(env[:, 0]))))


@dataclass
class Verification:
    ok: bool
    worst_margin: float  # min of log d - log theta(r) over the fresh samples
    worst_point: list[float] | None
    samples: int


def verify_separation(variety: HasDistances, Y: HasDistances, theta: AdmissibleFunction,
                      plan: SamplePlan, n: int | None = None) -> Verification:
    n = n if n is not None else _dimension(variety)
    X, r, d = sample_pairs(variety, Y, plan, n)
    pos = r > 0
    if not pos.any():
        return Verification(True, math.inf, None, int(len(X)))
    with np.errstate(divide="ignore"):
        margin = np.log(d[pos]) - theta.log_value(r[pos])
    k = int(np.argmin(margin))
    worst = float(margin[k])
    point = [float(v) for v in X[pos][k]]
    return Verification(bool(worst >= 0), worst, point, int(len(X)))


def write_csv(path, fit: ExponentFit) -> None:
    """Columns ``log_r,log_d,is_envelope`` (base-10 logs) for every sample with r, d > 0."""
    env = {(float(a), float(b)) for a, b in fit.envelope}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["log_r", "log_d", "is_envelope"])
        for r, d in fit.samples:
            if r > 0 and d > 0 and np.isfinite(d):
                w.writerow([repr(float(np.log10(r))), repr(float(np.log10(d))),
                            int((float(r), float(d)) in env)])
