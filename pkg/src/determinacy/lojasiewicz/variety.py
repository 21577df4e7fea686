"""Distance from real points to the complex zero set of a polynomial.

Three estimators are provided.  All of them return the distance to a
feasible point found on (or projected onto) the zero set, so they are upper
estimates of the true distance.

* ``parametrized``: minimize ``|z(w) - x|`` over the parameters of explicit
  branch parametrizations (coarse multi-scale grid, golden-section sweeps,
  then a quasi-Newton polish);
* ``penalty``: minimize ``|z - x|^2 + rho |g(z)|^2`` over complex z for an
  increasing rho, then slide along the zero set by projected descent;
* ``grid``: Newton-project a brute-force grid of complex points and keep the
  nearest image.  Slow and coarse; meant as an independent check.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..algebra import Polynomial, parse_poly
from .optimize import bfgs, coordinate_descent, log_bisect

_POLAR_GRID = {1: (16, 16), 2: (9, 6), 3: (5, 4)}  # params -> (levels, phases)
_CHUNK = 2_000_000  # entries of a (points x grid) block


class ComplexPoly:
    """Polynomial in complex parameters with Gaussian-rational coefficients.

    The imaginary unit is written ``I`` in the source text.
    """

    def __init__(self, text: str, params: Sequence[str]):
        self.text = text
        self.params = tuple(params)
        p = parse_poly(text, self.params + ("I",))
        unit = (1, 1j, -1, -1j)
        acc: dict[tuple[int, ...], complex] = {}
        for mono, c in p.terms.items():
            key = mono[:-1]
            acc[key] = acc.get(key, 0) + float(c) * unit[mono[-1] % 4]
        self._set_terms(acc)

    def _set_terms(self, acc: dict) -> None:
        self.terms = [(tuple(m), c) for m, c in sorted(acc.items()) if c != 0]
        self.degree = max((sum(m) for m, _ in self.terms), default=0)

    def derivative(self, j: int) -> "ComplexPoly":
        out = ComplexPoly.__new__(ComplexPoly)
        out.text = f"d/d{self.params[j]}({self.text})"
        out.params = self.params
        acc = {}
        for m, c in self.terms:
            if m[j]:
                mm = m[:j] + (m[j] - 1,) + m[j + 1:]
                acc[mm] = acc.get(mm, 0) + c * m[j]
        out._set_terms(acc)
        return out

    def __call__(self, w: np.ndarray) -> np.ndarray:
        """Values at complex parameter rows ``w`` of shape (..., k)."""
        out = np.zeros(w.shape[:-1], dtype=complex)
        powers: dict[tuple[int, int], np.ndarray] = {}
        for m, c in self.terms:
            term = np.full(w.shape[:-1], c, dtype=complex)
            for k, e in enumerate(m):
                if e:
                    key = (k, e)
                    if key not in powers:
                        powers[key] = w[..., k] ** e
                    term = term * powers[key]
            out = out + term
        return out


@dataclass
class Branch:
    params: tuple[str, ...]
    components: tuple[ComplexPoly, ...]

    @classmethod
    def parse(cls, params: Sequence[str], components: Sequence[str]) -> "Branch":
        params = tuple(params)
        if "I" in params:
            raise ValueError("'I' is reserved for the imaginary unit")
        return cls(params, tuple(ComplexPoly(c, params) for c in components))

    @property
    def nparams(self) -> int:
        return len(self.params)

    def point(self, w: np.ndarray) -> np.ndarray:
        """Branch points at complex parameters ``w`` of shape (..., k)."""
        return np.stack([c(w) for c in self.components], axis=-1)

    def point_real(self, u: np.ndarray) -> np.ndarray:
        """Same, with the parameters split as (real parts, imaginary parts)."""
        k = self.nparams
        return self.point(u[..., :k] + 1j * u[..., k:])

    def jacobian(self, w: np.ndarray) -> np.ndarray:
        """Complex Jacobian dz/dw of shape (..., n, k)."""
        if not hasattr(self, "_jac"):
            self._jac = [[c.derivative(j) for j in range(self.nparams)] for c in self.components]
        return np.stack([np.stack([d(w) for d in row], axis=-1) for row in self._jac], axis=-2)

    def hessian(self, w: np.ndarray) -> np.ndarray:
        """Second derivatives d^2 z_i / dw_a dw_b, shape (..., n, k, k)."""
        if not hasattr(self, "_hess"):
            k = self.nparams
            self._hess = [[[c.derivative(a).derivative(b_) for b_ in range(k)] for a in range(k)]
                          for c in self.components]
        return np.stack([np.stack([np.stack([d(w) for d in row], axis=-1) for row in comp], axis=-2)
                         for comp in self._hess], axis=-3)

    def describe(self) -> dict:
        return {"params": list(self.params), "z": [c.text for c in self.components]}


@dataclass
class DistanceEstimate:
    distances: np.ndarray
    flagged: np.ndarray  # True where the estimate did not reach the zero set


@dataclass
class VarietyDescriptor:
    g: Polynomial
    branches: list[Branch] = field(default_factory=list)
    method: str = "parametrized"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for b in self.branches:
            if len(b.components) != self.g.nvars:
                raise ValueError(f"branch has {len(b.components)} components for {self.g.nvars} variables")
        self._grad = self.g.gradient()

    @property
    def empty(self) -> bool:
        return self.g.is_constant() and not self.g.is_zero()

    def g_values(self, Z: np.ndarray) -> np.ndarray:
        return np.asarray(self.g.evaluate([Z[..., k] for k in range(Z.shape[-1])]), dtype=complex)

    def g_gradient(self, Z: np.ndarray) -> np.ndarray:
        cols = [np.broadcast_to(np.asarray(d.evaluate([Z[..., k] for k in range(Z.shape[-1])]),
                                           dtype=complex), Z.shape[:-1]) for d in self._grad]
        return np.stack(cols, axis=-1)

    def validate(self, samples: int = 200, seed: int = 0) -> float:
        """Largest scaled residual ``|g(z)| / (1 + |z|)^deg`` over random branch points."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        deg = self.g.total_degree()
        for b in self.branches:
            w = rng.uniform(-1, 1, size=(samples, b.nparams)) + 1j * rng.uniform(-1, 1, size=(samples, b.nparams))
            z = b.point(w)
            res = np.abs(self.g_values(z)) / (1 + np.linalg.norm(z, axis=1)) ** deg
            worst = max(worst, float(res.max()))
        if worst > 1e-9:
            raise ValueError(f"branch points do not lie on g = 0 (residual {worst:.3g})")
        return worst

    def distances(self, X: np.ndarray, method: str | None = None) -> np.ndarray:
        return self.estimate(X, method).distances

    def estimate(self, X: np.ndarray, method: str | None = None) -> DistanceEstimate:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        method = method or self.method
        key = (method, hashlib.sha1(np.ascontiguousarray(X).tobytes()).hexdigest(), X.shape)
        if key in self._cache:
            return self._cache[key]
        if self.empty:
            est = DistanceEstimate(np.full(len(X), np.inf), np.zeros(len(X), dtype=bool))
        elif self.g.is_zero():
            est = DistanceEstimate(np.zeros(len(X)), np.zeros(len(X), dtype=bool))
        else:
            on = self.g_values(X.astype(complex)) == 0
            d = np.zeros(len(X))
            flag = np.zeros(len(X), dtype=bool)
            rest = ~on
            if rest.any():
                if method == "parametrized":
                    if not self.branches:
                        raise ValueError("the parametrized method needs branch parametrizations")
                    d[rest] = parametrized_distance(self, X[rest])
                elif method == "penalty":
                    d[rest], flag[rest] = penalty_distance(self, X[rest])
                elif method == "grid":
                    d[rest] = grid_distance(self, X[rest])
                else:
                    raise ValueError(f"unknown method {method!r}")
            est = DistanceEstimate(d, flag)
        self._cache[key] = est
        return est


def dist_to_variety(x, V: VarietyDescriptor, method: str = "parametrized") -> float:
    return float(V.distances(np.asarray(x, dtype=float)[None, :], method)[0])


# ---------------------------------------------------------------------------
# parametrized
# ---------------------------------------------------------------------------

def _branch_distance(b: Branch, X: np.ndarray, sweeps: int = 6) -> np.ndarray:
    N, k = len(X), b.nparams
    norm = np.linalg.norm(X, axis=1)
    # per-parameter scale: the image of the real axis of w_j reaches three times |x|
    R = np.empty((N, k))
    for j in range(k):
        def axis_norm(t, j=j):
            w = np.zeros(t.shape + (k,), dtype=complex)
            w[..., j] = t
            return np.linalg.norm(b.point(w), axis=-1)

        R[:, j] = log_bisect(axis_norm, 3 * norm, 1e-12, 1e3)
    # coarse grid in polar form: geometric moduli R 2^-i (and 0) times a few phases
    levels, phases = _POLAR_GRID.get(k, (5, 4))
    mods = np.concatenate([[0.0], 2.0 ** -np.arange(levels)])
    ang = np.exp(2j * np.pi * np.arange(phases) / phases)
    single = np.concatenate([[0j], (mods[1:, None] * ang[None, :]).ravel()])
    mesh = np.stack(np.meshgrid(*([single] * k), indexing="ij"), axis=-1).reshape(-1, k)
    G = len(mesh)
    nstart = min(3, G)
    starts = np.empty((N, nstart, k), dtype=complex)
    chunk = max(1, _CHUNK // G)
    for s in range(0, N, chunk):
        sl = slice(s, min(N, s + chunk))
        W = mesh[None, :, :] * R[sl, None, :]
        Z = b.point(W)
        d2 = np.sum(np.abs(Z - X[sl, None, :]) ** 2, axis=-1)
        idx = np.argpartition(d2, nstart - 1, axis=1)[:, :nstart] if G > nstart else np.argsort(d2, axis=1)
        starts[sl] = np.take_along_axis(W, idx[:, :, None], axis=1)
    flat_w = starts.reshape(-1, k)
    Rrep = np.repeat(R, nstart, axis=0)
    # bracket half-width: half the modulus of the start, at least the finest grid level
    half = 0.5 * np.maximum(np.abs(flat_w), Rrep * 2.0 ** -levels)
    flat = np.concatenate([flat_w.real, flat_w.imag], axis=1)
    Xrep = np.repeat(X, nstart, axis=0)
    step = np.concatenate([half, half], axis=1)

    def objective(u):
        return np.sum(np.abs(b.point_real(u) - Xrep) ** 2, axis=-1)

    def value_grad(u, rows):
        w = u[:, :k] + 1j * u[:, k:]
        r = b.point(w) - Xrep[rows]
        # d|r|^2/d(Re w), d|r|^2/d(Im w) for holomorphic z(w)
        gw = np.einsum("mnk,mn->mk", np.conj(b.jacobian(w)), r)
        return np.sum(np.abs(r) ** 2, axis=-1), np.concatenate([2 * gw.real, 2 * gw.imag], axis=1)

    u, best = coordinate_descent(objective, flat, step, sweeps=sweeps)
    # the valleys can be long and curved (e.g. a product of parameters pinned
    # by one coordinate); a quasi-Newton polish follows them
    _, polished = bfgs(value_grad, u)
    best = np.minimum(best, polished)
    return np.sqrt(best.reshape(N, nstart).min(axis=1))


def parametrized_distance(V: "VarietyDescriptor", X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.full(len(X), np.inf)
    for b in V.branches:
        out = np.minimum(out, _branch_distance(b, X))
    return out


def _newton_project(V: VarietyDescriptor, Z: np.ndarray, iters: int = 80) -> np.ndarray:
    for _ in range(iters):
        gv = V.g_values(Z)
        gr = V.g_gradient(Z)
        nn = np.sum(np.abs(gr) ** 2, axis=-1)
        safe = nn > 0
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            upd = (gv / np.where(safe, nn, 1))[..., None] * np.conj(gr)
        upd = np.where(safe[..., None] & np.isfinite(upd), upd, 0)
        Z = Z - upd
    return Z


def _newton_step(V: VarietyDescriptor, Z: np.ndarray) -> np.ndarray:
    """Length of the Newton correction ``|g| / |grad g|`` (zero on the zero set)."""
    gv = np.abs(V.g_values(Z))
    nn = np.linalg.norm(V.g_gradient(Z), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = gv / nn
    return np.where(gv == 0, 0.0, np.where(nn > 0, step, np.inf))


def _scale_g(V: VarietyDescriptor, s: np.ndarray, rng) -> np.ndarray:
    n = V.g.nvars
    Z = rng.normal(size=(len(s), 16, n)) + 1j * rng.normal(size=(len(s), 16, n))
    Z = Z / np.linalg.norm(Z, axis=-1, keepdims=True) * s[:, None, None]
    G = np.abs(V.g_values(Z)).max(axis=1)
    return np.where(G > 0, G, 1.0)


def _penalty_pass(V: VarietyDescriptor, X: np.ndarray, s: np.ndarray, starts: int, rng,
                  steps: int = 150) -> tuple[np.ndarray, np.ndarray]:
    N, n = X.shape
    G = _scale_g(V, s, rng)
    off = rng.normal(size=(N, starts, n)) + 1j * rng.normal(size=(N, starts, n))
    off[:, 0, :] = 0
    Z = X[:, None, :] + 0.5 * s[:, None, None] * off / np.sqrt(2 * n)
    Xc = np.broadcast_to(X[:, None, :], Z.shape)
    s2 = (s ** 2)[:, None]
    G2 = (G ** 2)[:, None]

    def phi(Z, rho):
        return np.sum(np.abs(Z - Xc) ** 2, axis=-1) / s2 + rho * np.abs(V.g_values(Z)) ** 2 / G2

    eta = np.ones(Z.shape[:2])
    for rho in 10.0 ** np.arange(2, 13, 2):
        cur = phi(Z, rho)
        for _ in range(steps):
            gv = V.g_values(Z)
            gr = V.g_gradient(Z)
            grad = (Z - Xc) / s2[..., None] + rho * (gv[..., None] * np.conj(gr)) / G2[..., None]
            # backtracking on a per-problem step size
            eta = np.minimum(eta * 2, 1.0)
            for _ in range(30):
                trial = Z - (eta * s2)[..., None] * grad
                val = phi(trial, rho)
                ok = val <= cur
                if ok.all():
                    break
                eta = np.where(ok, eta, eta / 2)
            Z = np.where(ok[..., None], trial, Z)
            cur = np.where(ok, val, cur)
    Z = _newton_project(V, Z)
    # slide along the zero set: tangential descent, then back onto it
    for _ in range(60):
        nvec = np.conj(V.g_gradient(Z))
        nn = np.sum(np.abs(nvec) ** 2, axis=-1, keepdims=True)
        v = Z - Xc
        with np.errstate(all="ignore"):
            coef = np.sum(v * np.conj(nvec), axis=-1, keepdims=True) / np.where(nn > 0, nn, 1)
        tang = np.where(nn > 0, v - coef * nvec, 0)
        Z = _newton_project(V, Z - 0.5 * tang, iters=20)
    Z = _newton_project(V, Z, iters=200)
    dist = np.linalg.norm(Z - Xc, axis=-1)
    good = _newton_step(V, Z) <= 1e-7 * np.maximum(dist, 1e-300)
    feasible = np.where(good, dist, np.inf)
    best = feasible.min(axis=1)
    flagged = ~np.isfinite(best)
    # fall back to the best infeasible estimate rather than infinity
    best = np.where(flagged, dist.min(axis=1), best)
    return best, flagged


def penalty_distance(V: VarietyDescriptor, X: np.ndarray, starts: int = 8, seed: int = 0
                     ) -> tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    rng = np.random.default_rng(seed)
    s = np.linalg.norm(X, axis=1)
    s = np.where(s > 0, s, 1.0)
    d1, f1 = _penalty_pass(V, X, s, starts, rng)
    # second pass at the scale of the first estimate
    s2 = np.where(np.isfinite(d1) & (d1 > 0), d1, s)
    d2, f2 = _penalty_pass(V, X, s2, starts, rng)
    better = d2 < d1
    return np.where(better, d2, d1), np.where(better, f2, f1)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

def grid_distance(V: VarietyDescriptor, X: np.ndarray, m: int = 9) -> np.ndarray:
    """Newton-project a grid of complex points in a box around each x."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[1]
    unit = np.linspace(-1.0, 1.0, m)
    mesh = np.stack(np.meshgrid(*([unit] * (2 * n)), indexing="ij"), axis=-1).reshape(-1, 2 * n)
    offsets = mesh[:, :n] + 1j * mesh[:, n:]
    out = np.empty(len(X))
    rng = np.random.default_rng(0)
    scale = _scale_g(V, np.maximum(np.linalg.norm(X, axis=1), 1e-300), rng)
    for i, x in enumerate(X):
        r = max(np.linalg.norm(x), 1e-300)
        Z = x[None, :] + r * offsets
        Z = _newton_project(V, Z)
        ok = np.abs(V.g_values(Z)) <= 1e-10 * scale[i]
        d = np.linalg.norm(Z - x[None, :], axis=1)
        out[i] = d[ok].min() if ok.any() else np.inf
    return out
