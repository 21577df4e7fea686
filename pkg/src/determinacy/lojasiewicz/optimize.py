"""Batched derivative-free minimizers.

Every routine works on a batch of independent problems at once: arrays are
indexed by problem first, and each problem keeps its own bracket.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

GOLDEN = (np.sqrt(5.0) - 1) / 2


def golden_section(fun: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                   iters: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Minimize ``fun`` on ``[lo, hi]`` elementwise; returns ``(argmin, value)``.

    The bracket ends are evaluated too, so a minimum sitting on the boundary
    is not lost.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = fun(c)
    fd = fun(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = np.where(left, b - GOLDEN * (b - a), d)
        nd = np.where(left, c, a + GOLDEN * (b - a))
        # one fresh evaluation per step: reuse the surviving interior point
        fresh = np.where(left, nc, nd)
        ff = fun(fresh)
        fc, fd = np.where(left, ff, fd), np.where(left, fc, ff)
        c, d = nc, nd
    x = np.where(fc < fd, c, d)
    fx = np.minimum(fc, fd)
    for end in (lo, hi):
        fe = fun(np.asarray(end, dtype=float))
        better = fe < fx
        x = np.where(better, end, x)
        fx = np.where(better, fe, fx)
    return x, fx


def coordinate_descent(fun: Callable[[np.ndarray], np.ndarray], start: np.ndarray, step: np.ndarray,
                       sweeps: int = 40, shrink: float = 0.6, iters: int = 30
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic golden-section sweeps over the coordinates of ``start`` (shape (N, k)).

    ``step`` (shape (N, k)) is the initial half-width of the bracket around
    the current point; it shrinks by ``shrink`` after each sweep.
    """
    p = np.array(start, dtype=float)
    h = np.array(step, dtype=float)
    best = fun(p)
    k = p.shape[1]
    for _ in range(sweeps):
        for j in range(k):
            def line(v, j=j):
                q = p.copy()
                q[:, j] = v
                return fun(q)

            v, fv = golden_section(line, p[:, j] - h[:, j], p[:, j] + h[:, j], iters)
            better = fv < best
            p[:, j] = np.where(better, v, p[:, j])
            best = np.where(better, fv, best)
        h = h * shrink
    return p, best


def log_bisect(fun: Callable[[np.ndarray], np.ndarray], target: np.ndarray, lo: float, hi: float,
               iters: int = 60) -> np.ndarray:
    """Largest-ish x in [lo, hi] (log scale) with ``fun(x) <= target``, assuming monotone ``fun``."""
    target = np.asarray(target, dtype=float)
    a = np.full(target.shape, np.log(lo))
    b = np.full(target.shape, np.log(hi))
    for _ in range(iters):
        m = 0.5 * (a + b)
        below = fun(np.exp(m)) <= target
        a = np.where(below, m, a)
        b = np.where(below, b, m)
    return np.exp(0.5 * (a + b))


def bfgs(value_grad: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]], start: np.ndarray,
         iters: int = 300, halvings: int = 60, gtol: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Batched BFGS with Armijo backtracking; ``start`` has shape (N, m).

    ``value_grad(points, rows)`` maps (M, m) points belonging to problems
    ``rows`` to values (M,) and gradients (M, m).  A row stops once its line search fails, which
    is how it signals convergence to working precision.
    """
    x = np.array(start, dtype=float)
    N, m = x.shape
    f, g = value_grad(x, np.arange(N))
    H = np.broadcast_to(np.eye(m), (N, m, m)).copy()
    fresh = np.ones(N, dtype=bool)
    active = np.nonzero(np.isfinite(f) & (np.linalg.norm(g, axis=1) > gtol))[0]
    eye = np.eye(m)
    for _ in range(iters):
        if not len(active):
            break
        xa, fa, ga, Ha = x[active], f[active], g[active], H[active]
        d = -np.einsum("nij,nj->ni", Ha, ga)
        uphill = np.sum(ga * d, axis=1) >= 0
        d[uphill] = -ga[uphill]
        Ha[uphill] = eye
        fresh[active[uphill]] = True
        slope = np.sum(ga * d, axis=1)
        t = np.ones(len(active))
        xn, fn, gn = xa.copy(), fa.copy(), ga.copy()
        pend = np.arange(len(active))
        for _ in range(halvings):
            trial = xa[pend] + t[pend, None] * d[pend]
            ft, gt = value_grad(trial, active[pend])
            ok = np.isfinite(ft) & (ft <= fa[pend] + 1e-4 * t[pend] * slope[pend]) & (ft < fa[pend])
            acc = pend[ok]
            xn[acc], fn[acc], gn[acc] = trial[ok], ft[ok], gt[ok]
            pend = pend[~ok]
            if not len(pend):
                break
            t[pend] /= 2
        moved = np.ones(len(active), dtype=bool)
        moved[pend] = False
        s = xn - xa
        y = gn - ga
        sy = np.sum(s * y, axis=1)
        upd = moved & (sy > 1e-300)
        # scale the first approximation by the observed curvature
        scale = upd & fresh[active]
        if scale.any():
            yy = np.sum(y[scale] ** 2, axis=1)
            Ha[scale] = eye * (sy[scale] / yy)[:, None, None]
            fresh[active[scale]] = False
        if upd.any():
            rho = 1 / sy[upd]
            V = eye - rho[:, None, None] * np.einsum("ni,nj->nij", s[upd], y[upd])
            Ha[upd] = (np.einsum("nij,njk,nlk->nil", V, Ha[upd], V)
                       + rho[:, None, None] * np.einsum("ni,nj->nij", s[upd], s[upd]))
        x[active], f[active], g[active], H[active] = xn, fn, gn, Ha
        active = active[moved & (np.linalg.norm(gn, axis=1) > gtol)]
    return x, f
