"""Real closed sets through the origin, as unions of simple pieces.

A piece is the origin, a coordinate subspace ``{x_i = 0 for i in I}``, or an
arc ``t -> (sign_k * coef_k * t^power_k * log(1 + 1/t)^log_power_k)_k`` for
t >= 0, where every component flagged ``signed`` takes both signs (all
2^k combinations are enumerated).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .optimize import golden_section


@dataclass(frozen=True)
class Origin:
    def distances(self, X: np.ndarray) -> np.ndarray:
        return np.linalg.norm(X, axis=1)

    def describe(self) -> dict:
        return {"type": "origin"}


@dataclass(frozen=True)
class Subspace:
    vanishing: tuple[int, ...]  # 0-based indices of the coordinates that vanish

    def distances(self, X: np.ndarray) -> np.ndarray:
        return np.linalg.norm(X[:, list(self.vanishing)], axis=1)

    def describe(self) -> dict:
        return {"type": "subspace", "vanishing": [i + 1 for i in self.vanishing]}


@dataclass(frozen=True)
class ArcComponent:
    coef: float = 1.0
    power: float = 1.0
    log_power: float = 0.0
    signed: bool = False

    def __post_init__(self):
        if self.coef != 0 and self.power <= 0:
            raise ValueError("arc components must vanish at t = 0 (power > 0)")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        if self.coef == 0:
            return np.zeros_like(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = self.coef * t ** self.power
            if self.log_power:
                v = v * np.log1p(1.0 / t) ** self.log_power
        return np.where(t > 0, v, 0.0)

    def describe(self) -> dict:
        return {"coef": self.coef, "power": self.power, "log_power": self.log_power,
                "signed": self.signed}


@dataclass(frozen=True)
class Arc:
    components: tuple[ArcComponent, ...]

    def signs(self) -> list[tuple[int, ...]]:
        choices = [(1, -1) if c.signed else (1,) for c in self.components]
        return list(itertools.product(*choices))

    def point(self, t: np.ndarray, signs: Sequence[int]) -> np.ndarray:
        return np.stack([s * c(t) for s, c in zip(signs, self.components)], axis=-1)

    def distances(self, X: np.ndarray, grid: int = 96) -> np.ndarray:
        out = np.full(len(X), np.inf)
        for signs in self.signs():
            out = np.minimum(out, self._branch(X, signs, grid))
        return out

    def _branch(self, X: np.ndarray, signs, grid: int) -> np.ndarray:
        norm = np.linalg.norm(X, axis=1)

        def dist(t):
            return np.linalg.norm(self.point(t, signs) - X, axis=1)

        # the arc leaves the ball of radius 2|x| by parameter T
        lo = np.zeros(len(X))
        hi = np.ones(len(X))
        for _ in range(200):
            short = np.linalg.norm(self.point(hi, signs), axis=1) < 2 * norm
            if not short.any():
                break
            hi = np.where(short, hi * 2, hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            short = np.linalg.norm(self.point(mid, signs), axis=1) < 2 * norm
            lo = np.where(short, mid, lo)
            hi = np.where(short, hi, mid)
        T = hi
        # candidate parameters: linear and geometric spacing on [0, T]
        lin = np.linspace(0.0, 1.0, grid)
        geo = np.logspace(-12, 0, grid)
        frac = np.unique(np.concatenate([lin, geo]))
        cand = frac[None, :] * T[:, None]
        pts = self.point(cand, signs)
        d = np.linalg.norm(pts - X[:, None, :], axis=2)
        k = np.argmin(d, axis=1)
        left = cand[np.arange(len(X)), np.maximum(k - 1, 0)]
        right = cand[np.arange(len(X)), np.minimum(k + 1, len(frac) - 1)]
        _, best = golden_section(dist, left, right, iters=80)
        return np.minimum(best, d[np.arange(len(X)), k])

    def describe(self) -> dict:
        return {"type": "arc", "components": [c.describe() for c in self.components]}


Piece = Union[Origin, Subspace, Arc]


@dataclass
class SetDescriptor:
    pieces: list[Piece] = field(default_factory=lambda: [Origin()])

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("a set needs at least one piece")

    def distances(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(len(X), np.inf)
        for p in self.pieces:
            out = np.minimum(out, p.distances(X))
        return out

    def describe(self) -> list:
        return [p.describe() for p in self.pieces]


def dist_to_set(x, Y: SetDescriptor) -> float:
    return float(Y.distances(np.asarray(x, dtype=float)[None, :])[0])


def power_curve(mu: float, n: int = 2, log_power: float = 0.0) -> SetDescriptor:
    """``{|x_1| = ... = |x_{n-1}| = |x_n|^mu}`` (optionally with a log factor on x_1..x_{n-1})."""
    comps = [ArcComponent(1.0, mu, log_power, True) for _ in range(n - 1)]
    comps.append(ArcComponent(1.0, 1.0, 0.0, True))
    return SetDescriptor([Arc(tuple(comps))])
