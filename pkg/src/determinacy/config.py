"""JSON problem files.

A problem file is one JSON object; polynomials are strings in the grammar
of ``parse_poly`` over ``variables``.  Fields::

    variables   ["x1", "x2", ...]
    f           "..."
    psi         ["...", ...]              (default: the coordinates)
    Y           [piece, ...]              (default: the origin)
    sequence    {"family": "gevrey_log", "alpha": "1", "beta": "0"}
                | {"family": "tabulated", "values": [...]}
    strategy    "lowest-degree-minor" | "user" | "all-minors-best-fit"
    g           "..."                     (strategy "user")
    gamma       "..."                     (isolated-singularity runs)
    branches    [{"params": ["u", "v"], "z": ["...", ...]}, ...]
    method      "parametrized" | "penalty" | "grid"
    plan        {"radii": {"hi": 2^-4, "lo": 2^-18, "count": 57} | [...],
                 "directions": 64, "seed": 42, "axes": true}
    fit_nu      false

Pieces of Y are ``{"type": "origin"}``, ``{"type": "subspace", "vanishing":
[1-based indices]}``, ``{"type": "arc", "components": [{"coef", "power",
"log_power", "signed"}, ...]}`` or the shorthand ``{"type": "power_curve",
"mu": 1.5, "log_power": 0}`` for ``|x_1| = ... = |x_{n-1}| = |x_n|^mu``.

Exponents of the sequence are read as exact rationals: ``"4/3"``, ``2`` and
``"0.5"`` are all accepted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .algebra import Polynomial, parse_poly
from .carleman import GevreyLog, Tabulated, TameSequence
from .fitting import MapGerm
from .lojasiewicz import (
    Arc,
    ArcComponent,
    Branch,
    Origin,
    SamplePlan,
    SetDescriptor,
    Subspace,
    power_curve,
)

STRATEGIES = ("lowest-degree-minor", "user", "all-minors-best-fit")
METHODS = ("parametrized", "penalty", "grid")


class ConfigError(ValueError):
    pass


@dataclass
class ProblemSpec:
    variables: tuple[str, ...]
    f: Polynomial
    psi: MapGerm
    Y: SetDescriptor
    M: TameSequence
    strategy: str = "lowest-degree-minor"
    g: Polynomial | None = None
    gamma: Polynomial | None = None
    branches: list[Branch] = field(default_factory=list)
    method: str | None = None
    plan: SamplePlan = field(default_factory=SamplePlan)
    fit_nu: bool = False
    raw: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}; expected one of {', '.join(STRATEGIES)}")
        if self.strategy == "user" and self.g is None:
            raise ConfigError("strategy 'user' needs a polynomial g")
        if self.method is not None and self.method not in METHODS:
            raise ConfigError(f"unknown distance method {self.method!r}")
        if self.f.constant_term() != 0:
            raise ConfigError("f must vanish at the origin")

    @property
    def distance_method(self) -> str:
        if self.method:
            return self.method
        return "parametrized" if self.branches else "penalty"


def exact(value, what: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{what}: expected a number, got {value!r}")
    try:
        # floats go through their shortest repr, so 0.1 means 1/10
        return Fraction(repr(value) if isinstance(value, float) else value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{what}: {exc}") from None


def _plain(q: Fraction):
    return int(q) if q.denominator == 1 else q


def parse_sequence(obj) -> TameSequence:
    if not isinstance(obj, dict):
        raise ConfigError("sequence must be an object")
    fam = obj.get("family", "gevrey_log")
    if fam in ("gevrey_log", "gevrey"):
        alpha = _plain(exact(obj.get("alpha", 1), "sequence.alpha"))
        beta = _plain(exact(obj.get("beta", 0), "sequence.beta"))
        try:
            return GevreyLog(alpha, beta)
        except ValueError as exc:
            raise ConfigError(f"sequence: {exc}") from None
    if fam == "tabulated":
        try:
            if "log_values" in obj:
                return Tabulated(tuple(float(v) for v in obj["log_values"]))
            return Tabulated.from_values(obj["values"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"sequence: {exc}") from None
    raise ConfigError(f"unknown sequence family {fam!r}")


def parse_piece(obj, n: int):
    kind = obj.get("type")
    if kind == "origin":
        return [Origin()]
    if kind == "subspace":
        idx = obj.get("vanishing", [])
        if not idx or any(not isinstance(i, int) or not 1 <= i <= n for i in idx):
            raise ConfigError(f"subspace indices must lie in 1..{n}")
        return [Subspace(tuple(i - 1 for i in idx))]
    if kind == "arc":
        comps = obj.get("components", [])
        if len(comps) != n:
            raise ConfigError(f"arc needs {n} components, got {len(comps)}")
        try:
            return [Arc(tuple(ArcComponent(float(c.get("coef", 1)), float(c.get("power", 1)),
                                           float(c.get("log_power", 0)), bool(c.get("signed", False)))
                              for c in comps))]
        except ValueError as exc:
            raise ConfigError(f"arc: {exc}") from None
    if kind == "power_curve":
        mu = float(exact(obj.get("mu", 1), "power_curve.mu"))
        if mu <= 0:
            raise ConfigError("power_curve.mu must be positive")
        return power_curve(mu, n, float(obj.get("log_power", 0))).pieces
    raise ConfigError(f"unknown piece type {kind!r}")


def parse_set(obj, n: int) -> SetDescriptor:
    if obj is None:
        return SetDescriptor([Origin()])
    if isinstance(obj, dict):
        obj = [obj]
    pieces = []
    for piece in obj:
        pieces.extend(parse_piece(piece, n))
    return SetDescriptor(pieces)


def parse_plan(obj) -> SamplePlan:
    if obj is None:
        return SamplePlan()
    kw = {}
    radii = obj.get("radii")
    if isinstance(radii, dict):
        hi, lo, count = float(radii.get("hi", 2 ** -4)), float(radii.get("lo", 2 ** -18)), int(radii.get("count", 57))
        if count < 2 or not 0 < lo < hi:
            raise ConfigError("plan.radii needs 0 < lo < hi and count >= 2")
        step = (math.log(lo) - math.log(hi)) / (count - 1)
        kw["radii"] = tuple(math.exp(math.log(hi) + k * step) for k in range(count))
    elif radii is not None:
        kw["radii"] = tuple(float(r) for r in radii)
    for key in ("directions", "seed"):
        if key in obj:
            kw[key] = int(obj[key])
    if "axes" in obj:
        kw["axes"] = bool(obj["axes"])
    try:
        return SamplePlan(**kw)
    except ValueError as exc:
        raise ConfigError(f"plan: {exc}") from None


def poly_field(text, variables, what) -> Polynomial:
    if not isinstance(text, str):
        raise ConfigError(f"{what}: expected a polynomial string")
    try:
        return parse_poly(text, variables)
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from None


def parse_variables(obj: dict) -> tuple[str, ...]:
    variables = obj.get("variables")
    if not variables or not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ConfigError("variables must be a non-empty list of names")
    return tuple(variables)


def parse_branches(obj: dict, n: int) -> list[Branch]:
    branches = []
    for b in obj.get("branches", []):
        try:
            branches.append(Branch.parse(b["params"], b["z"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"branch: {exc}") from None
        if len(branches[-1].components) != n:
            raise ConfigError(f"branch has {len(branches[-1].components)} components for {n} variables")
    return branches


def parse_problem(obj: dict) -> ProblemSpec:
    if not isinstance(obj, dict):
        raise ConfigError("the problem must be a JSON object")
    variables = parse_variables(obj)
    n = len(variables)
    if "f" not in obj:
        raise ConfigError("missing field f")
    f = poly_field(obj["f"], variables, "f")
    psi_src = obj.get("psi", list(variables))
    try:
        psi = MapGerm([poly_field(p, variables, "psi") for p in psi_src])
    except ValueError as exc:
        raise ConfigError(f"psi: {exc}") from None
    branches = parse_branches(obj, n)
    return ProblemSpec(
        variables=variables,
        f=f,
        psi=psi,
        Y=parse_set(obj.get("Y"), n),
        M=parse_sequence(obj.get("sequence", {})),
        strategy=obj.get("strategy", "lowest-degree-minor"),
        g=poly_field(obj["g"], variables, "g") if "g" in obj else None,
        gamma=poly_field(obj["gamma"], variables, "gamma") if "gamma" in obj else None,
        branches=branches,
        method=obj.get("method"),
        plan=parse_plan(obj.get("plan")),
        fit_nu=bool(obj.get("fit_nu", False)),
        raw=obj,
    )


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return obj


def load_problem(path) -> ProblemSpec:
    return parse_problem(load_json(path))
