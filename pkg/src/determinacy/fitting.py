"""The module sigma^{-1}(<phi>), its presentation matrix and Fitting ideal.

With ``sigma(v) = sum v_i psi_i``, every phi_j is lifted to a vector h^j with
``sigma(h^j) = phi_j``; together with generators k^1..k^r of the relations
among the psi_i these span sigma^{-1}(<phi>).  The maximal minors of the
p x (q + r) matrix with columns h^1..h^q, k^1..k^r generate the ideal K.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import PolyMatrix, Polynomial, minor_columns, minors
from .errors import DegenerateIdeal, NotInIdeal, NotPrimitive
from .groebner import (
    Ideal,
    ModuleVector,
    ideal_member,
    ideal_subset,
    normal_form,
    sigma,
    syzygies,
)


@dataclass(frozen=True)
class MapGerm:
    components: tuple[Polynomial, ...]

    def __init__(self, components: Sequence[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a map germ needs at least one component")
        for k, c in enumerate(comps):
            if c.variables != comps[0].variables:
                raise ValueError("components live in different rings")
            if c.constant_term() != 0:
                raise ValueError(f"component {k + 1} ({c}) does not vanish at the origin")
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.components[0].variables

    def ideal(self) -> Ideal:
        return Ideal(self.components)


@dataclass
class FittingResult:
    lifts: list[ModuleVector]
    relations: list[ModuleVector]
    lam: PolyMatrix
    minors: list[Polynomial] = field(default_factory=list)  # nonzero ones only
    minor_labels: list[tuple[int, ...]] = field(default_factory=list)  # 0-based columns
    ideal: Ideal | None = None


@dataclass(frozen=True)
class PrimitiveResult:
    holds: bool
    which: object = None  # "f" or 1-based derivative index
    witness: Polynomial | None = None
    remainder: Polynomial | None = None

    def __bool__(self) -> bool:
        return self.holds


def sigma_apply(v: Sequence[Polynomial], psi: MapGerm) -> Polynomial:
    return sigma(v, psi.components)


def primitive_member(f: Polynomial, I: Ideal) -> PrimitiveResult:
    """Whether ``f`` and all its first derivatives lie in ``I``."""
    if f.constant_term() != 0:
        raise ValueError(f"f has nonzero constant term {f.constant_term()}")
    r = normal_form(f, I)
    if not r.is_zero():
        return PrimitiveResult(False, "f", f, r)
    for j in range(f.nvars):
        d = f.derive(j)
        r = normal_form(d, I)
        if not r.is_zero():
            return PrimitiveResult(False, j + 1, d, r)
    return PrimitiveResult(True)


def build_lambda(psi: MapGerm, phi: MapGerm) -> FittingResult:
    """Lifts, relations and the matrix lambda (no minors yet)."""
    if psi.variables != phi.variables:
        raise ValueError("psi and phi live in different rings")
    I = psi.ideal()
    sub = ideal_subset(phi.ideal(), I)
    if not sub:
        k = phi.components.index(sub.witness)
        raise NotInIdeal(k, sub.witness, sub.remainder)
    lifts = []
    for k, comp in enumerate(phi):
        cert = ideal_member(comp, I)
        if not cert.is_member:
            raise NotInIdeal(k, comp, cert.remainder)
        lifts.append(cert.cofactors)
    relations = syzygies(psi.components)
    return assemble(lifts, relations)


def assemble(lifts: Sequence[ModuleVector], relations: Sequence[ModuleVector]) -> FittingResult:
    columns = list(lifts) + list(relations)
    lam = PolyMatrix.from_columns(columns)
    return FittingResult(list(lifts), list(relations), lam)


def attach_minors(res: FittingResult) -> FittingResult:
    """Fill in the nonzero maximal minors and the ideal they generate."""
    p = res.lam.rows
    if res.lam.cols < p:
        raise DegenerateIdeal(
            f"lambda has {res.lam.cols} columns for {p} rows; every maximal minor is zero"
        )
    labels = minor_columns(res.lam, p)
    values = minors(res.lam, p)
    keep = [(lab, m) for lab, m in zip(labels, values) if not m.is_zero()]
    if not keep:
        raise DegenerateIdeal("all maximal minors of lambda vanish; K = 0 gives no information")
    res.minor_labels = [lab for lab, _ in keep]
    res.minors = [m for _, m in keep]
    res.ideal = Ideal(res.minors)
    return res


def fitting_ideal(psi: MapGerm, phi: MapGerm) -> FittingResult:
    return attach_minors(build_lambda(psi, phi))


def kf_pipeline(psi: MapGerm, f: Polynomial) -> FittingResult:
    """K_f: the Fitting ideal for phi = grad f, after checking f is primitive over <psi>."""
    check = primitive_member(f, psi.ideal())
    if not check:
        raise NotPrimitive(check.which, check.witness, check.remainder)
    return fitting_ideal(psi, MapGerm(f.gradient()))


def dol_failures(res: FittingResult, psi: MapGerm, phi: MapGerm) -> list[tuple[int, int]]:
    """Pairs (minor index, psi index) with ``minor * psi_i`` outside <phi>."""
    J = phi.ideal()
    bad = []
    for a, m in enumerate(res.minors):
        for i, comp in enumerate(psi):
            if not normal_form(m * comp, J).is_zero():
                bad.append((a, i))
    return bad
