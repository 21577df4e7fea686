"""Buchberger's algorithm with cofactor tracking.

Every basis element carries its representation over the original
generators, which gives membership certificates (explicit cofactors) and,
through Schreyer's construction, generators of the syzygy module.

All computations happen in the polynomial ring Q[x] with the grevlex order;
no local (tangent-cone) orderings are used.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .algebra.polynomial import (
    Monomial,
    Polynomial,
    grevlex_key,
    monomial_divides,
    monomial_lcm,
    monomial_quotient,
)

ModuleVector = tuple[Polynomial, ...]


class ZeroIdealError(ValueError):
    """Raised when a basis is requested for an ideal with only zero generators."""


@dataclass(frozen=True)
class Certificate:
    """``p = sum(cofactors[i] * generators[i]) + remainder``, exactly."""

    cofactors: ModuleVector
    remainder: Polynomial

    @property
    def is_member(self) -> bool:
        return self.remainder.is_zero()


@dataclass(frozen=True)
class SubsetResult:
    holds: bool
    witness: Polynomial | None = None
    remainder: Polynomial | None = None

    def __bool__(self) -> bool:
        return self.holds


# ---------------------------------------------------------------------------
# division
# ---------------------------------------------------------------------------

def _divide(p: Polynomial, basis: Sequence[Polynomial]):
    """Full multivariate division.

    Returns ``(quotients, remainder)`` with ``p = sum q_k b_k + remainder`` and
    no term of the remainder divisible by a leading monomial of the basis.
    Quotients are returned as term dictionaries.
    """
    variables = p.variables
    leads = [(b.leading_monomial(), b.leading_coefficient(), b) for b in basis]
    work = dict(p.terms)
    heap = [(_neg(grevlex_key(m)), m) for m in work]
    heapq.heapify(heap)
    quot: list[dict[Monomial, Fraction]] = [dict() for _ in basis]
    rem: dict[Monomial, Fraction] = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = work.pop(m, None)
        if c is None:
            continue
        for k, (lm, lc, b) in enumerate(leads):
            if monomial_divides(lm, m):
                qm = monomial_quotient(m, lm)
                qc = c / lc
                quot[k][qm] = quot[k].get(qm, Fraction(0)) + qc
                for bm, bc in b.terms.items():
                    if bm == lm:
                        continue
                    tm = tuple(a + e for a, e in zip(bm, qm))
                    old = work.get(tm)
                    if old is None:
                        work[tm] = -qc * bc
                        heapq.heappush(heap, (_neg(grevlex_key(tm)), tm))
                    else:
                        new = old - qc * bc
                        if new:
                            work[tm] = new
                        else:
                            del work[tm]
                break
        else:
            rem[m] = c
    quotients = [Polynomial(variables, {m: c for m, c in q.items() if c}) for q in quot]
    return quotients, Polynomial(variables, rem)


def _neg(key):
    # heapq is a min-heap; invert the grevlex key
    deg, rest = key
    return (-deg, tuple(-x for x in rest))


def _combine(coeffs: Sequence[Polynomial], vectors: Sequence[ModuleVector], length: int,
             variables) -> list[Polynomial]:
    out = [Polynomial.zero(variables) for _ in range(length)]
    for c, vec in zip(coeffs, vectors):
        if c.is_zero():
            continue
        for i, v in enumerate(vec):
            if not v.is_zero():
                out[i] = out[i] + c * v
    return out


# ---------------------------------------------------------------------------
# Buchberger
# ---------------------------------------------------------------------------

@dataclass
class _Tracked:
    poly: Polynomial
    rep: list[Polynomial]  # poly = sum rep[i] * gens[i]


def _s_poly_parts(f: Polynomial, g: Polynomial):
    lf, lg = f.leading_monomial(), g.leading_monomial()
    lcm_ = monomial_lcm(lf, lg)
    mf = monomial_quotient(lcm_, lf)
    mg = monomial_quotient(lcm_, lg)
    cf = 1 / f.leading_coefficient()
    cg = 1 / g.leading_coefficient()
    return mf, cf, mg, cg


def _reduce_tracked(t: _Tracked, basis: list[_Tracked], m: int) -> _Tracked:
    q, r = _divide(t.poly, [b.poly for b in basis])
    sub = _combine(q, [b.rep for b in basis], m, t.poly.variables)
    return _Tracked(r, [a - b for a, b in zip(t.rep, sub)])


def buchberger_tracked(gens: Sequence[Polynomial]) -> tuple[list[Polynomial], list[ModuleVector]]:
    """Reduced Groebner basis of ``gens`` with representations.

    Returns ``(basis, reps)`` where ``basis[k] == sum(reps[k][i] * gens[i])``.
    The basis is sorted by increasing leading monomial.
    """
    gens = list(gens)
    if not gens or all(g.is_zero() for g in gens):
        raise ZeroIdealError("cannot compute a basis of the zero ideal")
    variables = gens[0].variables
    for g in gens:
        if g.variables != variables:
            raise ValueError("generators live in different rings")
    m = len(gens)
    zero = Polynomial.zero(variables)
    one = Polynomial.constant(variables, 1)

    G: list[_Tracked] = []
    pairs: list[tuple] = []

    def add(t: _Tracked) -> None:
        t = _monic(t)
        k = len(G)
        lt = t.poly.leading_monomial()
        for i, b in enumerate(G):
            if b is None:
                continue
            lb = b.poly.leading_monomial()
            lcm_ = monomial_lcm(lb, lt)
            heapq.heappush(pairs, (grevlex_key(lcm_)[0], _neg(grevlex_key(lcm_)), i, k))
        G.append(t)

    for i, g in enumerate(gens):
        if g.is_zero():
            continue
        rep = [one if j == i else zero for j in range(m)]
        t = _reduce_tracked(_Tracked(g, rep), [b for b in G if b is not None], m) if G else _Tracked(g, rep)
        if not t.poly.is_zero():
            add(t)

    while pairs:
        _, _, i, j = heapq.heappop(pairs)
        f, g = G[i], G[j]
        lf, lg = f.poly.leading_monomial(), g.poly.leading_monomial()
        # product criterion: coprime leading monomials reduce to zero
        if all(a == 0 or b == 0 for a, b in zip(lf, lg)):
            continue
        if _chain_skip(G, i, j, pairs):
            continue
        mf, cf, mg, cg = _s_poly_parts(f.poly, g.poly)
        s = f.poly.mul_term(mf, cf) - g.poly.mul_term(mg, cg)
        srep = [a.mul_term(mf, cf) - b.mul_term(mg, cg) for a, b in zip(f.rep, g.rep)]
        t = _reduce_tracked(_Tracked(s, srep), G, m)
        if not t.poly.is_zero():
            add(t)

    return _interreduce(G, m)


def _chain_skip(G, i, j, pairs) -> bool:
    """Buchberger's chain criterion restricted to already-processed pairs."""
    lcm_ = monomial_lcm(G[i].poly.leading_monomial(), G[j].poly.leading_monomial())
    pending = {(a, b) for *_, a, b in pairs}
    for k, t in enumerate(G):
        if k in (i, j):
            continue
        if not monomial_divides(t.poly.leading_monomial(), lcm_):
            continue
        ik = (min(i, k), max(i, k))
        jk = (min(j, k), max(j, k))
        if ik not in pending and jk not in pending:
            return True
    return False


def _monic(t: _Tracked) -> _Tracked:
    c = t.poly.leading_coefficient()
    if c == 1:
        return t
    inv = 1 / c
    return _Tracked(t.poly.scale(inv), [r.scale(inv) for r in t.rep])


def _interreduce(G: list[_Tracked], m: int):
    # drop elements whose leading monomial is divisible by another one
    keep: list[_Tracked] = []
    for k, t in enumerate(G):
        lt = t.poly.leading_monomial()
        redundant = False
        for kk, u in enumerate(G):
            if kk == k:
                continue
            lu = u.poly.leading_monomial()
            if monomial_divides(lu, lt) and (lu != lt or kk < k):
                redundant = True
                break
        if not redundant:
            keep.append(t)
    # tail-reduce each element against the others
    changed = True
    while changed:
        changed = False
        for k in range(len(keep)):
            others = keep[:k] + keep[k + 1:]
            if not others:
                continue
            t = keep[k]
            lm, lc = t.poly.leading_monomial(), t.poly.leading_coefficient()
            head = Polynomial(t.poly.variables, {lm: lc})
            tail = _Tracked(t.poly - head, [Polynomial.zero(t.poly.variables)] * m)
            q, r = _divide(tail.poly, [o.poly for o in others])
            if any(not x.is_zero() for x in q):
                sub = _combine(q, [o.rep for o in others], m, t.poly.variables)
                keep[k] = _Tracked(head + r, [a - b for a, b in zip(t.rep, sub)])
                changed = True
    keep = [_monic(t) for t in keep]
    keep.sort(key=lambda t: grevlex_key(t.poly.leading_monomial()))
    return [t.poly for t in keep], [tuple(t.rep) for t in keep]


def buchberger(gens: Sequence[Polynomial]) -> list[Polynomial]:
    """Reduced Groebner basis (grevlex), sorted by increasing leading monomial."""
    return buchberger_tracked(gens)[0]


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    mf, cf, mg, cg = _s_poly_parts(f, g)
    return f.mul_term(mf, cf) - g.mul_term(mg, cg)


def is_groebner(basis: Sequence[Polynomial]) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    basis = list(basis)
    for f, g in combinations(basis, 2):
        if not _divide(s_polynomial(f, g), basis)[1].is_zero():
            return False
    return True


def is_reduced(basis: Sequence[Polynomial]) -> bool:
    for k, b in enumerate(basis):
        if b.leading_coefficient() != 1:
            return False
        for kk, o in enumerate(basis):
            if kk == k:
                continue
            lo = o.leading_monomial()
            if any(monomial_divides(lo, m) for m in b.terms):
                return False
    return True


# ---------------------------------------------------------------------------
# ideals
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Ideal:
    """Ideal of Q[x] given by generators; the Groebner basis is cached lazily."""

    generators: tuple[Polynomial, ...]
    order: str = "grevlex"
    _basis: list[Polynomial] | None = field(default=None, repr=False)
    _reps: list[ModuleVector] | None = field(default=None, repr=False)

    def __init__(self, generators: Sequence[Polynomial], order: str = "grevlex"):
        gens = tuple(generators)
        if not gens:
            raise ValueError("an ideal needs at least one generator")
        if any(g.variables != gens[0].variables for g in gens):
            raise ValueError("generators live in different rings")
        if order != "grevlex":
            raise ValueError("only the grevlex order is supported")
        self.generators = gens
        self.order = order
        self._basis = None
        self._reps = None

    @property
    def variables(self) -> tuple[str, ...]:
        return self.generators[0].variables

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.generators)

    def _ensure(self) -> None:
        if self._basis is None:
            self._basis, self._reps = buchberger_tracked(self.generators)

    @property
    def basis(self) -> list[Polynomial]:
        self._ensure()
        return list(self._basis)

    @property
    def basis_representations(self) -> list[ModuleVector]:
        self._ensure()
        return list(self._reps)

    def is_unit(self) -> bool:
        if self.is_zero():
            return False
        b = self.basis
        return len(b) == 1 and b[0].is_constant()

    def __contains__(self, p: Polynomial) -> bool:
        return normal_form(p, self).is_zero()

    def __repr__(self) -> str:
        return f"Ideal<{', '.join(map(str, self.generators))}>"


def normal_form(p: Polynomial, I: Ideal) -> Polynomial:
    """Remainder of full division by the reduced basis of ``I``."""
    if I.is_zero():
        return p
    return _divide(p, I.basis)[1]


def ideal_member(p: Polynomial, I: Ideal) -> Certificate:
    """Division with cofactors expressed over the original generators.

    The returned certificate always satisfies the reconstruction identity;
    ``p`` lies in ``I`` iff its remainder is zero.
    """
    m = len(I.generators)
    if I.is_zero():
        return Certificate(tuple(Polynomial.zero(p.variables) for _ in range(m)), p)
    q, r = _divide(p, I.basis)
    cof = _combine(q, I.basis_representations, m, p.variables)
    return Certificate(tuple(cof), r)


def ideal_subset(I: Ideal, J: Ideal) -> SubsetResult:
    """Whether every generator of ``I`` lies in ``J``; reports the first failure."""
    if I.variables != J.variables:
        raise ValueError("ideals live in different rings")
    for g in I.generators:
        r = normal_form(g, J)
        if not r.is_zero():
            return SubsetResult(False, g, r)
    return SubsetResult(True)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    return bool(ideal_subset(I, J)) and bool(ideal_subset(J, I))


# ---------------------------------------------------------------------------
# syzygies
# ---------------------------------------------------------------------------

def sigma(vector: Sequence[Polynomial], gens: Sequence[Polynomial]) -> Polynomial:
    """``sum(vector[i] * gens[i])``."""
    if len(vector) != len(gens):
        raise ValueError(f"vector of length {len(vector)} against {len(gens)} generators")
    total = Polynomial.zero(gens[0].variables)
    for v, g in zip(vector, gens):
        if not v.is_zero() and not g.is_zero():
            total = total + v * g
    return total


def syzygies(gens: Sequence[Polynomial]) -> list[ModuleVector]:
    """Generators of the module of relations among ``gens`` (Schreyer).

    Syzygies of the reduced basis come from its S-pairs; they are pulled
    back to the original generators and completed by the relations that
    express each generator through the basis.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    variables = gens[0].variables
    m = len(gens)
    zero = Polynomial.zero(variables)
    one = Polynomial.constant(variables, 1)
    if all(g.is_zero() for g in gens):
        return [tuple(one if j == i else zero for j in range(m)) for i in range(m)]

    basis, reps = buchberger_tracked(gens)
    out: list[ModuleVector] = []
    s = len(basis)
    for i, j in combinations(range(s), 2):
        mf, cf, mg, cg = _s_poly_parts(basis[i], basis[j])
        spoly = basis[i].mul_term(mf, cf) - basis[j].mul_term(mg, cg)
        q, r = _divide(spoly, basis)
        assert r.is_zero(), "basis is not a Groebner basis"
        coeff = [-x for x in q]
        one_i = Polynomial(variables, {mf: cf})
        one_j = Polynomial(variables, {mg: cg})
        coeff[i] = coeff[i] + one_i
        coeff[j] = coeff[j] - one_j
        out.append(tuple(_combine(coeff, reps, m, variables)))
    for i, g in enumerate(gens):
        q, r = _divide(g, basis)
        assert r.is_zero()
        back = _combine(q, reps, m, variables)
        e_i = [one if k == i else zero for k in range(m)]
        out.append(tuple(a - b for a, b in zip(e_i, back)))
    return _clean_vectors(out)


def _clean_vectors(vectors: list[ModuleVector]) -> list[ModuleVector]:
    seen = set()
    out = []
    for v in vectors:
        if all(x.is_zero() for x in v):
            continue
        v = _normalize_vector(v)
        key = tuple(v)
        if key in seen:
            continue
        seen.add(key)
        out.append(v)
    return out


def _normalize_vector(v: ModuleVector) -> ModuleVector:
    from math import gcd, lcm

    num, den = 0, 1
    for x in v:
        for c in x.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
    scale = Fraction(den, num)
    first = next(x for x in v if not x.is_zero())
    if first.leading_coefficient() < 0:
        scale = -scale
    return tuple(x.scale(scale) for x in v)


def module_member(vector: Sequence[Polynomial], generators: Sequence[Sequence[Polynomial]]) -> bool:
    """Membership of ``vector`` in the submodule of Q[x]^p spanned by ``generators``.

    Vectors are encoded as linear forms in auxiliary variables e_1..e_p; the
    ideal of these forms together with all products e_i e_j is graded in the
    auxiliary degree, so its degree-one part is exactly the submodule.
    """
    p = len(vector)
    variables = vector[0].variables
    aux = tuple(f"__e{i}" for i in range(p))
    ring = variables + aux

    def encode(v):
        total = Polynomial.zero(ring)
        for i, x in enumerate(v):
            if len(v) != p:
                raise ValueError("vector length mismatch")
            total = total + x.substitute_ring(ring) * Polynomial.variable(ring, len(variables) + i)
        return total

    target = encode(vector)
    if target.is_zero():
        return True
    gens = [encode(v) for v in generators]
    gens += [
        Polynomial.variable(ring, len(variables) + i) * Polynomial.variable(ring, len(variables) + j)
        for i in range(p)
        for j in range(i, p)
    ]
    gens = [g for g in gens if not g.is_zero()]
    return normal_form(target, Ideal(gens)).is_zero()
