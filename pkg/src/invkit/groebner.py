"""Buchberger's algorithm and the ideal operations built on it.

Every scheme-theoretic statement in the package (membership, equality,
elimination, saturation, radical membership) is decided here.
"""

from __future__ import annotations

import heapq
import threading
from typing import Iterable, Sequence

from .config import BUDGET
from .errors import InseparableError, ResourceLimitError, RingMismatchError
from .gcd import squarefree_part
from .polynomial import MonomialOrder, PolyRing, Polynomial, block_order

__all__ = [
    "Ideal",
    "groebner_basis",
    "normal_form",
    "ideal_equal",
    "elimination_ideal",
    "saturation",
    "radical_membership",
    "is_radical_principal",
    "spoly",
]


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    """S-polynomial of two polynomials (made monic first)."""
    f, g = f.monic(), g.monic()
    lf, lg = f.lead_monomial(), g.lead_monomial()
    lcm = tuple(max(x, y) for x, y in zip(lf, lg))
    one = f.ring.field.one
    return f.mul_monomial(tuple(a - b for a, b in zip(lcm, lf)), one) - g.mul_monomial(
        tuple(a - b for a, b in zip(lcm, lg)), one
    )


class _Reducer:
    """Full reduction against a list of monic polynomials (fixed order)."""

    def __init__(self, ring: PolyRing):
        self.ring = ring
        self.leads: list[tuple] = []
        self.tails: list[list] = []

    def add(self, g: Polynomial):
        lm = g.lead_monomial()
        self.leads.append(lm)
        self.tails.append([(e, c) for e, c in g.terms.items() if e != lm])

    def reduce(self, terms: dict, full: bool = True) -> dict:
        rank = self.ring.order.rank
        norm = self.ring.field.norm
        leads, tails = self.leads, self.tails
        max_terms = BUDGET.max_terms
        p = dict(terms)
        heap = [(rank(m), m) for m in p]
        heapq.heapify(heap)
        r = {}
        while heap:
            _, m = heapq.heappop(heap)
            c = p.pop(m, None)
            if c is None:
                continue
            for k, lm in enumerate(leads):
                if _divides(lm, m):
                    break
            else:
                r[m] = c
                if not full:
                    r.update(p)
                    return r
                continue
            shift = tuple(a - b for a, b in zip(m, lm))
            for e, ce in tails[k]:
                t = tuple(a + b for a, b in zip(e, shift))
                old = p.get(t)
                if old is None:
                    v = norm(-c * ce)
                    p[t] = v
                    heapq.heappush(heap, (rank(t), t))
                else:
                    v = norm(old - c * ce)
                    if v == 0:
                        del p[t]
                    else:
                        p[t] = v
            if len(p) > max_terms:
                raise ResourceLimitError("term count", max_terms, len(p))
        return r


def _reduce(p: Polynomial, basis: Sequence[Polynomial]) -> Polynomial:
    red = _Reducer(p.ring)
    for g in basis:
        red.add(g.monic())
    return Polynomial(p.ring, red.reduce(p.terms))


def _buchberger(gens: list[Polynomial]) -> list[Polynomial]:
    ring = gens[0].ring
    rank = ring.order.rank
    G: list[Polynomial] = []
    leads: list[tuple] = []
    red = _Reducer(ring)
    pairs: list = []  # heap of (deg lcm, i, j): normal selection, deterministic ties
    pending: set = set()

    def lcm(a, b):
        return tuple(max(x, y) for x, y in zip(a, b))

    def add(h: Polynomial):
        h = h.monic()
        n = len(G)
        G.append(h)
        lm = h.lead_monomial()
        leads.append(lm)
        red.add(h)
        if len(G) > BUDGET.max_basis:
            raise ResourceLimitError("basis size", BUDGET.max_basis, len(G))
        for i in range(n):
            heapq.heappush(pairs, (sum(lcm(leads[i], lm)), i, n))
            pending.add((i, n))

    for g in sorted(gens, key=lambda q: rank(q.lead_monomial())):
        h = Polynomial(ring, red.reduce(g.terms))
        if not h.is_zero():
            if h.is_constant():
                return [ring.one]
            add(h)

    while pairs:
        _, i, j = heapq.heappop(pairs)
        pending.discard((i, j))
        li, lj = leads[i], leads[j]
        m = lcm(li, lj)
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading monomials
        chain = False
        for k in range(len(G)):
            if k in (i, j):
                continue
            if _divides(leads[k], m):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a not in pending and b not in pending:
                    chain = True
                    break
        if chain:
            continue
        s = spoly(G[i], G[j])
        h = Polynomial(ring, red.reduce(s.terms))
        if h.is_zero():
            continue
        if h.is_constant():
            return [ring.one]
        add(h)
    return _reduce_basis(G)


def _reduce_basis(G: list[Polynomial]) -> list[Polynomial]:
    ring = G[0].ring
    rank = ring.order.rank
    G = sorted(G, key=lambda g: rank(g.lead_monomial()))
    minimal = []
    for idx, g in enumerate(G):
        lm = g.lead_monomial()
        if any(
            _divides(h.lead_monomial(), lm) and (h.lead_monomial() != lm or k < idx)
            for k, h in enumerate(G)
            if k != idx
        ):
            continue
        minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = [h for k, h in enumerate(minimal) if k != idx]
        red = _Reducer(ring)
        for h in others:
            red.add(h)
        lm = g.lead_monomial()
        tail = {e: c for e, c in g.terms.items() if e != lm}
        reduced = red.reduce(tail)
        reduced[lm] = g.terms[lm]
        out.append(Polynomial(ring, reduced).monic())
    out.sort(key=lambda g: rank(g.lead_monomial()))
    return out


def groebner_basis(gens: Iterable[Polynomial], order: MonomialOrder | None = None) -> list[Polynomial]:
    """Reduced Groebner basis (monic, sorted by descending leading monomial)."""
    gens = [g for g in gens]
    if not gens:
        return []
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise RingMismatchError(f"{g.ring!r} vs {ring!r}")
    if order is not None and order != ring.order:
        gens = [g.reorder(order) for g in gens]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    return _buchberger(gens)


class Ideal:
    """An ideal of a polynomial ring with a compute-once Groebner cache."""

    def __init__(self, ring: PolyRing, generators: Iterable[Polynomial | str] = ()):
        self.ring = ring
        gens = []
        for g in generators:
            g = ring(g) if isinstance(g, str) else g
            if g.ring != ring:
                raise RingMismatchError(f"generator {g} not in {ring!r}")
            gens.append(g)
        self.generators = tuple(gens)
        self._gb: dict = {}
        self._lock = threading.Lock()

    def groebner(self, order: MonomialOrder | None = None) -> list[Polynomial]:
        order = order or self.ring.order
        cached = self._gb.get(order)
        if cached is None:
            basis = groebner_basis(self.generators, order)
            with self._lock:
                cached = self._gb.setdefault(order, basis)
        return cached

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def is_zero(self) -> bool:
        return not self.groebner()

    def reduce(self, p: Polynomial) -> Polynomial:
        return normal_form(p, self)

    def contains(self, p: Polynomial) -> bool:
        return normal_form(p, self).is_zero()

    def __contains__(self, p):
        return self.contains(p)

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, self.generators + tuple(other.generators))

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return ideal_equal(self, other)

    __hash__ = None

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.generators)})"

    def basis_strings(self) -> list[str]:
        return [str(g) for g in self.groebner()]


def normal_form(p: Polynomial, I: Ideal) -> Polynomial:
    """Remainder of ``p`` modulo the reduced basis of ``I``; zero iff ``p`` in ``I``."""
    if p.ring != I.ring:
        raise RingMismatchError(f"{p.ring!r} vs {I.ring!r}")
    gb = I.groebner()
    if not gb or p.is_zero():
        return p
    return _reduce(p, gb)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    if I.ring != J.ring:
        raise RingMismatchError(f"{I.ring!r} vs {J.ring!r}")
    return all(J.contains(g) for g in I.generators) and all(I.contains(g) for g in J.generators)


def elimination_ideal(I: Ideal, keep: Sequence[str]) -> Ideal:
    """``I`` intersected with ``k[keep]``, as an ideal of the smaller ring."""
    ring = I.ring
    keep = [v for v in ring.variables if v in set(keep)]
    elim = [v for v in ring.variables if v not in set(keep)]
    small = ring.with_variables(keep, ring.order)
    if not elim:
        return Ideal(small, [g.convert(small) for g in I.generators])
    big = ring.with_variables(elim + keep, block_order(len(elim)))
    gb = groebner_basis([g.convert(big) for g in I.generators])
    n = len(elim)
    kept = [g for g in gb if all(not any(e[:n]) for e in g.terms)]
    return Ideal(small, [g.convert(small) for g in kept])


def saturation(I: Ideal, f: Polynomial) -> Ideal:
    """``(I : f^oo)`` via elimination of ``t`` from ``I + (1 - t f)``."""
    if f.is_zero():
        raise ValueError("cannot saturate at zero")
    ring = I.ring
    if f.is_constant():
        return Ideal(ring, I.generators)
    t = ring.fresh_name("_t")
    ext = ring.with_variables((t,) + ring.variables, block_order(1))
    tt = ext.gen(t)
    gens = [g.convert(ext) for g in I.generators] + [ext.one - tt * f.convert(ext)]
    gb = groebner_basis(gens)
    kept = [g for g in gb if not any(e[0] for e in g.terms)]
    return Ideal(ring, [g.convert(ring) for g in kept])


def radical_membership(p: Polynomial, I: Ideal) -> bool:
    """Rabinowitsch: ``p`` in rad(I) iff ``1`` in ``I + (1 - t p)``."""
    ring = I.ring
    t = ring.fresh_name("_t")
    ext = ring.with_variables(ring.variables + (t,), ring.order)
    tt = ext.gen(t)
    gb = groebner_basis([g.convert(ext) for g in I.generators] + [ext.one - tt * p.convert(ext)])
    return len(gb) == 1 and gb[0].is_constant()


def is_radical_principal(a: Polynomial) -> bool:
    """Whether ``(a)`` is a radical ideal, i.e. ``a`` is squarefree.

    A characteristic-p factor of multiplicity divisible by p makes ``a``
    non-squarefree, so that case answers False rather than raising.
    """
    if a.is_zero():
        raise ValueError("(0) is handled separately; expected a nonzero polynomial")
    try:
        sf = squarefree_part(a)
    except InseparableError:
        return False
    return sf.total_degree() == a.total_degree()
