"""Derivations on charts, D-ideals and rational first integrals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import PreconditionError
from .gcd import lcm
from .groebner import Ideal
from .lattice import integer_kernel, modp_kernel, rational_kernel
from .polynomial import Polynomial
from .rational import RationalFunction, as_rational
from .varieties import PresentedRing

__all__ = [
    "Derivation",
    "apply_derivation",
    "is_constant",
    "is_d_ideal",
    "log_derivative",
    "LogDerivative",
    "first_integral_search",
    "FirstIntegral",
    "ring_closure_for_derivation",
    "dual_numbers_derivation",
    "derivation_to_dring",
]


class Derivation:
    """A ``k``-linear derivation given by the images of the variables."""

    def __init__(self, ring: PresentedRing, images: Sequence, *, check: bool = True):
        self.ring = ring
        imgs = []
        for im in images:
            if isinstance(im, str):
                im = ring.poly.parse(im)
            elif isinstance(im, dict):
                im = RationalFunction(ring.poly.parse(im["num"]), ring.poly.parse(im.get("den", "1")))
            elif isinstance(im, tuple):
                im = RationalFunction(ring.poly.parse(im[0]), ring.poly.parse(im[1]))
            im = as_rational(im)
            if im.ring != ring.poly:
                im = im.convert(ring.poly)
            imgs.append(im)
        if len(imgs) != len(ring.variables):
            raise PreconditionError(f"need {len(ring.variables)} images, got {len(imgs)}")
        self.images = tuple(imgs)
        if check:
            for r in ring.relations:
                d = self.poly(r)
                if not ring.is_zero(d.num):
                    raise PreconditionError(f"derivation does not preserve the relation {r}: image {d}")

    def poly(self, p: Polynomial) -> RationalFunction:
        """Chain rule on a polynomial."""
        acc = RationalFunction(p.ring.zero)
        for i, im in enumerate(self.images):
            if im.is_zero() or not p.involves(i):
                continue
            acc = acc + im * p.diff(i)
        return acc

    def __call__(self, g) -> RationalFunction:
        return apply_derivation(self, g)

    def is_polynomial(self) -> bool:
        """Whether the derivation maps the chart into itself."""
        return all(self.ring.is_unit(im.den) for im in self.images)

    def is_zero(self) -> bool:
        return all(im.is_zero() for im in self.images)

    def to_json(self) -> list:
        return [im.to_json() for im in self.images]

    def __repr__(self):
        return "Derivation(" + ", ".join(
            f"{v} -> {im}" for v, im in zip(self.ring.variables, self.images)
        ) + ")"


def apply_derivation(delta: Derivation, g) -> RationalFunction:
    """``delta(g)`` via the chain rule and the quotient rule."""
    ring = delta.ring
    if isinstance(g, str):
        g = ring.poly.parse(g)
    g = as_rational(g)
    if g.ring != ring.poly:
        g = g.convert(ring.poly)
    dn = delta.poly(g.num)
    if g.den.is_constant():
        return dn * ring.field.inv(g.den.constant_value())
    dd = delta.poly(g.den)
    return (dn * RationalFunction(g.den) - dd * RationalFunction(g.num)) / RationalFunction(g.den * g.den)


def is_constant(delta: Derivation, g) -> bool:
    d = apply_derivation(delta, g)
    return d.is_zero() or delta.ring.is_zero(d.num)


def is_d_ideal(delta: Derivation, I) -> bool:
    """``delta(a) in I`` for every generator ``a`` (enough by the Leibniz rule)."""
    ring = delta.ring
    if not delta.is_polynomial():
        raise PreconditionError(
            "derivation does not map the chart into itself; use ring_closure_for_derivation first"
        )
    gens = I.generators if isinstance(I, Ideal) else [ring._lift(a) for a in I]
    J = ring.ideal(gens)
    for a in gens:
        d = delta.poly(a)
        if not d.is_zero() and not J.contains(d.num):
            return False
    return True


@dataclass
class LogDerivative:
    value: RationalFunction
    in_ring: bool

    def __iter__(self):
        return iter((self.value, self.in_ring))


def log_derivative(delta: Derivation, r) -> LogDerivative:
    """``delta(r)/r`` and whether it is regular on the chart."""
    ring = delta.ring
    r = as_rational(ring._lift(r) if isinstance(r, str) else r)
    if r.is_zero():
        raise ValueError("logarithmic derivative of zero")
    value = apply_derivation(delta, r) / r
    return LogDerivative(value, ring.is_unit(value.den))


@dataclass
class FirstIntegral:
    g: RationalFunction
    exponents: list[int]
    kernel: list[list[int]] = field(default_factory=list)
    pruned: list[dict] = field(default_factory=list)

    def __iter__(self):
        return iter((self.g, self.exponents))


def _prune(ring: PresentedRing, witnesses: list[RationalFunction]) -> tuple[list[int], list[dict]]:
    from .invariants import FactorBase, multiplicative_independence

    if not ring.is_polynomial_chart:
        return list(range(len(witnesses))), []
    polys = [q for w in witnesses for q in (w.num, w.den)]
    base = FactorBase.covering(ring, polys)
    kept: list[int] = []
    pruned = []
    for j, w in enumerate(witnesses):
        if w.is_constant():
            pruned.append({"witness": str(w), "relation": None, "reason": "constant"})
            continue
        rel = multiplicative_independence([witnesses[i] for i in kept] + [w], base)
        if rel.independent:
            kept.append(j)
        else:
            pruned.append({"witness": str(w), "relation": rel.relation})
    return kept, pruned


def first_integral_search(delta: Derivation, witnesses: Sequence) -> FirstIntegral | None:
    """A product ``g = prod r_j^e_j`` with ``delta(g) = 0``, or None.

    ``delta(g)/g = sum e_j delta(r_j)/r_j``, so the exponents are an integer
    kernel vector of the log-derivative coefficient matrix.
    """
    from .invariants import is_nonconstant

    ring = delta.ring
    ws = []
    for w in witnesses:
        w = as_rational(ring._lift(w) if isinstance(w, str) else w)
        if w.ring != ring.poly:
            w = w.convert(ring.poly)
        if w.is_zero():
            raise PreconditionError("witnesses must be nonzero")
        ws.append(w)
    if not ws:
        return None
    kept, pruned = _prune(ring, ws)
    if not kept:
        return None
    logs = [log_derivative(delta, ws[j]).value for j in kept]
    D = ring.poly.one
    for L in logs:
        D = lcm(D, L.den)
    cols = [ring.reduce(L.num * D.exquo(L.den)) for L in logs]
    monos = sorted({m for c in cols for m in c.terms}, key=ring.poly.order.rank)
    matrix = [[c.terms.get(m, 0) for c in cols] for m in monos]
    p = ring.field.characteristic
    if p:
        kernel = modp_kernel(matrix, p, len(kept)) if matrix else _identity(len(kept))
    else:
        kernel = rational_kernel(matrix, len(kept)) if matrix else _identity(len(kept))
    for k in kernel:
        g = RationalFunction(ring.poly.one)
        for j, e in zip(kept, k):
            if e:
                g = g * ws[j] ** e
        if is_nonconstant(g, ring) and is_constant(delta, g):
            exps = [0] * len(ws)
            for j, e in zip(kept, k):
                exps[j] = e
            return FirstIntegral(g, exps, kernel, pruned)
    return None


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for i in range(n)] for j in range(n)]


def ring_closure_for_derivation(delta: Derivation) -> PresentedRing:
    """The chart with the denominators of the ``delta(x_i)`` inverted."""
    return delta.ring.localize([im.den for im in delta.images if not im.den.is_constant()])


def derivation_to_dring(delta: Derivation):
    """The dual-numbers structure ``r -> r + delta(r) eps``."""
    from .doperators import DRingStructure, dual_numbers

    return DRingStructure.from_operators(delta.ring, dual_numbers(delta.ring.field), [list(delta.images)])


def dual_numbers_derivation(f1, f2) -> Derivation:
    """``delta(t)`` = eps-coefficient of ``f1(t) - f2(t)`` for maps into dual numbers.

    Both maps must agree modulo ``eps`` and reduce to the identity there, so
    that the difference is a derivation of the source chart itself.
    """
    from .doperators import AlgebraMap

    for f in (f1, f2):
        if not isinstance(f, AlgebraMap) or f.algebra.dim != 2:
            raise PreconditionError("expected two maps into a rank-two (dual numbers) algebra")
        if f.algebra.table[1][1] != (0, 0) or f.algebra.unit != (1, 0):
            raise PreconditionError("the algebra is not the dual numbers in the basis 1, eps")
    if f1.source.poly != f2.source.poly or f1.target.poly != f2.target.poly:
        raise PreconditionError("the two maps must share source and target")
    images = []
    for x, a, b in zip(f1.source.poly.gens, f1.images, f2.images):
        if a.coeffs[0] != b.coeffs[0]:
            raise PreconditionError(f"maps differ modulo eps on {x}: {a.coeffs[0]} vs {b.coeffs[0]}")
        if f1.source.poly != f1.target.poly or a.coeffs[0] != RationalFunction(x):
            raise PreconditionError("maps must reduce to the identity modulo eps")
        images.append(a.coeffs[1] - b.coeffs[1])
    delta = Derivation(f1.source, images)
    # Leibniz on products of generators, read off the maps themselves
    gens = f1.source.poly.gens
    for i in range(len(gens)):
        for j in range(i, len(gens)):
            uv = gens[i] * gens[j]
            diff = f1.apply(uv).coeffs[1] - f2.apply(uv).coeffs[1]
            if diff != delta.poly(uv):
                raise PreconditionError("eps-coefficient difference violates the Leibniz rule")
    return delta
