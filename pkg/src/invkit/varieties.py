"""Affine charts, rational maps between them, and hypersurface transforms.

A chart is a :class:`PresentedRing`: ``k[x_1..x_n]`` modulo a relation ideal,
localized at finitely many inverted polynomials.  An ideal of the chart is
represented by its saturation inside the ambient polynomial ring, so two
chart ideals are equal exactly when their saturations are.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import FactorizationError, PreconditionError, RingMismatchError
from .factor import factor_split
from .fields import Field
from .gcd import gcd, multiplicity, radical_part
from .groebner import Ideal, elimination_ideal, ideal_equal, is_radical_principal, saturation
from .polynomial import GREVLEX, MonomialOrder, PolyRing, Polynomial, block_order
from .rational import RationalFunction, as_rational, substitute

__all__ = [
    "PresentedRing",
    "RationalMap",
    "Hypersurface",
    "EffectiveDivisor",
    "pullback_function",
    "scheme_inverse_image",
    "set_inverse_closure",
    "image_closure",
    "proper_transform",
    "compare_pullbacks",
    "PullbackComparison",
    "dominance_check",
    "separability_check",
    "divisor_support",
    "jacobian_rank",
    "pullback_divisor",
]


class PresentedRing:
    """``field[variables] / relations``, localized at ``invert``."""

    def __init__(
        self,
        field: Field,
        variables: Sequence[str],
        relations: Sequence[Polynomial | str] = (),
        invert: Sequence[Polynomial | str] = (),
        *,
        domain: bool = True,
        order: MonomialOrder = GREVLEX,
        name: str | None = None,
    ):
        self.poly = PolyRing(field, variables, order)
        self.field = field
        self.variables = self.poly.variables
        self.relations = tuple(self._lift(r) for r in relations)
        self.invert = tuple(self._lift(f) for f in invert)
        self.domain = domain
        self.name = name
        if any(f.is_zero() for f in self.invert):
            raise PreconditionError("inverted elements must be nonzero")
        self._ideal_cache: dict = {}
        zero = self.ideal(())
        if zero.is_unit():
            raise PreconditionError(f"chart {self!r} is empty: relations generate the unit ideal")
        for f in self.invert:
            if zero.contains(f):
                raise PreconditionError(f"inverted element {f} vanishes modulo the relations")

    def _lift(self, p) -> Polynomial:
        if isinstance(p, str):
            return self.poly.parse(p)
        if p.ring != self.poly:
            return p.convert(self.poly)
        return p

    def __repr__(self):
        extra = []
        if self.relations:
            extra.append("/(" + ", ".join(map(str, self.relations)) + ")")
        if self.invert:
            extra.append("[1/(" + "*".join(map(str, self.invert)) + ")]")
        return f"{self.field.name}[{', '.join(self.variables)}]{''.join(extra)}"

    @property
    def is_polynomial_chart(self) -> bool:
        """Zero relation ideal: a localized polynomial ring, hence a UFD."""
        return not self.relations

    @property
    def inverted_product(self) -> Polynomial:
        prod = self.poly.one
        for f in self.invert:
            prod = prod * f
        return prod

    def __call__(self, text) -> Polynomial:
        return self._lift(text)

    def ideal(self, generators: Sequence[Polynomial | str]) -> Ideal:
        """The chart ideal generated by ``generators``: relations added, saturated."""
        gens = tuple(self._lift(g) for g in generators)
        key = frozenset(gens)
        cached = self._ideal_cache.get(key)
        if cached is not None:
            return cached
        base = Ideal(self.poly, self.relations + gens)
        if self.invert:
            base = saturation(base, self.inverted_product)
        self._ideal_cache[key] = base
        return base

    def relation_ideal(self) -> Ideal:
        return self.ideal(())

    def reduce(self, p: Polynomial) -> Polynomial:
        """Normal form modulo the relation ideal (identity on polynomial charts)."""
        if not self.relations:
            return p
        return self.relation_ideal().reduce(p)

    def is_unit(self, p: Polynomial) -> bool:
        p = self._lift(p)
        if p.is_zero():
            return False
        if p.is_constant():
            return True
        return self.ideal([p]).is_unit()

    def is_zero(self, p: Polynomial) -> bool:
        return self.relation_ideal().contains(self._lift(p))

    def rational(self, num, den="1") -> RationalFunction:
        return RationalFunction(self._lift(num), self._lift(den))

    def identity(self) -> "RationalMap":
        return RationalMap(self, self, [RationalFunction(g) for g in self.poly.gens])

    def localize(self, extra: Sequence[Polynomial]) -> "PresentedRing":
        new = list(self.invert)
        for f in extra:
            f = self._lift(f)
            if f.is_constant() or any(f == g for g in new):
                continue
            if self.is_unit(f):
                continue
            new.append(f)
        if len(new) == len(self.invert):
            return self
        return PresentedRing(
            self.field, self.variables, self.relations, new, domain=self.domain, order=self.poly.order
        )


class RationalMap:
    """A morphism of charts ``source -> target`` given by one rational function
    over the source per target variable (the pullback of that coordinate)."""

    def __init__(self, source: PresentedRing, target: PresentedRing, images: Sequence, *, check: bool = True):
        if source.field != target.field:
            raise RingMismatchError("source and target charts must share the coefficient field")
        imgs = []
        for x in images:
            if isinstance(x, str):
                x = source.poly.parse(x)
            elif isinstance(x, dict):
                x = RationalFunction.parse(source.poly, x["num"], x.get("den", "1"))
            elif isinstance(x, tuple):
                x = RationalFunction.parse(source.poly, *x)
            x = as_rational(x)
            if x.ring != source.poly:
                x = x.convert(source.poly)
            imgs.append(x)
        if len(imgs) != len(target.variables):
            raise PreconditionError(
                f"map needs {len(target.variables)} images, got {len(imgs)}"
            )
        self.source = source
        self.target = target
        self.images = tuple(imgs)
        if check:
            self._check()

    def _check(self):
        for x in self.images:
            if not self.source.is_unit(x.den):
                raise PreconditionError(
                    f"denominator {x.den} is not a unit on the source chart; invert it first"
                )
        rel = self.source.relation_ideal()
        for r in self.target.relations:
            if not rel.contains(substitute(r, self.images).num):
                raise PreconditionError(f"target relation {r} does not pull back to zero")
        for f in self.target.invert:
            pulled = substitute(f, self.images)
            if not self.source.is_unit(pulled.num):
                raise PreconditionError(
                    f"inverted element {f} of the target pulls back to a non-unit {pulled.num}"
                )

    def __repr__(self):
        return f"RationalMap({self.source!r} -> {self.target!r}: {[str(x) for x in self.images]})"

    def pullback(self, p: Polynomial | RationalFunction) -> RationalFunction:
        if isinstance(p, RationalFunction):
            return pullback_function(self, p)
        return substitute(self.target._lift(p), self.images)

    def compose(self, other: "RationalMap") -> "RationalMap":
        """``self`` after ``other``: other.source -> other.target = self.source -> self.target."""
        return RationalMap(other.source, self.target, [other.pullback_rational(x) for x in self.images])

    def pullback_rational(self, g: RationalFunction) -> RationalFunction:
        return pullback_function(self, g)

    def is_identity(self) -> bool:
        return self.source is self.target and all(
            x == RationalFunction(g) for x, g in zip(self.images, self.source.poly.gens)
        )


# ---------------------------------------------------------------------------
# hypersurfaces and divisors


class Hypersurface:
    """A reduced hypersurface ``V(f_1 * ... * f_r)`` with explicit components."""

    def __init__(self, ring: PresentedRing, factors: Sequence, irreducible: Sequence[bool] | None = None):
        self.ring = ring
        polys = [ring._lift(f) for f in factors]
        if irreducible is None:
            irreducible = [False] * len(polys)
        if len(irreducible) != len(polys):
            raise PreconditionError("one irreducibility flag per factor is required")
        for f in polys:
            if f.is_constant():
                raise PreconditionError(f"hypersurface factor {f} is constant")
            if not is_radical_principal(f):
                raise PreconditionError(f"hypersurface factor {f} is not squarefree")
        for i in range(len(polys)):
            for j in range(i + 1, len(polys)):
                if not gcd(polys[i], polys[j]).is_constant():
                    raise PreconditionError(f"factors {polys[i]} and {polys[j]} share a component")
        self.factors = tuple(f.monic() for f in polys)
        self.irreducible = tuple(bool(b) for b in irreducible)

    @classmethod
    def empty(cls, ring: PresentedRing) -> "Hypersurface":
        return cls(ring, [])

    @classmethod
    def from_polynomial(cls, ring: PresentedRing, f, hints: Sequence = ()) -> "Hypersurface":
        """``V(f)`` split into components with :func:`factor_split`."""
        f = ring._lift(f)
        pieces = factor_split(f, [ring._lift(h) for h in hints])
        return cls(ring, [p for p, _ in pieces], [b for _, b in pieces])

    def is_empty(self) -> bool:
        return not self.factors

    @property
    def generator(self) -> Polynomial:
        prod = self.ring.poly.one
        for f in self.factors:
            prod = prod * f
        return prod

    def vanishing_ideal(self) -> Ideal:
        return self.ring.ideal([self.generator])

    def all_irreducible(self) -> bool:
        return all(self.irreducible)

    def same_as(self, other: "Hypersurface") -> bool:
        """Equality of the underlying closed sets on the chart."""
        if other.ring is not self.ring and other.ring.poly != self.ring.poly:
            raise RingMismatchError("hypersurfaces on different charts")
        if self.ring.is_polynomial_chart and not self.ring.invert:
            return sorted(map(str, self.factors)) == sorted(map(str, other.factors))
        return ideal_equal(self.vanishing_ideal(), other.vanishing_ideal())

    def to_json(self) -> dict:
        return {"factors": [str(f) for f in self.factors], "irreducible": list(self.irreducible)}

    def __repr__(self):
        if not self.factors:
            return "Hypersurface(empty)"
        return "Hypersurface(" + " * ".join(f"({f})" for f in self.factors) + ")"


@dataclass
class EffectiveDivisor:
    """``sum m_i [f_i]`` with pairwise coprime squarefree ``f_i``."""

    terms: list[tuple[Polynomial, int]] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not self.terms

    def as_dict(self) -> dict[str, int]:
        return {str(f): m for f, m in self.terms}

    def to_json(self) -> list:
        return [{"factor": str(f), "multiplicity": m} for f, m in self.terms]


# ---------------------------------------------------------------------------
# operations


def pullback_function(phi: RationalMap, g: RationalFunction) -> RationalFunction:
    """``g o phi``: substitute the map's images into numerator and denominator."""
    g = as_rational(g)
    if g.ring != phi.target.poly:
        g = g.convert(phi.target.poly)
    num = substitute(g.num, phi.images)
    den = substitute(g.den, phi.images)
    if den.is_zero() or phi.source.is_zero(den.num):
        raise PreconditionError(f"denominator {g.den} pulls back to zero")
    return num / den


def _pulled_generator(phi: RationalMap, H: Hypersurface) -> Polynomial:
    if H.ring.poly != phi.target.poly:
        raise RingMismatchError("hypersurface is not on the target chart")
    pulled = substitute(H.generator, phi.images).num
    if phi.source.is_zero(pulled):
        raise PreconditionError(
            f"{H!r} pulls back to zero: the image of the map lies inside it"
        )
    return pulled


def scheme_inverse_image(phi: RationalMap, H: Hypersurface) -> Ideal:
    """Extension of ``I(H)`` along ``phi``, saturated on the source chart."""
    return phi.source.ideal([_pulled_generator(phi, H)])


def set_inverse_closure(phi: RationalMap, H: Hypersurface) -> Hypersurface:
    """Closure of the set-theoretic preimage: the radical of the pulled-back
    generator, split into components (unit factors of the chart dropped)."""
    src = phi.source
    pulled = src.reduce(_pulled_generator(phi, H))
    hints = list(src.invert)
    known = []
    if src.poly == H.ring.poly and not src.relations and not H.ring.relations:
        # an asserted component of H that reappears verbatim is irreducible here too
        known = [f for f, b in zip(H.factors, H.irreducible) if b]
    pieces = []
    for f, irreducible in factor_split(pulled, hints, known):
        if src.is_unit(f):
            continue
        pieces.append((f, irreducible))
    return Hypersurface(src, [p for p, _ in pieces], [b for _, b in pieces])


def _graph_ring(phi: RationalMap) -> tuple[PolyRing, dict, dict]:
    """Ring on (source copy, target copy) with the source block first."""
    n, m = len(phi.source.variables), len(phi.target.variables)
    src_names = [f"_s{i}" for i in range(n)]
    tgt_names = [f"_y{j}" for j in range(m)]
    ring = PolyRing(phi.source.field, src_names + tgt_names, block_order(n))
    return (
        ring,
        dict(zip(phi.source.variables, src_names)),
        dict(zip(phi.target.variables, tgt_names)),
    )


def image_closure(phi: RationalMap, C: Ideal | Sequence[Polynomial]) -> Ideal:
    """Vanishing ideal (saturated on the target chart) of the closure of
    ``phi(V(C))``, computed by eliminating the source from the graph ideal."""
    gens = C.generators if isinstance(C, Ideal) else tuple(phi.source._lift(g) for g in C)
    ring, smap, tmap = _graph_ring(phi)
    graph = [g.convert(ring, smap) for g in gens]
    graph += [r.convert(ring, smap) for r in phi.source.relations]
    dens = ring.one
    for j, x in enumerate(phi.images):
        y = ring.gen(f"_y{j}")
        num = x.num.convert(ring, smap)
        den = x.den.convert(ring, smap)
        graph.append(den * y - num)
        dens = dens * den
    for f in phi.source.invert:
        dens = dens * f.convert(ring, smap)
    I = Ideal(ring, graph)
    if not dens.is_constant():
        I = saturation(I, dens)
    elim = elimination_ideal(I, list(tmap.values()))
    back = {v: k for k, v in tmap.items()}
    target_gens = [g.convert(phi.target.poly, back) for g in elim.generators]
    return phi.target.ideal(target_gens)


def proper_transform(phi: RationalMap, H: Hypersurface) -> Hypersurface:
    """Components of the set-theoretic preimage that dominate a component of ``H``.

    Returns the empty hypersurface when no component dominates.
    """
    closure = set_inverse_closure(phi, H)
    unasserted = [str(f) for f, b in zip(closure.factors, closure.irreducible) if not b]
    if unasserted:
        raise FactorizationError(
            f"cannot certify irreducibility of preimage components {unasserted}; "
            "supply them as hints or assert them"
        )
    targets = [H.ring.ideal([h]) for h in H.factors]
    keep = []
    for q in closure.factors:
        img = image_closure(phi, phi.source.ideal([q]))
        if any(ideal_equal(img, t) for t in targets):
            keep.append(q)
    return Hypersurface(phi.source, keep, [True] * len(keep))


@dataclass
class PullbackComparison:
    scheme: Ideal
    proper: Hypersurface
    scheme_is_radical: bool
    agree: bool
    divisor: EffectiveDivisor

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme.basis_strings(),
            "proper": self.proper.to_json(),
            "scheme_is_radical": self.scheme_is_radical,
            "agree": self.agree,
            "divisor": self.divisor.to_json(),
        }


def pullback_divisor(phi: RationalMap, H: Hypersurface) -> EffectiveDivisor:
    """Components of the pulled-back generator with their multiplicities."""
    pulled = phi.source.reduce(_pulled_generator(phi, H))
    closure = set_inverse_closure(phi, H)
    return EffectiveDivisor([(f, multiplicity(f, pulled)) for f in closure.factors])


def compare_pullbacks(phi: RationalMap, H: Hypersurface) -> PullbackComparison:
    scheme = scheme_inverse_image(phi, H)
    proper = proper_transform(phi, H)
    pulled = phi.source.reduce(_pulled_generator(phi, H))
    radical = is_radical_principal(pulled) if phi.source.is_polynomial_chart else ideal_equal(
        scheme, phi.source.ideal([radical_part(pulled)])
    )
    agree = ideal_equal(scheme, proper.vanishing_ideal()) if not proper.is_empty() else scheme.is_unit()
    return PullbackComparison(scheme, proper, radical, agree, pullback_divisor(phi, H))


def dominance_check(phi: RationalMap) -> bool:
    """Dense image: the image closure of the whole source is the whole target."""
    img = image_closure(phi, phi.source.relation_ideal())
    return ideal_equal(img, phi.target.relation_ideal())


def jacobian_rank(rows: list[list[RationalFunction]]) -> int:
    """Rank by fraction-free-in-spirit Gaussian elimination over rational functions."""
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for i in range(rank + 1, len(rows)):
            if not rows[i][c].is_zero():
                f = rows[i][c] / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def separability_check(phi: RationalMap) -> bool:
    """Generic rank of the Jacobian equals the target dimension."""
    if not phi.target.is_polynomial_chart:
        raise PreconditionError("separability check needs a target without relations")
    rows = [[x.diff(i) for i in range(len(phi.source.variables))] for x in phi.images]
    return jacobian_rank(rows) == len(phi.target.variables)


def divisor_support(
    g: RationalFunction, ring: PresentedRing, factor_hints: Sequence
) -> tuple[EffectiveDivisor, EffectiveDivisor]:
    """Zero and pole divisors of ``g`` over the hinted prime factors."""
    if not ring.is_polynomial_chart:
        raise PreconditionError("divisor_support needs a chart without relations (UFD mode)")
    g = as_rational(g)
    hints = [ring._lift(h).monic() for h in factor_hints]
    out = []
    for part in (g.num, g.den):
        rest = part
        terms = []
        for h in hints:
            m = multiplicity(h, rest)
            if m:
                rest = rest.exquo(h**m)
                terms.append((h, m))
        if not rest.is_constant():
            raise FactorizationError(f"hints do not cover the factor {rest.monic()}")
        out.append(EffectiveDivisor(terms))
    return out[0], out[1]
