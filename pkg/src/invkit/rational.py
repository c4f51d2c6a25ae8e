"""Rational functions num/den in lowest terms, and polynomial substitution."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import RingMismatchError
from .gcd import gcd
from .polynomial import PolyRing, Polynomial

__all__ = ["RationalFunction", "substitute", "as_rational"]


class RationalFunction:
    """``num/den`` with ``gcd(num, den) = 1`` and ``den`` monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, *, reduced: bool = False):
        if den is None:
            den = num.ring.one
            reduced = True
        if num.ring != den.ring:
            raise RingMismatchError(f"{num.ring!r} vs {den.ring!r}")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            if num.is_zero():
                den = num.ring.one
            elif not den.is_constant():
                g = gcd(num, den)
                if not g.is_constant():
                    num, den = num.exquo(g), den.exquo(g)
        lc = den.lead_coeff()
        if lc != 1:
            inv = num.ring.field.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @classmethod
    def parse(cls, ring: PolyRing, num: str, den: str = "1") -> "RationalFunction":
        return cls(ring.parse(num), ring.parse(den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring!r} vs {other.ring!r}")
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction(self.ring.constant(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if a.is_zero() or c.is_zero():
            return RationalFunction(self.ring.zero)
        g1 = gcd(a, d)
        g2 = gcd(c, b)
        if not g1.is_constant():
            a, d = a.exquo(g1), d.exquo(g1)
        if not g2.is_constant():
            c, b = c.exquo(g2), b.exquo(g2)
        return RationalFunction(a * c, b * d, reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num, reduced=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num**n, self.den**n, reduced=True)

    def diff(self, var) -> "RationalFunction":
        n, d = self.num, self.den
        return RationalFunction(n.diff(var) * d - n * d.diff(var), d * d)

    def convert(self, ring: PolyRing, mapping=None) -> "RationalFunction":
        return RationalFunction(self.num.convert(ring, mapping), self.den.convert(ring, mapping), reduced=True)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, Polynomial):
            return self.den.is_constant() and self.num == other
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == self.ring.field(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def to_json(self) -> dict:
        return {"num": str(self.num), "den": str(self.den)}


def as_rational(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x)
    raise TypeError(f"cannot view {type(x).__name__} as a rational function")


def substitute(p: Polynomial, images: Sequence) -> RationalFunction:
    """Compose ``p`` with ``x_i -> images[i]`` (polynomials or rational functions).

    All images must share one ring; the result lives there.
    """
    if len(images) != p.ring.nvars:
        raise ValueError(f"need {p.ring.nvars} images, got {len(images)}")
    if not images:
        raise ValueError("substitution into a ring without variables")
    imgs = [as_rational(x) for x in images]
    target = imgs[0].ring
    for x in imgs:
        if x.ring != target:
            raise RingMismatchError("substitution images live in different rings")
    # clear denominators: p(n/d) = P(n_i * D/d_i) / D^deg  with D = prod of dens
    if all(x.den.is_constant() for x in imgs):
        return RationalFunction(_subst_poly(p, [x.num for x in imgs], target), reduced=True)
    dens = [x.den for x in imgs]
    deg = [p.degree(i) for i in range(p.ring.nvars)]
    out = target.zero
    powcache: dict = {}

    def power(base_idx, kind, k):
        key = (base_idx, kind, k)
        if key not in powcache:
            base = imgs[base_idx].num if kind == "n" else dens[base_idx]
            powcache[key] = base**k
        return powcache[key]

    for e, c in p.terms.items():
        term = target.constant(c)
        for i, a in enumerate(e):
            if deg[i] < 0:
                continue
            if a:
                term = term * power(i, "n", a)
            if deg[i] - a:
                term = term * power(i, "d", deg[i] - a)
        out = out + term
    common = target.one
    for i, d in enumerate(dens):
        if deg[i] > 0:
            common = common * power(i, "d", deg[i])
    return RationalFunction(out, common)


def _subst_poly(p: Polynomial, images: Sequence[Polynomial], target: PolyRing) -> Polynomial:
    cache: dict = {}

    def power(i, a):
        key = (i, a)
        if key not in cache:
            cache[key] = images[i] ** a
        return cache[key]

    out = target.zero
    for e, c in p.terms.items():
        term = target.constant(c)
        for i, a in enumerate(e):
            if a:
                term = term * power(i, a)
        out = out + term
    return out
