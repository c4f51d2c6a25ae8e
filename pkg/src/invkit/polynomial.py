"""Sparse multivariate polynomials over QQ or F_p.

A polynomial is a dict ``{exponent tuple: coefficient}`` bound to a
:class:`PolyRing`, which fixes the coefficient field, the variable names and
the monomial order.  Zero coefficients are never stored, so two polynomials
over the same ring are equal exactly when their dicts are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import RingMismatchError
from .fields import QQ, Field

__all__ = ["MonomialOrder", "GREVLEX", "LEX", "block_order", "PolyRing", "Polynomial"]


class MonomialOrder:
    """A monomial order, exposed through :meth:`rank`.

    ``rank(e)`` is a flat tuple that sorts *ascending* when monomials sort
    *descending*, so the leading monomial is ``min(monomials, key=rank)`` and
    heaps pop the largest monomial first.
    """

    def __init__(self, name: str, split: int | None = None):
        if name not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {name!r}")
        if (name == "block") != (split is not None):
            raise ValueError("block orders need a split point, others must not have one")
        self.name = name
        self.split = split
        self._cache: dict = {}

    @staticmethod
    def _grevlex(e):
        return (-sum(e),) + tuple(reversed(e))

    def rank(self, e):
        r = self._cache.get(e)
        if r is not None:
            return r
        if self.name == "grevlex":
            r = self._grevlex(e)
        elif self.name == "lex":
            r = tuple(-a for a in e)
        else:
            k = self.split
            r = self._grevlex(e[:k]) + self._grevlex(e[k:])
        if len(self._cache) < 500_000:
            self._cache[e] = r
        return r

    def _ident(self):
        return (self.name, self.split)

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self._ident() == other._ident()

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        return self.name if self.split is None else f"block({self.split})"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")
_BLOCKS: dict[int, MonomialOrder] = {}


def block_order(split: int) -> MonomialOrder:
    """Grevlex on the first ``split`` variables, ties broken by grevlex on the rest."""
    if split not in _BLOCKS:
        _BLOCKS[split] = MonomialOrder("block", split)
    return _BLOCKS[split]


class PolyRing:
    """``field[variables]`` with a fixed monomial order."""

    def __init__(self, field: Field, variables: Sequence[str], order: MonomialOrder = GREVLEX):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        self.field = field
        self.variables = variables
        self.nvars = len(variables)
        self.order = order
        self.index = {v: i for i, v in enumerate(variables)}
        self._zero_exp = (0,) * self.nvars
        self._key = (field, variables, order)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"{self.field.name}[{', '.join(self.variables)}] ({self.order!r})"

    # construction helpers -------------------------------------------------
    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    @property
    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {self._zero_exp: c} if c != 0 else {})

    def gen(self, name_or_index) -> "Polynomial":
        i = self.index[name_or_index] if isinstance(name_or_index, str) else name_or_index
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): self.field.one})

    @property
    def gens(self) -> list["Polynomial"]:
        return [self.gen(i) for i in range(self.nvars)]

    def from_dict(self, terms: dict) -> "Polynomial":
        f = self.field
        out = {}
        for e, c in terms.items():
            e = tuple(int(a) for a in e)
            if len(e) != self.nvars or min(e, default=0) < 0:
                raise ValueError(f"bad exponent vector {e} for {self!r}")
            c = f(c)
            if c != 0:
                out[e] = c
        return Polynomial(self, out)

    def monomial(self, exp, coeff=1) -> "Polynomial":
        return self.from_dict({tuple(exp): coeff})

    def parse(self, text: str) -> "Polynomial":
        from .parsing import parse_polynomial

        return parse_polynomial(text, self)

    def __call__(self, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value.convert(self)
        if isinstance(value, str):
            return self.parse(value)
        return self.constant(value)

    # derived rings ----------------------------------------------------------
    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.field, self.variables, order)

    def with_variables(self, variables: Sequence[str], order: MonomialOrder | None = None) -> "PolyRing":
        return PolyRing(self.field, variables, order or self.order)

    def fresh_name(self, stem: str = "_t") -> str:
        name, k = stem, 0
        while name in self.index:
            k += 1
            name = f"{stem}{k}"
        return name


def _coerce(ring: PolyRing, other) -> "Polynomial":
    if isinstance(other, Polynomial):
        if other.ring != ring:
            raise RingMismatchError(f"{ring!r} vs {other.ring!r}")
        return other
    if isinstance(other, (int, Fraction)):
        return ring.constant(other)
    return NotImplemented


class Polynomial:
    __slots__ = ("ring", "terms", "_lead")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._lead = None

    # basic queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        t = self.terms
        return not t or (len(t) == 1 and self.ring._zero_exp in t)

    def constant_value(self):
        """The coefficient of the constant monomial."""
        return self.terms.get(self.ring._zero_exp, self.ring.field.zero)

    def __len__(self):
        return len(self.terms)

    def lead_monomial(self):
        if self._lead is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            self._lead = min(self.terms, key=self.ring.order.rank)
        return self._lead

    def lead_coeff(self):
        return self.terms[self.lead_monomial()]

    def sorted_terms(self) -> list:
        """Terms as ``(exponent, coefficient)`` pairs, strictly descending."""
        rank = self.ring.order.rank
        return sorted(self.terms.items(), key=lambda t: rank(t[0]))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var) -> int:
        i = self.ring.index[var] if isinstance(var, str) else var
        return max((e[i] for e in self.terms), default=-1)

    def involves(self, var) -> bool:
        i = self.ring.index[var] if isinstance(var, str) else var
        return any(e[i] for e in self.terms)

    def variables_used(self) -> list[int]:
        return [i for i in range(self.ring.nvars) if self.involves(i)]

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(self.ring, other)
        if other is NotImplemented:
            return other
        norm = self.ring.field.norm
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = norm(out.get(e, 0) + c)
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        norm = self.ring.field.norm
        return Polynomial(self.ring, {e: norm(-c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = _coerce(self.ring, other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(self.ring, other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _coerce(self.ring, other)
        if other is NotImplemented:
            return other
        norm = self.ring.field.norm
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = get(e, 0) + ca * cb
        return Polynomial(self.ring, {e: v for e, v in ((e, norm(v)) for e, v in out.items()) if v != 0})

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        f = self.ring.field
        c = f(c)
        if c == 0:
            return self.ring.zero
        return Polynomial(self.ring, {e: f.norm(v * c) for e, v in self.terms.items()})

    def mul_monomial(self, exp, coeff) -> "Polynomial":
        norm = self.ring.field.norm
        return Polynomial(
            self.ring,
            {tuple(x + y for x, y in zip(e, exp)): norm(c * coeff) for e, c in self.terms.items()},
        )

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers need a non-negative integer exponent")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def monic(self) -> "Polynomial":
        """Scale so the leading coefficient (in the ring's order) is 1."""
        if not self.terms:
            return self
        lc = self.lead_coeff()
        if lc == 1:
            return self
        return self.scale(self.ring.field.inv(lc))

    def diff(self, var) -> "Polynomial":
        i = self.ring.index[var] if isinstance(var, str) else var
        norm = self.ring.field.norm
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                v = norm(c * e[i])
                if v != 0:
                    ne = list(e)
                    ne[i] -= 1
                    out[tuple(ne)] = v
        return Polynomial(self.ring, out)

    def divmod_exact(self, other: "Polynomial"):
        """Return the quotient if ``other`` divides ``self`` exactly, else None."""
        other = _coerce(self.ring, other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        f = self.ring.field
        rank = self.ring.order.rank
        lm = other.lead_monomial()
        inv_lc = f.inv(other.terms[lm])
        rest = [(e, c) for e, c in other.terms.items() if e != lm]
        r = dict(self.terms)
        q = {}
        while r:
            m = min(r, key=rank)
            d = tuple(x - y for x, y in zip(m, lm))
            if min(d) < 0:
                return None
            c = f.norm(r.pop(m) * inv_lc)
            q[d] = c
            for e, ce in rest:
                k = tuple(x + y for x, y in zip(e, d))
                v = f.norm(r.get(k, 0) - c * ce)
                if v == 0:
                    r.pop(k, None)
                else:
                    r[k] = v
        return Polynomial(self.ring, q)

    def exquo(self, other: "Polynomial") -> "Polynomial":
        q = self.divmod_exact(other)
        if q is None:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def divides(self, other: "Polynomial") -> bool:
        return other.divmod_exact(self) is not None

    # conversion -----------------------------------------------------------
    def convert(self, ring: PolyRing, mapping: dict[str, str] | None = None) -> "Polynomial":
        """Re-home into ``ring`` by variable name (optionally renamed)."""
        if ring == self.ring and not mapping:
            return self
        if ring.field != self.ring.field:
            raise RingMismatchError(f"cannot move {self.ring!r} into {ring!r}")
        mapping = mapping or {}
        pos = []
        for i, v in enumerate(self.ring.variables):
            name = mapping.get(v, v)
            if name in ring.index:
                pos.append(ring.index[name])
            else:
                pos.append(None)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, a in enumerate(e):
                if a:
                    if pos[i] is None:
                        raise RingMismatchError(
                            f"variable {self.ring.variables[i]} has no image in {ring!r}"
                        )
                    ne[pos[i]] += a
            out[tuple(ne)] = c
        return Polynomial(ring, out)

    def reorder(self, order: MonomialOrder) -> "Polynomial":
        return Polynomial(self.ring.with_order(order), self.terms)

    # comparison and printing --------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == self.ring.field(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


def format_polynomial(p: Polynomial) -> str:
    """Render in the canonical grammar, terms in descending order."""
    if p.is_zero():
        return "0"
    f = p.ring.field
    names = p.ring.variables
    pieces = []
    for e, c in p.sorted_terms():
        if f.characteristic:
            neg, mag = False, f.to_str(c)
        else:
            neg, mag = c < 0, f.to_str(abs(c))
        mono = "*".join(
            names[i] if a == 1 else f"{names[i]}^{a}" for i, a in enumerate(e) if a
        )
        if not mono:
            body = mag
        elif mag == "1":
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


def poly_ring(variables: Iterable[str] | str, field: Field = QQ, order: MonomialOrder = GREVLEX) -> PolyRing:
    """Convenience constructor: ``poly_ring("x y")`` or ``poly_ring(["x", "y"])``."""
    if isinstance(variables, str):
        variables = variables.replace(",", " ").split()
    return PolyRing(field, list(variables), order)


__all__.append("poly_ring")
__all__.append("format_polynomial")
