"""Coefficient fields: the rationals and prime fields F_p.

Elements are plain Python values (``Fraction`` for QQ, ``int`` in ``[0, p)``
for F_p) so that polynomial code can use native arithmetic and call
:meth:`norm` only where a reduction is needed.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvkitError

__all__ = ["Field", "QQ", "PrimeField", "RationalField", "field_from_spec"]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    characteristic: int
    name: str

    def __call__(self, value):
        raise NotImplementedError

    def norm(self, value):
        return value

    def inv(self, a):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == 0

    def to_str(self, a) -> str:
        raise NotImplementedError

    def __repr__(self):
        return self.name


class RationalField(Field):
    characteristic = 0
    name = "QQ"
    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, str):
            return Fraction(value.strip())
        return Fraction(value)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def to_str(self, a) -> str:
        a = Fraction(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


class PrimeField(Field):
    """Integers modulo a prime ``p < 2**31``."""

    def __init__(self, p: int):
        p = int(p)
        if p >= 2**31 or not _is_prime(p):
            raise InvkitError(f"modulus {p} is not a prime below 2^31")
        self.p = p
        self.characteristic = p
        self.name = f"FF {p}"
        self.zero = 0
        self.one = 1

    def __call__(self, value):
        p = self.p
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            den = value.denominator % p
            if den == 0:
                raise ZeroDivisionError(f"denominator divisible by {p}")
            return value.numerator * pow(den, -1, p) % p
        return int(value) % p

    def norm(self, value):
        return value % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def to_str(self, a) -> str:
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("FF", self.p))


def field_from_spec(spec: str) -> Field:
    """Parse ``"QQ"`` or ``"FF p"`` (as used by job files)."""
    text = spec.strip()
    if text == "QQ":
        return QQ
    parts = text.split()
    if len(parts) == 2 and parts[0] == "FF" and parts[1].isdigit():
        return PrimeField(int(parts[1]))
    raise InvkitError(f"unknown field {spec!r}; expected 'QQ' or 'FF p'")
