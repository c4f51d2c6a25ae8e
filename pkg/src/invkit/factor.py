"""Factor splitting without general multivariate factorization.

Pieces are produced by squarefree reduction, gcd splitting against hints and
exact univariate factorization of small degree.  A piece is flagged
irreducible only when one of the cheap certificates applies:

* it involves a single variable and was fully factored (degree <= 4 over QQ,
  root search plus quadratic search over small F_p);
* it has degree one in some variable and is primitive with respect to it.

Everything else is returned with the flag unset.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt, lcm
from typing import Sequence

from .errors import InvkitError
from .gcd import content, gcd, radical_part
from .lattice import factorint
from .polynomial import Polynomial

__all__ = ["factor_split", "is_certified_irreducible", "factor_univariate"]

_FP_ROOT_SEARCH_LIMIT = 50_000
_FP_QUADRATIC_SEARCH_LIMIT = 100


def _linear_certificate(f: Polynomial) -> bool:
    for v in range(f.ring.nvars):
        if f.degree(v) == 1 and content(f, v).is_constant():
            return True
    return False


def is_certified_irreducible(f: Polynomial) -> bool:
    """True when ``f`` is provably irreducible by one of the cheap certificates."""
    if f.is_constant():
        return False
    if f.total_degree() == 1 or _linear_certificate(f):
        return True
    used = f.variables_used()
    if len(used) == 1:
        factors = factor_univariate(f)
        return factors is not None and len(factors) == 1
    return False


def _univariate_coeffs(f: Polynomial, v: int) -> list:
    coeffs = [0] * (f.degree(v) + 1)
    for e, c in f.terms.items():
        coeffs[e[v]] = c
    return coeffs


def _from_coeffs(ring, v: int, coeffs) -> Polynomial:
    terms = {}
    for k, c in enumerate(coeffs):
        if c != 0:
            e = [0] * ring.nvars
            e[v] = k
            terms[tuple(e)] = c
    return ring.from_dict(terms)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    divs = [1]
    for p, k in factorint(n).items():
        divs = [d * p**i for d in divs for i in range(k + 1)]
    return sorted(divs)


def factor_univariate(f: Polynomial) -> list[Polynomial] | None:
    """Monic irreducible factors of a squarefree univariate ``f``, or None.

    None means the factorization could not be certified (degree too large,
    integers too large for trial division, or prime too large to search).
    """
    used = f.variables_used()
    if len(used) != 1:
        raise ValueError("factor_univariate expects a polynomial in exactly one variable")
    v = used[0]
    if f.ring.field.characteristic:
        return _factor_fp(f, v)
    return _factor_qq(f, v)


def _factor_qq(f: Polynomial, v: int) -> list[Polynomial] | None:
    ring = f.ring
    factors: list[Polynomial] = []
    remaining = f.monic()
    try:
        while remaining.total_degree() >= 1:
            root = _rational_root(_univariate_coeffs(remaining, v))
            if root is None:
                break
            lin = _from_coeffs(ring, v, [-root, 1])
            factors.append(lin)
            remaining = remaining.exquo(lin).monic()
        d = remaining.total_degree()
        if d <= 0:
            return factors
        if d <= 3:
            return factors + [remaining]
        if d == 4:
            split = _quartic_split(remaining, v)
            if split is None:
                return factors + [remaining]
            return factors + split
        return None
    except InvkitError:
        return None


def _rational_root(coeffs) -> Fraction | None:
    cs = [Fraction(c) for c in coeffs]
    den = 1
    for c in cs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in cs]
    if ints[0] == 0:
        return Fraction(0)
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                acc = Fraction(0)
                for c in reversed(ints):
                    acc = acc * cand + c
                if acc == 0:
                    return cand
    return None


def _quartic_split(f: Polynomial, v: int) -> list[Polynomial] | None:
    ring = f.ring
    cs = [Fraction(c) for c in _univariate_coeffs(f, v)]
    den = 1
    for c in cs:
        den = lcm(den, c.denominator)
    a0, a1, a2, a3, a4 = (int(c * den) for c in cs)
    # monic integer transform g(y) = a4^3 f(y / a4)
    b3, b2, b1, b0 = a3, a2 * a4, a1 * a4**2, a0 * a4**3
    for q in _divisors(b0):
        for qq in (q, -q):
            s = b0 // qq
            candidates = []
            if qq != s:
                num = b1 - qq * b3
                if num % (s - qq) == 0:
                    p = num // (s - qq)
                    candidates.append((p, b3 - p))
            else:
                disc = b3 * b3 - 4 * (b2 - 2 * qq)
                if disc >= 0 and isqrt(disc) ** 2 == disc and (b3 + isqrt(disc)) % 2 == 0:
                    p = (b3 + isqrt(disc)) // 2
                    candidates.append((p, b3 - p))
            for p, r in candidates:
                if qq + s + p * r != b2 or p * s + qq * r != b1:
                    continue
                # y^2 + p y + qq with y = a4 x
                quad = _from_coeffs(ring, v, [Fraction(qq), Fraction(p * a4), Fraction(a4 * a4)]).monic()
                other = f.divmod_exact(quad)
                if other is not None:
                    return [quad, other.monic()]
    return None


def _factor_fp(f: Polynomial, v: int) -> list[Polynomial] | None:
    ring = f.ring
    p = ring.field.p
    remaining = f.monic()
    factors = []
    if p <= _FP_ROOT_SEARCH_LIMIT:
        for c in range(p):
            if remaining.total_degree() < 1:
                break
            lin = _from_coeffs(ring, v, [(-c) % p, 1])
            q = remaining.divmod_exact(lin)
            if q is not None:
                factors.append(lin)
                remaining = q.monic()
    else:
        return None
    d = remaining.total_degree()
    if d <= 0:
        return factors
    if d <= 3:
        return factors + [remaining]
    if p <= _FP_QUADRATIC_SEARCH_LIMIT:
        out = []
        changed = True
        while changed and remaining.total_degree() >= 4:
            changed = False
            for b in range(p):
                for c in range(p):
                    quad = _from_coeffs(ring, v, [c, b, 1])
                    q = remaining.divmod_exact(quad)
                    if q is not None:
                        out.append(quad)
                        remaining = q.monic()
                        changed = True
                        break
                if changed:
                    break
        if remaining.total_degree() <= 5:
            # no linear or quadratic factor: degree <= 5 leftovers are irreducible
            return factors + out + ([remaining] if remaining.total_degree() > 0 else [])
    return None


def _content_split(p: Polynomial) -> list[Polynomial]:
    # contents with respect to each variable are genuine factors
    for v in p.variables_used():
        c = content(p, v)
        if not c.is_constant() and c.total_degree() < p.total_degree():
            return _content_split(c.monic()) + _content_split(p.exquo(c).monic())
    return [p.monic()]


def factor_split(
    poly: Polynomial, hints: Sequence[Polynomial] = (), known: Sequence[Polynomial] = ()
) -> list[tuple[Polynomial, bool]]:
    """Split the radical of ``poly`` into pairwise coprime monic pieces.

    ``known`` are polynomials asserted irreducible by the caller; they also act
    as hints.  Returns ``(piece, certified_irreducible)`` pairs in a
    deterministic order.
    """
    known_monic = {k.monic() for k in known if not k.is_constant()}
    hints = list(hints) + sorted(known_monic, key=str)
    if poly.is_zero():
        raise ValueError("cannot split the zero polynomial")
    if poly.is_constant():
        return []
    pieces = _content_split(radical_part(poly))
    for h in hints:
        if h.is_zero() or h.is_constant():
            continue
        new = []
        for piece in pieces:
            d = gcd(piece, h)
            if d.is_constant() or d.total_degree() == piece.total_degree():
                new.append(piece)
            else:
                new.extend([d, piece.exquo(d).monic()])
        pieces = new
    out: list[tuple[Polynomial, bool]] = []
    for piece in pieces:
        if piece.monic() in known_monic or piece.total_degree() == 1 or _linear_certificate(piece):
            out.append((piece.monic(), True))
            continue
        if len(piece.variables_used()) == 1:
            factors = factor_univariate(piece)
            if factors is not None:
                out.extend((q.monic(), True) for q in factors)
                continue
        out.append((piece.monic(), False))
    return out
