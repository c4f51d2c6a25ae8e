"""Multivariate gcd, squarefree parts and gcd-free bases.

The gcd is computed recursively: pick the smallest variable that occurs,
split off contents (gcds of the coefficients with respect to that variable,
which live in fewer variables) and run a primitive pseudo-remainder sequence
on the primitive parts.
"""

from __future__ import annotations

from functools import reduce

from .errors import InseparableError
from .polynomial import Polynomial

__all__ = [
    "gcd",
    "gcd_list",
    "lcm",
    "content",
    "squarefree_part",
    "radical_part",
    "coprime_base",
    "multiplicity",
]


def _check(a: Polynomial, b: Polynomial):
    if a.ring != b.ring:
        from .errors import RingMismatchError

        raise RingMismatchError(f"{a.ring!r} vs {b.ring!r}")


def _coeffs(p: Polynomial, v: int) -> dict[int, Polynomial]:
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        d = e[v]
        ne = e[:v] + (0,) + e[v + 1 :]
        out.setdefault(d, {})[ne] = c
    return {d: Polynomial(p.ring, t) for d, t in out.items()}


def content(p: Polynomial, v: int) -> Polynomial:
    """Monic gcd of the coefficients of ``p`` viewed as a polynomial in variable ``v``."""
    cs = sorted(_coeffs(p, v).values(), key=len)
    g = cs[0].monic()
    for c in cs[1:]:
        if g.is_constant():
            break
        g = _gcd(g, c).monic()
    return g if not g.is_constant() else p.ring.one


def _prem(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    """Pseudo-remainder of ``a`` by ``b`` in variable ``v``."""
    db = b.degree(v)
    cb = _coeffs(b, v)
    lcb = cb[db]
    shift = [0] * a.ring.nvars
    while not a.is_zero():
        da = a.degree(v)
        if da < db:
            break
        lca = _coeffs(a, v)[da]
        shift[v] = da - db
        a = a * lcb - (lca * b).mul_monomial(tuple(shift), 1)
        a = _primitive_scalar(a)
    return a


def _primitive_scalar(p: Polynomial) -> Polynomial:
    # remainder sequences only care about associates; keep coefficients small
    return p.monic() if not p.is_zero() else p


def _first_var(a: Polynomial, b: Polynomial) -> int | None:
    for i in range(a.ring.nvars):
        if a.involves(i) or b.involves(i):
            return i
    return None


def _specialize(p: Polynomial, v: int, point: list) -> list:
    """Coefficients (low to high) of ``p`` in ``x_v`` with the other variables set to ``point``."""
    field = p.ring.field
    out = [field.zero] * (p.degree(v) + 1)
    for e, c in p.terms.items():
        for i, k in enumerate(e):
            if i != v and k:
                c = c * point[i] ** k
        out[e[v]] = field.norm(out[e[v]] + c)
    return out


def _univariate_gcd_degree(f: list, g: list, field) -> int:
    def trim(u):
        while u and field.is_zero(u[-1]):
            u.pop()
        return u

    f, g = trim(list(f)), trim(list(g))
    while g:
        inv = field.inv(g[-1])
        while len(f) >= len(g):
            q = field.norm(f[-1] * inv)
            s = len(f) - len(g)
            for i, gi in enumerate(g):
                f[s + i] = field.norm(f[s + i] - q * gi)
            f.pop()
            trim(f)
        f, g = g, f
    return len(f) - 1


def _coprime_by_evaluation(a: Polynomial, b: Polynomial) -> bool:
    """Cheap proof that ``gcd(a, b) = 1``; False means "undecided".

    A common factor involving ``x_v`` survives any specialization of the other
    variables that keeps both leading coefficients in ``x_v`` nonzero.
    """
    ring = a.ring
    field = ring.field
    n = ring.nvars
    for v in range(n):
        if not (a.involves(v) and b.involves(v)):
            continue
        da, db = a.degree(v), b.degree(v)
        decided = False
        for trial in range(1, 6):
            point = [field(3 + 7 * trial * (i + 1) + i * i) for i in range(n)]
            fa, fb = _specialize(a, v, point), _specialize(b, v, point)
            if field.is_zero(fa[da]) or field.is_zero(fb[db]):
                continue
            if _univariate_gcd_degree(fa, fb, field) > 0:
                return False
            decided = True
            break
        if not decided:
            return False
    # no common factor involves any variable both use; one using a variable
    # only one side has is impossible
    return True


def _gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.is_constant() or b.is_constant():
        return a.ring.one
    if _coprime_by_evaluation(a, b):
        return a.ring.one
    v = _first_var(a, b)
    if not a.involves(v):
        return _gcd(a, content(b, v))
    if not b.involves(v):
        return _gcd(content(a, v), b)
    ca, cb = content(a, v), content(b, v)
    c = _gcd(ca, cb)
    pa, pb = a.exquo(ca), b.exquo(cb)
    if pa.degree(v) < pb.degree(v):
        pa, pb = pb, pa
    while True:
        r = _prem(pa, pb, v)
        if r.is_zero():
            g = pb
            break
        if r.degree(v) == 0:
            g = a.ring.one
            break
        pa, pb = pb, r.exquo(content(r, v))
    if not g.is_constant():
        g = g.exquo(content(g, v))
    return (c * g).monic()


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor; ``gcd(a, 0)`` is ``a`` made monic."""
    _check(a, b)
    return _gcd(a, b).monic()


def gcd_list(polys) -> Polynomial:
    polys = list(polys)
    return reduce(gcd, polys[1:], polys[0].monic())


def lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero() or b.is_zero():
        return a.ring.zero
    return (a * b.exquo(gcd(a, b))).monic()


def _strip(h: Polynomial, sf: Polynomial) -> Polynomial:
    """Remove from ``h`` every irreducible factor it shares with ``sf``."""
    while True:
        d = gcd(h, sf)
        if d.is_constant():
            return h
        h = h.exquo(d)


def squarefree_part(a: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors of ``a``, made monic.

    In characteristic p a factor whose multiplicity is divisible by p is
    invisible to the derivative test; that situation raises
    :class:`InseparableError`.
    """
    if a.is_zero():
        raise ValueError("squarefree part of the zero polynomial")
    if a.is_constant():
        return a.ring.one
    g = a
    for i in range(a.ring.nvars):
        g = gcd(g, a.diff(i))
        if g.is_constant():
            break
    sf = a.exquo(g).monic()
    if a.ring.field.characteristic and not g.is_constant():
        if not _strip(g, sf).is_constant():
            raise InseparableError(
                f"{a} has a factor of multiplicity divisible by {a.ring.field.characteristic}"
            )
    return sf


def _pth_root(h: Polynomial) -> Polynomial:
    p = h.ring.field.characteristic
    out = {}
    for e, c in h.terms.items():
        if any(x % p for x in e):
            raise InseparableError(f"{h} is not a p-th power")
        out[tuple(x // p for x in e)] = c  # Frobenius fixes F_p
    return Polynomial(h.ring, out)


def radical_part(a: Polynomial) -> Polynomial:
    """Squarefree part that also handles p-th powers over F_p."""
    if a.ring.field.characteristic == 0:
        return squarefree_part(a)
    if a.is_zero():
        raise ValueError("radical of the zero polynomial")
    if a.is_constant():
        return a.ring.one
    g = a
    for i in range(a.ring.nvars):
        g = gcd(g, a.diff(i))
    sf = a.exquo(g).monic()
    rest = _strip(g, sf)
    if rest.is_constant():
        return sf
    return (sf * radical_part(_pth_root(rest.monic()))).monic()


def multiplicity(f: Polynomial, a: Polynomial) -> int:
    """Largest ``m`` with ``f**m`` dividing ``a`` (``f`` nonconstant, ``a`` nonzero)."""
    if f.is_constant():
        raise ValueError("multiplicity of a constant factor is undefined")
    m = 0
    while True:
        q = a.divmod_exact(f)
        if q is None:
            return m
        a = q
        m += 1


def coprime_base(polys) -> list[Polynomial]:
    """A gcd-free basis: pairwise coprime nonconstant monic polynomials such that
    every input is a constant times a product of powers of basis elements.

    Output order is deterministic (first appearance, refined in place).
    """
    base: list[Polynomial] = []
    for p in polys:
        if p.is_zero():
            raise ValueError("zero polynomial has no factorization")
        if p.is_constant():
            continue
        pending = [p.monic()]
        while pending:
            q = pending.pop()
            if q.is_constant():
                continue
            for i, b in enumerate(base):
                d = gcd(q, b)
                if d.is_constant():
                    continue
                base.pop(i)
                pieces = [d, b.exquo(d).monic(), q.exquo(d).monic()]
                pending.extend(x for x in pieces if not x.is_constant())
                break
            else:
                base.append(q)
    # deduplicate identical elements produced by splitting
    out: list[Polynomial] = []
    for b in base:
        if b not in out:
            out.append(b)
    return _refine(out)


def _refine(base: list[Polynomial]) -> list[Polynomial]:
    changed = True
    while changed:
        changed = False
        for i in range(len(base)):
            for j in range(i + 1, len(base)):
                d = gcd(base[i], base[j])
                if not d.is_constant():
                    a, b = base[i], base[j]
                    new = [d, a.exquo(d).monic(), b.exquo(d).monic()]
                    base = [x for k, x in enumerate(base) if k not in (i, j)]
                    for x in new:
                        if not x.is_constant() and x not in base:
                            base.append(x)
                    changed = True
                    break
            if changed:
                break
    return base
