"""Invariant rational functions from witness hypersurfaces.

Given two maps ``f1, f2 : S <- R`` (pullbacks) and hypersurfaces ``V(a_j)`` on
the target whose pullbacks agree as ideals, each ratio ``u_j = f1(a_j)/f2(a_j)``
is a unit of the source chart.  Units of a localized polynomial ring are
``c * prod p_i^e_i`` over the inverted primes, so multiplicative relations
among the ``u_j`` are integer kernels, and relations among the leftover
constants are kernels again.  The resulting product of witness generators is
invariant; it is re-verified exactly before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .config import parallel_map
from .errors import NotAUnitError, PreconditionError
from .factor import factor_split
from .fields import Field
from .gcd import coprime_base, gcd, radical_part
from .lattice import _size_reduce, factorint, integer_kernel
from .polynomial import Polynomial
from .rational import RationalFunction, as_rational
from .varieties import Hypersurface, PresentedRing, RationalMap, scheme_inverse_image
from .groebner import ideal_equal

__all__ = [
    "FactorBase",
    "UnitDecomposition",
    "InvariantCertificate",
    "SearchOutcome",
    "verify_witness",
    "compute_unit",
    "decompose_unit",
    "multiplicative_independence",
    "rational_mult_kernel",
    "find_invariant_function",
    "search_invariant",
    "search_common_invariant",
    "verify_certificate",
    "is_nonconstant",
    "functions_agree",
]


class FactorBase:
    """Pairwise coprime, squarefree, nonconstant monic polynomials on a chart."""

    def __init__(self, ring: PresentedRing, factors: Sequence, *, check: bool = True):
        self.ring = ring
        self.factors = tuple(ring._lift(f).monic() for f in factors)
        if check:
            for f in self.factors:
                if f.is_constant():
                    raise PreconditionError(f"factor base element {f} is constant")
                if radical_part(f).total_degree() != f.total_degree():
                    raise PreconditionError(f"factor base element {f} is not squarefree")
            for i, f in enumerate(self.factors):
                for g in self.factors[i + 1:]:
                    if not gcd(f, g).is_constant():
                        raise PreconditionError(f"factor base elements {f} and {g} are not coprime")

    @classmethod
    def covering(cls, ring: PresentedRing, polys: Sequence[Polynomial]) -> "FactorBase":
        """Gcd-free basis of ``polys``; every input is a constant times a product of its powers."""
        pieces = []
        for p in polys:
            if not p.is_constant():
                pieces.extend(q for q, _ in factor_split(p))
        base = coprime_base(pieces)
        rank = ring.poly.order.rank
        base.sort(key=lambda f: (f.total_degree(), rank(f.lead_monomial()), str(f)))
        return cls(ring, base, check=False)

    @classmethod
    def for_inverted(cls, ring: PresentedRing, extra: Sequence[Polynomial] = ()) -> "FactorBase":
        return cls.covering(ring, list(ring.invert) + list(extra))

    def __len__(self):
        return len(self.factors)

    def exponents(self, x) -> tuple[object, list[int], Polynomial]:
        """``x = c * prod f_i^e_i * residual``; returns ``(c, e, residual)``."""
        x = as_rational(x)
        if x.is_zero():
            raise ValueError("zero has no multiplicative decomposition")
        exps = []
        parts = [x.num, x.den]
        for f in self.factors:
            e = 0
            for sign, idx in ((1, 0), (-1, 1)):
                while True:
                    q = parts[idx].divmod_exact(f)
                    if q is None:
                        break
                    parts[idx] = q
                    e += sign
            exps.append(e)
        num, den = parts
        if num.is_constant() and den.is_constant():
            field = x.ring.field
            c = field.norm(num.constant_value() * field.inv(den.constant_value()))
            return c, exps, x.ring.one
        residual = (num * den).monic()
        return None, exps, residual

    def to_json(self) -> list[str]:
        return [str(f) for f in self.factors]


@dataclass
class UnitDecomposition:
    constant: object
    exponents: list[int]
    base: FactorBase

    def reconstruct(self) -> RationalFunction:
        ring = self.base.ring.poly
        out = RationalFunction(ring.constant(self.constant))
        for f, e in zip(self.base.factors, self.exponents):
            if e:
                out = out * RationalFunction(f) ** e
        return out

    def to_json(self) -> dict:
        return {
            "constant": self.base.ring.field.to_str(self.constant),
            "exponents": list(self.exponents),
            "base": self.base.to_json(),
        }


def decompose_unit(u, base: FactorBase) -> UnitDecomposition:
    """``u = c * prod f_i^e_i`` by exact division, or :class:`NotAUnitError`."""
    c, exps, residual = base.exponents(u)
    if c is None:
        raise NotAUnitError(
            f"{u} is not a unit of the chart: factor {residual} is not inverted", residual
        )
    inverted = radical_part(base.ring.inverted_product)
    for f, e in zip(base.factors, exps):
        if e and inverted.divmod_exact(f) is None:
            raise NotAUnitError(f"{u} is not a unit of the chart: factor {f} is not inverted", f)
    return UnitDecomposition(c, exps, base)


def functions_agree(a: RationalFunction, b: RationalFunction, ring: PresentedRing) -> bool:
    """Equality in the fraction field of the chart."""
    if ring.is_polynomial_chart:
        return a == b
    return ring.is_zero(a.num * b.den - b.num * a.den)


def is_nonconstant(g: RationalFunction, ring: PresentedRing) -> bool:
    g = as_rational(g)
    num, den = ring.reduce(g.num), ring.reduce(g.den)
    if num.is_zero():
        return False
    if num.lead_monomial() != den.lead_monomial():
        return True
    c = num.lead_coeff() * ring.field.inv(den.lead_coeff())
    return not ring.is_zero(num - den.scale(c))


def verify_witness(f1: RationalMap, f2: RationalMap, a: Hypersurface) -> bool:
    _check_pair(f1, f2)
    return ideal_equal(scheme_inverse_image(f1, a), scheme_inverse_image(f2, a))


def compute_unit(f1: RationalMap, f2: RationalMap, a: Polynomial) -> RationalFunction:
    """``f1(a)/f2(a)``, certified to be a unit of the source chart."""
    _check_pair(f1, f2)
    a = f1.target._lift(a)
    p1, p2 = f1.pullback(a), f2.pullback(a)
    if p2.is_zero() or p1.is_zero():
        raise PreconditionError(f"{a} pulls back to zero")
    u = p1 / p2
    decompose_unit(u, FactorBase.for_inverted(f1.source, [u.num, u.den]))
    return u


def _check_pair(f1: RationalMap, f2: RationalMap):
    if f1.source.poly != f2.source.poly or f1.target.poly != f2.target.poly:
        raise PreconditionError("the two maps must share source and target charts")


@dataclass
class MultiplicativeRelation:
    independent: bool
    relation: list[int] | None

    def __iter__(self):
        return iter((self.independent, self.relation))


def _exponent_matrix(items, base: FactorBase) -> list[list[int]]:
    cols = []
    for x in items:
        c, exps, residual = base.exponents(x)
        if c is None:
            raise PreconditionError(f"{x} is not covered by the factor base (residual {residual})")
        cols.append(exps)
    return [[cols[j][i] for j in range(len(cols))] for i in range(len(base))]


def multiplicative_independence(items: Sequence, base: FactorBase) -> MultiplicativeRelation:
    """Independence modulo nonzero constants; a relation vector otherwise."""
    items = list(items)
    kernel = integer_kernel(_exponent_matrix(items, base), len(items))
    if not kernel:
        return MultiplicativeRelation(True, None)
    return MultiplicativeRelation(False, kernel[0])


def _lift_kernel(rows: list[list[int]], n: int, moduli: list[int]) -> list[list[int]]:
    """Integer kernel of ``rows`` where row ``i`` only has to vanish modulo ``moduli[i]``
    (0 for exact); auxiliary unknowns absorb the multiples."""
    ext = []
    k = sum(1 for m in moduli if m)
    pos = 0
    for row, m in zip(rows, moduli):
        aux = [0] * k
        if m:
            aux[pos] = -m
            pos += 1
        ext.append(list(row) + aux)
    basis = integer_kernel(ext, n + k)
    # the auxiliary coordinates are determined by the first n, so projection is a basis
    return _size_reduce([b[:n] for b in basis])


def _mult_conditions(lambdas: list, field: Field | None) -> tuple[list[list[int]], list[int]]:
    """Linear conditions (row, modulus) on ``e`` equivalent to ``prod lambda_r^e_r = 1``."""
    m = len(lambdas)
    if field is not None and field.characteristic:
        p = field.p
        vals = [int(x) % p for x in lambdas]
        if any(v == 0 for v in vals):
            raise ValueError("zero has no multiplicative relations")
        if p == 2:
            return [], []
        g = _primitive_root(p)
        return [[_dlog(v, g, p) for v in vals]], [p - 1]
    vals = [Fraction(x) for x in lambdas]
    if any(v == 0 for v in vals):
        raise ValueError("zero has no multiplicative relations")
    primes: list[int] = []
    facts = []
    for v in vals:
        f = dict(factorint(v.numerator)) if abs(v.numerator) > 1 else {}
        for q, k in (factorint(v.denominator).items() if v.denominator > 1 else ()):
            f[q] = f.get(q, 0) - k
        facts.append(f)
        for q in f:
            if q not in primes:
                primes.append(q)
    primes.sort()
    rows = [[f.get(q, 0) for f in facts] for q in primes]
    moduli = [0] * len(rows)
    if any(v < 0 for v in vals):
        rows.append([1 if v < 0 else 0 for v in vals])
        moduli.append(2)
    return rows, moduli


def rational_mult_kernel(lambdas: Sequence, field: Field | None = None) -> list[list[int]]:
    """Basis of ``{e : prod lambda_r^e_r = 1}`` for nonzero constants.

    Over QQ the exponents of each prime (trial division) and the sign modulo 2
    give the linear conditions; over F_p discrete logarithms modulo ``p - 1``.
    """
    lambdas = list(lambdas)
    if not lambdas:
        return []
    rows, moduli = _mult_conditions(lambdas, field)
    return _lift_kernel(rows, len(lambdas), moduli)


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    qs = list(factorint(p - 1))
    g = 2
    while any(pow(g, (p - 1) // q, p) == 1 for q in qs):
        g += 1
    return g


def _dlog(a: int, g: int, p: int) -> int:
    """Baby-step giant-step discrete logarithm in F_p^*."""
    n = p - 1
    s = isqrt(n) + 1
    table = {}
    x = 1
    for j in range(s):
        table.setdefault(x, j)
        x = x * g % p
    step = pow(g, n - s, p)
    y = a % p
    for i in range(s + 1):
        if y in table:
            return (i * s + table[y]) % n
        y = y * step % p
    raise ValueError(f"{a} is not a power of {g} mod {p}")


# ---------------------------------------------------------------------------
# certificates


@dataclass
class InvariantCertificate:
    g: RationalFunction
    witnesses: list[Polynomial]
    exponents: list[int]
    stages: list[dict] = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    agreement: bool = False
    nonconstant: bool = False
    kind: str = "map-pair"

    @property
    def verified(self) -> bool:
        return self.agreement and self.nonconstant

    def recompute_g(self) -> RationalFunction:
        ring = self.g.ring
        out = RationalFunction(ring.one)
        for a, e in zip(self.witnesses, self.exponents):
            if e:
                out = out * RationalFunction(a) ** e
        return out

    def to_json(self) -> dict:
        field_ = self.g.ring.field
        return {
            "g": self.g.to_json(),
            "kind": self.kind,
            "witnesses": [str(a) for a in self.witnesses],
            "exponents": list(self.exponents),
            "stages": self.stages,
            "lambda": [field_.to_str(x) for x in self.lambdas],
            "verified": self.verified,
        }


@dataclass
class SearchOutcome:
    """Result of a search: the certificate, or the stage whose kernel was trivial."""

    certificate: InvariantCertificate | None
    diagnostics: list[dict] = field(default_factory=list)
    pruned: list[dict] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.certificate is not None


def verify_certificate(cert: InvariantCertificate, f1: RationalMap, f2: RationalMap) -> bool:
    """Re-check from scratch: transcript consistency, agreement and nonconstancy."""
    g = cert.g
    try:
        if cert.witnesses and cert.recompute_g() != g:
            return False
        src, tgt = f1.source, f1.target
        g = g.convert(tgt.poly) if g.ring != tgt.poly else g
        if not is_nonconstant(g, tgt):
            return False
        return functions_agree(f1.pullback(g), f2.pullback(g), src)
    except Exception:
        return False


def search_invariant(
    f1: RationalMap, f2: RationalMap, witnesses: Sequence[Hypersurface]
) -> SearchOutcome:
    """The full pipeline with diagnostics; see :func:`find_invariant_function`."""
    return search_common_invariant([(f1, f2)], witnesses)


def search_common_invariant(
    pairs: Sequence[tuple[RationalMap, RationalMap]],
    witnesses: Sequence[Hypersurface],
    target: PresentedRing | None = None,
) -> SearchOutcome:
    """One ``g`` with ``g o f1 = g o f2`` for every pair at once.

    The unit and constant conditions of all pairs are stacked into single
    kernels, so the result lies in the intersection of the per-pair lattices.
    """
    pairs = list(pairs)
    witnesses = list(witnesses)
    for f1, f2 in pairs:
        _check_pair(f1, f2)
    if target is None:
        if pairs:
            target = pairs[0][0].target
        elif witnesses:
            target = witnesses[0].ring
        else:
            return SearchOutcome(None, [{"stage": "input", "message": "no witnesses"}])
    for f1, _ in pairs:
        if f1.target.poly != target.poly:
            raise PreconditionError("all map pairs must share the target chart")
        if not f1.source.is_polynomial_chart:
            raise PreconditionError("invariant search needs charts without relations (UFD mode)")
    if not target.is_polynomial_chart:
        raise PreconditionError("invariant search needs charts without relations (UFD mode)")
    diag: list[dict] = []
    if not witnesses:
        return SearchOutcome(None, [{"stage": "input", "message": "no witnesses"}])
    gens = []
    for H in witnesses:
        if H.ring.poly != target.poly:
            raise PreconditionError(f"witness {H!r} is not on the target chart")
        if H.is_empty():
            raise PreconditionError("empty witness hypersurface")
        gens.append(H.generator)

    # prune witnesses multiplicatively dependent on earlier ones
    wbase = FactorBase.covering(target, gens)
    kept: list[int] = []
    pruned = []
    for j, a in enumerate(gens):
        rel = multiplicative_independence([gens[i] for i in kept] + [a], wbase)
        if rel.independent:
            kept.append(j)
        else:
            pruned.append({"witness": str(a), "relation": rel.relation})
    a_kept = [gens[j] for j in kept]

    # (1)-(2) units per pair and witness, decomposed over the inverted primes
    rows: list[list[int]] = []
    per_pair = []
    for f1, f2 in pairs:
        src = f1.source

        def unit_of(a, f1=f1, f2=f2):
            p1, p2 = f1.pullback(a), f2.pullback(a)
            if p1.is_zero() or p2.is_zero():
                raise PreconditionError(f"witness {a} pulls back to zero")
            return p1 / p2

        units = parallel_map(unit_of, a_kept)
        base = FactorBase.for_inverted(src, [q for u in units for q in (u.num, u.den)])
        decomps = []
        for a, u in zip(a_kept, units):
            try:
                decomps.append(decompose_unit(u, base))
            except NotAUnitError as exc:
                raise NotAUnitError(
                    f"witness V({a}): pullbacks differ by {u}, which is not a unit of the source "
                    "chart; shrink the chart by inverting it",
                    exc.residual,
                ) from None
        rows.extend([d.exponents[i] for d in decomps] for i in range(len(base)))
        per_pair.append(decomps)
        diag.append({"stage": "units", "units": [u.to_json() for u in units], "base": base.to_json()})

    # (3) relations among units modulo constants
    K = integer_kernel(rows, len(kept))
    if not K:
        diag.append({"stage": "unit-kernel", "message": "trivial kernel: units are multiplicatively independent"})
        return SearchOutcome(None, diag, pruned)
    field_ = target.field
    lambdas = []
    cond_rows: list[list[int]] = []
    cond_mod: list[int] = []
    for decomps in per_pair:
        lam_p = []
        for k in K:
            lam = field_.one
            for d, e in zip(decomps, k):
                c = d.constant if e >= 0 else field_.inv(d.constant)
                lam = field_.norm(lam * _fpow(field_, c, abs(e)))
            lam_p.append(lam)
        lambdas.append(lam_p)
        r, m = _mult_conditions(lam_p, field_)
        cond_rows.extend(r)
        cond_mod.extend(m)

    # (4) relations among the lambdas
    E = _lift_kernel(cond_rows, len(K), cond_mod)
    if not E:
        diag.append({"stage": "lambda-kernel", "message": "trivial kernel: constants are multiplicatively independent"})
        return SearchOutcome(None, diag, pruned)

    # (5) assemble and (6) verify
    for e in E:
        m = [sum(er * k[j] for er, k in zip(e, K)) for j in range(len(kept))]
        if not any(m):
            continue
        g = RationalFunction(target.poly.one)
        for a, mj in zip(a_kept, m):
            if mj:
                g = g * RationalFunction(a) ** mj
        cert = InvariantCertificate(
            g=g,
            witnesses=a_kept,
            exponents=m,
            stages=[
                {"stage": "unit-kernel", "vectors": K},
                {"stage": "lambda-kernel", "vectors": E, "chosen": e},
            ],
            lambdas=lambdas[0] if len(lambdas) == 1 else [x for lp in lambdas for x in lp],
        )
        cert.agreement = all(
            functions_agree(f1.pullback(g), f2.pullback(g), f1.source) for f1, f2 in pairs
        )
        cert.nonconstant = is_nonconstant(g, target)
        if cert.verified:
            return SearchOutcome(cert, diag, pruned)
        diag.append({"stage": "verify", "message": f"candidate {g} failed exact verification"})
    return SearchOutcome(None, diag, pruned)


def _fpow(field_: Field, c, e: int):
    if field_.characteristic:
        return pow(int(c), e, field_.p)
    return Fraction(c) ** e


def find_invariant_function(
    f1: RationalMap, f2: RationalMap, witnesses: Sequence[Hypersurface]
) -> InvariantCertificate | None:
    """A verified nonconstant ``g`` with ``g o f1 = g o f2``, or None."""
    return search_invariant(f1, f2, witnesses).certificate
