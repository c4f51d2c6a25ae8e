"""Finite-dimensional algebras and ring structures ``e : R -> R (x) B``.

An element of ``R (x) B`` is stored as its coordinate vector on the basis
``eps_0..eps_l`` of ``B``; coordinates are rational functions so that
localized charts need no special casing.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import PreconditionError
from .fields import Field, QQ
from .groebner import ideal_equal
from .polynomial import PolyRing, Polynomial
from .rational import RationalFunction, as_rational
from .varieties import Hypersurface, PresentedRing, RationalMap

__all__ = [
    "FiniteAlgebra",
    "dual_numbers",
    "truncated",
    "difference_algebra",
    "TensorElement",
    "AlgebraMap",
    "DRingStructure",
    "e_apply",
    "extract_operators",
    "associated_endomorphisms",
    "is_totally_invariant_d_ideal",
    "prop55_check",
    "build_correspondence",
    "is_d_constant",
    "tensor_ring",
]


class FiniteAlgebra:
    """Commutative unital algebra given by structure constants.

    ``table[i][j]`` is the coordinate vector of ``eps_i * eps_j``; ``unit`` the
    coordinates of 1; ``projections`` the homomorphisms ``pi_0..pi_t`` to the
    field as row vectors.
    """

    def __init__(
        self,
        field: Field,
        table: Sequence[Sequence[Sequence]],
        unit: Sequence,
        projections: Sequence[Sequence],
        *,
        name: str = "B",
        labels: Sequence[str] | None = None,
    ):
        n = len(table)
        self.field = field
        self.dim = n
        self.name = name
        self.labels = tuple(labels) if labels else tuple(f"eps{i}" for i in range(n))
        self.table = tuple(tuple(tuple(field(c) for c in table[i][j]) for j in range(n)) for i in range(n))
        self.unit = tuple(field(c) for c in unit)
        self.projections = tuple(tuple(field(c) for c in p) for p in projections)
        self._check()

    def _check(self):
        n, f = self.dim, self.field
        if any(len(row) != n or any(len(v) != n for v in row) for row in self.table):
            raise PreconditionError("structure table must be dim x dim x dim")
        if len(self.unit) != n or any(len(p) != n for p in self.projections):
            raise PreconditionError("unit and projections must have the algebra dimension")
        if not self.projections:
            raise PreconditionError("at least the projection pi_0 is required")
        basis = [self.basis(i) for i in range(n)]
        one = self.unit
        for i in range(n):
            if self.mul(one, basis[i]) != basis[i]:
                raise PreconditionError(f"unit does not act as identity on {self.labels[i]}")
            for j in range(n):
                if self.table[i][j] != self.table[j][i]:
                    raise PreconditionError("algebra is not commutative")
                for k in range(n):
                    a = self.mul(self.mul(basis[i], basis[j]), basis[k])
                    b = self.mul(basis[i], self.mul(basis[j], basis[k]))
                    if a != b:
                        raise PreconditionError("algebra is not associative")
        for idx, p in enumerate(self.projections):
            if self.project(idx, one) != f.one:
                raise PreconditionError(f"projection pi_{idx} does not send 1 to 1")
            for i in range(n):
                for j in range(n):
                    lhs = self.project(idx, self.table[i][j])
                    rhs = f.norm(p[i] * p[j])
                    if lhs != rhs:
                        raise PreconditionError(f"projection pi_{idx} is not multiplicative")
        pi0 = self.projections[0]
        if pi0[0] != f.one or any(pi0[k] != 0 for k in range(1, n)):
            raise PreconditionError("basis must satisfy pi_0(eps_0) = 1 and eps_1.. in ker pi_0")

    def basis(self, i: int) -> tuple:
        f = self.field
        return tuple(f.one if k == i else f.zero for k in range(self.dim))

    def mul(self, a: Sequence, b: Sequence) -> tuple:
        f = self.field
        out = [f.zero] * self.dim
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                for m, c in enumerate(self.table[i][j]):
                    if c:
                        out[m] = f.norm(out[m] + ai * bj * c)
        return tuple(out)

    def project(self, idx: int, v: Sequence):
        f = self.field
        acc = f.zero
        for a, b in zip(self.projections[idx], v):
            acc = f.norm(acc + a * b)
        return acc

    @property
    def t(self) -> int:
        """Number of projections besides ``pi_0``."""
        return len(self.projections) - 1

    def radical_indices(self) -> list[int]:
        """Basis directions killed by every projection."""
        return [k for k in range(1, self.dim) if all(p[k] == 0 for p in self.projections)]

    def to_json(self) -> dict:
        f = self.field
        return {
            "name": self.name,
            "dimension": self.dim,
            "table": [[[f.to_str(c) for c in v] for v in row] for row in self.table],
            "unit": [f.to_str(c) for c in self.unit],
            "projections": [[f.to_str(c) for c in p] for p in self.projections],
        }

    def __repr__(self):
        return f"FiniteAlgebra({self.name}, dim={self.dim}, t={self.t})"


def truncated(n: int, field: Field = QQ) -> FiniteAlgebra:
    """``K[eps]/eps^n`` with basis ``1, eps, .., eps^(n-1)``."""
    if n < 1:
        raise ValueError("truncation order must be positive")
    table = [[[1 if m == i + j else 0 for m in range(n)] for j in range(n)] for i in range(n)]
    proj = [[1] + [0] * (n - 1)]
    return FiniteAlgebra(field, table, [1] + [0] * (n - 1), proj, name=f"K[eps]/eps^{n}")


def dual_numbers(field: Field = QQ) -> FiniteAlgebra:
    alg = truncated(2, field)
    alg.name = "dual numbers"
    return alg


def difference_algebra(field: Field = QQ, copies: int = 2) -> FiniteAlgebra:
    """``K^copies`` with basis ``eps_0 = (1,..,1)`` and ``eps_k = e_k`` for ``k >= 1``.

    Then ``e(r) = r eps_0 + sum_k (sigma_k(r) - r) eps_k`` and ``pi_k`` reads
    coordinate ``k``.
    """
    n = copies
    # coordinates in K^n of the basis vectors
    vecs = [[1] * n] + [[1 if c == k else 0 for c in range(n)] for k in range(1, n)]

    def coords(w):
        # w in K^n -> coefficients on the basis: w = a0*(1..1) + sum a_k e_k
        a0 = w[0]
        return [a0] + [w[k] - a0 for k in range(1, n)]

    table = [[coords([vecs[i][c] * vecs[j][c] for c in range(n)]) for j in range(n)] for i in range(n)]
    projections = [[vecs[k][c] for k in range(n)] for c in range(n)]
    return FiniteAlgebra(field, table, [1] + [0] * (n - 1), projections, name=f"K^{n}")


class TensorElement:
    """``sum_i r_i (x) eps_i`` with ``r_i`` rational functions on one ring."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: FiniteAlgebra, coeffs: Sequence):
        if len(coeffs) != algebra.dim:
            raise PreconditionError(f"need {algebra.dim} coefficients, got {len(coeffs)}")
        self.algebra = algebra
        self.coeffs = tuple(as_rational(c) for c in coeffs)

    @classmethod
    def scalar(cls, algebra: FiniteAlgebra, r) -> "TensorElement":
        r = as_rational(r)
        return cls(algebra, [r * algebra.field.norm(u) for u in algebra.unit])

    @property
    def ring(self) -> PolyRing:
        return self.coeffs[0].ring

    def __add__(self, other: "TensorElement") -> "TensorElement":
        return TensorElement(self.algebra, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return TensorElement(self.algebra, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return TensorElement(self.algebra, [-a for a in self.coeffs])

    def __mul__(self, other) -> "TensorElement":
        if not isinstance(other, TensorElement):
            other = as_rational(other)
            return TensorElement(self.algebra, [a * other for a in self.coeffs])
        alg = self.algebra
        zero = RationalFunction(self.ring.zero)
        out = [zero] * alg.dim
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if b.is_zero():
                    continue
                ab = a * b
                for m, c in enumerate(alg.table[i][j]):
                    if c:
                        out[m] = out[m] + ab * c
        return TensorElement(alg, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TensorElement":
        result = TensorElement.scalar(self.algebra, self.ring.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.algebra is other.algebra and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def project(self, idx: int) -> RationalFunction:
        acc = RationalFunction(self.ring.zero)
        for a, c in zip(self.algebra.projections[idx], self.coeffs):
            if a:
                acc = acc + c * a
        return acc

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    def __repr__(self):
        return " + ".join(f"({c})*{l}" for c, l in zip(self.coeffs, self.algebra.labels))


class AlgebraMap:
    """A ring homomorphism ``source -> target (x) B`` fixed by generator images."""

    def __init__(
        self,
        source: PresentedRing,
        target: PresentedRing,
        algebra: FiniteAlgebra,
        images: Sequence,
        *,
        check: bool = True,
    ):
        if source.field != algebra.field or target.field != algebra.field:
            raise PreconditionError("rings and algebra must share the coefficient field")
        self.source = source
        self.target = target
        self.algebra = algebra
        imgs = []
        for im in images:
            if isinstance(im, TensorElement):
                imgs.append(im)
            else:
                imgs.append(TensorElement(algebra, [_lift_rational(target, c) for c in im]))
        if len(imgs) != len(source.variables):
            raise PreconditionError(f"need {len(source.variables)} images, got {len(imgs)}")
        self.images = tuple(imgs)
        if check:
            for im in self.images:
                for c in im.coeffs:
                    if not target.is_unit(c.den):
                        raise PreconditionError(f"image coefficient {c} is not regular on the chart")
            for r in source.relations:
                if not all(target.is_zero(c.num) for c in self.apply(r).coeffs):
                    raise PreconditionError(f"relation {r} does not map to zero")

    def apply(self, r) -> TensorElement:
        r = self.source._lift(r) if not isinstance(r, Polynomial) else r
        alg = self.algebra
        ring = self.target.poly
        powers: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = self.images[i] ** k
            return powers[key]

        acc = TensorElement(alg, [RationalFunction(ring.zero)] * alg.dim)
        for e, c in r.terms.items():
            term = TensorElement.scalar(alg, ring.constant(c))
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            acc = acc + term
        return acc

    def apply_rational(self, g) -> tuple[TensorElement, TensorElement]:
        g = as_rational(g)
        return self.apply(g.num), self.apply(g.den)

    def residue_map(self, idx: int = 0) -> RationalMap:
        """``pi_idx`` after the map: a plain map of charts."""
        return RationalMap(self.target, self.source, [im.project(idx) for im in self.images])


def _lift_rational(ring: PresentedRing, c) -> RationalFunction:
    if isinstance(c, RationalFunction):
        return c
    if isinstance(c, Polynomial):
        return RationalFunction(c)
    if isinstance(c, dict):
        return RationalFunction(ring.poly.parse(c["num"]), ring.poly.parse(c.get("den", "1")))
    if isinstance(c, tuple):
        return RationalFunction(ring.poly.parse(c[0]), ring.poly.parse(c[1]))
    return RationalFunction(ring.poly.parse(str(c)))


class DRingStructure(AlgebraMap):
    """``e : R -> R (x) B`` with ``pi_0 o e = id``."""

    def __init__(self, ring: PresentedRing, algebra: FiniteAlgebra, images: Sequence, *, check: bool = True):
        super().__init__(ring, ring, algebra, images, check=check)
        self.ring = ring
        if check:
            for x, im in zip(ring.poly.gens, self.images):
                if im.project(0) != RationalFunction(x):
                    raise PreconditionError(f"pi_0(e({x})) = {im.project(0)}, expected {x}")

    @classmethod
    def from_operators(cls, ring: PresentedRing, algebra: FiniteAlgebra, operators: Sequence[Sequence]) -> "DRingStructure":
        """``e(x_i) = x_i eps_0 + sum_k operators[k-1][i] eps_k``."""
        images = []
        for i, x in enumerate(ring.poly.gens):
            coeffs = [RationalFunction(x)] + [_lift_rational(ring, ops[i]) for ops in operators]
            images.append(TensorElement(algebra, coeffs))
        return cls(ring, algebra, images)

    @classmethod
    def from_endomorphisms(cls, ring: PresentedRing, sigmas: Sequence[Sequence]) -> "DRingStructure":
        """Difference structure on ``K^(t+1)``: ``e(x) = x eps_0 + sum_k (sigma_k(x) - x) eps_k``."""
        alg = difference_algebra(ring.field, len(sigmas) + 1)
        ops = []
        for sig in sigmas:
            ops.append([_lift_rational(ring, s) - RationalFunction(x) for s, x in zip(sig, ring.poly.gens)])
        return cls.from_operators(ring, alg, ops)

    def __repr__(self):
        return f"DRingStructure({self.ring!r}, {self.algebra!r})"


def e_apply(D: DRingStructure, r) -> TensorElement:
    return D.apply(r)


def extract_operators(D: DRingStructure, r) -> list[RationalFunction]:
    """``(d_1(r), .., d_l(r))``: the coordinates of ``e(r)`` off ``eps_0``."""
    return list(D.apply(r).coeffs[1:])


def associated_endomorphisms(D: DRingStructure) -> list[RationalMap]:
    """``sigma_j = pi_j o e`` for ``j = 0..t``; ``sigma_0`` is checked to be the identity."""
    out = []
    for j in range(len(D.algebra.projections)):
        try:
            sigma = RationalMap(D.ring, D.ring, [im.project(j) for im in D.images])
        except PreconditionError as exc:
            raise PreconditionError(f"associated endomorphism sigma_{j} is not a self-map of the chart: {exc}") from None
        out.append(sigma)
    if not out[0].is_identity():
        raise PreconditionError("sigma_0 is not the identity")
    return out


def _ideal_gens(D: DRingStructure, I) -> list[Polynomial]:
    gens = I.generators if hasattr(I, "generators") else I
    return [D.ring._lift(g) for g in gens]


def is_totally_invariant_d_ideal(D: DRingStructure, I) -> bool:
    """``d_i(I) <= I`` for every operator and ``sigma_j(I) = I`` for every endomorphism."""
    R = D.ring
    gens = _ideal_gens(D, I)
    J = R.ideal(gens)
    for a in gens:
        for d in extract_operators(D, a):
            if not d.is_zero() and not J.contains(d.num):
                return False
    for sigma in associated_endomorphisms(D)[1:]:
        images = [sigma.pullback(a).num for a in gens]
        if not ideal_equal(R.ideal(images), J):
            return False
    return True


def tensor_ring(D: DRingStructure) -> tuple[PresentedRing, list[Polynomial]]:
    """``R (x) B`` as ``R[z_0..z_l]`` modulo the structure relations; returns the
    ring and the images of the basis vectors."""
    R, alg = D.ring, D.algebra
    if not R.is_polynomial_chart:
        raise PreconditionError("tensor presentation needs a chart without relations")
    names = []
    for i in range(alg.dim):
        z = f"_z{i}"
        while z in R.variables:
            z = "_" + z
        names.append(z)
    big = PolyRing(R.field, tuple(R.variables) + tuple(names), R.poly.order)
    zs = [big.gen(z) for z in names]
    rels = []
    for i in range(alg.dim):
        for j in range(i, alg.dim):
            rel = zs[i] * zs[j]
            for m, c in enumerate(alg.table[i][j]):
                if c:
                    rel = rel - zs[m].scale(c)
            rels.append(rel)
    unit = big.zero
    for u, z in zip(alg.unit, zs):
        if u:
            unit = unit + z.scale(u)
    rels.append(unit - big.one)
    inv = [f.convert(big) for f in R.invert]
    ring = PresentedRing(R.field, big.variables, rels, inv, order=R.poly.order, name="R(x)B")
    return ring, zs


def _tensor_to_poly(t: TensorElement, zs: list[Polynomial], ring: PresentedRing) -> Polynomial:
    """Clear the (unit) denominators and write ``sum r_i z_i``."""
    from .gcd import lcm

    den = ring.poly.one
    for c in t.coeffs:
        den = lcm(den, c.den.convert(ring.poly))
    acc = ring.poly.zero
    for c, z in zip(t.coeffs, zs):
        if c.is_zero():
            continue
        scale = den.exquo(c.den.convert(ring.poly))
        acc = acc + c.num.convert(ring.poly) * scale * z
    return acc


def prop55_check(D: DRingStructure, I) -> bool:
    """Decide ``e(I)(R (x) B) = I(R (x) B)`` by Groebner bases in the presented tensor ring."""
    gens = _ideal_gens(D, I)
    T, zs = tensor_ring(D)
    e_gens = [_tensor_to_poly(D.apply(a), zs, T) for a in gens]
    i_gens = [a.convert(T.poly) for a in gens]
    return ideal_equal(T.ideal(e_gens), T.ideal(i_gens))


def build_correspondence(D: DRingStructure) -> tuple[PresentedRing, RationalMap, RationalMap]:
    """``Z = Spec(R (x) B)`` with ``phi_1`` induced by ``e`` and ``phi_2`` by ``r -> r (x) 1``."""
    T, zs = tensor_ring(D)
    R = D.ring
    images1 = []
    for im in D.images:
        num_den = [(c.num.convert(T.poly), c.den.convert(T.poly)) for c in im.coeffs]
        acc = RationalFunction(T.poly.zero)
        for (n, d), z in zip(num_den, zs):
            if not n.is_zero():
                acc = acc + RationalFunction(n * z, d)
        images1.append(acc)
    images2 = [RationalFunction(x.convert(T.poly)) for x in R.poly.gens]
    phi1 = RationalMap(T, R, images1)
    phi2 = RationalMap(T, R, images2)
    return T, phi1, phi2


def is_d_constant(D: DRingStructure, g) -> bool:
    """``e(g) = g (x) 1``, compared after clearing denominators."""
    g = as_rational(g)
    if g.ring != D.ring.poly:
        g = g.convert(D.ring.poly)
    en, ed = D.apply_rational(g)
    alg = D.algebra
    lhs = en * RationalFunction(g.den)
    rhs = ed * RationalFunction(g.num)
    if D.ring.is_polynomial_chart:
        return lhs == rhs
    return all(D.ring.is_zero((a - b).num) for a, b in zip(lhs.coeffs, rhs.coeffs))
