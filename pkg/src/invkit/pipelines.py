"""End-to-end searches: self-maps, correspondences, derivations, D-structures,
level sets and the Frobenius demonstration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .differential import Derivation, first_integral_search, is_constant, is_d_ideal
from .doperators import (
    DRingStructure,
    associated_endomorphisms,
    is_d_constant,
    prop55_check,
)
from .errors import HypothesisRefused, PreconditionError
from .fields import PrimeField
from .groebner import Ideal, groebner_basis
from .invariants import (
    InvariantCertificate,
    SearchOutcome,
    functions_agree,
    is_nonconstant,
    search_common_invariant,
)
from .polynomial import PolyRing, block_order
from .rational import RationalFunction, as_rational
from .varieties import (
    Hypersurface,
    PresentedRing,
    RationalMap,
    dominance_check,
    proper_transform,
    pullback_divisor,
    scheme_inverse_image,
    separability_check,
)

__all__ = [
    "DynamicalSystem",
    "SelfCorrespondence",
    "totally_invariant_check",
    "corr_invariant_check",
    "cantat_search",
    "jouanolou_search",
    "dvariety_search",
    "level_sets",
    "LevelSets",
    "frobenius_demo",
]


class DynamicalSystem:
    """A dominant self-map of a chart."""

    def __init__(self, phi: RationalMap):
        if phi.source.poly != phi.target.poly:
            raise PreconditionError("a dynamical system needs a self-map")
        if not dominance_check(phi):
            raise PreconditionError(f"{phi!r} is not dominant")
        self.ring = phi.source
        self.phi = phi

    @classmethod
    def from_images(cls, ring: PresentedRing, images: Sequence) -> "DynamicalSystem":
        return cls(RationalMap(ring, ring, images))

    def __repr__(self):
        return f"DynamicalSystem({[str(x) for x in self.phi.images]})"


def _doubled_names(X: PresentedRing) -> tuple[list[str], list[str]]:
    return [f"{v}_1" for v in X.variables], [f"{v}_2" for v in X.variables]


class SelfCorrespondence:
    """``Gamma`` inside ``X x X`` in the variables ``v_1`` (first copy) and ``v_2``.

    Transforms are computed on a chart of ``Gamma`` that is a graph over the
    first copy: the relations must solve each ``v_2`` as a rational function
    of the first copy with a denominator that is a unit on ``Gamma``.
    """

    def __init__(self, X: PresentedRing, relations: Sequence, *, finite_to_finite: bool = False):
        if not X.is_polynomial_chart:
            raise PreconditionError("correspondences need a chart without relations")
        self.X = X
        self.finite_to_finite = finite_to_finite
        first, second = _doubled_names(X)
        self.first, self.second = first, second
        n = len(first)
        rename1 = dict(zip(X.variables, first))
        rename2 = dict(zip(X.variables, second))
        ring = PolyRing(X.field, second + first, block_order(n))
        inv = [f.convert(ring, rename1) for f in X.invert] + [f.convert(ring, rename2) for f in X.invert]
        rels = [ring.parse(r) if isinstance(r, str) else r.convert(ring) for r in relations]
        self.Z = PresentedRing(X.field, ring.variables, rels, inv, order=block_order(n), name="Gamma")
        self.pi1 = RationalMap(self.Z, X, [ring.gen(v) for v in first])
        self.pi2 = RationalMap(self.Z, X, [ring.gen(v) for v in second])
        for name, pi in (("first", self.pi1), ("second", self.pi2)):
            if not dominance_check(pi):
                raise PreconditionError(f"the {name} projection of the correspondence is not dominant")
        self._chart = self._graph_chart()

    @classmethod
    def graph(cls, phi: RationalMap) -> "SelfCorrespondence":
        X = phi.source
        first, second = _doubled_names(X)
        ring = PolyRing(X.field, second + first)
        rename1 = dict(zip(X.variables, first))
        rels = []
        for v, im in zip(second, phi.images):
            rels.append(im.den.convert(ring, rename1) * ring.gen(v) - im.num.convert(ring, rename1))
        return cls(X, rels)

    @classmethod
    def diagonal(cls, X: PresentedRing) -> "SelfCorrespondence":
        return cls.graph(X.identity())

    def _graph_chart(self):
        Z, X = self.Z, self.X
        n = len(self.first)
        gb = Z.relation_ideal().groebner()
        ring = Z.poly
        back = dict(zip(self.first, X.variables))
        solved: dict[int, tuple] = {}
        for g in gb:
            lead = g.lead_monomial()
            if not any(lead[:n]):
                raise PreconditionError(
                    f"relation {g} involves only the first copy; Gamma does not dominate X"
                )
            if sum(lead[:n]) != 1 or any(sum(e[:n]) > 1 for e in g.terms):
                raise PreconditionError(
                    f"relation {g} is not linear in the second copy; only graph-like correspondences are supported"
                )
            i = next(k for k in range(n) if lead[k])
            if i in solved:
                continue
            coeff, rest = {}, {}
            for e, c in g.terms.items():
                if e[i]:
                    coeff[e[:i] + (0,) + e[i + 1:]] = c
                elif any(e[:n]):
                    raise PreconditionError(f"relation {g} mixes second-copy variables")
                else:
                    rest[e] = c
            c_poly = ring.from_dict(coeff)
            d_poly = -ring.from_dict(rest)
            if not Z.is_unit(c_poly):
                raise PreconditionError(f"coefficient {c_poly} of {ring.variables[i]} is not a unit on Gamma")
            solved[i] = (c_poly.convert(X.poly, back), d_poly.convert(X.poly, back))
        if len(solved) != n:
            raise PreconditionError("Gamma is not a graph over the first copy")
        W = X.localize([solved[i][0] for i in range(n)])
        p1 = RationalMap(W, X, list(W.poly.gens))
        p2 = RationalMap(W, X, [RationalFunction(solved[i][1], solved[i][0]) for i in range(n)])
        return W, p1, p2

    @property
    def chart(self) -> PresentedRing:
        return self._chart[0]

    @property
    def projections(self) -> tuple[RationalMap, RationalMap]:
        return self._chart[1], self._chart[2]


def totally_invariant_check(sys: DynamicalSystem, H: Hypersurface) -> bool:
    """``phi* H = H`` as sets of components."""
    return proper_transform(sys.phi, H).same_as(H)


def corr_invariant_check(c: SelfCorrespondence, H: Hypersurface) -> bool:
    p1, p2 = c.projections
    return proper_transform(p1, H).same_as(proper_transform(p2, H))


def cantat_search(sys: DynamicalSystem, witnesses: Sequence[Hypersurface], *, check_witnesses: bool = True) -> SearchOutcome:
    """``g`` with ``g o phi = g`` from totally invariant witnesses (``phi_2 = id``)."""
    phi = sys.phi
    if not separability_check(phi):
        raise HypothesisRefused(
            "the map is not separable (Jacobian has deficient generic rank); "
            "invariant hypersurfaces need not come from invariant functions",
            {"hypothesis": "geometrically reduced generic fibres"},
        )
    witnesses = list(witnesses)
    if check_witnesses:
        bad = [str(H) for H in witnesses if not totally_invariant_check(sys, H)]
        if bad:
            raise PreconditionError("witnesses are not totally invariant", {"witnesses": bad})
    return search_common_invariant([(phi, sys.ring.identity())], witnesses, sys.ring)


def _derivation_certificate(delta: Derivation, factors, result) -> InvariantCertificate:
    g = result.g
    cert = InvariantCertificate(
        g=g,
        witnesses=list(factors),
        exponents=list(result.exponents),
        stages=[{"stage": "log-derivative-kernel", "vectors": result.kernel}],
        kind="derivation",
    )
    cert.agreement = is_constant(delta, g)
    cert.nonconstant = is_nonconstant(g, delta.ring)
    return cert


def jouanolou_search(ring: PresentedRing, delta: Derivation, witnesses: Sequence[Hypersurface]) -> SearchOutcome:
    """``g`` with ``delta(g) = 0`` from D-hypersurfaces ``delta(a) in (a)``."""
    if delta.ring.poly != ring.poly:
        raise PreconditionError("derivation lives on a different chart")
    witnesses = list(witnesses)
    if not witnesses:
        return SearchOutcome(None, [{"stage": "input", "message": "no witnesses"}])
    factors = []
    bad = []
    for H in witnesses:
        for a in H.factors:
            if not is_d_ideal(delta, [a]):
                bad.append(str(a))
            factors.append(a)
    if bad:
        raise PreconditionError(
            "witness factors are not D-hypersurfaces (delta(a) not in (a))", {"factors": bad}
        )
    result = first_integral_search(delta, factors)
    if result is None:
        return SearchOutcome(
            None, [{"stage": "log-derivative-kernel", "message": "trivial kernel: no product of witnesses is constant"}]
        )
    cert = _derivation_certificate(delta, factors, result)
    if not cert.verified:
        return SearchOutcome(None, [{"stage": "verify", "message": f"candidate {cert.g} failed verification"}])
    return SearchOutcome(cert, [], result.pruned)


def _derivation_part(D: DRingStructure) -> Derivation | None:
    """An operator direction inside the radical of ``B`` that is a derivation."""
    R = D.ring
    gens = R.poly.gens
    for k in D.algebra.radical_indices():
        images = [im.coeffs[k] for im in D.images]
        if all(x.is_zero() for x in images):
            continue
        delta = Derivation(R, images, check=False)
        ok = True
        for i in range(len(gens)):
            for j in range(i, len(gens)):
                uv = gens[i] * gens[j]
                if D.apply(uv).coeffs[k] != delta.poly(uv):
                    ok = False
        if ok:
            return delta
    return None


POLICY = (
    "derivation directions are searched through their log-derivative kernel; "
    "endomorphisms sigma_1..sigma_t are searched simultaneously (intersection of the "
    "per-sigma lattices); every candidate is re-verified as a D-constant"
)


def dvariety_search(D: DRingStructure, witnesses: Sequence[Hypersurface]) -> SearchOutcome:
    """A D-constant ``g`` (``e(g) = g (x) 1``) from totally D-invariant witnesses."""
    witnesses = list(witnesses)
    bad = [str(H) for H in witnesses if not prop55_check(D, [H.generator])]
    if bad:
        raise PreconditionError("witnesses are not totally D-invariant", {"witnesses": bad})
    sigmas = [s for s in associated_endomorphisms(D)[1:] if not s.is_identity()]
    delta = _derivation_part(D)
    policy = {"stage": "policy", "message": POLICY}
    if delta is not None:
        outcome = jouanolou_search(D.ring, delta, witnesses)
        route = "derivation"
    else:
        outcome = search_common_invariant([(s, D.ring.identity()) for s in sigmas], witnesses, D.ring)
        route = "endomorphisms" if sigmas else "trivial"
    outcome.diagnostics.insert(0, {**policy, "route": route})
    cert = outcome.certificate
    if cert is not None:
        ok = is_d_constant(D, cert.g)
        if not ok:
            outcome.diagnostics.append(
                {"stage": "d-constant", "message": f"candidate {cert.g} is not a D-constant"}
            )
            return SearchOutcome(None, outcome.diagnostics, outcome.pruned)
        cert.kind = "d-structure"
    return outcome


@dataclass
class LevelSets:
    hypersurfaces: list[tuple[object, Hypersurface]] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)

    def __iter__(self):
        return iter(H for _, H in self.hypersurfaces)

    def __len__(self):
        return len(self.hypersurfaces)


def level_sets(g, constants: Sequence, ring: PresentedRing) -> LevelSets:
    """``V(num(g) - c den(g))`` for each constant, split into components."""
    g = as_rational(g)
    if g.ring != ring.poly:
        g = g.convert(ring.poly)
    if not is_nonconstant(g, ring):
        raise PreconditionError("level sets need a nonconstant function")
    out = LevelSets()
    for c in constants:
        c = ring.field(c)
        level = ring.reduce(g.num - g.den.scale(c))
        if level.is_constant():
            out.skipped.append({"constant": ring.field.to_str(c), "reason": "level polynomial is constant"})
            continue
        H = Hypersurface.from_polynomial(ring, level)
        if H.is_empty():
            out.skipped.append({"constant": ring.field.to_str(c), "reason": "level set misses the chart"})
            continue
        out.hypersurfaces.append((c, H))
    return out


def frobenius_demo(p: int) -> dict:
    """``x -> x^p`` on the affine line over F_p: every rational point is totally
    invariant, pullbacks carry multiplicity ``p``, and the search is refused."""
    F = PrimeField(p)
    L = PresentedRing(F, ["x"])
    phi = RationalMap(L, L, [f"x^{p}"])
    sys = DynamicalSystem(phi)
    points = []
    witnesses = []
    for c in range(p):
        H = Hypersurface(L, [f"x - {c}"], [True])
        witnesses.append(H)
        scheme = scheme_inverse_image(phi, H)
        div = pullback_divisor(phi, H)
        transform = proper_transform(phi, H)
        points.append(
            {
                "c": c,
                "scheme": scheme.basis_strings(),
                "divisor": div.to_json(),
                "multiplicity": div.terms[0][1] if len(div.terms) == 1 else None,
                "scheme_is_radical": len(div.terms) == 1 and div.terms[0][1] == 1,
                "proper_transform": transform.to_json(),
                "totally_invariant": transform.same_as(H),
            }
        )
    separable = separability_check(phi)
    try:
        outcome = cantat_search(sys, witnesses)
        cantat = {"status": "found" if outcome.found else "none"}
    except HypothesisRefused as exc:
        cantat = {"status": "refused", "reason": str(exc)}
    return {"p": p, "map": f"x -> x^{p}", "points": points, "separable": separable, "cantat": cantat}
