import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invkit.differential import Derivation, apply_derivation
from invkit.doperators import (
    DRingStructure,
    FiniteAlgebra,
    TensorElement,
    associated_endomorphisms,
    build_correspondence,
    difference_algebra,
    dual_numbers,
    e_apply,
    extract_operators,
    is_d_constant,
    is_totally_invariant_d_ideal,
    prop55_check,
    truncated,
)
from invkit.errors import PreconditionError
from invkit.fields import QQ
from invkit.groebner import ideal_equal
from invkit.rational import RationalFunction
from invkit.varieties import PresentedRing, pullback_function

X = PresentedRing(QQ, ["x", "y"])
L = PresentedRing(QQ, ["x"])


def rf(ring, s, d="1"):
    return RationalFunction(ring(s), ring(d))


def euler():
    return DRingStructure.from_operators(X, dual_numbers(), [["x", "y"]])


def shift():
    return DRingStructure.from_endomorphisms(L, [["x + 1"]])


def test_algebra_axioms_are_checked():
    with pytest.raises(PreconditionError):
        # eps^2 = 1 + eps but pi(eps) = 0 is not multiplicative
        FiniteAlgebra(QQ, [[[1, 0], [0, 1]], [[0, 1], [1, 1]]], [1, 0], [[1, 0]])


def test_e_apply_examples():
    D = DRingStructure.from_operators(L, dual_numbers(), [["x"]])
    assert e_apply(D, L("x^2")).coeffs == (rf(L, "x^2"), rf(L, "2*x^2"))
    assert e_apply(D, L("1")).coeffs == (rf(L, "1"), rf(L, "0"))
    img = e_apply(shift(), L("x^2"))
    # components in K x K: pi_0 and pi_1
    assert img.project(0) == rf(L, "x^2")
    assert img.project(1) == rf(L, "(x + 1)^2")


def test_extract_operators_is_derivation():
    D = euler()
    d = extract_operators(D, X("x^2*y"))
    assert d == [rf(X, "3*x^2*y")]


def test_associated_endomorphisms_examples():
    sig = associated_endomorphisms(euler())
    assert len(sig) == 1 and sig[0].is_identity()
    sig = associated_endomorphisms(shift())
    assert sig[1].images == (rf(L, "x + 1"),)
    ident = DRingStructure.from_endomorphisms(L, [["x"]])
    assert all(s.is_identity() for s in associated_endomorphisms(ident))


def test_total_invariance_examples():
    assert is_totally_invariant_d_ideal(euler(), ["x - y"])
    assert not is_totally_invariant_d_ideal(shift(), ["x"])
    assert is_totally_invariant_d_ideal(DRingStructure.from_endomorphisms(L, [["2*x"]]), ["x"])


def test_prop55_trivial_ideals():
    for D in (euler(), shift()):
        assert prop55_check(D, [D.ring.poly.zero])
        assert prop55_check(D, [D.ring.poly.one])
        assert is_totally_invariant_d_ideal(D, [D.ring.poly.one])


def test_pi0_of_e_is_identity_is_enforced():
    B = dual_numbers()
    with pytest.raises(PreconditionError):
        DRingStructure(L, B, [TensorElement(B, [rf(L, "x + 1"), rf(L, "0")])])


def test_d_constants():
    assert is_d_constant(euler(), rf(X, "x", "y"))
    assert not is_d_constant(euler(), rf(X, "x"))
    assert is_d_constant(DRingStructure.from_endomorphisms(X, [["2*x", "2*y"]]), rf(X, "x", "y"))


# properties


def rand_poly(rng, ring, deg=2, n=3):
    terms = {}
    for _ in range(n):
        e = tuple(rng.randint(0, deg) for _ in ring.variables)
        if sum(e) <= deg:
            terms[e] = rng.randint(-3, 3)
    return ring.poly.from_dict(terms)


def random_structure(rng):
    kind = rng.randrange(3)
    if kind == 0:
        return DRingStructure.from_operators(X, dual_numbers(), [[rand_poly(rng, X), rand_poly(rng, X)]])
    if kind == 1:
        return DRingStructure.from_endomorphisms(X, [[rand_poly(rng, X) + X("x"), rand_poly(rng, X) + X("y")]])
    ops = [[rand_poly(rng, X), rand_poly(rng, X)], [rand_poly(rng, X), rand_poly(rng, X)]]
    return DRingStructure.from_operators(X, truncated(3), ops)


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 2**32))
def test_pi0_after_e_is_identity(seed):
    rng = random.Random(seed)
    D = random_structure(rng)
    r = rand_poly(rng, X, 3, 4)
    assert e_apply(D, r).project(0) == RationalFunction(r)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_e_is_multiplicative(seed):
    rng = random.Random(seed)
    D = random_structure(rng)
    u, v = rand_poly(rng, X), rand_poly(rng, X)
    assert e_apply(D, u * v) - e_apply(D, u) * e_apply(D, v) == e_apply(D, X.poly.zero)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_dual_operator_matches_differential_module(seed):
    rng = random.Random(seed)
    imgs = [rand_poly(rng, X), rand_poly(rng, X)]
    D = DRingStructure.from_operators(X, dual_numbers(), [imgs])
    delta = Derivation(X, [RationalFunction(p) for p in imgs])
    r = rand_poly(rng, X, 3, 4)
    assert extract_operators(D, r)[0] == apply_derivation(delta, RationalFunction(r))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_correspondence_pullbacks_match_prop55(seed):
    rng = random.Random(seed)
    D = random_structure(rng)
    a = rand_poly(rng, X)
    if a.is_constant():
        return
    T, phi1, phi2 = build_correspondence(D)
    p1 = pullback_function(phi1, RationalFunction(a)).num
    p2 = pullback_function(phi2, RationalFunction(a)).num
    same = ideal_equal(T.ideal([p1]), T.ideal([p2]))
    assert same == prop55_check(D, [a])
    assert prop55_check(D, [a]) == is_totally_invariant_d_ideal(D, [a])


def test_difference_algebra_projections():
    B = difference_algebra(QQ, 3)
    assert B.t == 2
    e1 = B.basis(1)
    assert B.mul(e1, e1) == e1
    assert [B.project(k, B.basis(0)) for k in range(3)] == [1, 1, 1]
