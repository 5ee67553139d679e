from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from origamikz import exact as ex
from origamikz.connection import (FramedPoint, PairingSpace, TransportInstance,
                                  holonomy_square, holonomy_steps, leaves_subspace,
                                  random_pairing_space, random_square_instance, standard_form,
                                  transport_orbit_orthogonality, transport_stable,
                                  transport_unstable)
from origamikz.errors import PreconditionViolated


def e(i, n):
    return [int(j == i) for j in range(n)]


R4 = PairingSpace.from_matrix(standard_form(4))
R6 = PairingSpace.from_matrix(standard_form(6))


def test_unstable_examples():
    pt = FramedPoint(R4, e(0, 4), e(1, 4))
    assert transport_unstable(TransportInstance(pt, [0] * 4, e(3, 4))) == tuple(e(3, 4))
    # <v, p(s)> = 0 leaves v alone
    assert transport_unstable(TransportInstance(pt, e(3, 4), e(3, 4))) == tuple(e(3, 4))
    # pairing-matrix oracle: <e4, e3> = -1, so e4 - e2
    assert transport_unstable(TransportInstance(pt, e(2, 4), e(3, 4))) == (0, -1, 0, 1)


def test_orbit_orthogonality_examples():
    pt = FramedPoint(R4, e(0, 4), e(1, 4))
    assert transport_orbit_orthogonality(TransportInstance(pt, e(2, 4), e(3, 4))) == (0, 0)
    with pytest.raises(PreconditionViolated) as info:
        transport_orbit_orthogonality(TransportInstance(pt, e(2, 4), e(1, 4)))
    assert info.value.value == -1


def test_preconditions_carry_values():
    pt = FramedPoint(R4, e(0, 4), e(1, 4))
    with pytest.raises(PreconditionViolated) as info:
        transport_unstable(TransportInstance(pt, e(0, 4), e(3, 4)))
    assert info.value.value == 1
    with pytest.raises(PreconditionViolated) as info:
        transport_stable(TransportInstance(pt, e(1, 4), e(3, 4)))
    assert info.value.value == -1
    with pytest.raises(PreconditionViolated) as info:
        FramedPoint(R4, e(0, 4), [0, 2, 0, 0])
    assert info.value.value == 2


def test_stable_examples():
    pt = FramedPoint(R6, e(0, 6), e(1, 6))
    assert transport_stable(TransportInstance(pt, [0] * 6, e(3, 6))) == tuple(e(3, 6))
    # step 2 at (a + d) + b i with s = eps a, eps = 1, a=e1 b=e2 d=e3 v=e4:
    # v + <v,d> b + eps <v,d> (a + d) with <v, d> = -1
    a2 = [1, 0, 1, 0, 0, 0]
    v1 = [0, -1, 0, 1, 0, 0]
    out = transport_stable(TransportInstance(FramedPoint(R6, a2, e(1, 6)), e(0, 6), v1))
    assert out == (-1, -1, -1, 1, 0, 0)
    steps = holonomy_steps(pt, e(2, 6), 1, e(3, 6))
    assert steps[1] == out
    # step 4 leaves its input unchanged
    assert steps[3] == steps[2]


def test_holonomy_examples():
    pt = FramedPoint(R6, e(0, 6), e(1, 6))
    v = e(3, 6)
    assert holonomy_square(pt, e(2, 6), 0, v) == (tuple(v), tuple(v))
    assert holonomy_square(pt, e(4, 6), 1, v) == (tuple(v), tuple(v))
    r = holonomy_square(pt, e(2, 6), 1, v)
    assert r.composed == r.closed_form == (0, 0, -1, 1, 0, 0)
    assert leaves_subspace(r, [e(3, 6)])
    assert not leaves_subspace(r, [e(2, 6), e(3, 6)])


def test_holonomy_preconditions():
    pt = FramedPoint(R6, e(0, 6), e(1, 6))
    with pytest.raises(PreconditionViolated):
        holonomy_square(pt, e(1, 6), 1, e(3, 6))
    with pytest.raises(PreconditionViolated):
        holonomy_square(pt, e(2, 6), 1, e(1, 6))


instances = st.tuples(st.sampled_from([4, 6, 8, 10, 12]), st.integers(0, 2),
                      st.integers(0, 2**32 - 1))


@given(instances)
def test_holonomy_identity(params):
    dim, extra, seed = params
    rng = np.random.default_rng(seed)
    pt, d, eps, v = random_square_instance(rng, dim, extra)
    r = holonomy_square(pt, d, eps, v)
    assert r.composed == r.closed_form
    assert holonomy_steps(pt, d, eps, v)[-1] == r.composed


@given(instances)
def test_flatness_and_orthogonality(params):
    dim, extra, seed = params
    rng = np.random.default_rng(seed)
    pt, s1, _, v = random_square_instance(rng, dim, extra)
    space = pt.space
    _, s2, _, _ = random_square_instance(rng, space=space)
    # s2 must be orthogonal to p(b) only; reuse s2 drawn against another frame
    pb = space.p(pt.b)
    c = space.pair(space.p(s2), pb)
    if c != 0:
        s2 = tuple(x - c * y for x, y in zip(s2, pt.a))
    inst = TransportInstance(pt, s1, v)
    assert transport_orbit_orthogonality(inst) == (0, 0)
    v1 = transport_unstable(inst)
    pt2 = FramedPoint(space, [x + y for x, y in zip(pt.a, s1)], pt.b)
    v2 = transport_unstable(TransportInstance(pt2, s2, v1))
    v12 = transport_unstable(TransportInstance(pt, [x + y for x, y in zip(s1, s2)], v))
    assert v2 == v12


def test_identities_symbolically():
    """The square loop and flatness hold as identities in free pairings."""
    t, eps, u1, u2, w1, w2 = sympy.symbols("t eps u1 u2 w1 w2")
    # basis a, b, d, v with <a,b>=1, <d,a>=<d,b>=0, <v,a>=<v,b>=0, <v,d>=t
    G = sympy.Matrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -t], [0, 0, t, 0]])
    pair = lambda x, y: (x.T * G * y)[0, 0]
    a, b, d, v = (sympy.Matrix(e(i, 4)) for i in range(4))
    unst = lambda x, s, fb: x + pair(x, s) * fb
    stab = lambda x, s, fa: x - pair(x, s) * fa
    v1 = unst(v, d, b)
    v2 = stab(v1, eps * a, a + d)
    v3 = unst(v2, -d, b + eps * a)
    v4 = stab(v3, -eps * a, a)
    assert sympy.simplify(v4 - (v + eps * pair(v, d) * d)) == sympy.zeros(4, 1)
    # flatness: basis a, b, s1, s2, v with <s_i, b> = 0
    H = sympy.Matrix([
        [0, 1, -u1, -u2, -w1],
        [-1, 0, 0, 0, -w2],
        [u1, 0, 0, sympy.Symbol("c"), sympy.Symbol("x1")],
        [u2, 0, -sympy.Symbol("c"), 0, sympy.Symbol("x2")],
        [w1, w2, -sympy.Symbol("x1"), -sympy.Symbol("x2"), 0],
    ])
    pair = lambda x, y: (x.T * H * y)[0, 0]
    a, b, s1, s2, v = (sympy.Matrix(e(i, 5)) for i in range(5))
    lhs = unst(unst(v, s1, b), s2, b)
    rhs = unst(v, s1 + s2, b)
    assert sympy.simplify(lhs - rhs) == sympy.zeros(5, 1)
    # orthogonality of the transported vector when <v,a> = <v,b> = 0
    Hv = H.subs({w1: 0, w2: 0})
    pair = lambda x, y: (x.T * Hv * y)[0, 0]
    vp = v + pair(v, s1) * b
    assert sympy.simplify(pair(vp, a + s1)) == 0 and sympy.simplify(pair(vp, b)) == 0


def test_no_defect_when_tangent_is_orthogonal_to_F(orbits, certificates):
    """Valid squares with v in F and delta in the tangent have zero defect."""
    hd = orbits["wollmilchsau"].homology
    cert = certificates["wollmilchsau"]
    space = PairingSpace.from_homology(hd)
    n = hd.area
    pt = FramedPoint(space, list(hd.rel_a), [Fraction(x, n) for x in hd.rel_b])
    # tangent displacements orthogonal to p(a), p(b): only kernel directions of p
    ker = [e(i, hd.rel_rank) for i in range(hd.abs_rank, hd.rel_rank)]
    for d in ker:
        for v in cert.basis:
            r = holonomy_square(pt, d, 1, v)
            assert r.composed == r.closed_form == tuple(v)
            assert not leaves_subspace(r, cert.basis)
