"""Exact transport of cohomology classes along stable and unstable leaves.

Vectors live in two spaces: relative ones (points ``x = a + b i`` and
displacements) and absolute ones (the transported class ``v``).  A
:class:`PairingSpace` bundles the intersection form ``J`` on absolute
classes with the projection ``P`` from relative to absolute coordinates.

Along the unstable leaf through ``x`` the transport is
``v -> v + <v, p(s)> p(b)`` (valid when ``<p(s), p(b)> = 0``); along the
stable leaf the roles of ``a`` and ``b`` swap and the sign flips:
``v -> v - <v, p(s)> p(a)`` (valid when ``<p(s), p(a)> = 0``).

All arithmetic is exact.  ``gmpy2.mpq`` is used internally for speed and
results are returned as tuples of ``Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from gmpy2 import mpq

from .errors import DimensionMismatch, PreconditionViolated

_ZERO = mpq(0)


def _q(x):
    if isinstance(x, (int, type(_ZERO))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x).numerator, Fraction(x).denominator)
    return mpq(x)


def _vec(x):
    return tuple(_q(t) for t in x)


def _out(x):
    return tuple(Fraction(int(t.numerator), int(t.denominator)) for t in x)


def _dot(u, w):
    s = _ZERO
    for x, y in zip(u, w):
        if x:
            s += x * y
    return s


def _axpy(c, x, y):
    """``y + c x``."""
    if not c:
        return y
    return tuple(yi + c * xi for xi, yi in zip(x, y))


@dataclass(frozen=True)
class PairingSpace:
    """Intersection form ``J`` on absolute vectors and the projection ``P``.

    ``P = None`` means relative and absolute coordinates coincide.
    """
    J: tuple
    P: tuple | None = None

    @classmethod
    def from_matrix(cls, J, P=None) -> "PairingSpace":
        Jq = tuple(_vec(r) for r in J)
        n = len(Jq)
        if any(len(r) != n for r in Jq):
            raise DimensionMismatch("pairing matrix must be square")
        Pq = None
        if P is not None:
            Pq = tuple(_vec(r) for r in P)
            if len(Pq) != n:
                raise DimensionMismatch(f"P has {len(Pq)} rows, J has {n}")
        return cls(Jq, Pq)

    @classmethod
    def from_homology(cls, hd) -> "PairingSpace":
        return cls.from_matrix(hd.J, hd.P)

    @property
    def abs_dim(self) -> int:
        return len(self.J)

    @property
    def rel_dim(self) -> int:
        return self.abs_dim if self.P is None else len(self.P[0])

    def p(self, x) -> tuple:
        if len(x) != self.rel_dim:
            raise DimensionMismatch(f"relative vector of length {len(x)}, expected {self.rel_dim}")
        if self.P is None:
            return tuple(x)
        return tuple(_dot(row, x) for row in self.P)

    def covector(self, w) -> tuple:
        """``J w``, so that ``<u, w> = u . (J w)``."""
        return tuple(_dot(row, w) for row in self.J)

    def pair(self, u, w):
        if len(u) != self.abs_dim or len(w) != self.abs_dim:
            raise DimensionMismatch("absolute vectors have the wrong length")
        return _dot(u, self.covector(w))


@dataclass(frozen=True)
class FramedPoint:
    """``x = a + b i`` with ``<p(a), p(b)> = 1``."""
    space: PairingSpace
    a: tuple
    b: tuple

    pa: tuple = field(init=False, repr=False, compare=False)
    pb: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "a", _vec(self.a))
        object.__setattr__(self, "b", _vec(self.b))
        object.__setattr__(self, "pa", self.space.p(self.a))
        object.__setattr__(self, "pb", self.space.p(self.b))
        area = self.space.pair(self.pa, self.pb)
        if area != 1:
            raise PreconditionViolated("<p(a), p(b)> must equal 1", Fraction(str(area)))


@dataclass(frozen=True)
class TransportInstance:
    point: FramedPoint
    s: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "s", _vec(self.s))
        object.__setattr__(self, "v", _vec(self.v))
        if len(self.v) != self.point.space.abs_dim:
            raise DimensionMismatch("v must be an absolute vector")


def _require_zero(value, what):
    if value != 0:
        raise PreconditionViolated(f"{what} must vanish",
                                   Fraction(int(value.numerator), int(value.denominator)))


def transport_unstable(inst: TransportInstance) -> tuple:
    """``v + <v, p(s)> p(b)``; requires ``<p(s), p(b)> = 0``."""
    sp = inst.point.space
    ps, pb = sp.p(inst.s), inst.point.pb
    _require_zero(sp.pair(ps, pb), "<p(s), p(b)>")
    return _out(_axpy(_dot(inst.v, sp.covector(ps)), pb, inst.v))


def transport_stable(inst: TransportInstance) -> tuple:
    """``v - <v, p(s)> p(a)``; requires ``<p(s), p(a)> = 0``."""
    sp = inst.point.space
    ps, pa = sp.p(inst.s), inst.point.pa
    _require_zero(sp.pair(ps, pa), "<p(s), p(a)>")
    return _out(_axpy(-_dot(inst.v, sp.covector(ps)), pa, inst.v))


class HolonomyResult(NamedTuple):
    composed: tuple
    closed_form: tuple


def holonomy_square(pt: FramedPoint, delta, eps, v) -> HolonomyResult:
    """Transport ``v`` around ``a+bi -> (a+d)+bi -> (a+d)+(b+ea)i -> a+(b+ea)i -> a+bi``.

    Unstable moves change ``a``, stable moves change ``b``.  Requires
    ``<p(d), p(a)> = <p(d), p(b)> = 0`` and ``v`` orthogonal to ``p(a), p(b)``.
    Returns the four-step composition and ``v + e <v, p(d)> p(d)``.
    """
    sp = pt.space
    delta, v, eps = _vec(delta), _vec(v), _q(eps)
    if len(v) != sp.abs_dim:
        raise DimensionMismatch("v must be an absolute vector")
    pa, pb, pd = pt.pa, pt.pb, sp.p(delta)
    ca, cb, cd = sp.covector(pa), sp.covector(pb), sp.covector(pd)
    _require_zero(_dot(pd, ca), "<p(delta), p(a)>")
    _require_zero(_dot(pd, cb), "<p(delta), p(b)>")
    _require_zero(_dot(v, ca), "<v, p(a)>")
    _require_zero(_dot(v, cb), "<v, p(b)>")
    # step 1: unstable, frame (a, b), s = delta
    v1 = _axpy(_dot(v, cd), pb, v)
    # step 2: stable, frame (a + delta, b), s = eps a
    pa2 = tuple(x + y for x, y in zip(pa, pd))
    v2 = _axpy(-eps * _dot(v1, ca), pa2, v1)
    # step 3: unstable, frame (a + delta, b + eps a), s = -delta
    pb3 = _axpy(eps, pa, pb)
    v3 = _axpy(-_dot(v2, cd), pb3, v2)
    # step 4: stable, frame (a, b + eps a), s = -eps a
    v4 = _axpy(eps * _dot(v3, ca), pa, v3)
    closed = _axpy(eps * _dot(v, cd), pd, v)
    return HolonomyResult(_out(v4), _out(closed))


def holonomy_steps(pt: FramedPoint, delta, eps, v) -> list:
    """The four intermediate vectors of :func:`holonomy_square`, via the public maps."""
    sp = pt.space
    delta, eps = _vec(delta), _q(eps)
    a, b = pt.a, pt.b
    a2 = tuple(x + y for x, y in zip(a, delta))
    b3 = _axpy(eps, a, b)
    out = []
    cur = v
    plan = [
        (transport_unstable, (a, b), delta),
        (transport_stable, (a2, b), tuple(eps * x for x in a)),
        (transport_unstable, (a2, b3), tuple(-x for x in delta)),
        (transport_stable, (a, b3), tuple(-eps * x for x in a)),
    ]
    for fn, (fa, fb), s in plan:
        cur = fn(TransportInstance(FramedPoint(sp, fa, fb), s, cur))
        out.append(cur)
    return out


def transport_orbit_orthogonality(inst: TransportInstance) -> tuple:
    """``(<v', p(a) + p(s)>, <v', p(b)>)`` for ``v' = transport_unstable(inst)``."""
    sp = inst.point.space
    pa, pb = inst.point.pa, inst.point.pb
    _require_zero(_dot(inst.v, sp.covector(pa)), "<v, p(a)>")
    _require_zero(_dot(inst.v, sp.covector(pb)), "<v, p(b)>")
    v1 = _vec(transport_unstable(inst))
    ps = sp.p(inst.s)
    x = _dot(v1, sp.covector(tuple(p + q for p, q in zip(pa, ps))))
    y = _dot(v1, sp.covector(pb))
    return _out((x, y))


def leaves_subspace(result: HolonomyResult, basis) -> bool:
    """True when the holonomy image is outside ``span(basis)`` (exact)."""
    from . import exact as ex
    return not ex.contains([list(r) for r in basis], list(result.composed)) if basis else any(result.composed)


# --- random instances ----------------------------------------------------------------

def standard_form(n: int) -> list:
    J = [[0] * n for _ in range(n)]
    for k in range(0, n - 1, 2):
        J[k][k + 1] = 1
        J[k + 1][k] = -1
    return J


def random_symplectic_form(rng, n: int, moves: int = 6) -> list:
    """``M^T J0 M`` for a random integer symplectic ``M`` (product of transvections)."""
    J0 = np.array(standard_form(n), dtype=np.int64)
    M = np.identity(n, dtype=np.int64)
    for _ in range(moves):
        u = rng.integers(-1, 2, size=n)
        k = 1 if rng.integers(2) else -1
        # x -> x + k <u, x> u with <u, x> = u^T J0 x
        M = (np.identity(n, dtype=np.int64) + k * np.outer(u, u @ J0)) @ M
    return (M.T @ J0 @ M).tolist()


def _rand_vec(rng, n, den=6):
    r = rng.integers(1, 13, size=(2, n)).tolist()
    return [mpq(p - 6, q % den + 1) for p, q in zip(r[0], r[1])]


def random_pairing_space(rng, dim: int, extra: int = 0) -> PairingSpace:
    """Random symplectic form; ``extra > 0`` adds a kernel of that size to ``P``."""
    J = random_symplectic_form(rng, dim)
    P = None
    if extra:
        P = [[int(i == j) for j in range(dim)] +
             [int(x) for x in rng.integers(-2, 3, size=extra)] for i in range(dim)]
    return PairingSpace.from_matrix(J, P)


def random_square_instance(rng, dim: int = 4, extra: int = 0, space: PairingSpace | None = None):
    """A random valid ``(point, delta, eps, v)`` in absolute dimension ``dim``.

    A fresh random space is drawn unless ``space`` is given.
    """
    if space is None:
        space = random_pairing_space(rng, dim, extra)
    dim = space.abs_dim
    rel = space.rel_dim
    while True:
        a = _rand_vec(rng, rel)
        b = _rand_vec(rng, rel)
        area = space.pair(space.p(a), space.p(b))
        if area:
            b = [x / area for x in b]
            break
    pt = FramedPoint(space, a, b)
    ca, cb = space.covector(pt.pa), space.covector(pt.pb)

    def off(x, lift_a, lift_b, px):
        # x - <x, b> a + <x, a> b, using <a, b> = 1
        xa, xb = _dot(px, ca), _dot(px, cb)
        return tuple(xi - xb * ai + xa * bi for xi, ai, bi in zip(x, lift_a, lift_b))

    d0 = _rand_vec(rng, rel)
    delta = off(d0, a, b, space.p(d0))
    w = _rand_vec(rng, dim)
    v = off(w, pt.pa, pt.pb, w)
    eps = mpq(int(rng.integers(-5, 6)), int(rng.integers(1, 5)))
    return pt, delta, eps, v
