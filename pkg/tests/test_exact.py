from fractions import Fraction

import sympy
from hypothesis import given, strategies as st

from origamikz import exact as ex

small = st.integers(-4, 4)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: matrices(r, c))))
def test_rank_and_nullspace_match_sympy(m):
    assert ex.rank(m) == sympy.Matrix(m).rank()
    ncols = len(m[0])
    ns = ex.nullspace(m, ncols)
    assert len(ns) == ncols - sympy.Matrix(m).rank()
    for v in ns:
        assert ex.is_zero(ex.matvec(m, v))


@given(st.integers(1, 4).flatmap(lambda n: matrices(n, n)))
def test_det_and_inverse_match_sympy(m):
    d = ex.det(m)
    assert d == sympy.Matrix(m).det()
    if d != 0:
        inv = ex.inverse(m)
        assert ex.matmul(m, inv) == ex.identity(len(m))


@given(matrices(3, 4), matrices(2, 4))
def test_intersection_dimension_formula(u, w):
    n = 4
    i = ex.intersection(u, w, n)
    assert ex.dim(i) == ex.dim(u) + ex.dim(w) - ex.dim(u + w)
    for v in i:
        assert ex.contains(u, v) and ex.contains(w, v)


def test_orthogonal_complement_of_standard_form():
    J = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    comp = ex.orthogonal_complement([[1, 0, 0, 0]], J, 4)
    assert ex.same_span(comp, [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def test_rationalize():
    assert ex.rationalize(0.3333333333, 64) == Fraction(1, 3)
    assert ex.rationalize(-2.5, 64) == Fraction(-5, 2)
