"""Exact linear algebra over the rationals.

Matrices are plain lists of rows, entries are ``int`` or ``fractions.Fraction``.
Subspaces are represented by lists of basis vectors (rows).  Nothing here
touches floating point except :func:`rationalize`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vector = list
Matrix = list


def frac_matrix(rows: Iterable[Iterable]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def as_int_matrix(rows: Iterable[Iterable]) -> Matrix:
    """Convert to an int matrix, raising if an entry is not integral."""
    out = []
    for row in rows:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError(f"non-integral entry {x}")
            r.append(int(x))
        out.append(r)
    return out


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence) -> Vector:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def dot(u: Sequence, w: Sequence) -> object:
    return sum(x * y for x, y in zip(u, w))


def bilinear(u: Sequence, form: Matrix, w: Sequence) -> object:
    """``u^T form w``."""
    return dot(u, matvec(form, w))


def add(u: Sequence, w: Sequence) -> Vector:
    return [x + y for x, y in zip(u, w)]


def sub(u: Sequence, w: Sequence) -> Vector:
    return [x - y for x, y in zip(u, w)]


def scale(c, u: Sequence) -> Vector:
    return [c * x for x in u]


def is_zero(u: Sequence) -> bool:
    return all(x == 0 for x in u)


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in row] for row in a]
    if not m:
        return [], []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1]) if a else 0


def nullspace(a: Matrix, ncols: int | None = None) -> list[Vector]:
    """Basis of ``{x : a x = 0}``."""
    if not a:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    n = len(a[0])
    r, piv = rref(a)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(r, piv):
            x[p] = -row[f]
        basis.append(x)
    return basis


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    r, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r]


def det(a: Matrix) -> Fraction:
    m = [[Fraction(x) for x in row] for row in a]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def solve(a: Matrix, b: Sequence) -> Vector | None:
    """One solution of ``a x = b`` or ``None`` if inconsistent."""
    n = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    r, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(r, piv):
        x[p] = row[n]
    return x


# --- subspaces -------------------------------------------------------------

def span_basis(vectors: Sequence[Sequence]) -> list[Vector]:
    """Echelon basis of the span (canonical: equal spans give equal output)."""
    vectors = [v for v in vectors]
    if not vectors:
        return []
    return rref(vectors)[0]


def dim(vectors: Sequence[Sequence]) -> int:
    return rank(list(vectors)) if vectors else 0


def contains(basis: Sequence[Sequence], v: Sequence) -> bool:
    if is_zero(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [list(v)]) == rank(list(basis))


def is_subspace(small: Sequence[Sequence], big: Sequence[Sequence]) -> bool:
    return all(contains(big, v) for v in small)


def same_span(u: Sequence[Sequence], w: Sequence[Sequence]) -> bool:
    return span_basis(u) == span_basis(w)


def coordinates(basis: Sequence[Sequence], v: Sequence) -> Vector | None:
    """Coefficients ``c`` with ``sum c_i basis_i = v``."""
    if not basis:
        return [] if is_zero(v) else None
    return solve(transpose([list(b) for b in basis]), v)


def intersection(u: Sequence[Sequence], w: Sequence[Sequence], n: int) -> list[Vector]:
    """Intersection of two spans in ``Q^n``."""
    if not u or not w:
        return []
    # x = sum a_i u_i = sum b_j w_j  <=>  [U^T | -W^T] (a, b) = 0
    cols = [list(x) for x in u] + [[-y for y in x] for x in w]
    rel = nullspace(transpose(cols))
    k = len(u)
    out = [
        [sum(c * x[i] for c, x in zip(r[:k], u)) for i in range(n)] for r in rel
    ]
    return span_basis(out)


def orthogonal_complement(basis: Sequence[Sequence], form: Matrix, n: int) -> list[Vector]:
    """``{x : b^T form x = 0 for all b in basis}``."""
    if not basis:
        return span_basis([[int(i == j) for j in range(n)] for i in range(n)])
    rows = [[sum(b[i] * form[i][j] for i in range(n)) for j in range(n)] for b in basis]
    return span_basis(nullspace(rows, n))


def is_invariant(basis: Sequence[Sequence], g: Matrix) -> bool:
    """True when ``g`` maps the span of ``basis`` into itself."""
    return all(contains(basis, matvec(g, b)) for b in basis)


def restrict(basis: Sequence[Sequence], g: Matrix) -> Matrix:
    """Matrix of ``g`` on an invariant span, acting on coefficient columns."""
    cols = []
    for b in basis:
        c = coordinates(basis, matvec(g, b))
        if c is None:
            raise ValueError("subspace is not invariant")
        cols.append(c)
    return transpose(cols)


def gram(basis: Sequence[Sequence], form: Matrix) -> Matrix:
    return [[bilinear(u, form, w) for w in basis] for u in basis]


def rationalize(x: float, max_den: int) -> Fraction:
    return Fraction(x).limit_denominator(max_den)


def key(m: Matrix) -> tuple:
    """Hashable canonical form of a rational matrix."""
    return tuple(tuple(Fraction(x) for x in row) for row in m)
