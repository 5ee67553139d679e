"""Homology, cohomology and period coordinates of an origami.

Bases are built from a tree-cotree decomposition of the square complex:

* a spanning tree ``T`` of the 1-skeleton,
* a spanning tree ``T*`` of the dual graph using edges outside ``T``,
* the ``2g`` remaining edges, each closed up through ``T`` into a cycle.

The non-cotree edges form a Z-basis of ``C_1 / im d_2 = H_1(M, Sigma)``, so a
relative cocycle is determined by its values there; the cotree values follow
by peeling faces off ``T*``.  The closed cycles are then changed by an integral
symplectic transformation so that the intersection form is the standard one.

Coordinates.  The relative homology basis is ``(gamma_1..gamma_2g, t_1..t_{s-1})``
with ``gamma`` closed cycles and ``t`` the tree edges (paths between distinct
points of ``Sigma``).  A relative cohomology class is written by its values on
that basis (its period vector), an absolute class by its values on the
``gamma``.  So ``p`` is ``[I | 0]`` and ``ker p`` is spanned by the last
``s - 1`` coordinates.

The pairing ``J`` is the cup product evaluated on the fundamental class.  On a
unit square with edges bottom ``B``, right ``R``, top ``T``, left ``L`` the
cubical cup product of two 1-cochains is ``a(B) b(R) - a(L) b(T)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import exact as ex
from .errors import DimensionMismatch, SingularMatrix
from .origami import Origami, perm_inverse, stratum


@dataclass(frozen=True)
class HomologyData:
    origami: Origami
    genus: int
    n_singularities: int
    abs_rank: int
    rel_rank: int
    # rows are edge chains (length 2n)
    abs_basis: tuple
    rel_basis: tuple
    # columns are cocycles dual to rel_basis, stored as rows of its transpose
    cochains: tuple
    J: tuple
    P: tuple
    taut_a: tuple
    taut_b: tuple
    rel_a: tuple
    rel_b: tuple

    @property
    def area(self) -> int:
        return self.origami.n_squares

    def to_rel(self, cochain) -> list:
        """Period vector (relative coordinates) of an edge cocycle."""
        return [ex.dot(r, cochain) for r in self.rel_basis]

    def to_cochain(self, rel) -> list:
        """Edge cocycle representing relative coordinates ``rel``."""
        return [ex.dot(row, rel) for row in self.cochains]

    def project(self, rel) -> list:
        """The restriction ``p`` to absolute cohomology."""
        if len(rel) != self.rel_rank:
            raise DimensionMismatch(f"expected {self.rel_rank} relative coordinates")
        return list(rel[: self.abs_rank])

    def lift(self, absolute) -> list:
        """Section of ``p`` (zero on the kernel coordinates)."""
        return list(absolute) + [0] * (self.rel_rank - self.abs_rank)

    def taut_plane(self) -> list:
        return [list(self.taut_a), list(self.taut_b)]

    def to_json(self) -> dict:
        return {
            "origami": self.origami.to_json(),
            "genus": self.genus,
            "n_singularities": self.n_singularities,
            "abs_rank": self.abs_rank,
            "rel_rank": self.rel_rank,
            "abs_basis": [list(r) for r in self.abs_basis],
            "rel_basis": [list(r) for r in self.rel_basis],
            "J": [list(r) for r in self.J],
            "P": [list(r) for r in self.P],
            "taut_a": list(self.taut_a),
            "taut_b": list(self.taut_b),
        }


# --- cell complex --------------------------------------------------------------

def edge_endpoints(o: Origami):
    """``(tail, head)`` vertex of every edge."""
    n = o.n_squares
    vert = o.vertex_of_corner()
    ends = [(vert[i], vert[o.h[i]]) for i in range(n)]
    ends += [(vert[i], vert[o.v[i]]) for i in range(n)]
    return ends


def face_boundary(o: Origami, i: int) -> list:
    """Boundary of square ``i`` as an edge chain (counterclockwise)."""
    n = o.n_squares
    c = [0] * (2 * n)
    c[i] += 1
    c[n + o.h[i]] += 1
    c[o.v[i]] -= 1
    c[n + i] -= 1
    return c


def boundary_matrices(o: Origami):
    """``(d1, d2)`` as integer matrices (columns indexed by cells)."""
    n = o.n_squares
    nv = len(set(o.vertex_of_corner()))
    d1 = ex.zeros(nv, 2 * n)
    for e, (a, b) in enumerate(edge_endpoints(o)):
        d1[b][e] += 1
        d1[a][e] -= 1
    d2 = ex.transpose([face_boundary(o, i) for i in range(n)])
    return d1, d2


def cup(o: Origami, alpha, beta):
    """Cup product of two edge cochains evaluated on the fundamental class."""
    n = o.n_squares
    h, v = o.h, o.v
    return sum(
        alpha[i] * beta[n + h[i]] - alpha[n + i] * beta[v[i]] for i in range(n)
    )


def _dual_sides(o: Origami, e: int):
    """Squares on the two sides of edge ``e``."""
    n = o.n_squares
    if e < n:
        return e, perm_inverse(o.v)[e]
    i = e - n
    return i, perm_inverse(o.h)[i]


def _tree_cotree(o: Origami):
    n = o.n_squares
    ends = edge_endpoints(o)
    nv = len(set(o.vertex_of_corner()))
    adj = [[] for _ in range(nv)]
    for e, (a, b) in enumerate(ends):
        adj[a].append((e, b, 1))
        adj[b].append((e, a, -1))
    # chain from the root to each vertex along the tree
    to_root = {0: [0] * (2 * n)}
    tree = []
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for e, w, sign in adj[u]:
            if w not in to_root:
                c = list(to_root[u])
                c[e] += sign
                to_root[w] = c
                tree.append(e)
                queue.append(w)
    tree_set = set(tree)

    sq_adj = [[] for _ in range(n)]
    for e in range(2 * n):
        if e in tree_set:
            continue
        x, y = _dual_sides(o, e)
        if x != y:
            sq_adj[x].append((e, y))
            sq_adj[y].append((e, x))
    parent = {0: None}
    order = [0]
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for e, y in sq_adj[x]:
            if y not in parent:
                parent[y] = e
                order.append(y)
                queue.append(y)
    cotree = {e for e in parent.values() if e is not None}
    gens = [e for e in range(2 * n) if e not in tree_set and e not in cotree]
    cycles = []
    for e in gens:
        a, b = ends[e]
        c = [x - y for x, y in zip(to_root[a], to_root[b])]
        c[e] += 1
        cycles.append(c)
    return sorted(tree), cycles, order, parent


def _extension(o: Origami, free_edges, order, parent):
    """Matrix sending values on ``free_edges`` to the full cocycle."""
    n = o.n_squares
    k = len(free_edges)
    vals = [None] * (2 * n)
    for j, e in enumerate(free_edges):
        vals[e] = [int(i == j) for i in range(k)]
    for sq in reversed(order[1:]):
        e = parent[sq]
        bd = face_boundary(o, sq)
        acc = [0] * k
        for f, c in enumerate(bd):
            if c and f != e:
                acc = [a + c * x for a, x in zip(acc, vals[f])]
        ce = bd[e]
        if ce not in (1, -1):
            raise AssertionError("cotree edge appears twice in a face")
        vals[e] = [-ce * a for a in acc]
    return vals


def standard_symplectic(g: int):
    J = ex.zeros(2 * g, 2 * g)
    for k in range(g):
        J[2 * k][2 * k + 1] = 1
        J[2 * k + 1][2 * k] = -1
    return J


def symplectic_reduce(K):
    """Unimodular ``W`` with ``W^T K W`` standard, for unimodular skew ``K``."""
    m = len(K)
    W = ex.identity(m)
    cols = [list(c) for c in zip(*W)]

    def gram():
        return [[ex.bilinear(a, K, b) for b in cols] for a in cols]

    for p in range(0, m, 2):
        G = gram()
        while True:
            nz = [j for j in range(p + 1, m) if G[p][j] != 0]
            if not nz:
                raise ValueError("form is degenerate")
            if len(nz) == 1:
                break
            j = min(nz, key=lambda t: abs(G[p][t]))
            for l in nz:
                if l != j:
                    q = G[p][l] // G[p][j]
                    cols[l] = [x - q * y for x, y in zip(cols[l], cols[j])]
            G = gram()
        j = nz[0]
        if abs(G[p][j]) != 1:
            raise ValueError("form is not unimodular")
        cols[p + 1], cols[j] = cols[j], cols[p + 1]
        if G[p][j] == -1:
            cols[p + 1] = [-x for x in cols[p + 1]]
        G = gram()
        e, f = cols[p], cols[p + 1]
        for l in range(p + 2, m):
            a, b = G[p][l], G[p + 1][l]
            cols[l] = [x - a * y + b * z for x, y, z in zip(cols[l], f, e)]
    return ex.transpose(cols)


def _cochain_matrix(o, rel_rows, ext, free_edges):
    """Columns: cocycles dual to the chains ``rel_rows``."""
    M = [[ex.dot(r, [ext[e][j] for e in range(len(r))]) for j in range(len(free_edges))] for r in rel_rows]
    Minv = ex.as_int_matrix(ex.inverse(M))
    return ex.matmul(ext, Minv)


@lru_cache(maxsize=4096)
def homology(o: Origami) -> HomologyData:
    st = stratum(o)
    g, s = st.genus, st.n_singularities
    n = o.n_squares
    tree, cycles, order, parent = _tree_cotree(o)
    assert len(cycles) == 2 * g and len(tree) == s - 1
    cotree = set(parent.values())
    free_edges = [e for e in range(2 * n) if e not in cotree]
    ext = _extension(o, free_edges, order, parent)
    tree_rows = [[int(f == e) for f in range(2 * n)] for e in tree]

    def cochains_for(cyc):
        return _cochain_matrix(o, cyc + tree_rows, ext, free_edges)

    phi = cochains_for(cycles)
    cols = ex.transpose(phi)
    K = [[cup(o, cols[i], cols[j]) for j in range(2 * g)] for i in range(2 * g)]
    W = symplectic_reduce(K)
    Winv = ex.as_int_matrix(ex.inverse(W))
    cycles = ex.matmul(Winv, cycles) if cycles else []
    phi = cochains_for(cycles)
    cols = ex.transpose(phi)
    J = [[cup(o, cols[i], cols[j]) for j in range(2 * g)] for i in range(2 * g)]
    if J != standard_symplectic(g):
        raise AssertionError("symplectic reduction failed")
    rel_rows = cycles + tree_rows
    re_w = [1] * n + [0] * n
    im_w = [0] * n + [1] * n
    rel_a = [ex.dot(r, re_w) for r in rel_rows]
    rel_b = [ex.dot(r, im_w) for r in rel_rows]
    k = 2 * g + s - 1
    P = [[int(i == j) for j in range(k)] for i in range(2 * g)]
    tup = lambda m: tuple(tuple(r) for r in m)
    return HomologyData(
        origami=o,
        genus=g,
        n_singularities=s,
        abs_rank=2 * g,
        rel_rank=k,
        abs_basis=tup(cycles),
        rel_basis=tup(rel_rows),
        cochains=tup(phi),
        J=tup(J),
        P=tup(P),
        taut_a=tuple(rel_a[: 2 * g]),
        taut_b=tuple(rel_b[: 2 * g]),
        rel_a=tuple(rel_a),
        rel_b=tuple(rel_b),
    )


def pairing(u, w, hd: HomologyData):
    """Intersection pairing ``u^T J w`` of two absolute classes."""
    if len(u) != hd.abs_rank or len(w) != hd.abs_rank:
        raise DimensionMismatch(
            f"vectors of length {len(u)}, {len(w)} for abs_rank {hd.abs_rank}"
        )
    return ex.bilinear(u, hd.J, w)


@dataclass(frozen=True)
class PeriodCoordinates:
    x_row: np.ndarray
    y_row: np.ndarray

    def area(self, hd: HomologyData) -> float:
        k = hd.abs_rank
        J = np.array(hd.J, dtype=float)
        return float(self.x_row[:k] @ J @ self.y_row[:k])

    def as_complex(self) -> np.ndarray:
        return self.x_row + 1j * self.y_row


def period_matrix(o: Origami, g=((1.0, 0.0), (0.0, 1.0))) -> PeriodCoordinates:
    """Periods of ``g . (M, omega)`` in the fixed relative basis of ``o``."""
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2) or np.linalg.det(g) <= 0:
        raise SingularMatrix("g must be a 2x2 matrix with positive determinant")
    hd = homology(o)
    base = np.array([hd.rel_a, hd.rel_b], dtype=float)
    x, y = g @ base
    return PeriodCoordinates(x, y)
