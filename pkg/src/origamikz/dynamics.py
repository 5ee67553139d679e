"""SL(2, Z) action on origamis and the Kontsevich-Zorich cocycle.

Every move is realised by an explicit chain map from the edges of the new
square complex to edge paths of the old one (both complexes tile the same
surface).  Pulling cocycles back along that chain map and reading them in the
new relative basis gives the cocycle matrix, which therefore acts on period
vectors: if ``g`` is the 2x2 matrix of the move then

    A @ (g applied to the periods of o) == periods of g.o (in its own basis).

Moves and their combinatorics (``p o q`` applies ``q`` first):

===== ===================== =================================================
move  matrix                new (h, v)
===== ===================== =================================================
T     ((1, 1), (0, 1))      (h, v o h^-1)
S     ((0, -1), (1, 0))     (v^-1, h)
L     ((1, 0), (1, 1))      (h o v^-1, v)
Lt    ((1, 0), (-1, 1))     (h o v, v)
===== ===================== =================================================
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import exact as ex
from .errors import OrbitTooLarge
from .homology import HomologyData, homology
from .origami import Origami, canonical_form, lcm, perm_compose, perm_cycles, perm_inverse

MOVE_MATRICES = {
    "T": ((1, 1), (0, 1)),
    "S": ((0, -1), (1, 0)),
    "L": ((1, 0), (1, 1)),
    "Lt": ((1, 0), (-1, 1)),
}


@dataclass(frozen=True)
class CocycleMatrix:
    rel_block: tuple
    abs_block: tuple
    word: str = ""

    @classmethod
    def from_rel(cls, rel, abs_rank: int, word: str = "") -> "CocycleMatrix":
        rel = tuple(tuple(int(x) for x in row) for row in rel)
        abs_ = tuple(tuple(row[:abs_rank]) for row in rel[:abs_rank])
        return cls(rel, abs_, word)

    @property
    def abs_rank(self) -> int:
        return len(self.abs_block)

    def __matmul__(self, other: "CocycleMatrix") -> "CocycleMatrix":
        """``self`` applied after ``other``."""
        rel = ex.matmul(self.rel_block, other.rel_block)
        return CocycleMatrix.from_rel(rel, self.abs_rank, other.word + self.word)

    def inverse(self) -> "CocycleMatrix":
        rel = ex.as_int_matrix(ex.inverse(self.rel_block))
        return CocycleMatrix.from_rel(rel, self.abs_rank, f"({self.word})^-1")

    def block(self, space: str = "absolute"):
        return self.abs_block if space == "absolute" else self.rel_block

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "rel_block": [list(r) for r in self.rel_block],
            "abs_block": [list(r) for r in self.abs_block],
        }


def identity_cocycle(hd: HomologyData) -> CocycleMatrix:
    return CocycleMatrix.from_rel(ex.identity(hd.rel_rank), hd.abs_rank, "")


def is_symplectic(m, J) -> bool:
    return ex.matmul(ex.transpose(m), ex.matmul(J, m)) == [list(r) for r in J]


def respects_projection(c: CocycleMatrix, hd: HomologyData) -> bool:
    return ex.matmul(hd.P, c.rel_block) == ex.matmul(c.abs_block, hd.P)


# --- moves -------------------------------------------------------------------

def _move(o: Origami, name: str):
    """New origami (not canonical) and the cochain pullback of the move."""
    n = o.n_squares
    h, v = o.h, o.v
    hi, vi = perm_inverse(h), perm_inverse(v)
    if name == "T":
        new = Origami(h, perm_compose(v, hi), o.label)

        def pull(f):
            return list(f[:n]) + [f[n + hi[j]] - f[hi[j]] for j in range(n)]
    elif name == "S":
        new = Origami(vi, h, o.label)

        def pull(f):
            return [-f[n + j] for j in range(n)] + [f[v[j]] for j in range(n)]
    elif name == "L":
        new = Origami(perm_compose(h, vi), v, o.label)

        def pull(f):
            return [f[vi[j]] - f[n + vi[j]] for j in range(n)] + list(f[n:])
    elif name == "Lt":
        new = Origami(perm_compose(h, v), v, o.label)

        def pull(f):
            return [f[j] + f[n + h[j]] for j in range(n)] + list(f[n:])
    else:
        raise ValueError(f"unknown move {name!r}")
    return new, pull


def _relabel_pull(sigma):
    n = len(sigma)
    inv = perm_inverse(sigma)

    def pull(f):
        return [f[inv[j]] for j in range(n)] + [f[n + inv[j]] for j in range(n)]

    return pull


def cocycle_from_pullback(src: HomologyData, dst: HomologyData, pull, word="") -> CocycleMatrix:
    cols = []
    for col in zip(*src.cochains):
        cols.append(dst.to_rel(pull(list(col))))
    return CocycleMatrix.from_rel(ex.transpose(cols), src.abs_rank, word)


def apply_move(o: Origami, name: str, canonical: bool = True):
    """Apply one move; returns ``(new origami, CocycleMatrix)``."""
    new, pull = _move(o, name)
    if canonical:
        new, sigma = canonical_form(new)
        rp = _relabel_pull(sigma)
        full = lambda f: rp(pull(f))
    else:
        full = pull
    new = Origami(new.h, new.v, o.label)
    return new, cocycle_from_pullback(homology(o), homology(new), full, name)


def act_T(o: Origami):
    return apply_move(o, "T")


def act_S(o: Origami):
    return apply_move(o, "S")


def act_L(o: Origami):
    return apply_move(o, "L")


def move_power(o: Origami, name: str, k: int, canonical: bool = False):
    """``k`` successive moves, composing the cocycles."""
    hd = homology(o)
    total = identity_cocycle(hd)
    cur = o
    for _ in range(k):
        cur, c = apply_move(cur, name, canonical=canonical)
        total = c @ total
    return cur, CocycleMatrix(total.rel_block, total.abs_block, name * k if len(name) == 1 else f"{name}^{k}")


# --- cylinders -----------------------------------------------------------------

@dataclass(frozen=True)
class Cylinder:
    direction: str
    circumference: int
    squares: tuple
    core_class: tuple
    rel_class: tuple
    height: int = 1


def cylinders(o: Origami, direction: str = "horizontal") -> list:
    """Unit-height cylinders of a direction (the ``h``- or ``v``-cycles).

    ``core_class`` is the Poincare dual ``c`` of the core curve, so that
    ``<x, c> = x(core)`` for every absolute class ``x``.  ``rel_class`` is the
    relative class counting signed crossings of the core curve.
    """
    hd = homology(o)
    n = o.n_squares
    out = []
    if direction == "horizontal":
        perm, sign = o.h, 1
    elif direction == "vertical":
        perm, sign = o.v, -1
    else:
        raise ValueError(f"unknown direction {direction!r}")
    for cyc in perm_cycles(perm):
        chi = [0] * (2 * n)
        for i in cyc:
            if direction == "horizontal":
                chi[n + i] = sign
            else:
                chi[i] = sign
        rel = hd.to_rel(chi)
        out.append(
            Cylinder(direction, len(cyc), tuple(sorted(cyc)), tuple(rel[: hd.abs_rank]), tuple(rel))
        )
    return out


def multitwist_matrix(o: Origami, direction: str = "horizontal") -> CocycleMatrix:
    """Picard-Lefschetz multitwist ``x -> x - sum k_i <p(x), c_i> c_i``.

    ``k_i = lcm(circumferences) / circumference_i``.  This is the cocycle of
    ``T^lcm`` (horizontal) or ``Lt^lcm`` (vertical), both of which fix ``o``.
    """
    hd = homology(o)
    cyls = cylinders(o, direction)
    L = lcm(c.circumference for c in cyls)
    k = hd.rel_rank
    rel = ex.identity(k)
    for c in cyls:
        mult = L // c.circumference
        # column j: image of e_j
        for j in range(k):
            coeff = mult * ex.bilinear(hd.project(_unit(k, j)), hd.J, c.core_class)
            if coeff:
                for i in range(k):
                    rel[i][j] -= coeff * c.rel_class[i]
    word = ("T" if direction == "horizontal" else "Lt") + f"^{L}"
    return CocycleMatrix.from_rel(rel, hd.abs_rank, word)


def _unit(k, j):
    return [int(i == j) for i in range(k)]


# --- Veech orbit ---------------------------------------------------------------

@dataclass
class OrbitGraph:
    base: Origami
    nodes: list
    edges: dict
    monodromy_generators: list
    path_from_base: list
    depth: list
    complete: bool
    caveats: list = field(default_factory=list)
    _index: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def index(self, o: Origami) -> int:
        return self._index[o.key()]

    @property
    def homology(self) -> HomologyData:
        return homology(self.base)

    def step(self, node: int, move: str, power: int = 1):
        """Target node and cocycle of ``move^power`` from ``node`` (cached)."""
        key = (node, move, power)
        if key not in self._cache:
            if power == 1:
                tgt, c = apply_move(self.nodes[node], move)
                t = self._index.get(tgt.key())
                if t is None:
                    t = len(self.nodes)
                    self.nodes.append(tgt)
                    self._index[tgt.key()] = t
                self._cache[key] = (t, c)
            else:
                t, c = self.step(node, move, power - 1)
                t2, c2 = self.step(t, move, 1)
                self._cache[key] = (t2, c2 @ c)
        return self._cache[key]

    def all_matrices(self):
        yield from (c for _, c in self.edges.values())
        yield from self.monodromy_generators

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "nodes": [o.to_json() for o in self.nodes],
            "edges": [
                {"source": s, "move": m, "target": t, "cocycle": c.to_json()}
                for (s, m), (t, c) in sorted(self.edges.items())
            ],
            "monodromy_generators": [c.to_json() for c in self.monodromy_generators],
            "complete": self.complete,
            "caveats": list(self.caveats),
        }


def veech_orbit(o: Origami, max_nodes: int = 500, max_depth: int | None = None,
                moves=("T", "S")) -> OrbitGraph:
    """Breadth-first search of the SL(2, Z)-orbit of ``o``.

    Generators (all expressed in the basis of the canonical base node) are
    the loops closing every non-tree edge plus the horizontal and vertical
    multitwists of every node conjugated back to the base.
    """
    base, _ = canonical_form(o)
    base = Origami(base.h, base.v, o.label)
    nodes = [base]
    index = {base.key(): 0}
    depth = [0]
    path = [identity_cocycle(homology(base))]
    edges = {}
    nontree = []
    queue = deque([0])
    complete = True
    while queue:
        x = queue.popleft()
        if max_depth is not None and depth[x] >= max_depth:
            complete = False
            continue
        for m in moves:
            y_orig, c = apply_move(nodes[x], m)
            y = index.get(y_orig.key())
            if y is None:
                if len(nodes) >= max_nodes:
                    raise OrbitTooLarge(f"orbit exceeds {max_nodes} nodes")
                y = len(nodes)
                nodes.append(y_orig)
                index[y_orig.key()] = y
                depth.append(depth[x] + 1)
                path.append(c @ path[x])
                queue.append(y)
            else:
                nontree.append((x, m, y, c))
            edges[(x, m)] = (y, c)

    inv_cache = {}

    def inv(i):
        if i not in inv_cache:
            inv_cache[i] = path[i].inverse()
        return inv_cache[i]

    gens = []
    seen = set()

    def add(c, word):
        k = c.rel_block
        if k not in seen and k != tuple(tuple(r) for r in ex.identity(len(k))):
            seen.add(k)
            gens.append(CocycleMatrix(c.rel_block, c.abs_block, word))

    for x, m, y, c in nontree:
        add(inv(y) @ (c @ path[x]), f"loop[{x}-{m}->{y}]")
    for i, node in enumerate(nodes):
        for d in ("horizontal", "vertical"):
            mt = multitwist_matrix(node, d)
            add(inv(i) @ (mt @ path[i]), f"twist[{i},{d}]")
    graph = OrbitGraph(
        base=base, nodes=nodes, edges=edges, monodromy_generators=gens,
        path_from_base=path, depth=depth, complete=complete,
        caveats=["generators: possibly proper subgroup of the monodromy image"],
        _index=index,
    )
    if not complete:
        graph.caveats.append(f"orbit truncated at depth {max_depth}")
    return graph


# --- geodesic stream -------------------------------------------------------------

def gauss_digit(rng: np.random.Generator, cap: int) -> int:
    """Partial quotient distributed by the Gauss-Kuzmin law, truncated at ``cap``."""
    x = 2.0 ** rng.random() - 1.0
    if x <= 0.0:
        return cap
    return int(min(cap, math.floor(1.0 / x)))


def gauss_digits(rng: np.random.Generator, cap: int, size: int) -> np.ndarray:
    """Vectorised :func:`gauss_digit` (same law, same truncation)."""
    x = 2.0 ** rng.random(size) - 1.0
    with np.errstate(divide="ignore"):
        a = np.floor(1.0 / x)
    return np.minimum(a, cap).astype(int)


@dataclass(frozen=True)
class StreamStep:
    cocycle: CocycleMatrix
    time: float
    node: int
    abs_array: np.ndarray = field(repr=False, compare=False, default=None)
    rel_array: np.ndarray = field(repr=False, compare=False, default=None)

    def matrix(self, space: str = "absolute") -> np.ndarray:
        return self.abs_array if space == "absolute" else self.rel_array


def geodesic_cocycle_stream(graph: OrbitGraph, seed: int, digit_cap: int = 20):
    """Cocycle along a random Teichmuller geodesic on the orbit.

    The slope is encoded by continued-fraction digits ``a_1, a_2, ...`` read
    as the word ``T^a1 L^a2 T^a3 ...``.  The flow time of step ``n`` is
    ``log(q_n / q_{n-1})`` for the continuants ``q_n`` of the digits, so the
    tautological plane grows at rate 1.
    """
    rng = np.random.default_rng(seed)
    arrays = {}
    node = 0
    ratio = math.inf
    moves = ("T", "L")
    n = 0
    digits = iter(())
    while True:
        a = next(digits, None)
        if a is None:
            digits = iter(gauss_digits(rng, digit_cap, 1024).tolist())
            a = next(digits)
        m = moves[n % 2]
        n += 1
        key = (node, m, a)
        if key not in arrays:
            t, c = graph.step(node, m, a)
            arrays[key] = (
                t, c,
                np.array(c.abs_block, dtype=float),
                np.array(c.rel_block, dtype=float),
            )
        t, c, A, R = arrays[key]
        ratio = a + (0.0 if math.isinf(ratio) else 1.0 / ratio)
        yield StreamStep(c, math.log(ratio), t, A, R)
        node = t
