"""Square-tiled surfaces encoded by a pair of permutations.

Squares are numbered ``0..n-1`` internally; ``h[i]`` is the square glued to
the right of square ``i`` and ``v[i]`` the square glued on top.  JSON and the
CLI use 1-based one-line notation.

Edge labels used throughout the package: edge ``i`` (``0 <= i < n``) is the
bottom side of square ``i`` (horizontal, oriented left to right) and edge
``n + i`` is the left side of square ``i`` (vertical, oriented bottom to top).
Vertex classes are labelled by the lower-left corners they contain.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from collections import Counter
from math import gcd

from .errors import NotConnected, OrigamiError, SizeMismatch


def perm_inverse(p):
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_compose(p, q):
    """``p o q``: apply ``q`` first."""
    return tuple(p[j] for j in q)


def perm_cycles(p):
    seen = [False] * len(p)
    cycles = []
    for i in range(len(p)):
        if not seen[i]:
            c = []
            j = i
            while not seen[j]:
                seen[j] = True
                c.append(j)
                j = p[j]
            cycles.append(c)
    return cycles


def is_permutation(p, n):
    return len(p) == n and sorted(p) == list(range(n))


def orbit(start, perms):
    seen = {start}
    stack = [start]
    while stack:
        i = stack.pop()
        for p in perms:
            j = p[i]
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return seen


def lcm(values):
    out = 1
    for x in values:
        out = out * x // gcd(out, x)
    return out


@dataclass(frozen=True)
class Origami:
    h: tuple
    v: tuple
    label: str = field(default="", compare=False)

    @property
    def n_squares(self) -> int:
        return len(self.h)

    @property
    def commutator(self):
        """``v h v^-1 h^-1``; its cycles are the vertex classes."""
        h, v = self.h, self.v
        return perm_compose(v, perm_compose(h, perm_compose(perm_inverse(v), perm_inverse(h))))

    def vertex_of_corner(self):
        """Map lower-left corner of each square to its vertex index."""
        out = [0] * self.n_squares
        for k, c in enumerate(perm_cycles(self.commutator)):
            for i in c:
                out[i] = k
        return out

    def relabel(self, sigma) -> "Origami":
        """Square ``i`` becomes square ``sigma[i]``."""
        inv = perm_inverse(sigma)
        h = tuple(sigma[self.h[inv[j]]] for j in range(self.n_squares))
        v = tuple(sigma[self.v[inv[j]]] for j in range(self.n_squares))
        return Origami(h, v, self.label)

    def key(self) -> tuple:
        return (self.h, self.v)

    def to_json(self) -> dict:
        return {
            "n": self.n_squares,
            "h": [i + 1 for i in self.h],
            "v": [i + 1 for i in self.v],
            "label": self.label,
        }

    def __repr__(self):
        return f"Origami(h={[i + 1 for i in self.h]}, v={[i + 1 for i in self.v]}, label={self.label!r})"


def build_origami(h, v, label: str = "", one_based: bool = False) -> Origami:
    """Validate permutation data and return an :class:`Origami`."""
    h = [int(x) - (1 if one_based else 0) for x in h]
    v = [int(x) - (1 if one_based else 0) for x in v]
    if len(h) != len(v):
        raise SizeMismatch(f"h has {len(h)} entries, v has {len(v)}")
    n = len(h)
    if n < 1:
        raise OrigamiError("an origami needs at least one square")
    for name, p in (("h", h), ("v", v)):
        if not is_permutation(p, n):
            raise OrigamiError(f"{name} is not a permutation of 1..{n}")
    if len(orbit(0, (h, v))) != n:
        raise NotConnected("<h, v> does not act transitively")
    return Origami(tuple(h), tuple(v), label)


def from_cycles(h_cycles, v_cycles, n: int, label: str = "") -> Origami:
    """Build from 1-based cycle notation, e.g. ``[(1, 2, 3, 4), (5, 6, 7, 8)]``."""

    def perm(cycles):
        p = list(range(n))
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                p[a - 1] = b - 1
        return p

    return build_origami(perm(h_cycles), perm(v_cycles), label)


def from_json(data) -> Origami:
    """Parse ``{"n": int, "h": [...], "v": [...], "label": str}`` (1-based)."""
    if isinstance(data, str):
        data = json.loads(data)
    for k in ("h", "v"):
        if k not in data:
            raise OrigamiError(f"missing field {k!r}")
        if not isinstance(data[k], list) or not all(isinstance(x, int) for x in data[k]):
            raise OrigamiError(f"field {k!r} must be a list of integers")
    n = data.get("n", len(data["h"]))
    if not isinstance(n, int) or n != len(data["h"]) or n != len(data["v"]):
        raise SizeMismatch(f"field 'n'={n!r} does not match permutation lengths")
    return build_origami(data["h"], data["v"], str(data.get("label", "")), one_based=True)


def canonical_form(o: Origami) -> tuple[Origami, tuple]:
    """Minimal lexicographic relabeling and the relabeling used.

    Every start square defines a labeling by breadth-first search through
    ``h`` then ``v``; the lexicographically least ``(h, v)`` wins, ties go to
    the smallest start square.
    """
    n = o.n_squares
    best = None
    for s in range(n):
        sigma = [-1] * n
        sigma[s] = 0
        order = [s]
        nxt = 1
        k = 0
        while k < len(order):
            i = order[k]
            k += 1
            for p in (o.h, o.v):
                j = p[i]
                if sigma[j] < 0:
                    sigma[j] = nxt
                    nxt += 1
                    order.append(j)
        sigma = tuple(sigma)
        cand = o.relabel(sigma)
        if best is None or cand.key() < best[0].key():
            best = (cand, sigma)
    return best


def isomorphic(o1: Origami, o2: Origami) -> bool:
    return canonical_form(o1)[0].key() == canonical_form(o2)[0].key()


# --- stratum -----------------------------------------------------------------

@dataclass(frozen=True)
class StratumData:
    kappa: tuple
    genus: int
    n_singularities: int


def stratum(o: Origami) -> StratumData:
    """Cone orders from the vertex cycles, genus from Euler characteristic.

    A vertex whose lower-left-corner cycle has length ``l`` has cone angle
    ``2 pi l`` and order ``l - 1``.
    """
    cycles = perm_cycles(o.commutator)
    kappa = tuple(sorted((len(c) - 1 for c in cycles), reverse=True))
    n = o.n_squares
    # V - E + F with E = 2n, F = n
    chi = len(cycles) - n
    genus = (2 - chi) // 2
    if sum(kappa) != 2 * genus - 2:
        raise AssertionError("Euler characteristic and cone orders disagree")
    return StratumData(kappa=kappa, genus=genus, n_singularities=len(cycles))


def kappa_counter(s: StratumData) -> Counter:
    return Counter(s.kappa)
