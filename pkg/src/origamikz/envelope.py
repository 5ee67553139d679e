"""Affine fit of an orbit cloud in period coordinates.

Points are sampled from the ``GL(2, R)+`` orbit of an origami: a random
short word in ``T`` and ``S`` moves to a relabeled surface, a near-identity
matrix perturbs its periods, and the inverse cocycle pulls them back to the
marking of the base surface.  The cloud is then fitted by the smallest real
affine subspace, whose complex structure and projection to absolute
cohomology are checked.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import exact as ex
from .dynamics import MOVE_MATRICES, apply_move
from .errors import DimensionMismatch
from .homology import PeriodCoordinates, homology
from .lyapunov import SubspaceBasis
from .origami import Origami

SCOPE_NOTE = ("affine envelope fitted on a sampled GL(2,R)+ orbit only; "
              "the envelope construction itself is not computed")


@dataclass
class OrbitCloud:
    points: list
    base: Origami
    seed: int
    determinants: list = field(default_factory=list)
    words: list = field(default_factory=list)

    def array(self) -> np.ndarray:
        """Rows ``(x_row, y_row)`` in ``R^(2k)``."""
        return np.array([np.concatenate([p.x_row, p.y_row]) for p in self.points])

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "seed": self.seed,
            "points": [{"x": p.x_row.tolist(), "y": p.y_row.tolist(), "det": d, "word": w}
                       for p, d, w in zip(self.points, self.determinants, self.words)],
        }


@dataclass
class AffineFit:
    T_real: SubspaceBasis
    residual: float
    complex_check: bool
    complex_defect: float
    dimension: int
    singular_values: list
    tol: float
    notes: list = field(default_factory=lambda: [SCOPE_NOTE])

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "T_real": self.T_real.basis,
            "T_real_dim": self.T_real.dim,
            "residual": self.residual,
            "complex_check": "pass" if self.complex_check else "fail",
            "complex_defect": self.complex_defect,
            "singular_values": self.singular_values,
            "tol": self.tol,
            "notes": list(self.notes),
        }

    def singular_values_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("index", "singular_value", "retained"))
        for i, s in enumerate(self.singular_values):
            w.writerow((i, repr(s), int(i < self.dimension)))
        return buf.getvalue()


def _word_to_base(o: Origami, word: str):
    """Surface reached by ``word`` and ``(G, A^-1)`` mapping its periods back."""
    hd = homology(o)
    G = np.identity(2)
    A = ex.identity(hd.rel_rank)
    cur = o
    for m in word:
        cur, c = apply_move(cur, m)
        G = np.array(MOVE_MATRICES[m], dtype=float) @ G
        A = ex.matmul(c.rel_block, A)
    return cur, G, np.array(ex.inverse(A), dtype=float)


def sample_orbit(o: Origami, count: int = 200, seed: int = 0, spread: float = 0.3,
                 max_word: int = 3) -> OrbitCloud:
    """``count`` points of the ``GL(2,R)+`` orbit, all in the marking of ``o``."""
    rng = np.random.default_rng(seed)
    cache = {}
    pts, dets, words = [], [], []
    for _ in range(count):
        length = int(rng.integers(0, max_word + 1))
        word = "".join(rng.choice(["T", "S"], size=length)) if length else ""
        if word not in cache:
            cache[word] = _word_to_base(o, word)
        cur, _, Ainv = cache[word]
        h = np.identity(2) + spread * rng.standard_normal((2, 2))
        if np.linalg.det(h) <= 0:
            h[:, 0] *= -1
        h *= np.exp(0.5 * spread * rng.standard_normal())
        hd = homology(cur)
        x, y = h @ np.array([hd.rel_a, hd.rel_b], dtype=float)
        pts.append(PeriodCoordinates(Ainv @ x, Ainv @ y))
        dets.append(float(np.linalg.det(h)))
        words.append(word)
    return OrbitCloud(pts, o, seed, dets, words)


def _span_defect(vectors, basis) -> float:
    """Largest distance of unit ``vectors`` to the orthonormal row ``basis``."""
    if len(vectors) == 0:
        return 0.0
    V = np.atleast_2d(vectors)
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    if len(basis) == 0:
        return 1.0
    R = V - (V @ basis.T) @ basis
    return float(np.linalg.norm(R, axis=1).max())


def affine_fit(cloud: OrbitCloud, tol: float = 1e-9) -> AffineFit:
    """Centered SVD fit; rank counts singular values above ``tol * max``."""
    X = cloud.array()
    k = X.shape[1] // 2
    C = X - X.mean(axis=0)
    _, s, vt = np.linalg.svd(C, full_matrices=False)
    dim = int((s > tol * s[0]).sum()) if len(s) and s[0] > 0 else 0
    D = vt[:dim]
    resid = float(np.linalg.norm(C - (C @ D.T) @ D, axis=1).max()) if len(C) else 0.0
    # complex rotation (x, y) -> (-y, x)
    rotated = np.hstack([-D[:, k:], D[:, :k]]) if dim else np.zeros((0, 2 * k))
    defect = _span_defect(rotated, D) if dim else 0.0
    parts = np.vstack([D[:, :k], D[:, k:]]) if dim else np.zeros((0, k))
    if dim:
        _, ps, pvt = np.linalg.svd(parts, full_matrices=False)
        tr = pvt[ps > tol * max(ps[0], 1.0)]
    else:
        tr = np.zeros((0, k))
    T = SubspaceBasis(len(tr), tr.tolist(), "relative", tol)
    ok = bool(defect <= max(1e-6, 1e3 * tol) and dim == 2 * len(tr))
    return AffineFit(T, resid, ok, defect, dim, [float(x) for x in s], tol)


def rationalize_basis(vectors, tol: float = 1e-9, max_den: int = 64):
    """Exact basis with the same span as the float ``vectors``, or ``None``.

    The float rows are brought to reduced row echelon form, entries are
    snapped to fractions with denominator at most ``max_den``, and the snap
    is accepted only if every entry moved by less than ``tol``.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.size == 0:
        return []
    q, r = np.linalg.qr(V.T)
    rank = int((np.abs(np.diag(r)) > tol * max(1.0, np.abs(r).max())).sum())
    B = q[:, :rank].T
    # float RREF with partial pivoting on columns
    M = B.copy()
    pivots = []
    row = 0
    for col in range(M.shape[1]):
        if row == rank:
            break
        piv = row + int(np.argmax(np.abs(M[row:, col])))
        if abs(M[piv, col]) < 1e-8:
            continue
        M[[row, piv]] = M[[piv, row]]
        M[row] /= M[row, col]
        for i in range(rank):
            if i != row:
                M[i] -= M[i, col] * M[row]
        pivots.append(col)
        row += 1
    out = []
    for r_ in M[:rank]:
        fr = [ex.rationalize(float(x), max_den) for x in r_]
        if max(abs(float(f) - x) for f, x in zip(fr, r_)) > max(tol, 1e-7):
            return None
        out.append(fr)
    return ex.span_basis(out)


def tangent_report(fit: AffineFit, hd, cert, tol: float = 1e-9, max_den: int = 64) -> dict:
    """Project the fitted tangent to absolute cohomology and pair it with ``F``."""
    k = hd.rel_rank
    T = np.array(fit.T_real.basis, dtype=float).reshape(-1, k) if fit.T_real.dim else np.zeros((0, k))
    if T.shape[1] != k:
        raise DimensionMismatch(f"tangent vectors of length {T.shape[1]}, expected {k}")
    P = np.array(hd.P, dtype=float)
    pT = T @ P.T
    exact_basis = rationalize_basis(pT, tol, max_den) if len(pT) else []
    F = [list(f) for f in cert.basis]
    J = [list(r) for r in hd.J]
    Jf = np.array(J, dtype=float)
    rows = []
    violated = False
    if exact_basis is not None:
        for i, t in enumerate(exact_basis):
            for j, f in enumerate(F):
                val = ex.bilinear(t, J, f)
                status = "exact-zero" if val == 0 else "violated"
                violated |= val != 0
                rows.append({"tangent": i, "F": j, "value": str(val), "status": status})
    else:
        for i, t in enumerate(pT):
            for j, f in enumerate(F):
                val = float(t @ Jf @ np.array(f, dtype=float))
                status = "numerically-zero" if abs(val) < tol else "violated"
                violated |= abs(val) >= tol
                rows.append({"tangent": i, "F": j, "value": val, "status": status})
    taut = hd.taut_plane()
    equals_taut = exact_basis is not None and ex.same_span(exact_basis, taut)
    contains_taut = (
        ex.is_subspace(taut, exact_basis) if exact_basis is not None
        else max(_taut_residuals(taut, pT)) < 1e-6
    )
    return {
        "p_tangent": [[str(x) for x in r] for r in exact_basis] if exact_basis is not None else pT.tolist(),
        "rationalized": exact_basis is not None,
        "equals_tautological_plane": equals_taut,
        "contains_tautological_plane": bool(contains_taut),
        "pairings": rows,
        "status": "violated" if violated else "pass",
        "tol": tol,
        "max_den": max_den,
        "notes": [SCOPE_NOTE],
    }


def _taut_residuals(taut, pT):
    if len(pT) == 0:
        return [1.0]
    q, _ = np.linalg.qr(np.asarray(pT, dtype=float).T)
    out = []
    for t in taut:
        x = np.array(t, dtype=float)
        x /= np.linalg.norm(x)
        out.append(float(np.linalg.norm(x - q @ (q.T @ x))))
    return out
