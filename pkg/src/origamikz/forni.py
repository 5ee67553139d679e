"""Certified detection of the Forni subspace from monodromy generators.

The Forni subspace of a Teichmuller curve is the largest monodromy-invariant
subspace of ``H^1(M, R)`` on which the monodromy acts by isometries, i.e.
(for an integral group) through a finite group.  Detection runs in two
stages:

1. numeric screening: random positive words of growing length; directions
   expanded beyond ``norm_cap`` by some word are rejected;
2. exact stage: for every screened word ``w`` the restriction of ``w`` to a
   finite-group subspace is annihilated by the squarefree cyclotomic part of
   its characteristic polynomial, so the candidate is the largest invariant
   subspace inside the intersection of those kernels.

The two stages must agree in dimension, and the exact candidate must itself
stay below ``norm_cap`` under every screening word.  The certificate then closes the restricted generators into a finite group and
averages ``g^T g`` over it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from . import exact as ex
from .errors import DimensionMismatch, HypothesisFailure, NotInvariant
from .lyapunov import SubspaceBasis, _qr_chain

INCONCLUSIVE = "inconclusive"


@dataclass
class ForniCertificate:
    F_basis: SubspaceBasis
    closure_size: object
    restricted_group: list
    Q_F: list
    caveats: list = field(default_factory=list)
    restricted_generators: list = field(default_factory=list)

    @property
    def basis(self) -> list:
        return self.F_basis.basis

    @property
    def dim(self) -> int:
        return self.F_basis.dim

    def to_json(self) -> dict:
        s = lambda m: [[str(Fraction(x)) for x in row] for row in m]
        return {
            "dim": self.dim,
            "F_basis": s(self.basis),
            "closure_size": self.closure_size,
            "Q_F": s(self.Q_F),
            "caveats": list(self.caveats),
        }


# --- screening -------------------------------------------------------------------

def _word_growth(gens_t, idx):
    """Right singular frame and log-growth of ``W = g[idx[-1]] ... g[idx[0]]``.

    ``W^T`` is pushed through a QR chain (last factor first), which keeps
    the computation stable for arbitrarily long words.  Column ``j`` of the
    returned frame spans, with the earlier columns, the top ``j+1`` right
    singular directions of ``W``; ``growth[j]`` is the matching log singular
    value estimate.
    """
    d = gens_t.shape[1]
    logs = np.empty((len(idx), d))
    Q = _qr_chain(np.ascontiguousarray(gens_t[idx[::-1]]), np.identity(d), logs)
    return Q, logs.sum(axis=0)


def screen_bounded(gens, norm_cap=None, word_len=12, n_words=48, seed=0,
                   max_doublings=8, reject_tol=0.05, target_dim=None):
    """Numeric estimate of the bounded subspace.

    A direction is rejected by a random positive word when the word expands
    it beyond ``norm_cap``.  Returns ``(basis (k, d), words as index arrays,
    history, cap)``.  Word lengths double until the screened dimension is
    the same at two consecutive lengths and, when ``target_dim`` is given,
    equals it.
    """
    rng = np.random.default_rng(seed)
    d = len(gens[0])
    G = np.array(gens, dtype=float)
    gens_t = np.ascontiguousarray(G.transpose(0, 2, 1))
    gmax = max(np.linalg.norm(g, 2) for g in G)
    cap = norm_cap if norm_cap is not None else 10.0 * gmax
    log_cap = np.log(cap)
    history = []
    words = []
    length = word_len
    prev_dim = None
    basis = np.eye(d)
    for _ in range(max_doublings):
        words = [rng.integers(len(gens), size=length) for _ in range(n_words)]
        proj = np.zeros((d, d))
        for idx in words:
            Q, growth = _word_growth(gens_t, idx)
            big = Q[:, growth > log_cap]
            proj += big @ big.T
        proj /= n_words
        vals, vecs = np.linalg.eigh(proj)
        keep = vals < reject_tol
        basis = vecs[:, keep].T
        k = int(keep.sum())
        history.append((length, k))
        if prev_dim == k and (target_dim is None or k == target_dim):
            break
        prev_dim = k
        length *= 2
    return basis, words, history, cap


def max_log_growth(gens, words, vectors) -> float:
    """Largest ``log(|W u| / |u|)`` over ``words`` and the given vectors."""
    G = np.array(gens, dtype=float)
    U = np.array(vectors, dtype=float).T
    U /= np.linalg.norm(U, axis=0)
    worst = -np.inf
    for idx in words:
        X = U.copy()
        total = np.zeros(X.shape[1])
        for i in idx:
            X = G[i] @ X
            n = np.linalg.norm(X, axis=0)
            total += np.log(n)
            X /= n
        worst = max(worst, float(total.max()))
    return worst


# --- exact stage -----------------------------------------------------------------

def cyclotomic_part(m) -> list:
    """Coefficients (highest first) of the product of the distinct cyclotomic
    factors of the characteristic polynomial of the integer matrix ``m``."""
    x = sympy.Symbol("x")
    cp = sympy.Matrix(m).charpoly(x)
    poly = sympy.Poly(1, x)
    for fac, _ in sympy.factor_list(cp.as_expr(), x)[1]:
        p = sympy.Poly(fac, x)
        if p.degree() > 0 and p.is_cyclotomic:
            poly *= p
    return [int(c) for c in poly.all_coeffs()]


def poly_at_matrix(coeffs, m):
    n = len(m)
    out = ex.zeros(n, n)
    for c in coeffs:
        out = ex.matmul(out, m)
        for i in range(n):
            out[i][i] += c
    return out


def maximal_invariant_subspace(equations, gens, n) -> list:
    """Largest subspace inside ``{x : E x = 0}`` invariant under ``gens``."""
    eqs = ex.span_basis(equations) if equations else []
    while True:
        new = list(eqs)
        for g in gens:
            new += ex.matmul(eqs, g) if eqs else []
        new = ex.span_basis(new) if new else []
        if len(new) == len(eqs):
            break
        eqs = new
    return ex.span_basis(ex.nullspace(eqs, n)) if eqs else ex.span_basis(ex.identity(n))


def _integral_rows(vectors):
    out = []
    for v in vectors:
        den = 1
        for x in v:
            den = den * Fraction(x).denominator // np.gcd(den, Fraction(x).denominator)
        row = [int(Fraction(x) * den) for x in v]
        g = 0
        for x in row:
            g = int(np.gcd(g, abs(x)))
        out.append([x // g for x in row] if g > 1 else row)
    return out


def _angle(a, b) -> float:
    """Largest principal angle (sine) between two row spans."""
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return 1.0
    qa, _ = np.linalg.qr(np.asarray(a, dtype=float).T)
    qb, _ = np.linalg.qr(np.asarray(b, dtype=float).T)
    s = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return float(np.sqrt(max(0.0, 1.0 - min(s) ** 2)))


def exact_candidate(gens, words=()) -> list:
    """Largest invariant subspace killed by the cyclotomic part of every word.

    Contains every subspace on which the group acts through a finite group.
    """
    d = len(gens[0])
    eqs = []
    pool = list(gens) + list(words) + [ex.matmul(a, b) for a in gens for b in gens]
    for w in pool:
        c = cyclotomic_part(w)
        eqs = ex.span_basis(eqs + (poly_at_matrix(c, w) if len(c) > 1 else ex.identity(d)))
        if len(eqs) == d:
            return []
    return _integral_rows(maximal_invariant_subspace(eqs, gens, d))


def bounded_subspace(generators, norm_cap=None, word_len=12, seed=0, n_words=48,
                     max_doublings=8) -> SubspaceBasis:
    """Maximal invariant subspace with bounded action, as a rational basis.

    The exact candidate must have the screened dimension and every screened
    word must keep it below the cap; otherwise an empty basis is returned
    with an ``Inconclusive`` caveat in ``meta["caveats"]``.
    """
    gens = [[list(map(int, r)) for r in g] for g in generators]
    cand = exact_candidate(gens)
    num_basis, words, history, cap = screen_bounded(
        gens, norm_cap, word_len, n_words, seed, max_doublings, target_dim=len(cand))
    if cand:
        # short prefixes of screened words can only shrink the candidate
        prefixes = []
        for idx in words[:8]:
            w = gens[idx[0]]
            for i in idx[1:6]:
                w = ex.matmul(gens[i], w)
            prefixes.append(w)
        cand = exact_candidate(gens, prefixes)
    meta = {"screening": history, "norm_cap": float(cap), "word_len": word_len,
            "numeric_dim": len(num_basis), "exact_dim": len(cand), "caveats": []}
    growth = float(np.exp(max_log_growth(gens, words[:16], cand))) if cand else 0.0
    meta["max_growth"] = growth
    meta["angle"] = _angle(num_basis, cand) if len(num_basis) == len(cand) else 1.0
    if len(num_basis) != len(cand) or growth > cap:
        meta["caveats"].append(
            f"Inconclusive: screening dim {len(num_basis)} vs exact dim {len(cand)}, "
            f"growth {growth:.3g} vs cap {cap:.3g}"
        )
        return SubspaceBasis(0, [], "absolute", 0.0, meta)
    return SubspaceBasis(len(cand), cand, "absolute", 0.0, meta)


# --- certification ----------------------------------------------------------------

def restricted_matrices(basis, generators) -> list:
    out = []
    for g in generators:
        if not ex.is_invariant(basis, g):
            raise NotInvariant("basis is not invariant under a generator")
        out.append(ex.restrict(basis, g))
    return out


def group_closure(mats, element_cap: int):
    """All products of ``mats``; ``None`` when more than ``element_cap``."""
    if not mats:
        return []
    k = len(mats[0])
    ident = ex.key(ex.identity(k))
    elements = {ident: ex.frac_matrix(ex.identity(k))}
    frontier = [elements[ident]]
    gens = [ex.frac_matrix(m) for m in mats]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = ex.matmul(g, a)
                kb = ex.key(b)
                if kb not in elements:
                    elements[kb] = b
                    nxt.append(b)
                    if len(elements) > element_cap:
                        return None
        frontier = nxt
    return [elements[k] for k in sorted(elements)]


def certify_finite_closure(F_basis, generators, element_cap: int = 10000):
    """Order of the group generated by the restricted generators, or ``"inconclusive"``."""
    basis = F_basis.basis if isinstance(F_basis, SubspaceBasis) else F_basis
    if not basis:
        return 1
    group = group_closure(restricted_matrices(basis, generators), element_cap)
    return INCONCLUSIVE if group is None else len(group)


def averaged_form(restricted_group) -> list:
    """``(1/|G|) sum g^T g`` over a finite group, exactly."""
    k = len(restricted_group[0])
    acc = ex.frac_matrix(ex.zeros(k, k))
    for g in restricted_group:
        gtg = ex.matmul(ex.transpose(g), g)
        acc = [[x + y for x, y in zip(r, s)] for r, s in zip(acc, gtg)]
    n = len(restricted_group)
    return [[x / n for x in row] for row in acc]


def forni_certificate(generators, J, norm_cap=None, word_len=12, element_cap=10000,
                      seed=0, extra_caveats=()) -> ForniCertificate:
    basis = bounded_subspace(generators, norm_cap, word_len, seed)
    caveats = list(extra_caveats) + list(basis.meta.get("caveats", []))
    if basis.dim == 0:
        return ForniCertificate(basis, 1, [ex.identity(0)], [], caveats, [])
    restricted = restricted_matrices(basis.basis, generators)
    group = group_closure(restricted, element_cap)
    if group is None:
        caveats.append(f"Inconclusive: closure exceeds {element_cap} elements")
        return ForniCertificate(basis, INCONCLUSIVE, [], [], caveats, restricted)
    Q = averaged_form(group)
    if ex.det(ex.gram(basis.basis, J)) == 0:
        caveats.append("intersection form degenerate on F")
    return ForniCertificate(basis, len(group), group, Q, caveats, restricted)


def certified(cert: ForniCertificate) -> bool:
    return cert.closure_size != INCONCLUSIVE and not any(
        c.startswith("Inconclusive") for c in cert.caveats
    )


# --- theorem checks ---------------------------------------------------------------

def _check(claim, ok, evidence, caveats=()):
    return {"claim": claim, "status": "pass" if ok else "fail",
            "evidence": evidence, "caveats": list(caveats)}


def check_theorem_suite(hd, cert: ForniCertificate, tangent) -> list:
    """Exact checks of the intersection-form statements.

    ``tangent`` is a list of absolute vectors spanning ``p(T_R N)``.
    """
    J = [list(r) for r in hd.J]
    n = hd.abs_rank
    tangent = [list(t) for t in tangent]
    F = [list(f) for f in cert.basis]
    for v in tangent + F:
        if len(v) != n:
            raise DimensionMismatch(f"vector of length {len(v)} for abs_rank {n}")
    out = []
    bad = [
        {"tangent": i, "F": j, "pairing": str(ex.bilinear(t, J, f))}
        for i, t in enumerate(tangent) for j, f in enumerate(F)
        if ex.bilinear(t, J, f) != 0
    ]
    out.append(_check("Thm1.4c", not bad, {"nonzero_pairings": bad,
                                          "pairs_checked": len(tangent) * len(F)}))
    out.append({"claim": "Thm1.4b", "status": "not-computed",
                "evidence": {}, "caveats": ["not computed: requires Hodge metric off F"]})
    gt = ex.det(ex.gram(tangent, J)) if tangent else Fraction(1)
    out.append(_check("Thm1.5", gt != 0, {"det_J_on_tangent": str(gt),
                                         "dim_tangent": ex.dim(tangent) if tangent else 0}))
    gf = ex.det(ex.gram(F, J)) if F else Fraction(1)
    out.append(_check("Thm2.4a", gf != 0, {"det_J_on_F": str(gf), "dim_F": len(F)}))
    taut = hd.taut_plane()
    fperp = ex.orthogonal_complement(F, J, n)
    inside = ex.is_subspace(taut, fperp)
    meets = ex.intersection(taut, F, n) if F else []
    out.append(_check("Lemma4.1c", inside and not meets,
                      {"taut_in_F_perp": inside, "dim_taut_cap_F": len(meets)}))
    return out


def invariant_complement(L, generators, cert: ForniCertificate, J) -> SubspaceBasis:
    """Invariant complement of an invariant subspace ``L``.

    ``L1 = L cap L^perp`` must lie in ``F``; ``L2`` is the ``Q_F``-orthogonal
    complement of ``L1`` inside ``F``; the answer is ``L^perp cap (L2 + F^perp)``
    (``perp`` taken for the intersection form ``J``).
    """
    J = [list(r) for r in J]
    n = len(J)
    L = ex.span_basis([list(v) for v in L]) if L else []
    for g in generators:
        if L and not ex.is_invariant(L, g):
            raise NotInvariant("L is not invariant under the generators")
    F = [list(f) for f in cert.basis]
    Lperp = ex.orthogonal_complement(L, J, n)
    L1 = ex.intersection(L, Lperp, n) if L else []
    if L1 and not ex.is_subspace(L1, F):
        raise HypothesisFailure("L cap L^perp is not contained in F")
    if F:
        coords = [ex.coordinates(F, v) for v in L1]
        if coords:
            rows = [ex.matvec(cert.Q_F, c) for c in coords]
            c2 = ex.nullspace([list(r) for r in rows], len(F))
        else:
            c2 = ex.identity(len(F))
        L2 = [[sum(ci * f[j] for ci, f in zip(c, F)) for j in range(n)] for c in c2]
    else:
        L2 = []
    L3 = ex.span_basis(L2 + ex.orthogonal_complement(F, J, n))
    comp = ex.intersection(Lperp, L3, n)
    for g in generators:
        if comp and not ex.is_invariant(comp, g):
            raise AssertionError("complement is not invariant")
    if ex.dim(L + comp) != n or len(L) + len(comp) != n:
        raise AssertionError("not a direct sum decomposition")
    return SubspaceBasis(len(comp), comp, "absolute", 0.0,
                         meta={"dim_L1": len(L1), "dim_L2": len(L2)})
