"""Lyapunov spectrum of a cocycle stream by QR re-orthonormalisation."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, asdict

import numpy as np
from numba import njit

from .errors import DegenerateStream, NoConvergence

CHUNK = 4096


@njit(cache=True)
def _qr_chain(mats, Q, logs):
    """Push ``Q`` through ``mats`` with a Gram-Schmidt QR after every step.

    ``logs[k, j]`` receives ``log |R_jj|`` of step ``k``; returns the final
    frame, or a frame with a zero column when the product degenerates.
    """
    k, d, _ = mats.shape
    m = Q.shape[1]
    for s in range(k):
        Z = mats[s] @ Q
        for j in range(m):
            for i in range(j):
                r = 0.0
                for t in range(d):
                    r += Z[t, i] * Z[t, j]
                for t in range(d):
                    Z[t, j] -= r * Z[t, i]
            nrm = 0.0
            for t in range(d):
                nrm += Z[t, j] * Z[t, j]
            nrm = np.sqrt(nrm)
            if not nrm > 1e-300 or not np.isfinite(nrm):
                logs[s, j] = np.nan
                return Z
            for t in range(d):
                Z[t, j] /= nrm
            logs[s, j] = np.log(nrm)
        Q = Z
    return Q


@dataclass
class LyapunovReport:
    exponents: list
    stderr: list
    steps: int
    wall_seed: int
    normalization_factor: float
    raw_exponents: list = field(default_factory=list)
    raw_stderr: list = field(default_factory=list)
    space: str = "absolute"
    blocks: int = 20
    total_time: float = 0.0
    parallelism: int = 1
    zero_tol: float = 0.05
    metadata: dict = field(default_factory=dict)

    def near_zero(self, tol: float | None = None) -> list:
        """Indices of exponents with ``|l| <= tol`` whose 3-sigma interval covers 0."""
        tol = self.zero_tol if tol is None else tol
        return [
            i for i, (l, s) in enumerate(zip(self.exponents, self.stderr))
            if abs(l) <= tol and abs(l) <= 3 * s + 1e-15
        ]

    def to_json(self) -> dict:
        return asdict(self)

    def csv_rows(self):
        yield ("index", "estimate", "stderr", "steps", "seed")
        for i, (l, s) in enumerate(zip(self.exponents, self.stderr)):
            yield (i, l, s, self.steps, self.wall_seed)


def _unpack(item, space):
    if hasattr(item, "matrix"):
        return item.matrix(space), item.time
    m, t = item
    return np.asarray(m, dtype=float), float(t)


def estimate_spectrum(stream, dim: int, steps: int, blocks: int = 20, seed: int = 0,
                      space: str = "absolute", zero_tol: float = 0.05) -> LyapunovReport:
    """Benettin estimate of the top ``dim`` exponents.

    ``stream`` yields either ``StreamStep`` objects or ``(matrix, time)``
    pairs.  Exponents are the summed log-diagonals of the QR factors divided
    by the elapsed time, then rescaled so the top one equals 1 (when it is
    positive).  The standard error comes from the spread of per-block
    estimates.
    """
    if blocks < 10 or steps < blocks:
        raise ValueError("need steps >= blocks >= 10")
    rng = np.random.default_rng(seed)
    it = iter(stream)
    first, t0 = _unpack(next(it), space)
    d = first.shape[0]
    if dim > d:
        raise ValueError(f"dim {dim} exceeds matrix dimension {d}")
    Q, _ = np.linalg.qr(rng.standard_normal((d, dim)))
    bounds = np.linspace(0, steps, blocks + 1).astype(int)
    step_logs = np.empty((steps, dim))
    step_time = np.empty(steps)
    items = itertools.chain([(first, t0)], (_unpack(x, space) for x in it))
    done = 0
    while done < steps:
        chunk = list(itertools.islice(items, min(CHUNK, steps - done)))
        if not chunk:
            raise ValueError(f"stream ended after {done} steps")
        mats = np.stack([np.asarray(a, dtype=float) for a, _ in chunk])
        logs = step_logs[done: done + len(chunk)]
        Q = _qr_chain(mats, np.ascontiguousarray(Q), logs)
        if np.isnan(logs).any():
            bad = done + int(np.argwhere(np.isnan(logs))[0, 0])
            raise DegenerateStream(f"singular product at step {bad}")
        step_time[done: done + len(chunk)] = [t for _, t in chunk]
        done += len(chunk)
    block_logs = np.add.reduceat(step_logs, bounds[:-1], axis=0)
    block_time = np.add.reduceat(step_time, bounds[:-1])
    if block_time.sum() <= 0:
        block_time = np.diff(bounds).astype(float)
    raw = block_logs.sum(axis=0) / block_time.sum()
    per_block = block_logs / block_time[:, None]
    raw_err = per_block.std(axis=0, ddof=1) / math.sqrt(blocks)
    order = np.argsort(-raw, kind="stable")
    raw, raw_err = raw[order], raw_err[order]
    factor = 1.0 / raw[0] if raw[0] > 1e-12 else 1.0
    return LyapunovReport(
        exponents=[float(x) for x in raw * factor],
        stderr=[float(x) for x in raw_err * abs(factor)],
        steps=steps,
        wall_seed=seed,
        normalization_factor=float(factor),
        raw_exponents=[float(x) for x in raw],
        raw_stderr=[float(x) for x in raw_err],
        space=space,
        blocks=blocks,
        total_time=float(block_time.sum()),
        zero_tol=zero_tol,
    )


@dataclass
class SubspaceBasis:
    dim: int
    basis: list
    space: str = "absolute"
    tolerance: float = 0.0
    meta: dict = field(default_factory=dict)


def top_subspace(stream, steps: int, space: str = "absolute", seed: int = 0,
                 tol: float = 1e-8) -> SubspaceBasis:
    """Forward power iteration for the dominant Oseledets direction.

    Two independent random starts are iterated with the same products; the
    direction is accepted only when both agree (up to sign) to within
    ``tol``.  ``meta["node"]`` records the fibre the final vector lives in.
    """
    rng = np.random.default_rng(seed)
    v = None
    node = None
    for item in itertools.islice(stream, steps):
        A, _ = _unpack(item, space)
        if v is None:
            v = rng.standard_normal((A.shape[0], 2))
            v /= np.linalg.norm(v, axis=0)
        v = A @ v
        norms = np.linalg.norm(v, axis=0)
        if not np.all(norms > 0):
            raise NoConvergence("iterate collapsed to zero")
        v /= norms
        node = getattr(item, "node", None)
    if v is None:
        raise NoConvergence("empty stream")
    cos = abs(float(v[:, 0] @ v[:, 1]))
    sin = math.sqrt(max(0.0, 1.0 - cos * cos))
    if sin > tol:
        raise NoConvergence(f"independent starts disagree (sin angle {sin:.3e})")
    return SubspaceBasis(1, [list(map(float, v[:, 0]))], space, tol,
                         meta={"node": node, "agreement": sin})


def plane_residual(vec, plane) -> float:
    """Euclidean distance of the unit vector ``vec`` to ``span(plane)``."""
    B = np.array(plane, dtype=float).T
    x = np.asarray(vec, dtype=float)
    x = x / np.linalg.norm(x)
    coef, *_ = np.linalg.lstsq(B, x, rcond=None)
    return float(np.linalg.norm(B @ coef - x))


@dataclass
class SymmetryCheck:
    passed: bool
    margins: list


def spectrum_symmetry_check(report: LyapunovReport, sigmas: float = 3.0) -> SymmetryCheck:
    """``l_i + l_{d+1-i}`` within ``sigmas`` combined standard errors of 0."""
    ex, se = report.exponents, report.stderr
    d = len(ex)
    margins = []
    ok = True
    for i in range(d // 2 + d % 2):
        j = d - 1 - i
        s = abs(ex[i] + ex[j])
        allowed = sigmas * math.hypot(se[i], se[j])
        margins.append({"pair": (i, j), "sum": s, "allowed": allowed})
        ok &= s <= allowed + 1e-12
    return SymmetryCheck(bool(ok), margins)
