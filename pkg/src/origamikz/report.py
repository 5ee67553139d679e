"""Report generation for every command.

Each ``cmd_*`` function takes a :class:`RunConfig` and returns
``(report dict, exit status)``.  Reports embed the tool version, the full
configuration and the caveat list, and are serialised deterministically.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

import numpy as np

from . import __version__
from . import exact as ex
from .connection import (FramedPoint, PairingSpace, holonomy_square, leaves_subspace,
                         random_square_instance)
from .corpus import resolve
from .dynamics import (geodesic_cocycle_stream, is_symplectic, respects_projection,
                       veech_orbit)
from .envelope import affine_fit, rationalize_basis, sample_orbit, tangent_report
from .errors import HypothesisFailure, NotInvariant, PreconditionViolated
from .forni import certified, check_theorem_suite, forni_certificate, invariant_complement
from .homology import homology
from .lyapunov import estimate_spectrum, spectrum_symmetry_check
from .origami import Origami, canonical_form, stratum

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
COMMANDS = ("stratum", "homology", "orbit", "lyapunov", "forni", "holonomy",
            "envelope", "check-theorem")


@dataclass
class RunConfig:
    command: str = "check-theorem"
    input: str = ""
    seed: int = 0
    steps: int = 100000
    word_len: int = 12
    norm_cap: float | None = None
    tol: float = 1e-9
    format: str = "json"
    out: str | None = None
    count: int = 200
    element_cap: int = 10000
    max_nodes: int = 500
    max_depth: int | None = None
    space: str = "absolute"
    max_den: int = 64
    zero_tol: float = 0.05

    @classmethod
    def field_types(cls) -> dict:
        return {f.name: f.type for f in fields(cls)}

    def echo(self) -> dict:
        return asdict(self)


@dataclass
class TheoremReport:
    claims: list
    caveats: list = field(default_factory=list)

    def status(self) -> int:
        if any(c["status"] == "fail" for c in self.claims):
            return EXIT_FAIL
        if any(c["status"] == "inconclusive" for c in self.claims):
            return EXIT_INCONCLUSIVE
        return EXIT_OK

    def to_json(self) -> dict:
        return {"claims": self.claims, "caveats": self.caveats}


# --- serialisation --------------------------------------------------------------------

def normalize(obj):
    """JSON-ready copy: floats at 12 significant digits, exact values as strings."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return float(f"{x:.12g}")
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(report: dict) -> str:
    return json.dumps(normalize(report), sort_keys=True, indent=2) + "\n"


def to_text(report: dict) -> str:
    lines = [f"origamikz {report.get('version', '')} :: {report.get('command', '')}"]
    if "claims" in report:
        for c in report["claims"]:
            lines.append(f"{c['claim']:<24} {c['status']}")
    for k in sorted(report):
        if k in ("claims", "config", "version", "command"):
            continue
        v = normalize(report[k])
        s = json.dumps(v, sort_keys=True)
        lines.append(f"{k}: {s if len(s) < 200 else s[:197] + '...'}")
    return "\n".join(lines) + "\n"


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "csv_rows" in report:
        for row in report["csv_rows"]:
            w.writerow(normalize(list(row)))
    elif "claims" in report:
        w.writerow(("claim", "status"))
        for c in report["claims"]:
            w.writerow((c["claim"], c["status"]))
    else:
        w.writerow(("key", "value"))
        for k in sorted(report):
            v = report[k]
            if isinstance(v, (int, float, str, bool)) or v is None:
                w.writerow((k, normalize(v)))
    return buf.getvalue()


# --- helpers ----------------------------------------------------------------------------

def load_origami(cfg: RunConfig) -> Origami:
    """Input surface in canonical labeling, so every module shares one basis."""
    o = resolve(cfg.input)
    c, _ = canonical_form(o)
    return Origami(c.h, c.v, o.label)


def _base(cfg: RunConfig, command: str) -> dict:
    return {"version": __version__, "command": command, "config": cfg.echo(), "caveats": []}


def _certificate(cfg, graph):
    hd = graph.homology
    gens = [c.abs_block for c in graph.monodromy_generators]
    return forni_certificate(gens, hd.J, cfg.norm_cap, cfg.word_len, cfg.element_cap,
                             cfg.seed, extra_caveats=graph.caveats)


def _stratum_json(o):
    s = stratum(o)
    return {"kappa": list(s.kappa), "genus": s.genus, "n_singularities": s.n_singularities}


# --- commands ---------------------------------------------------------------------------

def cmd_stratum(cfg):
    o = load_origami(cfg)
    rep = _base(cfg, "stratum")
    rep.update(origami=o.to_json(), **_stratum_json(o))
    return rep, EXIT_OK


def cmd_homology(cfg):
    o = load_origami(cfg)
    rep = _base(cfg, "homology")
    rep.update(origami=o.to_json(), homology=homology(o).to_json())
    return rep, EXIT_OK


def _orbit_checks(graph):
    hd = graph.homology
    mats = list(graph.all_matrices())
    bad = [i for i, c in enumerate(mats)
           if not is_symplectic(c.abs_block, hd.J) or not respects_projection(c, hd)]
    gbad = [c.word for c in graph.monodromy_generators
            if not is_symplectic(c.abs_block, hd.J) or not respects_projection(c, hd)]
    return len(mats), bad, gbad


def cmd_orbit(cfg):
    o = load_origami(cfg)
    graph = veech_orbit(o, cfg.max_nodes, cfg.max_depth)
    n, bad, gbad = _orbit_checks(graph)
    rep = _base(cfg, "orbit")
    rep.update(orbit=graph.to_json(), matrices_checked=n, non_symplectic=bad + gbad)
    rep["caveats"] += graph.caveats
    return rep, EXIT_OK if not bad and not gbad else EXIT_FAIL


def cmd_lyapunov(cfg):
    o = load_origami(cfg)
    graph = veech_orbit(o, cfg.max_nodes)
    hd = graph.homology
    dim = hd.abs_rank if cfg.space == "absolute" else hd.rel_rank
    stream = geodesic_cocycle_stream(graph, cfg.seed)
    lr = estimate_spectrum(stream, dim, cfg.steps, seed=cfg.seed, space=cfg.space,
                           zero_tol=cfg.zero_tol)
    sym = spectrum_symmetry_check(lr) if cfg.space == "absolute" else None
    rep = _base(cfg, "lyapunov")
    rep.update(lyapunov=lr.to_json(), near_zero=lr.near_zero(),
               csv_rows=list(lr.csv_rows()))
    if sym is not None:
        rep["symmetry"] = {"passed": sym.passed, "margins": sym.margins}
    rep["caveats"] += graph.caveats + ["Monte Carlo estimate; exponents rescaled so the top one is 1"]
    return rep, EXIT_OK


def cmd_forni(cfg):
    o = load_origami(cfg)
    graph = veech_orbit(o, cfg.max_nodes)
    cert = _certificate(cfg, graph)
    rep = _base(cfg, "forni")
    rep.update(certificate=cert.to_json(), screening=cert.F_basis.meta)
    rep["caveats"] += cert.caveats
    return rep, EXIT_OK if certified(cert) else EXIT_INCONCLUSIVE


def _rational(x, where):
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"field {where!r}: not a rational number: {x!r}") from e


def _rvec(data, key):
    if key not in data or not isinstance(data[key], list):
        raise ValueError(f"field {key!r}: expected a list")
    return [_rational(x, f"{key}[{i}]") for i, x in enumerate(data[key])]


def cmd_holonomy(cfg):
    with open(cfg.input) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("instance must be a JSON object")
    if "J" not in data or not isinstance(data["J"], list):
        raise ValueError("field 'J': expected a matrix")
    J = [[_rational(x, f"J[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(data["J"])]
    P = None
    if data.get("P") is not None:
        P = [[_rational(x, f"P[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(data["P"])]
    space = PairingSpace.from_matrix(J, P)
    a, b, delta, v = (_rvec(data, k) for k in ("a", "b", "delta", "v"))
    if "eps" not in data:
        raise ValueError("field 'eps': missing")
    eps = _rational(data["eps"], "eps")
    res = holonomy_square(FramedPoint(space, a, b), delta, eps, v)
    defect = [c - x for c, x in zip(res.composed, v)]
    rep = _base(cfg, "holonomy")
    rep.update(composed=list(res.composed), closed_form=list(res.closed_form),
               defect=defect, equal=res.composed == res.closed_form)
    if "F" in data:
        F = [[_rational(x, "F") for x in r] for r in data["F"]]
        rep["leaves_F"] = leaves_subspace(res, F)
    return rep, EXIT_OK if rep["equal"] else EXIT_FAIL


def _envelope(cfg, graph, cert):
    hd = graph.homology
    cloud = sample_orbit(graph.base, cfg.count, cfg.seed)
    fit = affine_fit(cloud, cfg.tol)
    tr = tangent_report(fit, hd, cert, cfg.tol, cfg.max_den)
    return cloud, fit, tr


def cmd_envelope(cfg):
    o = load_origami(cfg)
    graph = veech_orbit(o, cfg.max_nodes)
    cert = _certificate(cfg, graph)
    cloud, fit, tr = _envelope(cfg, graph, cert)
    rep = _base(cfg, "envelope")
    rep.update(fit=fit.to_json(), tangent=tr, n_points=len(cloud.points),
               csv_rows=[r.split(",") for r in fit.singular_values_csv().splitlines()])
    rep["caveats"] += cert.caveats + fit.notes
    ok = fit.complex_check and tr["status"] == "pass"
    if not certified(cert):
        return rep, EXIT_INCONCLUSIVE
    return rep, EXIT_OK if ok else EXIT_FAIL


def _claim(claim, ok, evidence, caveats=()):
    return {"claim": claim, "status": "pass" if ok else "fail", "evidence": evidence,
            "caveats": list(caveats)}


def _holonomy_claim(hd, cert, tangent_rel, seed):
    """No valid square with ``v`` in ``F`` and ``delta`` in the tangent has a defect."""
    space = PairingSpace.from_homology(hd)
    n = hd.area
    a = list(hd.rel_a)
    b = [Fraction(x, n) for x in hd.rel_b]
    pt = FramedPoint(space, a, b)
    pa, pb = hd.project(a), hd.project(b)
    J = [list(r) for r in hd.J]
    # displacements in the tangent with p(delta) orthogonal to p(a), p(b)
    eqs = [[ex.bilinear(hd.project(t), J, pa) for t in tangent_rel],
           [ex.bilinear(hd.project(t), J, pb) for t in tangent_rel]]
    coeffs = ex.nullspace(eqs, len(tangent_rel)) if tangent_rel else []
    deltas = [[sum(c * t[j] for c, t in zip(cf, tangent_rel)) for j in range(hd.rel_rank)]
              for cf in coeffs]
    F = [list(f) for f in cert.basis]
    checked, bad = 0, []
    for d in deltas:
        for v in F:
            r = holonomy_square(pt, d, 1, v)
            checked += 1
            if r.composed != r.closed_form or leaves_subspace(r, F):
                bad.append({"delta": d, "v": v, "composed": list(r.composed)})
    # the identity itself on random instances over this surface's form
    rng = np.random.default_rng(seed)
    ident_bad = 0
    for _ in range(64):
        ptr, dl, eps, v = random_square_instance(rng, space=space)
        r = holonomy_square(ptr, dl, eps, v)
        ident_bad += r.composed != r.closed_form
    return _claim("Prop7.1", not bad and not ident_bad, {
        "valid_tangent_displacements": len(deltas),
        "pairs_checked": checked,
        "defects": bad,
        "identity_instances": 64,
        "identity_failures": ident_bad,
    })


def _semisimplicity_claim(hd, cert, gens):
    n = hd.abs_rank
    out, ok = {}, True
    for name, L in (("F", cert.basis), ("tautological", hd.taut_plane()),
                    ("full", ex.identity(n))):
        try:
            comp = invariant_complement(L, gens, cert, hd.J)
            out[name] = {"dim_L": ex.dim(L) if L else 0, "dim_complement": comp.dim}
        except (HypothesisFailure, NotInvariant, AssertionError) as e:
            ok = False
            out[name] = {"error": f"{type(e).__name__}: {e}"}
    return _claim("Thm1.6", ok, out)


def cmd_check_theorem(cfg):
    o = load_origami(cfg)
    graph = veech_orbit(o, cfg.max_nodes, cfg.max_depth)
    hd = graph.homology
    rep = _base(cfg, "check-theorem")
    rep.update(origami=o.to_json(), stratum=_stratum_json(o))
    claims = []
    n, bad, gbad = _orbit_checks(graph)
    claims.append(_claim("Cocycle-symplectic", not bad and not gbad,
                         {"matrices_checked": n, "generators": len(graph.monodromy_generators),
                          "failures": bad + gbad}))
    cert = _certificate(cfg, graph)
    rep["certificate"] = cert.to_json()
    rep["caveats"] += cert.caveats
    if not certified(cert):
        claims.append({"claim": "Forni-certificate", "status": "inconclusive",
                       "evidence": cert.F_basis.meta, "caveats": list(cert.caveats)})
        report = TheoremReport(claims, rep["caveats"])
        rep.update(report.to_json())
        return rep, report.status()
    gens = [c.abs_block for c in graph.monodromy_generators]
    _, fit, tr = _envelope(cfg, graph, cert)
    rep["envelope"] = {"dimension": fit.dimension, "residual": fit.residual,
                       "complex_check": fit.complex_check, "complex_defect": fit.complex_defect}
    rep["caveats"] += fit.notes
    tangent_rel = rationalize_basis(fit.T_real.basis, cfg.tol, cfg.max_den) if fit.T_real.dim else []
    if tr["rationalized"]:
        tangent_abs = [[Fraction(x) for x in r] for r in tr["p_tangent"]]
        tcav = []
    else:
        tangent_abs = hd.taut_plane()
        tcav = ["fitted tangent could not be rationalized; tautological plane used"]
    suite = check_theorem_suite(hd, cert, tangent_abs)
    for c in suite:
        c["caveats"] = c.get("caveats", []) + tcav
    claims += suite
    claims.append(_claim("ThmTechnical-symplectic",
                         tr["status"] == "pass" and tr["contains_tautological_plane"]
                         and fit.complex_check,
                         {"pairings": tr["pairings"], "p_tangent": tr["p_tangent"],
                          "equals_tautological_plane": tr["equals_tautological_plane"],
                          "rationalized": tr["rationalized"],
                          "fit_residual": fit.residual},
                         tr["notes"]))
    if tangent_rel is None:
        tangent_rel = [list(hd.rel_a), list(hd.rel_b)]
    claims.append(_holonomy_claim(hd, cert, tangent_rel, cfg.seed))
    claims.append(_semisimplicity_claim(hd, cert, gens))
    if cfg.steps > 0:
        stream = geodesic_cocycle_stream(graph, cfg.seed)
        lr = estimate_spectrum(stream, hd.abs_rank, cfg.steps, seed=cfg.seed,
                               zero_tol=cfg.zero_tol)
        zeros = lr.near_zero()
        claims.append(_claim("Lyapunov-zero-count", len(zeros) == cert.dim,
                             {"near_zero": zeros, "dim_F": cert.dim,
                              "exponents": lr.exponents, "stderr": lr.stderr},
                             ["numerical estimate; no exact check exists for this claim"]))
    report = TheoremReport(claims, rep["caveats"])
    rep.update(report.to_json())
    return rep, report.status()


DISPATCH = {
    "stratum": cmd_stratum,
    "homology": cmd_homology,
    "orbit": cmd_orbit,
    "lyapunov": cmd_lyapunov,
    "forni": cmd_forni,
    "holonomy": cmd_holonomy,
    "envelope": cmd_envelope,
    "check-theorem": cmd_check_theorem,
}


def run(cfg: RunConfig):
    """Run one command; returns ``(report, exit code)``."""
    return DISPATCH[cfg.command](cfg)


def render(report: dict, fmt: str) -> str:
    report = {k: v for k, v in report.items() if not (fmt != "csv" and k == "csv_rows")}
    if fmt == "json":
        return dumps(report)
    if fmt == "csv":
        return to_csv(report)
    return to_text(report)
