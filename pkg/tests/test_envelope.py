from fractions import Fraction

import numpy as np
import pytest
import sympy

from origamikz import exact as ex
from origamikz.envelope import (AffineFit, OrbitCloud, affine_fit, rationalize_basis,
                                sample_orbit, tangent_report)
from origamikz.homology import PeriodCoordinates
from origamikz.lyapunov import SubspaceBasis

# frozen from tests/oracles/derive_values.py
WOLLMILCHSAU_ENVELOPE_RANK = 4


@pytest.fixture(scope="module")
def fits(orbits):
    return {n: affine_fit(sample_orbit(orbits[n].base, 200, seed=3))
            for n in ("torus", "l-shape", "wollmilchsau")}


def test_dimensions(fits):
    assert fits["wollmilchsau"].dimension == WOLLMILCHSAU_ENVELOPE_RANK
    # the orbit of the torus is open in its 4-real-dimensional period space
    assert fits["torus"].dimension == 4
    for f in fits.values():
        assert f.residual < 1e-9
        assert f.complex_check
        assert f.T_real.dim == 2


def test_single_point_has_dimension_zero(orbits):
    fit = affine_fit(sample_orbit(orbits["wollmilchsau"].base, 1, seed=0))
    assert fit.dimension == 0 and fit.T_real.dim == 0


def test_noise_below_tolerance_keeps_dimension(orbits):
    cloud = sample_orbit(orbits["wollmilchsau"].base, 200, seed=5)
    rng = np.random.default_rng(1)
    noisy = [PeriodCoordinates(p.x_row + 1e-12 * rng.standard_normal(len(p.x_row)),
                               p.y_row + 1e-12 * rng.standard_normal(len(p.y_row)))
             for p in cloud.points]
    fit = affine_fit(OrbitCloud(noisy, cloud.base, cloud.seed), tol=1e-9)
    assert fit.dimension == WOLLMILCHSAU_ENVELOPE_RANK


@pytest.mark.parametrize("seed", [0, 11, 97])
def test_seed_independent_dimension(orbits, seed):
    assert affine_fit(sample_orbit(orbits["wollmilchsau"].base, 200, seed)).dimension == 4


def test_sample_is_deterministic(orbits):
    a = sample_orbit(orbits["l-shape"].base, 20, seed=9).array()
    b = sample_orbit(orbits["l-shape"].base, 20, seed=9).array()
    assert np.array_equal(a, b)


def test_tangent_projects_to_tautological_plane(orbits, certificates, fits):
    for n in ("torus", "l-shape", "wollmilchsau"):
        hd = orbits[n].homology
        rep = tangent_report(fits[n], hd, certificates[n])
        assert rep["rationalized"]
        assert rep["equals_tautological_plane"]
        assert rep["status"] == "pass"
        assert all(r["value"] == "0" and r["status"] == "exact-zero" for r in rep["pairings"])
    assert len(tangent_report(fits["wollmilchsau"], orbits["wollmilchsau"].homology,
                              certificates["wollmilchsau"])["pairings"]) == 8


def test_synthetic_tangent_inside_F_is_reported(orbits, certificates):
    hd = orbits["wollmilchsau"].homology
    cert = certificates["wollmilchsau"]
    f0 = list(cert.basis[0]) + [0] * (hd.rel_rank - hd.abs_rank)
    T = SubspaceBasis(1, [[float(x) for x in f0]], "relative", 1e-9)
    fit = AffineFit(T, 0.0, True, 0.0, 2, [1.0, 1.0], 1e-9)
    rep = tangent_report(fit, hd, cert)
    assert rep["status"] == "violated"
    J = sympy.Matrix(hd.J)
    expected = [sympy.Matrix([cert.basis[0]]) * J * sympy.Matrix(f) for f in cert.basis]
    got = [Fraction(r["value"]) for r in rep["pairings"]]
    assert got == [Fraction(str(e[0, 0])) for e in expected]
    assert any(g != 0 for g in got)


def test_rationalize_basis():
    v = np.array([[0.5, 1.0, 0.0], [1.0, 2.0, 1 / 3]])
    out = rationalize_basis(v)
    assert ex.same_span(out, [[1, 2, 0], [0, 0, 1]])
    assert rationalize_basis(np.array([[1.0, np.pi, 0.0]]), max_den=8) is None
    assert rationalize_basis(np.zeros((0, 3))) == []


def test_fit_json_and_csv(fits):
    j = fits["torus"].to_json()
    assert j["complex_check"] == "pass" and j["dimension"] == 4
    lines = fits["torus"].singular_values_csv().splitlines()
    assert lines[0] == "index,singular_value,retained"
    assert sum(int(l.rsplit(",", 1)[1]) for l in lines[1:]) == 4
