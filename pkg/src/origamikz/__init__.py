"""Kontsevich-Zorich cocycle over square-tiled surfaces: exact homology,
Veech orbits, Lyapunov spectra, Forni subspaces and transport identities."""

__version__ = "0.1.0"

from .origami import Origami, build_origami, canonical_form, from_cycles, from_json, stratum
from .homology import HomologyData, homology, pairing, period_matrix
from .dynamics import (CocycleMatrix, apply_move, cylinders, geodesic_cocycle_stream,
                       multitwist_matrix, veech_orbit)
from .lyapunov import LyapunovReport, SubspaceBasis, estimate_spectrum, top_subspace
from .forni import (ForniCertificate, averaged_form, bounded_subspace, certify_finite_closure,
                    check_theorem_suite, forni_certificate, invariant_complement)
from .connection import (FramedPoint, PairingSpace, TransportInstance, holonomy_square,
                         transport_orbit_orthogonality, transport_stable, transport_unstable)
from .envelope import AffineFit, OrbitCloud, affine_fit, sample_orbit, tangent_report
from .corpus import bundled_corpus

__all__ = [name for name in dir() if not name.startswith("_")]
