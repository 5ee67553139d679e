import numpy as np
import pytest
from hypothesis import settings

from origamikz.corpus import NAMES, load
from origamikz.dynamics import veech_orbit
from origamikz.forni import forni_certificate

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def corpus():
    return {n: load(n) for n in NAMES}


@pytest.fixture(scope="session")
def orbits(corpus):
    return {n: veech_orbit(o) for n, o in corpus.items()}


@pytest.fixture(scope="session")
def certificates(orbits):
    out = {}
    for n, g in orbits.items():
        gens = [c.abs_block for c in g.monodromy_generators]
        out[n] = forni_certificate(gens, g.homology.J)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
