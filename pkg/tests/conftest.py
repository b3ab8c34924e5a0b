import numpy as np
import pytest

from gpe_bifurcation.continuation import trace_branch
from gpe_bifurcation.symmetry import Kind, SubspaceSpec

# (kind, m0, n0) branches shared across test modules, traced once per session
TRACED = [
    (Kind.VORTEX, 0, 0),
    (Kind.VORTEX, 1, 0),
    (Kind.VORTEX, 2, 0),
    (Kind.VORTEX, 1, 1),
    (Kind.MULTIPOLE, 1, 0),
    (Kind.MULTIPOLE, 2, 0),
]

# truncation that resolves states up to amplitude 0.5 (tail <= 1e-6)
VERIFY_N_RADIAL = 24


@pytest.fixture(scope="session")
def branches():
    return {(k, m0, n0): trace_branch(SubspaceSpec(k, m0), n0) for k, m0, n0 in TRACED}


@pytest.fixture(scope="session")
def resolved_branches():
    return {
        k: trace_branch(SubspaceSpec(k, 1, n_radial=VERIFY_N_RADIAL), 0)
        for k in (Kind.VORTEX, Kind.MULTIPOLE)
    }


def point_near_amplitude(branch, a):
    return branch.points[int(np.argmin(np.abs(branch.amplitudes - a)))]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
