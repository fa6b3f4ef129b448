import numpy as np
import pytest

from cvqrc.jsa import build_jsa, default_grids
from cvqrc.presets import default_source
from cvqrc.schmidt import schmidt_decompose


@pytest.fixture(scope="session")
def source():
    return default_source()


@pytest.fixture(scope="session")
def paper_like_schmidt(source):
    """Schmidt decomposition of the default ppKTP source at full resolution."""
    grids = default_grids(source.pump, source.crystal, samples=source.grid_samples)
    jsa = build_jsa(source.pump, source.crystal, *grids)
    return schmidt_decompose(jsa, source.n_kept, source.r_scale)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
