import numpy as np
import pytest

from qcorr.sampling import rng_from_seed


@pytest.fixture
def rng() -> np.random.Generator:
    return rng_from_seed(0xC0FFEE)
