import numpy as np
import pytest

from absorbtime.stable import stable_law


@pytest.fixture(scope="session")
def stable15():
    """Shared alpha=1.5 stable law with its tables built once."""
    law = stable_law(1.5)
    law._build_tables()
    return law


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
