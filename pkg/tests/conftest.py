import numpy as np
import pytest

from tsteer.channels import propagate_assemblage, random_kraus_channel
from tsteer.steering import pauli_measurement_set, premeasure


def random_density(rng, dim=2):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_assemblage(rng, labels="XYZ"):
    """A valid assemblage: random state premeasured, then a random channel."""
    ms = pauli_measurement_set(labels)
    asm = premeasure(np.eye(2, dtype=complex) / 2, ms)
    ch = random_kraus_channel(int(rng.integers(0, 2 ** 31)), int(rng.integers(1, 5)))
    return propagate_assemblage(ch, 1.0, asm)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
