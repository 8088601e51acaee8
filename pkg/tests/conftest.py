import numpy as np
import pytest

from rankgauge import OptimConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def cfg():
    return OptimConfig(seed=11)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the standard phase fix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
