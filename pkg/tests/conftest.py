import numpy as np
import pytest

from holobench.field import Grid2D

PITCH = 20e-6


@pytest.fixture
def grid64() -> Grid2D:
    return Grid2D(64, 64, PITCH, PITCH)


@pytest.fixture
def grid256() -> Grid2D:
    return Grid2D(256, 256, PITCH, PITCH)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


def random_field_samples(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
