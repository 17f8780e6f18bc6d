"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bicbf import FactorialDataset

settings.register_profile(
    "bicbf",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("bicbf")


def random_dataset(
    seed: int,
    a: int | None = None,
    b: int | None = None,
    cell_n: int | None = None,
    effect_scale: float = 1.0,
) -> FactorialDataset:
    """A small balanced dataset with mild random effects, keyed by seed."""
    rng = np.random.default_rng(seed)
    a = a if a is not None else int(rng.integers(2, 4))
    b = b if b is not None else int(rng.integers(2, 4))
    cell_n = cell_n if cell_n is not None else int(rng.integers(2, 5))
    cell_means = effect_scale * rng.normal(size=(a, b, 1))
    y = cell_means + rng.normal(size=(a, b, cell_n))
    return FactorialDataset(a, b, cell_n, y)


@pytest.fixture
def make_dataset():
    return random_dataset
