import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polyspec import BooleanFunction, BoundedFunction


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_boolean(n: int, rng) -> BooleanFunction:
    return BooleanFunction(n, rng.integers(0, 2, 1 << n))


def random_bounded(n: int, rng) -> BoundedFunction:
    return BoundedFunction(n, rng.random(1 << n))
