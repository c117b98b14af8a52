import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wassrigid.spaces import Circle, FiniteMetric, Interval, ProjectivePlane, Sphere2  # noqa: E402

# path graph 0-1-2-3 with unit edges: a geodesic finite metric
PATH4 = [[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]]


def all_spaces():
    return [Interval(1.0), Circle(), Sphere2(1.0), ProjectivePlane(1.0), FiniteMetric(PATH4)]


@pytest.fixture(params=all_spaces(), ids=lambda s: s.kind)
def space(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
