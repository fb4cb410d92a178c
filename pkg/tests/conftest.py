import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    max_examples=50,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

from grpdrecon.corpus import (cyclic_group_groupoid, pair_groupoid,
                              trivial_groupoid)
from grpdrecon.lpa import Edge, Graph
from grpdrecon.rings import GF, Q, Z


@pytest.fixture
def r2():
    return pair_groupoid(2)


@pytest.fixture
def z2_trivial():
    return cyclic_group_groupoid(2, graded=False)


@pytest.fixture
def z2_graded():
    return cyclic_group_groupoid(2, graded=True)


@pytest.fixture
def e2():
    return Graph(["v"], [Edge("e", "v", "v"), Edge("f", "v", "v")])


@pytest.fixture
def single_edge():
    return Graph(["v1", "v2"], [Edge("e", "v1", "v2")])


@pytest.fixture
def f2():
    return GF(2)


@pytest.fixture
def f3():
    return GF(3)
