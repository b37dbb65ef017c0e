import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mtsolve.instances import no_maximal_tensor, pair_rhs, pair_tensor
from mtsolve.io import write_tensor, write_vec

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def files(tmp_path):
    """Write the named instances to disk and return their paths."""
    paths = {}

    def put(name, obj):
        p = tmp_path / name
        if name.endswith(".tns"):
            write_tensor(p, obj)
        else:
            write_vec(p, obj)
        paths[name] = str(p)

    put("pair1.tns", pair_tensor(1))
    put("pair2.tns", pair_tensor(2))
    put("b01.vec", pair_rhs(1))
    put("b0101.vec", pair_rhs(2))
    put("b11.vec", np.array([1.0, 1.0]))
    put("no_max.tns", no_maximal_tensor())
    put("b001.vec", np.array([0.0, 0.0, 1.0]))
    return paths
