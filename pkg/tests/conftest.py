import numpy as np
import pytest

from orbitstrata import ConstantField, su2, su3


@pytest.fixture(scope="session")
def spec2():
    return su2()


@pytest.fixture(scope="session")
def spec3():
    return su3()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_field(spec, rng, scale=1.0, g=1.0):
    return ConstantField.from_coeffs(spec, rng.normal(scale=scale, size=(3, spec.dim)), g=g)
