import numpy as np
import pytest

from monofunnel import ModelParams, build_mesh, assemble


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def mesh8(params):
    return build_mesh(8, 8)


@pytest.fixture(scope="session")
def ops8(mesh8, params):
    return assemble(mesh8, params)


@pytest.fixture(scope="session")
def mesh64(params):
    return build_mesh(64, 64)


@pytest.fixture(scope="session")
def ops64(mesh64, params):
    return assemble(mesh64, params)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260819)
