import numpy as np
import pytest

from app.models.DomainModel import DomainSpec
from app.models.QuadratureConfigModel import QuadratureConfig, RuleSpec
from app.services.HypercomplexService import subspace_preset
from app.services.KernelService import build_kernel_context


@pytest.fixture(scope="session")
def hcj():
    return subspace_preset("H-CJ")


@pytest.fixture(scope="session")
def hfull():
    return subspace_preset("H-full")


@pytest.fixture(scope="session")
def ofull():
    return subspace_preset("O-full")


@pytest.fixture(scope="session")
def ctx2(hcj):
    return build_kernel_context(hcj, 2)


@pytest.fixture(scope="session")
def ctx_h1(hfull):
    return build_kernel_context(hfull, 1)


@pytest.fixture
def cube4():
    return DomainSpec.cube(4, 1.0)


@pytest.fixture
def quad():
    return QuadratureConfig(boundary=RuleSpec(q=16), volume=RuleSpec(q=10))


@pytest.fixture
def rng():
    return np.random.default_rng(7)
