import numpy as np
import pytest

from modeswim.laminate import Layer, section_properties


@pytest.fixture(scope="session")
def table_layers():
    """Carbon / adhesive / piezoceramic stack, bottom to top."""
    return [
        Layer(thickness=0.2e-3, density=1643, elastic_modulus=20.5e9,
              poisson_ratio=0.3),
        Layer(thickness=0.05e-3, density=1140, elastic_modulus=3.2e9,
              poisson_ratio=0.34),
        Layer(thickness=0.3e-3, density=4750, elastic_modulus=15.9e9,
              poisson_ratio=0.31),
    ]


@pytest.fixture(scope="session")
def table_section(table_layers):
    return section_properties(table_layers)


@pytest.fixture(scope="session")
def unit_section():
    """Single layer tuned to D = 1 N m and mu = 1 kg/m^2 (nu = 0.3)."""
    return section_properties([Layer(thickness=1.0, density=1.0,
                                     elastic_modulus=12.0 * (1 - 0.09),
                                     poisson_ratio=0.3)])


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(42)
