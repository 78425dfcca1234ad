import numpy as np
import pytest

from urpayload import SirDistribution, Topology


@pytest.fixture(scope="session")
def main_topology() -> Topology:
    """Serving link 20 m, ten interferers at 10+20j m, exponent 3.5."""
    return Topology(
        r0=20.0, interferer_distances=tuple(10.0 + 20.0 * j for j in range(1, 11)), alpha=3.5
    )


@pytest.fixture(scope="session")
def main_dist(main_topology) -> SirDistribution:
    return SirDistribution.from_topology(main_topology)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)
