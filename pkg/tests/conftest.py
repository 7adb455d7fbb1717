import pytest

from badbouss.scattering import PotentialSampler, find_k0, norming_constant
from badbouss.waves import GaussianSum, PerturbedSoliton


@pytest.fixture(scope="session")
def perturbed_sampler():
    return PotentialSampler.from_data(PerturbedSoliton(0.05))


@pytest.fixture(scope="session")
def gaussian_sampler():
    return PotentialSampler.from_data(GaussianSum([(-0.05, 0.0, 0.02)]))


@pytest.fixture(scope="session")
def perturbed_k0(perturbed_sampler):
    root = find_k0(perturbed_sampler, (1.0, 3.0))
    assert root.found
    return root.k0


@pytest.fixture(scope="session")
def perturbed_norming(perturbed_sampler, perturbed_k0):
    return norming_constant(perturbed_k0, perturbed_sampler)
