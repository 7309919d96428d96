"""
Shared fixtures: random polyhedral domains with a planted complex rank.
"""
import numpy as np
import pytest

from hypdomain.domain import DomainSpec


def planted_domain(rng: np.random.Generator, dim: int, n_constraints: int, rank: int,
                   min_slack: float = 0.5) -> DomainSpec:
    """
    Domain whose functionals span a random rank-``rank`` space.

    The witness is drawn first and the thresholds are placed below it with
    slack in [min_slack, min_slack + 1.5].
    """
    basis = rng.standard_normal((rank, dim)) + 1j * rng.standard_normal((rank, dim))
    mix = rng.standard_normal((n_constraints, rank)) + 1j * rng.standard_normal((n_constraints, rank))
    C = mix @ basis
    witness = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    slack = rng.uniform(min_slack, min_slack + 1.5, n_constraints)
    thresholds = (C @ witness).real - slack
    return DomainSpec.from_arrays(C, thresholds, witness)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_domain():
    return planted_domain


@pytest.fixture
def halfplane():
    return DomainSpec.from_arrays([[1.0]], [0.0], [1.0])


@pytest.fixture
def quadrant():
    return DomainSpec.from_arrays(np.eye(2), [0.0, 0.0], [1.0, 1.0])


@pytest.fixture
def halfplane_times_c():
    """{Re z1 > 0} in C^2."""
    return DomainSpec.from_arrays([[1.0, 0.0]], [0.0], [1.0, 0.0])


@pytest.fixture
def rank1_strip():
    """{0 < Re(z1 + z2) < 4} in C^2."""
    return DomainSpec.from_arrays([[1.0, 1.0], [-1.0, -1.0]], [0.0, -4.0], [1.0, 1.0])


@pytest.fixture
def random_hyperbolic(rng):
    """Twenty random hyperbolic domains in C^1..C^4."""
    domains = []
    for _ in range(20):
        dim = int(rng.integers(1, 5))
        domains.append(planted_domain(rng, dim, int(rng.integers(dim, dim + 4)), dim))
    return domains
