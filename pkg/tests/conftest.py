from __future__ import annotations

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

from kfgring.potential import PotentialSpec  # noqa: E402


@pytest.fixture
def general_spec() -> PotentialSpec:
    """V != S with a real centrifugal exponent for every lambda >= 0."""
    return PotentialSpec(M=1.0, V0=0.1, S0=0.25, delta=0.1)


@pytest.fixture
def equal_spec() -> PotentialSpec:
    return PotentialSpec(M=1.0, V0=0.25, S0=0.25, delta=0.1)


@pytest.fixture
def ring_spec() -> PotentialSpec:
    return PotentialSpec(M=1.0, V0=0.1, S0=0.25, delta=0.1, beta=0.1, beta_prime=0.2)
