"""Shared fixtures: small Slepian bases are expensive enough to build once."""

from math import pi

import pytest

from rgsfcs import BeltRegion, build_basis

HEMISPHERE = BeltRegion(0.0, pi / 2)


@pytest.fixture(scope="session")
def hemisphere_basis_n4():
    return build_basis(HEMISPHERE, n_max=4, lambda_c=0.05)


@pytest.fixture(scope="session")
def hemisphere_basis_n6():
    return build_basis(HEMISPHERE, n_max=6, lambda_c=0.05)


@pytest.fixture(scope="session")
def full_sphere_basis_n4():
    return build_basis(BeltRegion(0.0, pi), n_max=4, lambda_c=0.5)
