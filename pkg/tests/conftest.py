from __future__ import annotations

import pytest

import helpers


@pytest.fixture
def copy_spec():
    return helpers.copy_spec()


@pytest.fixture
def lossy_spec():
    return helpers.lossy_projection_spec()


@pytest.fixture
def pair_spec():
    return helpers.projection_pair_spec(with_fd=True)


@pytest.fixture
def pair_spec_nofd():
    return helpers.projection_pair_spec(with_fd=False)


@pytest.fixture
def fd_view_spec():
    return helpers.fd_view_copy_spec()
