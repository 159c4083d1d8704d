"""Shared fixtures: the packaged six-map reference system."""

import pytest

from tangentlab import builtin_config


@pytest.fixture(scope="session")
def e6():
    return builtin_config("e6")


@pytest.fixture(scope="session")
def system(e6):
    return e6.system


@pytest.fixture(scope="session")
def weights(e6):
    return e6.weights
