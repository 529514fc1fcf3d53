"""Shared fixtures: the two workhorse fields and deterministic RNGs."""

import pytest

from vlac.ff import field_new


@pytest.fixture(scope="session")
def gf101():
    return field_new(101)


@pytest.fixture(scope="session")
def gf10007():
    return field_new(10007)


@pytest.fixture(scope="session")
def gf_big():
    # largest prime below 2**29; (p-1)^2 still fits int64
    return field_new(536870909)
