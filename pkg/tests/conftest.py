import pytest

from eigen_interval import HighPrecision, PsiOptions, SamplingOptions


@pytest.fixture(scope="session")
def hp():
    return HighPrecision(256)


@pytest.fixture(scope="session")
def options():
    return PsiOptions()


@pytest.fixture(scope="session")
def sampling():
    return SamplingOptions(shard_size=5_000, workers=2)
