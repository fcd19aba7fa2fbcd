import numpy as np
import pytest

from tubebias.datagen import synthetic_catalog, synthetic_store


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_catalog():
    """15 channels (5 per class), 3 videos each, 2 episodes per video."""
    return synthetic_catalog(channels_per_class=5, videos_per_channel=3, episodes_per_video=2, seed=7)


@pytest.fixture(scope="session")
def small_store(small_catalog):
    return synthetic_store(
        small_catalog,
        groups=("nela", "opensmile_is09"),
        signal_group="nela",
        informative_dims=10,
        separation=8.0,
        seed=7,
    )
