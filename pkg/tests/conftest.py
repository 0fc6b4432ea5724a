import numpy as np
import pytest

from ganblend.checkpoint import GeneratorConfig
from ganblend.generator import init_random, synth_transfer


@pytest.fixture(scope="session")
def default_config():
    return GeneratorConfig.default()


@pytest.fixture(scope="session")
def base_ckpt(default_config):
    return init_random(default_config, 0)


@pytest.fixture(scope="session")
def transfer_ckpt(base_ckpt):
    return synth_transfer(base_ckpt, 0.5, 1)


@pytest.fixture()
def tiny_config():
    # two bands only, small channels: cheap enough for property tests
    return GeneratorConfig(
        latent_dim=8,
        style_dim=8,
        mapping_layers=1,
        max_resolution=8,
        channels_per_band={4: 6, 8: 4},
    )


def assert_checkpoints_equal(a, b):
    assert a.meta == b.meta
    assert list(a.params) == list(b.params) or set(a.params) == set(b.params)
    for k in a.params:
        assert np.array_equal(a.params[k], b.params[k]), k
