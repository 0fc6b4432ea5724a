import numpy as np
import pytest

from ganblend.checkpoint import Checkpoint
from ganblend.errors import ConfigError, GrammarError
from ganblend.generator import init_random, manifest
from ganblend.topology import LayerKey, Role, Stage, classify, partition


class TestClassify:
    def test_conv_weight(self):
        key = classify("synthesis.b16.conv1.weight")
        assert key == LayerKey(Stage.SYNTHESIS, 16, Role.CONV_WEIGHT)

    def test_mapping_bias(self):
        key = classify("mapping.fc2.bias")
        assert key == LayerKey(Stage.MAPPING, None, Role.MAP_BIAS)

    def test_const(self):
        assert classify("synthesis.b4.const") == LayerKey(Stage.SYNTHESIS, 4, Role.CONST)

    def test_roles(self):
        assert classify("synthesis.b8.conv0.noise_strength").role is Role.NOISE_STRENGTH
        assert classify("synthesis.b8.conv0.affine_weight").role is Role.STYLE_AFFINE_WEIGHT
        assert classify("synthesis.b8.torgb.weight").role is Role.TORGB_WEIGHT
        assert classify("synthesis.b8.torgb.affine_bias").role is Role.STYLE_AFFINE_BIAS
        assert classify("mapping.fc0.weight").role is Role.MAP_WEIGHT

    def test_non_power_of_two_band(self):
        with pytest.raises(GrammarError, match="b12"):
            classify("synthesis.b12.conv0.weight")

    def test_band_below_four(self):
        with pytest.raises(GrammarError, match="b2"):
            classify("synthesis.b2.conv0.weight")

    def test_error_cites_offending_segment(self):
        with pytest.raises(GrammarError, match="banana"):
            classify("synthesis.b8.banana")
        with pytest.raises(GrammarError, match="gain"):
            classify("synthesis.b8.conv0.gain")
        with pytest.raises(GrammarError, match="discriminator"):
            classify("discriminator.b8.conv0.weight")
        with pytest.raises(GrammarError, match="fcx"):
            classify("mapping.fcx.weight")

    def test_torgb_has_no_noise(self):
        with pytest.raises(GrammarError, match="noise_strength"):
            classify("synthesis.b8.torgb.noise_strength")

    def test_pure_function(self):
        assert classify("synthesis.b32.conv0.bias") == classify("synthesis.b32.conv0.bias")


class TestPartition:
    def test_default_counts(self, base_ckpt):
        part = partition(base_ckpt)
        assert sorted(part.bands) == [4, 8, 16, 32, 64]
        assert len(part.mapping) == 4
        assert len(part.bands[4]) == 10  # const + conv1 block + torgb block
        for r in (8, 16, 32, 64):
            assert len(part.bands[r]) == 14
        assert part.total() == len(base_ckpt.params) == 70

    def test_exactly_once_coverage(self, base_ckpt):
        part = partition(base_ckpt)
        seen = list(part.mapping)
        for names in part.bands.values():
            seen.extend(names)
        assert sorted(seen) == sorted(base_ckpt.params)

    def test_mapping_only_checkpoint(self, default_config):
        names = [n for n, _ in manifest(default_config) if n.startswith("mapping.")]
        full = init_random(default_config, 0)
        ck = Checkpoint(default_config, {n: full.params[n] for n in names})
        part = partition(ck)
        assert len(part.mapping) == 4
        assert all(len(v) == 0 for v in part.bands.values())

    def test_order_invariance(self, base_ckpt):
        reversed_params = dict(reversed(list(base_ckpt.params.items())))
        a = partition(base_ckpt)
        b = partition(Checkpoint(base_ckpt.meta, reversed_params))
        assert a == b

    def test_band_outside_config_rejected(self, tiny_config):
        ck = init_random(tiny_config, 0)
        ck.params["synthesis.b64.conv1.bias"] = np.zeros(4, np.float32)
        with pytest.raises(ConfigError, match="b64"):
            partition(ck)


class TestManifestAgreement:
    def test_every_manifest_name_classifies(self, default_config):
        for name, _ in manifest(default_config):
            key = classify(name)
            if key.stage is Stage.SYNTHESIS:
                assert key.resolution in default_config.bands()
            else:
                assert key.resolution is None
