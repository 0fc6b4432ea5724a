import json
import pathlib

import numpy as np
import pytest

from ganblend import rng
from ganblend.blend import MappingPolicy, Swap, Table, blend_checkpoints
from ganblend.checkpoint import validate_checkpoint
from ganblend.errors import ConfigError, ShapeError
from ganblend.generator import (
    NoiseSpec,
    activations,
    forward,
    forward_w,
    init_random,
    manifest,
    mapping_forward,
    synth_transfer,
)

GOLDEN = pathlib.Path(__file__).parent / "golden" / "manifest_default.json"


def z_for(i, dim=64):
    return rng.normal(1000 + i, "test.z", (dim,))


class TestManifest:
    def test_matches_golden_file(self, default_config):
        golden = json.loads(GOLDEN.read_text())
        got = [{"name": n, "shape": list(s)} for n, s in manifest(default_config)]
        assert got == golden

    def test_entry_count(self, default_config):
        assert len(manifest(default_config)) == 70

    def test_band4_has_no_conv0(self, default_config):
        names = [n for n, _ in manifest(default_config)]
        assert not any(n.startswith("synthesis.b4.conv0") for n in names)
        assert "synthesis.b8.conv0.weight" in names

    def test_shapes_follow_channel_plan(self, default_config):
        shapes = dict(manifest(default_config))
        assert shapes["synthesis.b4.const"] == (64, 4, 4)
        assert shapes["synthesis.b16.conv0.weight"] == (32, 64, 3, 3)
        assert shapes["synthesis.b16.conv1.weight"] == (32, 32, 3, 3)
        assert shapes["synthesis.b64.torgb.weight"] == (3, 8, 1, 1)
        assert shapes["mapping.fc0.weight"] == (64, 64)


class TestInitRandom:
    def test_deterministic(self, default_config):
        a = init_random(default_config, 5)
        b = init_random(default_config, 5)
        for k in a.params:
            assert np.array_equal(a.params[k], b.params[k])

    def test_seeds_differ(self, default_config):
        a = init_random(default_config, 5)
        b = init_random(default_config, 6)
        assert any(not np.array_equal(a.params[k], b.params[k]) for k in a.params)

    def test_valid_and_finite(self, base_ckpt):
        validate_checkpoint(base_ckpt)  # includes finiteness

    def test_biases_zero(self, base_ckpt):
        assert np.all(base_ckpt.params["synthesis.b8.conv0.bias"] == 0)
        assert np.all(base_ckpt.params["synthesis.b8.conv0.noise_strength"] == 0)
        assert np.all(base_ckpt.params["mapping.fc0.bias"] == 0)


class TestSynthTransfer:
    def test_strength_zero_is_identity(self, base_ckpt):
        out = synth_transfer(base_ckpt, 0.0, 99)
        for k in base_ckpt.params:
            assert np.array_equal(out.params[k], base_ckpt.params[k])

    def test_deterministic(self, base_ckpt):
        a = synth_transfer(base_ckpt, 0.5, 1)
        b = synth_transfer(base_ckpt, 0.5, 1)
        for k in a.params:
            assert np.array_equal(a.params[k], b.params[k])

    def test_mapping_moves_about_one_percent_as_much(self, base_ckpt, transfer_ckpt):
        # relative perturbation of mapping weights should be ~1% of the
        # synthesis relative perturbation, by construction
        def rel_delta(name):
            d = transfer_ckpt.params[name] - base_ckpt.params[name]
            return float(np.std(d)) / float(np.std(base_ckpt.params[name]))

        map_rel = rel_delta("mapping.fc0.weight")
        syn_rel = rel_delta("synthesis.b8.conv0.weight")
        ratio = map_rel / syn_rel
        assert 0.005 < ratio < 0.02

    def test_negative_strength_rejected(self, base_ckpt):
        with pytest.raises(ConfigError):
            synth_transfer(base_ckpt, -0.5, 1)

    def test_valid_output(self, transfer_ckpt):
        validate_checkpoint(transfer_ckpt)


class TestForward:
    def test_deterministic(self, base_ckpt):
        z = z_for(0)
        a = forward(base_ckpt, z, NoiseSpec(3))
        b = forward(base_ckpt, z, NoiseSpec(3))
        assert np.array_equal(a, b)

    def test_output_shape_and_dtype(self, base_ckpt):
        img = forward(base_ckpt, z_for(1), NoiseSpec(0))
        assert img.shape == (3, 64, 64)
        assert img.dtype == np.float32
        assert np.isfinite(img).all()

    def test_noise_seed_changes_output(self, transfer_ckpt):
        # base fixture has zero noise strengths; the transfer fixture
        # perturbs them, so noise becomes visible there
        z = z_for(2)
        a = forward(transfer_ckpt, z, NoiseSpec(0))
        b = forward(transfer_ckpt, z, NoiseSpec(1))
        assert not np.array_equal(a, b)

    def test_z_changes_output(self, base_ckpt):
        a = forward(base_ckpt, z_for(3), NoiseSpec(0))
        b = forward(base_ckpt, z_for(4), NoiseSpec(0))
        assert not np.array_equal(a, b)

    def test_wrong_z_length(self, base_ckpt):
        with pytest.raises(ShapeError):
            forward(base_ckpt, np.zeros(32, np.float32), NoiseSpec(0))

    def test_blend_endpoint_forward_identity(self, base_ckpt, transfer_ckpt):
        sched = Table({r: 0.0 for r in base_ckpt.meta.bands()})
        blended = blend_checkpoints(base_ckpt, transfer_ckpt, sched, MappingPolicy.base())
        z = z_for(5)
        assert np.array_equal(
            forward(blended, z, NoiseSpec(7)), forward(base_ckpt, z, NoiseSpec(7))
        )

    def test_forward_w_bypasses_mapping(self, base_ckpt):
        z = z_for(6)
        w = mapping_forward(base_ckpt, z)
        assert np.array_equal(
            forward_w(base_ckpt, w, NoiseSpec(2)), forward(base_ckpt, z, NoiseSpec(2))
        )


class TestActivations:
    def test_tap_at_max_resolution(self, base_ckpt):
        tap = activations(base_ckpt, z_for(7), NoiseSpec(0), 64)
        assert tap.shape == (8, 64, 64)

    def test_tap_shapes_per_band(self, base_ckpt):
        for r, c in base_ckpt.meta.channels_per_band.items():
            tap = activations(base_ckpt, z_for(8), NoiseSpec(0), r)
            assert tap.shape == (c, r, r)

    def test_invalid_band(self, base_ckpt):
        with pytest.raises(ConfigError):
            activations(base_ckpt, z_for(9), NoiseSpec(0), 12)
        with pytest.raises(ConfigError):
            activations(base_ckpt, z_for(9), NoiseSpec(0), 128)

    def test_mutating_higher_band_leaves_tap_unchanged(self, base_ckpt):
        z = z_for(10)
        before = activations(base_ckpt, z, NoiseSpec(0), 16)
        mutated = base_ckpt.copy()
        mutated.params["synthesis.b32.conv1.weight"][:] *= 3.0
        mutated.params["synthesis.b64.torgb.bias"][:] = 1.0
        after = activations(mutated, z, NoiseSpec(0), 16)
        assert np.array_equal(before, after)

    def test_blends_differing_only_above_r_share_taps(self, base_ckpt, transfer_ckpt):
        # swap thresholds 16 and 32 disagree only in band 32's source
        a = blend_checkpoints(base_ckpt, transfer_ckpt, Swap(16), MappingPolicy.base())
        b = blend_checkpoints(base_ckpt, transfer_ckpt, Swap(32), MappingPolicy.base())
        for i in range(3):
            z = z_for(20 + i)
            ta = activations(a, z, NoiseSpec(i), 16)
            tb = activations(b, z, NoiseSpec(i), 16)
            assert np.array_equal(ta, tb)

    def test_mutating_lower_band_changes_tap(self, base_ckpt):
        # note: scaling a whole conv weight tensor is invisible because
        # demodulation cancels uniform weight scale, so poke a bias
        z = z_for(11)
        before = activations(base_ckpt, z, NoiseSpec(0), 16)
        mutated = base_ckpt.copy()
        mutated.params["synthesis.b8.conv1.bias"][:] = 0.5
        after = activations(mutated, z, NoiseSpec(0), 16)
        assert not np.array_equal(before, after)


class TestNoiseStreams:
    def test_same_name_same_noise(self):
        a = rng.normal(3, "synthesis.b8.conv0.noise_strength", (8, 8))
        b = rng.normal(3, "synthesis.b8.conv0.noise_strength", (8, 8))
        assert np.array_equal(a, b)

    def test_layer_streams_differ(self):
        a = rng.normal(3, "synthesis.b8.conv0.noise_strength", (8, 8))
        b = rng.normal(3, "synthesis.b8.conv1.noise_strength", (8, 8))
        assert not np.array_equal(a, b)
