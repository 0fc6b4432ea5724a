"""Desk-scale style-based generator.

Structure: an MLP maps the latent z to a style vector w; synthesis
starts from a learned constant at 4x4 and doubles resolution per band.
Each band applies one or two style-modulated 3x3 convolutions (conv0
only above 4x4), each followed by per-layer noise, bias and leaky-relu.
A per-band 1x1 "torgb" projection feeds a skip image that is upsampled
and summed across bands; the final sum is the output image.

Everything here is deterministic: weights, noise and sample latents all
come from named rng streams, so a (checkpoint, z, noise seed) triple
always renders the same bits on the same build.

The synthesis engine is batched internally ([B, ...] everywhere) but
the public single-sample entry points always call it with B=1, so a
rendered image never depends on what it was batched with.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .checkpoint import Checkpoint, GeneratorConfig
from .errors import ConfigError, ShapeError
from .tensor_ops import (
    LEAKY_GAIN,
    LEAKY_SLOPE,
    _leaky,
    _modulated_conv_batch,
    upsample2x,
)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise realization identifier.

    The per-layer noise image for a conv is drawn from the stream
    (seed, that layer's noise_strength parameter name), so it depends on
    the layer's name rather than its position in the network.
    """

    seed: int = 0


def _noise_seed(noise) -> int:
    if isinstance(noise, NoiseSpec):
        return noise.seed
    return int(noise)


def manifest(config: GeneratorConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Authoritative (name, shape) list for a config, in network order."""
    s = config.style_dim
    out: list[tuple[str, tuple[int, ...]]] = []
    in_dim = config.latent_dim
    for i in range(config.mapping_layers):
        out.append((f"mapping.fc{i}.weight", (s, in_dim)))
        out.append((f"mapping.fc{i}.bias", (s,)))
        in_dim = s

    prev_c = None
    for r in config.bands():
        c = config.channels_per_band[r]
        base = f"synthesis.b{r}"
        if r == 4:
            out.append((f"{base}.const", (c, 4, 4)))
        else:
            # conv0 maps the previous band's channels onto this band's
            out.append((f"{base}.conv0.weight", (c, prev_c, 3, 3)))
            out.append((f"{base}.conv0.bias", (c,)))
            out.append((f"{base}.conv0.affine_weight", (prev_c, s)))
            out.append((f"{base}.conv0.affine_bias", (prev_c,)))
            out.append((f"{base}.conv0.noise_strength", (1,)))
        out.append((f"{base}.conv1.weight", (c, c, 3, 3)))
        out.append((f"{base}.conv1.bias", (c,)))
        out.append((f"{base}.conv1.affine_weight", (c, s)))
        out.append((f"{base}.conv1.affine_bias", (c,)))
        out.append((f"{base}.conv1.noise_strength", (1,)))
        out.append((f"{base}.torgb.weight", (3, c, 1, 1)))
        out.append((f"{base}.torgb.bias", (3,)))
        out.append((f"{base}.torgb.affine_weight", (c, s)))
        out.append((f"{base}.torgb.affine_bias", (c,)))
        prev_c = c
    return out


def _init_std(name: str, shape: tuple[int, ...]) -> float:
    """Weight std: 1/sqrt(fan_in); the 4x4 constant uses std 1."""
    if name.endswith("const"):
        return 1.0
    if len(shape) == 2:  # linear / affine [out, in]
        return 1.0 / float(np.sqrt(shape[1]))
    if len(shape) == 4:  # conv [out, in, k, k]
        return 1.0 / float(np.sqrt(shape[1] * shape[2] * shape[3]))
    raise ShapeError(f"no init rule for {name} with shape {shape}")


def init_random(config: GeneratorConfig, seed: int) -> Checkpoint:
    """Fresh fixture checkpoint: weights N(0, 1/fan_in), biases zero."""
    params: dict[str, np.ndarray] = {}
    for name, shape in manifest(config):
        leaf = name.rsplit(".", 1)[-1]
        if leaf in ("bias", "affine_bias", "noise_strength"):
            params[name] = np.zeros(shape, dtype=np.float32)
        else:
            std = np.float32(_init_std(name, shape))
            params[name] = rng.normal(seed, name, shape) * std
    return Checkpoint(config, params)


def synth_transfer(base: Checkpoint, strength: float, seed: int) -> Checkpoint:
    """Deterministic stand-in for transfer training.

    Perturbs every parameter with N(0,1) noise scaled by the tensor's
    own std (floored at 1e-3 so zero-initialized biases still move).
    Mapping parameters get 1% of the synthesis perturbation, mirroring
    how little transfer training moves them in practice.
    """
    if strength < 0:
        raise ConfigError(f"strength must be >= 0, got {strength}")
    if strength == 0.0:
        return base.copy()
    params: dict[str, np.ndarray] = {}
    for name, arr in base.params.items():
        rel = 0.01 if name.startswith("mapping.") else 1.0
        sigma = max(float(np.std(arr)), 1e-3)
        scale = np.float32(strength * rel * sigma)
        params[name] = arr + scale * rng.normal(seed, name, arr.shape)
    return Checkpoint(base.meta, params)


def _mapping_batch(ckpt: Checkpoint, z: np.ndarray) -> np.ndarray:
    """Mapping MLP on a [B, latent_dim] batch -> [B, style_dim]."""
    x = z
    slope = np.float32(LEAKY_SLOPE)
    gain = np.float32(LEAKY_GAIN)
    for i in range(ckpt.meta.mapping_layers):
        w = ckpt.params[f"mapping.fc{i}.weight"]
        b = ckpt.params[f"mapping.fc{i}.bias"]
        x = _leaky(x @ w.T + b, slope, gain)
    return x


def mapping_forward(ckpt: Checkpoint, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float32)
    if z.shape != (ckpt.meta.latent_dim,):
        raise ShapeError(
            f"z must have shape ({ckpt.meta.latent_dim},), got {z.shape}"
        )
    return _mapping_batch(ckpt, z[None])[0]


def _conv_layer(
    ckpt: Checkpoint,
    x: np.ndarray,
    w: np.ndarray,
    prefix: str,
    r: int,
    noise_seed: int,
) -> np.ndarray:
    p = ckpt.params
    styles = w @ p[f"{prefix}.affine_weight"].T + p[f"{prefix}.affine_bias"]
    y = _modulated_conv_batch(x, p[f"{prefix}.weight"], styles)
    noise_name = f"{prefix}.noise_strength"
    noise = rng.normal(noise_seed, noise_name, (r, r))
    y += p[noise_name][0] * noise[None, None]
    y += p[f"{prefix}.bias"][None, :, None, None]
    return _leaky(y, np.float32(LEAKY_SLOPE), np.float32(LEAKY_GAIN))


def _torgb(ckpt: Checkpoint, x: np.ndarray, w: np.ndarray, prefix: str) -> np.ndarray:
    p = ckpt.params
    styles = w @ p[f"{prefix}.affine_weight"].T + p[f"{prefix}.affine_bias"]
    y = _modulated_conv_batch(x, p[f"{prefix}.weight"], styles)
    return y + p[f"{prefix}.bias"][None, :, None, None]


def _synthesize(
    ckpt: Checkpoint,
    w: np.ndarray,
    noise_seed: int,
    tap_r: int | None = None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Run the synthesis ladder on styles w [B, style_dim].

    Returns (rgb [B,3,R,R], tap [B,C,r,r] or None). The tap is the
    activation leaving band tap_r: after its conv1 nonlinearity, before
    the next band's upsample.
    """
    cfg = ckpt.meta
    b = w.shape[0]
    const = ckpt.params["synthesis.b4.const"]
    x = np.ascontiguousarray(np.broadcast_to(const[None], (b,) + const.shape))
    rgb: np.ndarray | None = None
    tap: np.ndarray | None = None
    for r in cfg.bands():
        base = f"synthesis.b{r}"
        if r != 4:
            x = upsample2x(x)
            x = _conv_layer(ckpt, x, w, f"{base}.conv0", r, noise_seed)
        x = _conv_layer(ckpt, x, w, f"{base}.conv1", r, noise_seed)
        if tap_r == r:
            tap = x.copy()
        band_rgb = _torgb(ckpt, x, w, f"{base}.torgb")
        rgb = band_rgb if rgb is None else upsample2x(rgb) + band_rgb
    return rgb, tap


def forward_w(ckpt: Checkpoint, w: np.ndarray, noise) -> np.ndarray:
    """Render directly from a style vector, bypassing the mapping MLP."""
    w = np.asarray(w, dtype=np.float32)
    if w.shape != (ckpt.meta.style_dim,):
        raise ShapeError(
            f"w must have shape ({ckpt.meta.style_dim},), got {w.shape}"
        )
    rgb, _ = _synthesize(ckpt, w[None], _noise_seed(noise))
    return rgb[0]


def forward(ckpt: Checkpoint, z: np.ndarray, noise) -> np.ndarray:
    """Full render G(z): [3, max_resolution, max_resolution] float32."""
    w = mapping_forward(ckpt, z)
    rgb, _ = _synthesize(ckpt, w[None], _noise_seed(noise))
    return rgb[0]


def activations(ckpt: Checkpoint, z: np.ndarray, noise, tap_r: int) -> np.ndarray:
    """Feature tensor exiting band tap_r for latent z."""
    if tap_r not in ckpt.meta.bands():
        raise ConfigError(f"tap_r {tap_r} is not a band of this config")
    w = mapping_forward(ckpt, z)
    _, tap = _synthesize(ckpt, w[None], _noise_seed(noise), tap_r=tap_r)
    assert tap is not None
    return tap[0]
