"""Dense f32 kernels for the synthesis network.

Layout conventions: feature maps are [C, H, W] (batched: [B, C, H, W]),
conv weights are [C_out, C_in, k, k], images are [3, H, W] in nominal
range [-1, 1]. Convolutions are same-padding cross-correlations with
zero padding, k odd. Everything is float32 in and float32 out.

Public kernels validate shapes and refuse to emit non-finite values.
The underscore-prefixed batched helpers skip those checks; the
generator engine calls them on already-validated checkpoints.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericsError, ShapeError

LEAKY_SLOPE = 0.2
LEAKY_GAIN = math.sqrt(2.0)
DEMOD_EPS = 1e-8


def _f32(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=np.float32)


def _conv2d_batch(x: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Plain same-padding cross-correlation, x [B,C,H,W], weight [O,C,k,k].

    im2col into one [C*k*k, B*H*W] matrix and a single GEMM; one copy of
    the patch matrix is the price for keeping every band on the fast
    BLAS path.
    """
    b, c, h, w = x.shape
    o, ci, kh, kw = weight.shape
    pad = kh // 2
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    win = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    # win is [B,C,H,W,k,k]; rows of the patch matrix must walk (c, kh, kw)
    # in the same order as weight.reshape(O, -1) columns
    patches = win.transpose(1, 4, 5, 0, 2, 3).reshape(c * kh * kw, b * h * w)
    out = weight.reshape(o, c * kh * kw) @ patches
    return np.ascontiguousarray(out.reshape(o, b, h, w).transpose(1, 0, 2, 3))


def conv2d(input: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Unmodulated same-padding conv, input [C,H,W], weight [O,C,k,k]."""
    x = _f32(input)
    w = _f32(weight)
    if x.ndim != 3:
        raise ShapeError(f"input must be [C,H,W], got rank {x.ndim}")
    if w.ndim != 4:
        raise ShapeError(f"weight must be [O,C,k,k], got rank {w.ndim}")
    if w.shape[1] != x.shape[0]:
        raise ShapeError(
            f"in-channel mismatch: input has {x.shape[0]}, weight expects {w.shape[1]}"
        )
    if w.shape[2] != w.shape[3] or w.shape[2] % 2 == 0:
        raise ShapeError(f"kernel must be square and odd, got {w.shape[2]}x{w.shape[3]}")
    return _conv2d_batch(x[None], w)[0]


def conv2d_modulated(
    input: np.ndarray,
    weight: np.ndarray,
    style: np.ndarray,
    epsilon: float = DEMOD_EPS,
) -> np.ndarray:
    """Style-modulated, demodulated convolution.

    Effective weight per output channel j:
        w''_{j,i,a,b} = style_i * w_{j,i,a,b} / sqrt(sum_{i,a,b}(style_i * w)^2 + epsilon)
    then a plain same-padding cross-correlation with w''.

    epsilon may be 0: the scale of `style` then cancels exactly, which
    is the property the demodulation exists to provide. It must not be
    negative, and a zero divisor (all-zero style*weight with epsilon=0)
    is an error rather than an Inf.
    """
    x = _f32(input)
    w = _f32(weight)
    s = _f32(style)
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if x.ndim != 3 or w.ndim != 4 or s.ndim != 1:
        raise ShapeError(
            f"expected input [C,H,W], weight [O,C,k,k], style [C]; "
            f"got ranks {x.ndim}, {w.ndim}, {s.ndim}"
        )
    if not (x.shape[0] == w.shape[1] == s.shape[0]):
        raise ShapeError(
            f"in-channel mismatch: input {x.shape[0]}, weight {w.shape[1]}, style {s.shape[0]}"
        )
    if w.shape[2] != w.shape[3] or w.shape[2] % 2 == 0:
        raise ShapeError(f"kernel must be square and odd, got {w.shape[2]}x{w.shape[3]}")
    if not (np.isfinite(x).all() and np.isfinite(w).all() and np.isfinite(s).all()):
        raise NumericsError("non-finite values in conv2d_modulated inputs")

    wmod = w * s[None, :, None, None]
    denom = np.sqrt(np.sum(np.square(wmod), axis=(1, 2, 3)) + np.float32(epsilon))
    if not (denom > 0).all():
        raise NumericsError("demodulation divisor is zero; pass epsilon > 0")
    weff = wmod / denom[:, None, None, None]
    out = _conv2d_batch(x[None], weff.astype(np.float32))[0]
    if not np.isfinite(out).all():
        raise NumericsError("non-finite values in conv2d_modulated output")
    return out


def _modulated_conv_batch(
    x: np.ndarray,
    weight: np.ndarray,
    styles: np.ndarray,
    epsilon: float = DEMOD_EPS,
) -> np.ndarray:
    """Batched modulated conv, x [B,C,H,W], styles [B,C].

    Same math as conv2d_modulated but restructured so the weight GEMM is
    shared across the batch: scale the input by the style, convolve with
    the raw weight, then rescale each output channel by its demodulation
    factor. Equivalent up to f32 rounding.
    """
    xs = x * styles[:, :, None, None]
    y = _conv2d_batch(xs, weight)
    w2 = np.sum(np.square(weight), axis=(2, 3))  # [O, C]
    denom = np.sqrt(np.square(styles) @ w2.T + np.float32(epsilon))  # [B, O]
    y *= (np.float32(1.0) / denom)[:, :, None, None]
    return y


def upsample2x(input: np.ndarray) -> np.ndarray:
    """Nearest-neighbor 2x upsampling over the trailing two axes."""
    x = _f32(input)
    if x.ndim < 2:
        raise ShapeError(f"need at least 2 spatial axes, got rank {x.ndim}")
    return np.repeat(np.repeat(x, 2, axis=-2), 2, axis=-1)


def leaky_relu(
    input: np.ndarray, slope: float = LEAKY_SLOPE, gain: float = LEAKY_GAIN
) -> np.ndarray:
    """Elementwise gain*x for x >= 0, gain*slope*x below."""
    if not 0.0 < slope < 1.0:
        raise ValueError(f"slope must be in (0,1), got {slope}")
    x = _f32(input)
    return _leaky(x, np.float32(slope), np.float32(gain))


def _leaky(x: np.ndarray, slope: np.float32, gain: np.float32) -> np.ndarray:
    return gain * np.where(x >= 0, x, slope * x)
