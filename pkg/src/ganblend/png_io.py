"""Minimal PNG codec for [3, H, W] float images.

Encoding writes 8-bit RGB, no alpha, no interlace, filter 0 on every
scanline, one IDAT chunk. Output bytes are deterministic for a given
image (fixed zlib level).

Decoding accepts any scanline filters but only 8-bit depth, no
interlace, and color type 2 (RGB). Color type 6 (RGBA) is allowed only
through the explicit allow_alpha flag; the alpha plane is dropped.
That flag exists for the upload path of the HTTP service, where browser
canvases hand us RGBA.

Value mapping: byte = floor(clamp(v,-1,1)*127.5 + 127.5 + 0.5), i.e.
round-half-up; decode inverts via (byte - 127.5)/127.5.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import FormatError, NumericsError, ShapeError

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 9


def quantize(image: np.ndarray) -> np.ndarray:
    """Map f32 values in [-1,1] to u8, half-up rounding. Shape-preserving."""
    v = np.clip(np.asarray(image, dtype=np.float64), -1.0, 1.0)
    q = np.floor(v * 127.5 + 128.0)
    return np.clip(q, 0.0, 255.0).astype(np.uint8)


def dequantize(bytes_: np.ndarray) -> np.ndarray:
    return ((bytes_.astype(np.float64) - 127.5) / 127.5).astype(np.float32)


def _check_image(image: np.ndarray) -> np.ndarray:
    img = np.asarray(image, dtype=np.float32)
    if img.ndim != 3 or img.shape[0] != 3:
        raise ShapeError(f"image must be [3,H,W], got shape {img.shape}")
    if img.shape[1] < 1 or img.shape[2] < 1:
        raise ShapeError(f"empty image: shape {img.shape}")
    if not np.isfinite(img).all():
        raise NumericsError("image contains non-finite values")
    return img


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload))
    )


def encode_png_bytes(image: np.ndarray) -> bytes:
    img = _check_image(image)
    _, h, w = img.shape
    rows = quantize(img).transpose(1, 2, 0).reshape(h, w * 3)
    filtered = np.concatenate([np.zeros((h, 1), dtype=np.uint8), rows], axis=1)
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    idat = zlib.compress(filtered.tobytes(), _ZLIB_LEVEL)
    return (
        _SIGNATURE
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", idat)
        + _chunk(b"IEND", b"")
    )


def encode_png(image: np.ndarray, path) -> None:
    data = encode_png_bytes(image)
    with open(path, "wb") as f:
        f.write(data)


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def _unfilter(raw: bytes, h: int, w: int, bpp: int) -> np.ndarray:
    stride = w * bpp
    if len(raw) != h * (stride + 1):
        raise FormatError(
            f"decompressed size {len(raw)} does not match {h}x{w} with {bpp} bytes/pixel"
        )
    out = np.zeros((h, stride), dtype=np.uint8)
    prev = bytearray(stride)
    pos = 0
    for y in range(h):
        ftype = raw[pos]
        line = bytearray(raw[pos + 1 : pos + 1 + stride])
        pos += 1 + stride
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(bpp, stride):
                line[i] = (line[i] + line[i - bpp]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(stride):
                line[i] = (line[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(stride):
                left = line[i - bpp] if i >= bpp else 0
                line[i] = (line[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(stride):
                left = line[i - bpp] if i >= bpp else 0
                upleft = prev[i - bpp] if i >= bpp else 0
                line[i] = (line[i] + _paeth(left, prev[i], upleft)) & 0xFF
        else:
            raise FormatError(f"unknown scanline filter {ftype}")
        out[y] = np.frombuffer(bytes(line), dtype=np.uint8)
        prev = line
    return out


def decode_png_bytes(data: bytes, allow_alpha: bool = False) -> np.ndarray:
    if len(data) < len(_SIGNATURE) or data[: len(_SIGNATURE)] != _SIGNATURE:
        raise FormatError("not a PNG file")
    pos = len(_SIGNATURE)
    ihdr = None
    idat = b""
    while pos < len(data):
        if pos + 8 > len(data):
            raise FormatError("truncated PNG chunk header")
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        end = pos + 8 + length + 4
        if end > len(data):
            raise FormatError(f"truncated PNG chunk {tag!r}")
        payload = data[pos + 8 : pos + 8 + length]
        crc = struct.unpack(">I", data[pos + 8 + length : end])[0]
        if crc != zlib.crc32(tag + payload):
            raise FormatError(f"bad CRC in PNG chunk {tag!r}")
        if tag == b"IHDR":
            ihdr = payload
        elif tag == b"IDAT":
            idat += payload
        elif tag == b"IEND":
            break
        pos = end
    if ihdr is None or len(ihdr) != 13:
        raise FormatError("missing or malformed IHDR")
    w, h, depth, color, comp, filt, interlace = struct.unpack(">IIBBBBB", ihdr)
    if depth != 8:
        raise FormatError(f"only 8-bit PNGs supported, got bit depth {depth}")
    if color == 2:
        bpp = 3
    elif color == 6 and allow_alpha:
        bpp = 4
    else:
        raise FormatError(f"only RGB PNGs supported, got color type {color}")
    if comp != 0 or filt != 0:
        raise FormatError("unsupported PNG compression or filter method")
    if interlace != 0:
        raise FormatError("interlaced PNGs not supported")
    if not idat:
        raise FormatError("no IDAT data")
    try:
        raw = zlib.decompress(idat)
    except zlib.error as e:
        raise FormatError(f"corrupt IDAT stream: {e}") from e
    grid = _unfilter(raw, h, w, bpp).reshape(h, w, bpp)
    rgb = grid[:, :, :3].transpose(2, 0, 1)
    return dequantize(rgb)


def decode_png(path, allow_alpha: bool = False) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    return decode_png_bytes(data, allow_alpha=allow_alpha)
