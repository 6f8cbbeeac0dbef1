"""Paint raster: subtractive pigment deposition and PNG output.

The raster lives in float64 RGB with white = 1.0. Pigments darken their
complementary channel multiplicatively, so deposition order within a step
does not matter and repeated passes saturate smoothly. Pixel row 0 is the
top of the image; world coordinates are y-up, so row = height_px - 1 - row_from_bottom.
"""
from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np


def encode_png(rgb8: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as a PNG byte string.

    Always emits 8-bit truecolor with filter type 0 on every scanline and a
    single IDAT chunk, so identical pixels give identical bytes.
    """
    if rgb8.dtype != np.uint8 or rgb8.ndim != 3 or rgb8.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) uint8 array")
    height, width = rgb8.shape[:2]
    # Prepend the filter byte to each scanline in one allocation.
    lines = np.zeros((height, 1 + width * 3), dtype=np.uint8)
    lines[:, 1:] = rgb8.reshape(height, width * 3)
    compressed = zlib.compress(lines.tobytes(), 6)

    def chunk(tag: bytes, data: bytes) -> bytes:
        return (struct.pack(">I", len(data)) + tag + data
                + struct.pack(">I", zlib.crc32(tag + data)))

    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n"
            + chunk(b"IHDR", ihdr)
            + chunk(b"IDAT", compressed)
            + chunk(b"IEND", b""))


def to_u8(channel: np.ndarray) -> np.ndarray:
    """Quantize floats in [0, 1] to uint8 with floor(x * 255 + 0.5)."""
    return np.floor(channel * 255.0 + 0.5).astype(np.uint8)


@dataclass(frozen=True)
class Stamp:
    """One deposited disc, enough to replay the deposit elsewhere."""
    robot: int
    x: float
    y: float
    width: float
    alpha: tuple[float, float, float]


class Canvas:
    def __init__(self, size: tuple[float, float], pixels_per_unit: float = 2.0,
                 trail_strength: float = 0.08):
        self.size = (float(size[0]), float(size[1]))
        self.scale = float(pixels_per_unit)
        self.strength = float(trail_strength)
        self.width_px = int(round(self.size[0] * self.scale))
        self.height_px = int(round(self.size[1] * self.scale))
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError("canvas raster collapsed to zero pixels")
        self.rgb = np.ones((self.height_px, self.width_px, 3), dtype=np.float64)

    def deposit(self, x: float, y: float, width: float,
                alpha: tuple[float, float, float]) -> None:
        """Darken a disc of the given diameter (world units) centred at (x, y).

        alpha holds the per-pigment proportions (C, M, Y); pigment j scales
        its complementary channel by (1 - strength * alpha[j]).
        """
        s = self.scale
        cx = x * s
        cy = y * s
        r = width * s / 2.0
        c0 = max(0, int(math.floor(cx - r - 1.0)))
        c1 = min(self.width_px - 1, int(math.ceil(cx + r + 1.0)))
        rb0 = max(0, int(math.floor(cy - r - 1.0)))
        rb1 = min(self.height_px - 1, int(math.ceil(cy + r + 1.0)))
        if c0 > c1 or rb0 > rb1:
            return
        cols = np.arange(c0, c1 + 1, dtype=np.float64) + 0.5 - cx
        rows_b = np.arange(rb0, rb1 + 1, dtype=np.float64) + 0.5 - cy
        inside = (rows_b[:, None] ** 2 + cols[None, :] ** 2) <= r * r
        # Bottom-up rows rb0..rb1 map to array rows top-down.
        top0 = self.height_px - 1 - rb1
        top1 = self.height_px - 1 - rb0
        region = self.rgb[top0:top1 + 1, c0:c1 + 1]
        inside_td = inside[::-1]
        for pigment in range(3):
            a = alpha[pigment]
            if a <= 0.0:
                continue
            factor = 1.0 - self.strength * a
            channel = region[:, :, pigment]
            channel[inside_td] = np.clip(channel[inside_td] * factor, 0.0, 1.0)

    def apply_stamp(self, stamp: Stamp) -> None:
        self.deposit(stamp.x, stamp.y, stamp.width, stamp.alpha)

    def as_u8(self) -> np.ndarray:
        return to_u8(self.rgb)

    def render_png(self) -> bytes:
        return encode_png(self.as_u8())
