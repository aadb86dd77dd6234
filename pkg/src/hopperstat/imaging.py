"""Raster decoding, BT.601 grayscale conversion and line sampling.

Images are held as immutable ``uint8`` arrays of shape ``(height, width)``.
PGM (P5) is parsed here; PNG and JPEG go through Pillow.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from PIL import Image, UnidentifiedImageError

from hopperstat.errors import CorruptImage, OutOfBounds, UnsupportedFormat, ZeroDimension

LUMA_R = 0.299
LUMA_G = 0.587
LUMA_B = 0.114

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
JPEG_MAGIC = b"\xff\xd8\xff"
PGM_MAGIC = b"P5"

_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n\r]*[\n\r])*(\S+)")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit luminance raster, row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {px.shape}")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise ZeroDimension(f"image has zero dimension {px.shape[1]}x{px.shape[0]}")
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_values(cls, width: int, height: int, values) -> "GrayImage":
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        if arr.size != width * height:
            raise ValueError(f"data length {arr.size} != {width}x{height}")
        return cls(arr.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> np.ndarray:
        return self.pixels.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))


@dataclass(frozen=True)
class LineSpec:
    name: str
    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("line name must be nonempty")
        for attr in ("x0", "y0", "x1", "y1"):
            value = getattr(self, attr)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{attr} must be an integer, got {value!r}")
            object.__setattr__(self, attr, int(value))

    @property
    def coords(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.x1, self.y1)

    def reversed(self) -> "LineSpec":
        return LineSpec(self.name, self.x1, self.y1, self.x0, self.y0)


@dataclass(frozen=True, eq=False)
class LineSample:
    line_name: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def count(self) -> int:
        return int(self.values.size)


def to_gray(r: int, g: int, b: int) -> int:
    """BT.601 luma of one RGB pixel, rounded half away from zero."""
    y = LUMA_R * r + LUMA_G * g + LUMA_B * b
    return min(255, max(0, int(y + 0.5)))


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    """Vectorised :func:`to_gray` over an ``(..., 3)`` array."""
    rgb = rgb.astype(np.float64)
    y = LUMA_R * rgb[..., 0] + LUMA_G * rgb[..., 1] + LUMA_B * rgb[..., 2]
    return np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)


def _decode_pgm(data: bytes) -> GrayImage:
    pos = 2
    fields = []
    for _ in range(3):
        m = _PGM_TOKEN.match(data, pos)
        if m is None:
            raise CorruptImage("truncated PGM header")
        fields.append(m.group(1))
        pos = m.end()
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise CorruptImage(f"non-numeric PGM header field in {fields!r}") from None
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise CorruptImage("missing whitespace after PGM maxval")
    pos += 1
    if width < 0 or height < 0:
        raise CorruptImage("negative PGM dimension")
    if width == 0 or height == 0:
        raise ZeroDimension(f"PGM has zero dimension {width}x{height}")
    if not 0 < maxval <= 255:
        raise UnsupportedFormat(f"only 8-bit PGM is supported (maxval={maxval})")
    expected = width * height
    raster = data[pos : pos + expected]
    if len(raster) < expected:
        raise CorruptImage(f"PGM raster truncated: {len(raster)} of {expected} bytes")
    px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    if maxval < 255 and px.max() > maxval:
        raise CorruptImage(f"PGM sample exceeds maxval {maxval}")
    return GrayImage(px)


def _decode_pillow(data: bytes) -> GrayImage:
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.width == 0 or im.height == 0:
                raise ZeroDimension(f"image has zero dimension {im.width}x{im.height}")
            mode = im.mode
            if mode == "L":
                return GrayImage(np.array(im, dtype=np.uint8))
            if mode == "LA":
                return GrayImage(np.array(im.getchannel("L"), dtype=np.uint8))
            if mode == "1":
                return GrayImage(np.array(im.convert("L"), dtype=np.uint8))
            if mode.startswith("I") or mode == "F":
                raise UnsupportedFormat(f"only 8-bit rasters are supported (mode {mode})")
            rgb = np.array(im.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise CorruptImage(f"decoder failure: {exc}") from exc
    return GrayImage(rgb_to_gray(rgb))


def decode_image(encoded: bytes) -> GrayImage:
    """Decode PNG, JPEG or binary PGM bytes into a :class:`GrayImage`."""
    if encoded.startswith(PGM_MAGIC):
        return _decode_pgm(encoded)
    if encoded.startswith(PNG_MAGIC) or encoded.startswith(JPEG_MAGIC):
        return _decode_pillow(encoded)
    raise UnsupportedFormat(f"unrecognized magic bytes {encoded[:8]!r}")


def read_image(path) -> GrayImage:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def encode_pgm(img: GrayImage) -> bytes:
    header = b"P5\n%d %d\n255\n" % (img.width, img.height)
    return header + img.pixels.tobytes()


def _bresenham_walk(x0, y0, x1, y1):
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    points = [(x, y)]
    while x != x1 or y != y1:
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy
        points.append((x, y))
    return points


def bresenham(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """8-connected integer Bresenham walk, both endpoints included.

    Always rasterised from the lexicographically smaller endpoint so that
    swapping the endpoints visits the same pixels in reverse order.
    """
    if (x1, y1) < (x0, y0):
        return _bresenham_walk(x1, y1, x0, y0)[::-1]
    return _bresenham_walk(x0, y0, x1, y1)


@lru_cache(maxsize=256)
def _line_index(x0, y0, x1, y1):
    pts = bresenham(x0, y0, x1, y1)
    xs = np.fromiter((p[0] for p in pts), dtype=np.intp, count=len(pts))
    ys = np.fromiter((p[1] for p in pts), dtype=np.intp, count=len(pts))
    xs.flags.writeable = False
    ys.flags.writeable = False
    return ys, xs


def check_in_bounds(spec: LineSpec, width: int, height: int) -> None:
    for x, y in ((spec.x0, spec.y0), (spec.x1, spec.y1)):
        if not (0 <= x < width and 0 <= y < height):
            raise OutOfBounds(spec.name, x, y, width, height)


def sample_line(img: GrayImage, spec: LineSpec) -> LineSample:
    check_in_bounds(spec, img.width, img.height)
    ys, xs = _line_index(*spec.coords)
    return LineSample(spec.name, img.pixels[ys, xs])
