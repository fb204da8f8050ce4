"""Core image containers and Netpbm I/O.

All containers wrap a read-only numpy array in row-major layout. Pixel (x, y)
means column x, row y, so ``data[y, x]`` addresses it.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np


class PgmParseError(ValueError):
    """Malformed PGM input. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GrayImage8:
    """8-bit grayscale image, values 0..255."""

    data: np.ndarray = field()

    def __post_init__(self):
        a = np.asarray(self.data)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("GrayImage8 needs a non-empty 2-D array")
        if a.dtype != np.uint8:
            if not (np.issubdtype(a.dtype, np.integer) and a.min() >= 0 and a.max() <= 255):
                raise ValueError("GrayImage8 values must be integers in [0, 255]")
            a = a.astype(np.uint8)
        object.__setattr__(self, "data", _readonly(a))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True, eq=False)
class FloatImage:
    """Float64 image; every value must be finite."""

    data: np.ndarray = field()

    def __post_init__(self):
        a = np.asarray(self.data, dtype=np.float64)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("FloatImage needs a non-empty 2-D array")
        if not np.isfinite(a).all():
            raise ValueError("FloatImage values must be finite")
        object.__setattr__(self, "data", _readonly(a))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Boolean mask."""

    data: np.ndarray = field()

    def __post_init__(self):
        a = np.asarray(self.data)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("BinaryImage needs a non-empty 2-D array")
        if a.dtype != np.bool_:
            if not np.isin(a, (0, 1)).all():
                raise ValueError("BinaryImage values must be 0/1 or bool")
            a = a.astype(bool)
        object.__setattr__(self, "data", _readonly(a))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True, eq=False)
class LabelImage:
    """Integer label field. Labels are the contiguous set {0..num_labels};
    every label in 1..num_labels occurs, 0 (ridge/unassigned) may be absent."""

    data: np.ndarray = field()
    num_labels: int = field(default=-1)

    def __post_init__(self):
        a = np.asarray(self.data)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("LabelImage needs a non-empty 2-D array")
        if not np.issubdtype(a.dtype, np.integer):
            raise ValueError("LabelImage values must be integers")
        a = a.astype(np.int32)
        if a.min() < 0:
            raise ValueError("LabelImage values must be >= 0")
        top = int(a.max())
        counts = np.bincount(a.ravel(), minlength=top + 1)
        if top > 0 and (counts[1:] == 0).any():
            missing = int(np.nonzero(counts[1:] == 0)[0][0]) + 1
            raise ValueError(f"label set not contiguous: label {missing} absent")
        n = self.num_labels
        if n == -1:
            n = top
        elif n != top:
            raise ValueError(f"num_labels={n} but max label is {top}")
        object.__setattr__(self, "data", _readonly(a))
        object.__setattr__(self, "num_labels", n)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True, eq=False)
class RgbImage:
    """8-bit RGB image, shape (h, w, 3)."""

    data: np.ndarray = field()

    def __post_init__(self):
        a = np.asarray(self.data)
        if a.ndim != 3 or a.shape[2] != 3 or a.shape[0] == 0 or a.shape[1] == 0:
            raise ValueError("RgbImage needs a non-empty (h, w, 3) array")
        if a.dtype != np.uint8:
            if not (np.issubdtype(a.dtype, np.integer) and a.min() >= 0 and a.max() <= 255):
                raise ValueError("RgbImage values must be integers in [0, 255]")
            a = a.astype(np.uint8)
        object.__setattr__(self, "data", _readonly(a))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


# ---------------------------------------------------------------------------
# Netpbm parsing

_WS = frozenset(b" \t\n\r\x0b\x0c")
_HASH = 0x23


def _tokenize(buf: bytes, start: int, count: int):
    """Collect ``count`` whitespace-delimited tokens from ``start``, skipping
    '#' comments. Returns (tokens, token offsets, position after last)."""
    toks, offs = [], []
    i, n = start, len(buf)
    while len(toks) < count:
        while i < n:
            b = buf[i]
            if b in _WS:
                i += 1
            elif b == _HASH:
                while i < n and buf[i] not in (0x0A, 0x0D):
                    i += 1
            else:
                break
        if i >= n:
            raise PgmParseError("unexpected end of header", n)
        j = i
        while j < n and buf[j] not in _WS and buf[j] != _HASH:
            j += 1
        toks.append(buf[i:j])
        offs.append(i)
        i = j
    return toks, offs, i


def _parse_int(tok: bytes, off: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise PgmParseError(f"{what} is not an integer: {tok!r}", off) from None


def decode_pgm(buf: bytes) -> GrayImage8:
    """Parse a binary (P5) or ASCII (P2) PGM byte string with maxval <= 255."""
    if len(buf) < 2:
        raise PgmParseError("file too short for a PGM magic number", 0)
    magic = buf[:2]
    if magic not in (b"P5", b"P2"):
        raise PgmParseError(f"unsupported magic {magic!r}, want P5 or P2", 0)
    toks, offs, pos = _tokenize(buf, 2, 3)
    w = _parse_int(toks[0], offs[0], "width")
    h = _parse_int(toks[1], offs[1], "height")
    maxval = _parse_int(toks[2], offs[2], "maxval")
    if w <= 0 or h <= 0:
        raise PgmParseError(f"dimensions must be positive, got {w}x{h}", offs[0])
    if maxval <= 0 or maxval > 255:
        raise PgmParseError(f"maxval {maxval} out of supported range 1..255", offs[2])

    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the payload
        if pos >= len(buf) or buf[pos] not in _WS:
            raise PgmParseError("missing whitespace after maxval", pos)
        pos += 1
        need = w * h
        if len(buf) - pos < need:
            raise PgmParseError(
                f"truncated payload: need {need} bytes, found {len(buf) - pos}", len(buf)
            )
        a = np.frombuffer(buf, dtype=np.uint8, count=need, offset=pos).reshape(h, w)
        return GrayImage8(a.copy())

    vals = np.empty(w * h, dtype=np.uint8)
    for k in range(w * h):
        try:
            toks, offs, pos = _tokenize(buf, pos, 1)
        except PgmParseError:
            raise PgmParseError(
                f"truncated payload: need {w * h} samples, found {k}", len(buf)
            ) from None
        v = _parse_int(toks[0], offs[0], "pixel value")
        if v < 0 or v > maxval:
            raise PgmParseError(f"pixel value {v} exceeds maxval {maxval}", offs[0])
        vals[k] = v
    return GrayImage8(vals.reshape(h, w))


def read_pgm(path: str) -> GrayImage8:
    with open(path, "rb") as fh:
        return decode_pgm(fh.read())


def encode_pgm(img: GrayImage8) -> bytes:
    """Binary PGM bytes with the exact header ``P5\\n<w> <h>\\n255\\n``."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data.tobytes()


def encode_ppm(img: RgbImage) -> bytes:
    """Binary PPM bytes with the exact header ``P6\\n<w> <h>\\n255\\n``."""
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data.tobytes()


def atomic_write_bytes(path: str, payload: bytes) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_pgm(img: GrayImage8, path: str) -> None:
    atomic_write_bytes(path, encode_pgm(img))


def write_ppm(img: RgbImage, path: str) -> None:
    atomic_write_bytes(path, encode_ppm(img))


# ---------------------------------------------------------------------------
# Conversions


def to_float(img: GrayImage8) -> FloatImage:
    return FloatImage(img.data.astype(np.float64))


def _round_half_away(a: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.floor(np.abs(a) + 0.5)


def to_u8(img: FloatImage) -> GrayImage8:
    """Clamp to [0, 255] then round half away from zero (127.5 -> 128)."""
    a = np.clip(img.data, 0.0, 255.0)
    return GrayImage8(_round_half_away(a).astype(np.uint8))


def rescale_to_u8(img: FloatImage) -> GrayImage8:
    """Affine map min->0, max->255; a constant image maps to all zeros."""
    a = img.data
    lo = float(a.min())
    hi = float(a.max())
    if hi == lo:
        return GrayImage8(np.zeros(a.shape, dtype=np.uint8))
    scaled = (a - lo) * (255.0 / (hi - lo))
    return GrayImage8(_round_half_away(np.clip(scaled, 0.0, 255.0)).astype(np.uint8))
