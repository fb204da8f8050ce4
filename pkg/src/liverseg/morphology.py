"""Grayscale and binary morphology: flat-SE erosion/dilation, geodesic
reconstruction, regional maxima, minima imposition, exact distance transform.

Grayscale border policy: erosion treats out-of-bounds as 255, dilation as 0,
so the image frame never generates fake extrema.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .image import BinaryImage, FloatImage, GrayImage8, LabelImage


class Connectivity(enum.Enum):
    FOUR = 4
    EIGHT = 8


@dataclass(frozen=True)
class StructuringElement:
    """Flat structuring element given by symmetric pixel offsets."""

    offsets: tuple

    def __post_init__(self):
        offs = tuple(sorted((int(dx), int(dy)) for dx, dy in self.offsets))
        if (0, 0) not in offs:
            raise ValueError("structuring element must contain the origin")
        members = set(offs)
        for dx, dy in offs:
            if (-dx, -dy) not in members:
                raise ValueError(f"structuring element not symmetric: ({dx},{dy})")
        object.__setattr__(self, "offsets", offs)

    @property
    def radius(self) -> int:
        return max(max(abs(dx), abs(dy)) for dx, dy in self.offsets)

    @classmethod
    def disk(cls, r: int) -> "StructuringElement":
        """Digital disk: all offsets with dx^2 + dy^2 <= r^2."""
        if r < 0:
            raise ValueError("disk radius must be >= 0")
        offs = [
            (dx, dy)
            for dy in range(-r, r + 1)
            for dx in range(-r, r + 1)
            if dx * dx + dy * dy <= r * r
        ]
        return cls(tuple(offs))


def _minmax(a: np.ndarray, se: StructuringElement, take_min: bool, pad_value: int) -> np.ndarray:
    r = se.radius
    h, w = a.shape
    padded = np.pad(a, r, mode="constant", constant_values=pad_value)
    out = None
    reduce_fn = np.minimum if take_min else np.maximum
    for dx, dy in se.offsets:
        view = padded[r + dy : r + dy + h, r + dx : r + dx + w]
        out = view.copy() if out is None else reduce_fn(out, view, out=out)
    return out


def erode(img: GrayImage8, se: StructuringElement) -> GrayImage8:
    """Minimum over the SE window; out-of-bounds counts as 255."""
    return GrayImage8(_minmax(img.data, se, take_min=True, pad_value=255))


def dilate(img: GrayImage8, se: StructuringElement) -> GrayImage8:
    """Maximum over the SE window; out-of-bounds counts as 0."""
    return GrayImage8(_minmax(img.data, se, take_min=False, pad_value=0))


def erode_binary(mask: BinaryImage, se: StructuringElement) -> BinaryImage:
    u8 = np.where(mask.data, 255, 0).astype(np.uint8)
    return BinaryImage(_minmax(u8, se, take_min=True, pad_value=255) > 0)


def dilate_binary(mask: BinaryImage, se: StructuringElement) -> BinaryImage:
    u8 = np.where(mask.data, 255, 0).astype(np.uint8)
    return BinaryImage(_minmax(u8, se, take_min=False, pad_value=0) > 0)


def _check_dims(a, b, what: str) -> None:
    if a.data.shape[:2] != b.data.shape[:2]:
        raise ValueError(
            f"{what}: dimensions differ, "
            f"{a.data.shape[1]}x{a.data.shape[0]} vs {b.data.shape[1]}x{b.data.shape[0]}"
        )


def _first_violation(bad: np.ndarray):
    y, x = np.unravel_index(int(np.argmax(bad)), bad.shape)
    return int(x), int(y)


def reconstruct_by_dilation(
    marker: GrayImage8, mask: GrayImage8, conn: Connectivity = Connectivity.EIGHT
) -> GrayImage8:
    """Largest image <= mask reachable from marker by repeated unit dilations
    clipped under the mask (fixpoint of marker = min(dilate1(marker), mask))."""
    _check_dims(marker, mask, "reconstruct_by_dilation")
    bad = marker.data > mask.data
    if bad.any():
        x, y = _first_violation(bad)
        raise ValueError(f"marker exceeds mask, first at pixel ({x}, {y})")
    out = _kernels.recon_dilate(
        marker.data.astype(np.float64), mask.data.astype(np.float64), conn is Connectivity.EIGHT
    )
    return GrayImage8(out.astype(np.uint8))


def reconstruct_by_erosion(
    marker: GrayImage8, mask: GrayImage8, conn: Connectivity = Connectivity.EIGHT
) -> GrayImage8:
    """Dual of reconstruction by dilation; requires marker >= mask."""
    _check_dims(marker, mask, "reconstruct_by_erosion")
    bad = marker.data < mask.data
    if bad.any():
        x, y = _first_violation(bad)
        raise ValueError(f"marker below mask, first at pixel ({x}, {y})")
    out = _kernels.recon_dilate(
        255.0 - marker.data.astype(np.float64),
        255.0 - mask.data.astype(np.float64),
        conn is Connectivity.EIGHT,
    )
    return GrayImage8((255.0 - out).astype(np.uint8))


def open_by_reconstruction(
    img: GrayImage8, se: StructuringElement, conn: Connectivity = Connectivity.EIGHT
) -> GrayImage8:
    """Erode, then rebuild under the original image. Removes bright detail
    narrower than the SE while preserving surviving structure exactly."""
    return reconstruct_by_dilation(erode(img, se), img, conn)


def close_by_reconstruction(
    img: GrayImage8, se: StructuringElement, conn: Connectivity = Connectivity.EIGHT
) -> GrayImage8:
    """Dilate, then rebuild above the original image (dark-detail dual)."""
    return reconstruct_by_erosion(dilate(img, se), img, conn)


def regional_maxima(img: GrayImage8, conn: Connectivity = Connectivity.EIGHT) -> BinaryImage:
    """Equal-value plateaus with no strictly greater neighbor."""
    out = _kernels.extrema(img.data.astype(np.float64), conn is Connectivity.EIGHT, True)
    return BinaryImage(out > 0)


def _regional_extrema_float(a: np.ndarray, conn: Connectivity, maxima: bool) -> np.ndarray:
    return _kernels.extrema(np.ascontiguousarray(a, dtype=np.float64), conn is Connectivity.EIGHT, maxima) > 0


def impose_minima(
    img: GrayImage8, minima: BinaryImage, conn: Connectivity = Connectivity.EIGHT
) -> GrayImage8:
    """Force the marked pixels to be the only regional minima.

    fm is 0 on markers and 255 elsewhere; the result is the reconstruction by
    erosion of fm over min(fm, img + 1) (saturating increment).
    """
    _check_dims(img, minima, "impose_minima")
    if not minima.data.any():
        raise ValueError("impose_minima: marker mask is empty")
    fm = np.where(minima.data, 0, 255).astype(np.uint8)
    bumped = np.minimum(img.data.astype(np.int32) + 1, 255).astype(np.uint8)
    g = np.minimum(fm, bumped)
    return reconstruct_by_erosion(GrayImage8(fm), GrayImage8(g), conn)


def distance_transform(mask: BinaryImage) -> FloatImage:
    """Exact Euclidean distance from each foreground pixel to the nearest
    background pixel; 0 on background. All-foreground inputs get the
    sentinel value width + height everywhere."""
    fg = mask.data
    if fg.all():
        return FloatImage(np.full(fg.shape, float(mask.width + mask.height)))
    sq = _kernels.edt_sq(fg.astype(np.uint8))
    return FloatImage(np.sqrt(sq.astype(np.float64)))


def label_components(mask: BinaryImage, conn: Connectivity = Connectivity.EIGHT) -> LabelImage:
    """Connected components labeled 1..k in row-major first-encounter order."""
    lab, k = _kernels.label_mask(mask.data, conn is Connectivity.EIGHT)
    return LabelImage(lab, k)
