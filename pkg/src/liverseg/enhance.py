"""Histogram statistics and Otsu thresholding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import BinaryImage, GrayImage8


@dataclass(frozen=True)
class Histogram:
    """256-bin intensity histogram."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (256,):
            raise ValueError("Histogram needs exactly 256 bins")
        if (c < 0).any():
            raise ValueError("histogram counts must be non-negative")
        if c.sum() == 0:
            raise ValueError("histogram is empty")
        c = np.ascontiguousarray(c)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class OtsuResult:
    threshold: int
    between_class_variance: float
    degenerate: bool


def histogram(img: GrayImage8) -> Histogram:
    return Histogram(np.bincount(img.data.ravel(), minlength=256))


def otsu_threshold(hist: Histogram) -> OtsuResult:
    """Split maximizing the between-class variance.

    Candidate splits t in 0..254 put intensities <= t in class 0. Splits with
    an empty class score 0. Ties take the floor of the mean of all argmax
    splits. A single occupied bin short-circuits: that bin is returned with
    degenerate=True.
    """
    c = hist.counts.astype(np.float64)
    occupied = np.nonzero(hist.counts)[0]
    if occupied.size == 1:
        return OtsuResult(int(occupied[0]), 0.0, True)

    levels = np.arange(256, dtype=np.float64)
    total = c.sum()
    total_mass = (levels * c).sum()

    # cumulative moments give every split in one pass
    w0 = np.cumsum(c)[:255]
    m0 = np.cumsum(levels * c)[:255]
    w1 = total - w0
    m1 = total_mass - m0

    sigma = np.zeros(255, dtype=np.float64)
    ok = (w0 > 0) & (w1 > 0)
    mu0 = np.divide(m0, w0, out=np.zeros_like(m0), where=ok)
    mu1 = np.divide(m1, w1, out=np.zeros_like(m1), where=ok)
    sigma[ok] = (w0[ok] / total) * (w1[ok] / total) * (mu0[ok] - mu1[ok]) ** 2

    best = sigma.max()
    ties = np.nonzero(sigma == best)[0]
    threshold = int(ties.sum()) // int(ties.size)
    return OtsuResult(threshold, float(best), False)


def binarize(img: GrayImage8, threshold: int) -> BinaryImage:
    """Foreground = pixels strictly above the threshold."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold {threshold} outside [0, 255]")
    return BinaryImage(img.data > threshold)
