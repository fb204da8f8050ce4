"""Synthetic ellipse phantoms, overlap metrics and batch evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .image import BinaryImage, GrayImage8, LabelImage
from .rng import Xoshiro256pp
from .watershed import MarkerError, PipelineConfig, segment


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    a: float
    b: float
    theta: float = 0.0

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("ellipse semi-axes must be positive")

    def mask(self, width: int, height: int) -> np.ndarray:
        """Pixel centers inside or on the ellipse."""
        ys, xs = np.indices((height, width), dtype=np.float64)
        dx = xs - self.cx
        dy = ys - self.cy
        ct, st = math.cos(self.theta), math.sin(self.theta)
        u = (dx * ct + dy * st) / self.a
        v = (-dx * st + dy * ct) / self.b
        return u * u + v * v <= 1.0

    def bounds(self):
        """Axis-aligned half-extents of the rotated ellipse."""
        ct, st = math.cos(self.theta), math.sin(self.theta)
        ex = math.sqrt((self.a * ct) ** 2 + (self.b * st) ** 2)
        ey = math.sqrt((self.a * st) ** 2 + (self.b * ct) ** 2)
        return ex, ey


@dataclass(frozen=True)
class Tumor:
    shape: Ellipse
    mean: float


def _default_tumors():
    return (Tumor(Ellipse(153.0, 143.0, 14.0, 10.0), 160.0),)


@dataclass(frozen=True)
class PhantomConfig:
    width: int = 256
    height: int = 256
    organ: Ellipse = Ellipse(128.0, 128.0, 90.0, 60.0)
    background_mean: float = 30.0
    organ_mean: float = 120.0
    tumors: tuple = field(default_factory=_default_tumors)
    noise_sigma: float = 8.0
    seed: int = 1

    def __post_init__(self):
        if self.width < 8 or self.height < 8:
            raise ValueError("phantom must be at least 8x8")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        object.__setattr__(self, "tumors", tuple(self.tumors))
        for t in self.tumors:
            if abs(t.mean - self.organ_mean) <= 0:
                raise ValueError("tumor mean must differ from organ mean")
        for e in (self.organ, *(t.shape for t in self.tumors)):
            ex, ey = e.bounds()
            if e.cx - ex < 0 or e.cx + ex > self.width - 1 or e.cy - ey < 0 or e.cy + ey > self.height - 1:
                raise ValueError("ellipse extends outside the image frame")


@dataclass(frozen=True)
class GroundTruth:
    """labels: 0 background, 1 organ, 2.. one per tumor."""

    labels: LabelImage

    @property
    def organ_mask(self) -> BinaryImage:
        return BinaryImage(self.labels.data >= 1)

    @property
    def tumor_mask(self) -> BinaryImage:
        return BinaryImage(self.labels.data >= 2)


def generate_phantom(cfg: PhantomConfig):
    """Render the phantom and its label field.

    Intensity is the region mean plus iid Gaussian noise (sigma=0 skips the
    noise entirely), clamped to [0, 255] and rounded half away from zero.
    Noise is drawn in row-major pixel order from xoshiro256++/Box-Muller, so
    a given config is reproducible bit for bit.
    """
    w, h = cfg.width, cfg.height
    organ = cfg.organ.mask(w, h)
    if not organ.any():
        raise ValueError("organ ellipse rasterizes to no pixels")
    labels = np.where(organ, 1, 0).astype(np.int32)
    taken = np.zeros((h, w), dtype=bool)
    for k, t in enumerate(cfg.tumors):
        m = t.shape.mask(w, h)
        if not m.any():
            raise ValueError(f"tumor {k} rasterizes to no pixels")
        if (m & ~organ).any():
            raise ValueError(f"tumor {k} leaves the organ interior")
        if (m & taken).any():
            raise ValueError(f"tumor {k} overlaps another tumor")
        taken |= m
        labels[m] = 2 + k

    means = np.array([cfg.background_mean, cfg.organ_mean] + [t.mean for t in cfg.tumors])
    base = means[labels]
    if cfg.noise_sigma > 0:
        rng = Xoshiro256pp(cfg.seed)
        base = base + cfg.noise_sigma * rng.gaussians(w * h).reshape(h, w)
    base = np.clip(base, 0.0, 255.0)
    img = (np.sign(base) * np.floor(np.abs(base) + 0.5)).astype(np.uint8)
    return GrayImage8(img), GroundTruth(LabelImage(labels, 1 + len(cfg.tumors)))


# ---------------------------------------------------------------------------
# Overlap metrics


def _overlap_counts(a: BinaryImage, b: BinaryImage):
    if a.data.shape != b.data.shape:
        raise ValueError("overlap metrics need equal dimensions")
    inter = int((a.data & b.data).sum())
    return inter, int(a.data.sum()), int(b.data.sum())


def dice(a: BinaryImage, b: BinaryImage) -> float:
    """2|A&B| / (|A|+|B|); two empty masks count as 1.0."""
    inter, na, nb = _overlap_counts(a, b)
    if na + nb == 0:
        return 1.0
    return 2.0 * inter / (na + nb)


def jaccard(a: BinaryImage, b: BinaryImage) -> float:
    """Intersection over union; two empty masks count as 1.0."""
    inter, na, nb = _overlap_counts(a, b)
    union = na + nb - inter
    if union == 0:
        return 1.0
    return inter / union


# ---------------------------------------------------------------------------
# Batch evaluation


def evaluate(configs, pipeline_cfg: PipelineConfig = PipelineConfig()) -> dict:
    """Segment each phantom and score the recovered tumor region.

    Per entry: Dice/Jaccard between the pipeline's tumor region (empty when
    no tumor_label was chosen, scoring 0.0) and the ground-truth tumor mask,
    plus the region count. A failing phantom records an error string and the
    rest still run. Aggregates cover the successful entries.
    """
    if not configs:
        raise ValueError("evaluate needs at least one phantom config")
    entries = []
    dices = []
    for cfg in configs:
        try:
            img, gt = generate_phantom(cfg)
            res = segment(img, pipeline_cfg)
            if res.tumor_label is None:
                pred = BinaryImage(np.zeros(img.data.shape, dtype=bool))
            else:
                pred = BinaryImage(res.labels.data == res.tumor_label)
            d = dice(pred, gt.tumor_mask)
            j = jaccard(pred, gt.tumor_mask)
            entries.append(
                {
                    "seed": cfg.seed,
                    "dice": d,
                    "jaccard": j,
                    "regions": res.labels.num_labels,
                }
            )
            dices.append(d)
        except (ValueError, MarkerError) as exc:
            entries.append({"seed": cfg.seed, "error": str(exc)})
    report = {
        "phantoms": entries,
        "mean_dice": float(np.mean(dices)) if dices else None,
        "min_dice": float(np.min(dices)) if dices else None,
        "max_dice": float(np.max(dices)) if dices else None,
    }
    return report
