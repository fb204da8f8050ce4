"""Seeded watershed flooding and the marker-controlled segmentation pipeline."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .enhance import binarize, histogram, otsu_threshold
from .gradient import sobel_gradient_magnitude
from .image import (
    BinaryImage,
    FloatImage,
    GrayImage8,
    LabelImage,
    RgbImage,
    rescale_to_u8,
    to_float,
)
from .morphology import (
    Connectivity,
    StructuringElement,
    _regional_extrema_float,
    dilate_binary,
    distance_transform,
    erode_binary,
    impose_minima,
    label_components,
    regional_maxima,
    close_by_reconstruction,
    open_by_reconstruction,
)


class MarkerError(RuntimeError):
    """Pipeline could not derive usable markers from the input."""


class TumorPolicy(enum.Enum):
    MAX_MEAN_CONTRAST = "max_mean_contrast"
    LARGEST_INTERIOR = "largest_interior"


class ThresholdSource(enum.Enum):
    OPENING_CLOSING = "opening_closing"


@dataclass(frozen=True)
class PipelineConfig:
    se_radius: int = 5
    connectivity: Connectivity = Connectivity.EIGHT
    min_marker_area: int = 20
    fg_shrink_radius: int = 1
    threshold_source: ThresholdSource = ThresholdSource.OPENING_CLOSING
    tumor_policy: TumorPolicy = TumorPolicy.MAX_MEAN_CONTRAST

    def __post_init__(self):
        if self.se_radius < 1:
            raise ValueError("se_radius must be >= 1")
        if self.min_marker_area < 1:
            raise ValueError("min_marker_area must be >= 1")
        if self.fg_shrink_radius < 0:
            raise ValueError("fg_shrink_radius must be >= 0")
        if not isinstance(self.connectivity, Connectivity):
            raise ValueError("connectivity must be a Connectivity enum member")


@dataclass(frozen=True)
class RegionStats:
    label: int
    area: int
    mean: float
    centroid: tuple
    touches_border: bool


@dataclass(frozen=True)
class SegmentationResult:
    labels: LabelImage
    ridge: BinaryImage
    fg_markers: BinaryImage
    bg_markers: BinaryImage
    tumor_label: int | None
    degenerate: bool
    stages: tuple = field(repr=False)


# ---------------------------------------------------------------------------
# Flooding


def watershed_seeded(
    relief: FloatImage, markers: LabelImage, conn: Connectivity = Connectivity.EIGHT
) -> LabelImage:
    """Meyer-style priority flood from the marker regions.

    Pixels are claimed in increasing (relief value, insertion order); a pixel
    reached by two different labels before being settled becomes ridge (0).
    Only the ordering of relief values matters, so any monotone relief
    transform yields the same labels.
    """
    if relief.data.shape != markers.data.shape:
        raise ValueError(
            f"watershed_seeded: relief {relief.width}x{relief.height} vs "
            f"markers {markers.width}x{markers.height}"
        )
    if markers.num_labels < 1:
        raise ValueError("watershed_seeded: marker image has no labels")
    # rank transform: flood order depends on value order only
    _, rank = np.unique(relief.data, return_inverse=True)
    rank = np.ascontiguousarray(rank.reshape(relief.data.shape).astype(np.int64))
    out = _kernels.flood(rank, markers.data, conn is Connectivity.EIGHT)
    return LabelImage(out, markers.num_labels)


def watershed_unseeded(relief: FloatImage, conn: Connectivity = Connectivity.EIGHT) -> LabelImage:
    """Flood from the regional minima of the relief."""
    minima = _regional_extrema_float(relief.data, conn, maxima=False)
    markers = label_components(BinaryImage(minima), conn)
    return watershed_seeded(relief, markers, conn)


# ---------------------------------------------------------------------------
# Region bookkeeping


def region_stats(img: GrayImage8, labels: LabelImage) -> list:
    """Area, intensity mean, centroid and border contact per nonzero label."""
    if labels.data.shape != img.data.shape:
        raise ValueError("region_stats: label and image dimensions differ")
    lab = labels.data
    n = labels.num_labels
    flat = lab.ravel()
    counts = np.bincount(flat, minlength=n + 1)
    sums = np.bincount(flat, weights=img.data.ravel().astype(np.float64), minlength=n + 1)
    ys, xs = np.indices(lab.shape)
    sx = np.bincount(flat, weights=xs.ravel().astype(np.float64), minlength=n + 1)
    sy = np.bincount(flat, weights=ys.ravel().astype(np.float64), minlength=n + 1)
    border = np.zeros(n + 1, dtype=bool)
    for edge in (lab[0, :], lab[-1, :], lab[:, 0], lab[:, -1]):
        border[np.unique(edge)] = True
    out = []
    for k in range(1, n + 1):
        area = int(counts[k])
        if area == 0:
            continue
        out.append(
            RegionStats(
                label=k,
                area=area,
                mean=float(sums[k] / area),
                centroid=(float(sx[k] / area), float(sy[k] / area)),
                touches_border=bool(border[k]),
            )
        )
    return out


def _pick_tumor(
    labels: LabelImage, stats: list, img: GrayImage8, policy: TumorPolicy
) -> int | None:
    candidates = [s for s in stats if not s.touches_border]
    if not candidates:
        return None
    if policy is TumorPolicy.LARGEST_INTERIOR:
        return min(candidates, key=lambda s: (-s.area, s.label)).label

    # contrast against every other labeled pixel off the image frame
    lab = labels.data
    interior = np.zeros(lab.shape, dtype=bool)
    interior[1:-1, 1:-1] = True
    sel = interior & (lab > 0)
    flat = lab[sel]
    vals = img.data[sel].astype(np.float64)
    n = labels.num_labels
    counts = np.bincount(flat, minlength=n + 1)
    sums = np.bincount(flat, weights=vals, minlength=n + 1)
    tot_cnt = counts[1:].sum()
    tot_sum = sums[1:].sum()

    def score(s: RegionStats) -> float:
        rest_cnt = tot_cnt - counts[s.label]
        if rest_cnt <= 0:
            return 0.0
        rest_mean = (tot_sum - sums[s.label]) / rest_cnt
        return abs(s.mean - rest_mean)

    return min(candidates, key=lambda s: (-score(s), s.area, s.label)).label


# ---------------------------------------------------------------------------
# Pipeline


def _distance_cores(mask: np.ndarray, conn: Connectivity) -> np.ndarray:
    """Per-component band at >= half the component's peak interior depth."""
    if not mask.any():
        return np.zeros(mask.shape, dtype=bool)
    d = distance_transform(BinaryImage(mask)).data
    comps = label_components(BinaryImage(mask), conn)
    peaks = np.zeros(comps.num_labels + 1, dtype=np.float64)
    np.maximum.at(peaks, comps.data.ravel(), d.ravel())
    half = peaks[comps.data] * 0.5
    return mask & (d >= half) & (d > 0)


def _background_markers(
    bw: BinaryImage, fgm: BinaryImage, conn: Connectivity
) -> BinaryImage:
    """Markers for everything that is not a foreground object.

    Three ingredients: the ridge of the unseeded watershed of the negated
    distance transform (separating lines between threshold components),
    distance cores of the thresholded area with the foreground markers
    punched out (bands at >= half each component's peak depth), and distance
    cores of the complement (deep background). The cores guarantee a marker
    on both sides of every object wall even when the thresholded mask is a
    single blob and the ridge is empty. A 2-pixel guard ring around the
    foreground markers is excluded so the marker sets stay separate
    components.
    """
    d = distance_transform(bw)
    skiz = watershed_unseeded(FloatImage(-d.data), conn).data == 0

    body = _distance_cores(bw.data & ~fgm.data, conn)
    deep_bg = _distance_cores(~bw.data, conn)

    guard = dilate_binary(fgm, StructuringElement.disk(2))
    return BinaryImage((skiz | body | deep_bg) & ~guard.data)


def segment(img: GrayImage8, cfg: PipelineConfig = PipelineConfig()) -> SegmentationResult:
    """Marker-controlled watershed segmentation.

    Smooths with opening/closing by reconstruction, takes regional maxima as
    foreground markers, derives background markers from the distance
    transform of the thresholded smoothed image, imposes both as minima on
    the rescaled Sobel gradient and floods. Stage images are recorded in a
    fixed order for inspection dumps.
    """
    if img.width < 8 or img.height < 8:
        raise ValueError(f"segment needs at least 8x8 input, got {img.width}x{img.height}")
    conn = cfg.connectivity
    se = StructuringElement.disk(cfg.se_radius)

    otsu_input = otsu_threshold(histogram(img))
    input_binary = binarize(img, otsu_input.threshold)

    grad = sobel_gradient_magnitude(img)
    grad_u8 = rescale_to_u8(grad)

    opened = open_by_reconstruction(img, se, conn)
    oc = close_by_reconstruction(opened, se, conn)

    rmax = regional_maxima(oc, conn)
    fgm = rmax
    if cfg.fg_shrink_radius > 0:
        fgm = erode_binary(fgm, StructuringElement.disk(cfg.fg_shrink_radius))
    comps = label_components(fgm, conn)
    if comps.num_labels > 0:
        areas = np.bincount(comps.data.ravel(), minlength=comps.num_labels + 1)
        keep = areas >= cfg.min_marker_area
        keep[0] = False
        fgm = BinaryImage(keep[comps.data])
    if not fgm.data.any():
        raise MarkerError(
            "no foreground markers survive shrinking and the area filter; "
            f"try min_marker_area < {cfg.min_marker_area} or a smaller fg_shrink_radius"
        )

    ot = otsu_threshold(histogram(oc))
    bw = binarize(oc, ot.threshold)

    bgm = _background_markers(bw, fgm, conn)

    marker_mask = BinaryImage(fgm.data | bgm.data)
    relief = impose_minima(grad_u8, marker_mask, conn)
    markers = label_components(marker_mask, conn)
    labels = watershed_seeded(to_float(relief), markers, conn)
    ridge = BinaryImage(labels.data == 0)

    stats = region_stats(img, labels)
    tumor_label = _pick_tumor(labels, stats, img, cfg.tumor_policy)

    label_rgb = render_label_colormap(labels)
    overlay = _compose_overlay(img, ridge, labels, tumor_label)

    def as_u8(mask: BinaryImage) -> GrayImage8:
        return GrayImage8(np.where(mask.data, 255, 0).astype(np.uint8))

    stages = (
        ("01_input", img),
        ("02_otsu_binary", as_u8(input_binary)),
        ("03_gradient", grad_u8),
        ("04_open_recon", opened),
        ("05_openclose_recon", oc),
        ("06_regional_maxima", as_u8(rmax)),
        ("07_fg_markers", as_u8(fgm)),
        ("08_threshold_oc", as_u8(bw)),
        ("09_bg_ridge", as_u8(bgm)),
        ("10_imposed_minima", relief),
        ("11_label_matrix", label_rgb),
        ("12_overlay", overlay),
    )
    return SegmentationResult(
        labels=labels,
        ridge=ridge,
        fg_markers=fgm,
        bg_markers=bgm,
        tumor_label=tumor_label,
        degenerate=ot.degenerate,
        stages=stages,
    )


# ---------------------------------------------------------------------------
# Rendering

_GOLDEN = 0.618033988749895


def _round_half_away(a: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.floor(np.abs(a) + 0.5)


def _label_lut(n: int) -> np.ndarray:
    """Colors for labels 0..n; 0 is black, hues follow the golden ratio."""
    k = np.arange(n + 1, dtype=np.float64)
    hue = (k * _GOLDEN) % 1.0
    s, v = 0.85, 1.0
    h6 = hue * 6.0
    sector = np.floor(h6).astype(np.int64) % 6
    f = h6 - np.floor(h6)
    p = np.full_like(hue, v * (1.0 - s))
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    vv = np.full_like(hue, v)
    r = np.choose(sector, [vv, q, p, p, t, vv])
    g = np.choose(sector, [t, vv, vv, q, p, p])
    b = np.choose(sector, [p, p, t, vv, vv, q])
    lut = np.stack([r, g, b], axis=1)
    lut = _round_half_away(lut * 255.0).astype(np.uint8)
    lut[0] = 0
    return lut


def render_label_colormap(labels: LabelImage) -> RgbImage:
    """Deterministic color per label; ridge/0 is black."""
    lut = _label_lut(labels.num_labels)
    return RgbImage(lut[labels.data])


def render_overlay(
    img: GrayImage8, mask: BinaryImage, color: tuple, alpha: float
) -> RgbImage:
    """Alpha-blend a flat color over the grayscale image inside the mask."""
    if img.data.shape != mask.data.shape:
        raise ValueError("render_overlay: image and mask dimensions differ")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    color = tuple(int(c) for c in color)
    if len(color) != 3 or any(c < 0 or c > 255 for c in color):
        raise ValueError(f"color {color} must be three ints in [0, 255]")
    base = np.repeat(img.data[:, :, None], 3, axis=2).astype(np.float64)
    out = base.copy()
    m = mask.data
    for ch in range(3):
        out[:, :, ch][m] = (1.0 - alpha) * base[:, :, ch][m] + alpha * color[ch]
    return RgbImage(_round_half_away(out).astype(np.uint8))


def _blend_rgb(rgb: np.ndarray, mask: np.ndarray, color: tuple, alpha: float) -> np.ndarray:
    out = rgb.astype(np.float64)
    for ch in range(3):
        out[:, :, ch][mask] = (1.0 - alpha) * out[:, :, ch][mask] + alpha * color[ch]
    return _round_half_away(out).astype(np.uint8)


def _compose_overlay(
    img: GrayImage8, ridge: BinaryImage, labels: LabelImage, tumor_label: int | None
) -> RgbImage:
    """Stage 12: ridge lines in yellow over the input, tumor tinted red."""
    out = render_overlay(img, ridge, (255, 255, 0), 0.6).data
    if tumor_label is not None:
        out = _blend_rgb(out, labels.data == tumor_label, (255, 0, 0), 0.45)
    return RgbImage(out)
