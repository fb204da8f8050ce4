"""Separable 2-D wavelet decomposition and per-region texture features.

Filters are orthonormal (Haar and the 4-tap Daubechies pair) applied rows
first, then columns, recursing on the LL band. Each level sees even
dimensions: odd inputs are edge-replicated by one row/column first.
Windows wrap periodically, which keeps the critically sampled transform
orthogonal, so energy is preserved exactly and reconstruction is exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .image import BinaryImage, FloatImage, GrayImage8

_SQRT3 = math.sqrt(3.0)
_SQRT2 = math.sqrt(2.0)


class WaveletKind(enum.Enum):
    HAAR = "haar"
    DAUBECHIES4 = "db4"


_LOWPASS = {
    WaveletKind.HAAR: np.array([1.0, 1.0]) / _SQRT2,
    WaveletKind.DAUBECHIES4: np.array(
        [1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3]
    )
    / (4.0 * _SQRT2),
}


def _filters(wavelet: WaveletKind):
    lo = _LOWPASS[wavelet]
    L = lo.shape[0]
    hi = np.array([(-1.0) ** k * lo[L - 1 - k] for k in range(L)])
    return lo, hi


@dataclass(frozen=True)
class Subband:
    level: int
    band: str  # "LL", "LH", "HL", "HH"
    data: np.ndarray

    @property
    def energy(self) -> float:
        return float((self.data * self.data).sum())


@dataclass(frozen=True)
class SubbandPyramid:
    """Detail bands LH/HL/HH for levels 1..levels plus the final LL.

    LH means row-lowpass/column-highpass (vertical variation), HL the
    transpose. level_input_dims / level_padded_dims record the (w, h) each
    level consumed before and after the pad-to-even step, which is what
    idwt2 needs to crop the reconstruction back.
    """

    wavelet: WaveletKind
    levels: int
    subbands: tuple
    level_input_dims: tuple
    level_padded_dims: tuple

    def band(self, level: int, name: str) -> Subband:
        for sb in self.subbands:
            if sb.level == level and sb.band == name:
                return sb
        raise KeyError(f"no subband {name} at level {level}")

    @property
    def total_energy(self) -> float:
        return float(sum(sb.energy for sb in self.subbands))


def max_levels(width: int, height: int) -> int:
    """Number of decompositions until the LL band would be a single line."""
    m = min(width, height)
    k = 0
    while m >= 2:
        m = (m + 1) // 2
        k += 1
    return k


def _analyze(a: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """One filtering pass along the last axis (length must be even)."""
    n = a.shape[-1]
    L = lo.shape[0]
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(L)[None, :]) % n
    win = a[..., idx]
    return win @ lo, win @ hi


def _synthesize(ca: np.ndarray, cd: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    n = 2 * ca.shape[-1]
    L = lo.shape[0]
    out = np.zeros(ca.shape[:-1] + (n,), dtype=np.float64)
    base = 2 * np.arange(n // 2)
    for m in range(L):
        idx = (base + m) % n
        out[..., idx] += lo[m] * ca + hi[m] * cd
    return out


def _pad_even(a: np.ndarray) -> np.ndarray:
    ph = a.shape[0] % 2
    pw = a.shape[1] % 2
    if ph or pw:
        a = np.pad(a, ((0, ph), (0, pw)), mode="edge")
    return a


def dwt2(img: FloatImage, wavelet: WaveletKind, levels: int) -> SubbandPyramid:
    """Multi-level 2-D DWT (rows then columns, recursing on LL)."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    feasible = max_levels(img.width, img.height)
    if levels > feasible:
        raise ValueError(
            f"{levels} levels infeasible for {img.width}x{img.height}; max is {feasible}"
        )
    lo, hi = _filters(wavelet)
    cur = img.data
    subbands = []
    in_dims = []
    pad_dims = []
    for lev in range(1, levels + 1):
        in_dims.append((cur.shape[1], cur.shape[0]))
        cur = _pad_even(cur)
        pad_dims.append((cur.shape[1], cur.shape[0]))
        row_lo, row_hi = _analyze(cur, lo, hi)
        ll, lh = (b.swapaxes(0, 1) for b in _analyze(row_lo.swapaxes(0, 1), lo, hi))
        hl, hh = (b.swapaxes(0, 1) for b in _analyze(row_hi.swapaxes(0, 1), lo, hi))
        subbands.append(Subband(lev, "LH", lh))
        subbands.append(Subband(lev, "HL", hl))
        subbands.append(Subband(lev, "HH", hh))
        cur = ll
    subbands.append(Subband(levels, "LL", np.ascontiguousarray(cur)))
    return SubbandPyramid(
        wavelet=wavelet,
        levels=levels,
        subbands=tuple(subbands),
        level_input_dims=tuple(in_dims),
        level_padded_dims=tuple(pad_dims),
    )


def idwt2(pyr: SubbandPyramid, kind: WaveletKind | None = None) -> FloatImage:
    """Exact inverse of dwt2 (synthesis then crop of each level's padding)."""
    if kind is not None and kind != pyr.wavelet:
        raise ValueError(f"pyramid was built with {pyr.wavelet.value}, not {kind.value}")
    lo, hi = _filters(pyr.wavelet)
    cur = pyr.band(pyr.levels, "LL").data
    for lev in range(pyr.levels, 0, -1):
        lh = pyr.band(lev, "LH").data
        hl = pyr.band(lev, "HL").data
        hh = pyr.band(lev, "HH").data
        row_lo = _synthesize(cur.swapaxes(0, 1), lh.swapaxes(0, 1), lo, hi).swapaxes(0, 1)
        row_hi = _synthesize(hl.swapaxes(0, 1), hh.swapaxes(0, 1), lo, hi).swapaxes(0, 1)
        full = _synthesize(row_lo, row_hi, lo, hi)
        w, h = pyr.level_input_dims[lev - 1]
        cur = full[:h, :w]
    return FloatImage(np.ascontiguousarray(cur))


# ---------------------------------------------------------------------------
# Region features


@dataclass(frozen=True)
class SubbandFeature:
    level: int
    band: str
    energy: float
    norm_energy: float
    log_energy: float


@dataclass(frozen=True)
class FeatureVector:
    subbands: tuple
    mean: float
    std: float
    area: int

    def to_json_dict(self, label: int) -> dict:
        return {
            "label": int(label),
            "area": self.area,
            "mean": self.mean,
            "std": self.std,
            "subbands": [
                {
                    "level": sb.level,
                    "band": sb.band,
                    "energy": sb.energy,
                    "norm_energy": sb.norm_energy,
                    "log_energy": sb.log_energy,
                }
                for sb in self.subbands
            ],
        }


def extract_features(
    img: GrayImage8, mask: BinaryImage, wavelet: WaveletKind, levels: int
) -> FeatureVector:
    """Wavelet energy signature of one region.

    The region's bounding box is cropped, pixels outside the mask zeroed,
    the region mean subtracted inside the mask, and the box edge-replicated
    up to dimensions divisible by 2^levels before the transform. Energies
    come per subband as raw, fraction-of-total and log1p values; mean, std
    (population) and area describe the raw intensities.
    """
    if img.data.shape != mask.data.shape:
        raise ValueError("extract_features: image and mask dimensions differ")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    ys, xs = np.nonzero(mask.data)
    if ys.size == 0:
        raise ValueError("extract_features: region mask is empty")
    y0, y1 = int(ys.min()), int(ys.max())
    x0, x1 = int(xs.min()), int(xs.max())
    bh, bw = y1 - y0 + 1, x1 - x0 + 1
    block = 1 << levels
    if bw < block or bh < block:
        feasible = max(0, min(bw, bh).bit_length() - 1)
        raise ValueError(
            f"region bounding box {bw}x{bh} is smaller than 2^levels={block}; "
            f"use levels <= {feasible}"
        )

    box = img.data[y0 : y1 + 1, x0 : x1 + 1].astype(np.float64)
    m = mask.data[y0 : y1 + 1, x0 : x1 + 1]
    region_vals = box[m]
    mu = float(region_vals.mean())
    arr = np.where(m, box - mu, 0.0)

    tw = ((bw + block - 1) // block) * block
    th = ((bh + block - 1) // block) * block
    if tw != bw or th != bh:
        arr = np.pad(arr, ((0, th - bh), (0, tw - bw)), mode="edge")

    pyr = dwt2(FloatImage(arr), wavelet, levels)
    energies = [sb.energy for sb in pyr.subbands]
    total = float(sum(energies))
    feats = []
    for sb, e in zip(pyr.subbands, energies):
        norm = 0.0 if total < 1e-12 else e / total
        feats.append(SubbandFeature(sb.level, sb.band, e, norm, math.log1p(e)))
    return FeatureVector(
        subbands=tuple(feats),
        mean=mu,
        std=float(region_vals.std()),
        area=int(region_vals.size),
    )
