from __future__ import annotations

import numpy as np
import pytest

from liverseg import (
    BinaryImage, Connectivity, FloatImage, GrayImage8, LabelImage,
    MarkerError, PipelineConfig, RegionStats, TumorPolicy, label_components,
    region_stats, render_label_colormap, render_overlay, segment,
    watershed_seeded, watershed_unseeded,
)
from liverseg.watershed import _pick_tumor

from _oracles import regional_extrema_naive

C8 = Connectivity.EIGHT
C4 = Connectivity.FOUR


def _ramp_instance():
    """Symmetric two-basin relief: every row [0,1,2,3,2,1,0], full-column seeds."""
    relief = np.tile(np.array([0.0, 1.0, 2.0, 3.0, 2.0, 1.0, 0.0]), (5, 1))
    markers = np.zeros((5, 7), dtype=np.int32)
    markers[:, 0] = 1
    markers[:, 6] = 2
    return FloatImage(relief), LabelImage(markers, num_labels=2)


def _random_markers(rng, shape, k):
    m = np.zeros(shape, dtype=np.int32)
    placed = 0
    while placed < k:
        y = int(rng.integers(0, shape[0]))
        x = int(rng.integers(0, shape[1]))
        if m[y, x] == 0:
            placed += 1
            m[y, x] = placed
    return m


# ---------------------------------------------------------------------------
# seeded flooding


def test_constant_relief_single_marker_floods_all():
    relief = FloatImage(np.zeros((6, 9)))
    markers = np.zeros((6, 9), dtype=np.int32)
    markers[4, 2] = 1
    out = watershed_seeded(relief, LabelImage(markers, num_labels=1))
    assert np.all(out.data == 1)


def test_two_basin_ramp_ridge_at_middle_column():
    relief, markers = _ramp_instance()
    out = watershed_seeded(relief, markers).data
    assert np.all(out[:, :3] == 1)
    assert np.all(out[:, 3] == 0)
    assert np.all(out[:, 4:] == 2)


def test_two_basin_ramp_mirror_symmetry():
    relief, markers = _ramp_instance()
    out = watershed_seeded(relief, markers).data
    mirrored = watershed_seeded(
        FloatImage(relief.data[:, ::-1]),
        LabelImage(np.ascontiguousarray(markers.data[:, ::-1]), num_labels=2),
    ).data
    assert np.array_equal(mirrored, out[:, ::-1])


def test_seed_preservation_and_partition():
    rng = np.random.default_rng(404)
    for conn in (C4, C8):
        for _ in range(15):
            shape = (int(rng.integers(6, 13)), int(rng.integers(6, 13)))
            relief = FloatImage(rng.integers(0, 5, size=shape).astype(np.float64))
            markers = _random_markers(rng, shape, int(rng.integers(1, 5)))
            lab = watershed_seeded(relief, LabelImage(markers), conn)
            # seeds keep their labels
            sy, sx = np.nonzero(markers)
            assert np.array_equal(lab.data[sy, sx], markers[sy, sx])
            # every pixel assigned one label; each region connected, holds its seed
            assert lab.data.min() >= 0
            for k in range(1, int(markers.max()) + 1):
                region = lab.data == k
                assert region[markers == k].all()
                comps = label_components(BinaryImage(region), conn)
                assert comps.num_labels == 1


def test_flood_determinism():
    rng = np.random.default_rng(405)
    relief = FloatImage(rng.random((20, 20)))
    markers = LabelImage(_random_markers(rng, (20, 20), 4))
    a = watershed_seeded(relief, markers).data
    b = watershed_seeded(relief, markers).data
    assert a.tobytes() == b.tobytes()


def test_monotone_relief_invariance():
    rng = np.random.default_rng(406)
    relief = rng.integers(0, 9, size=(12, 15)).astype(np.float64)
    markers = LabelImage(_random_markers(rng, (12, 15), 3))
    base = watershed_seeded(FloatImage(relief), markers).data
    warped = watershed_seeded(FloatImage(np.expm1(relief) + 3.0 * relief), markers).data
    assert np.array_equal(base, warped)


def test_seeded_validation():
    relief = FloatImage(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        watershed_seeded(relief, LabelImage(np.zeros((4, 4), dtype=np.int32)))
    with pytest.raises(ValueError):
        watershed_seeded(relief, LabelImage(np.ones((4, 5), dtype=np.int32)))


# ---------------------------------------------------------------------------
# unseeded flooding


def test_unseeded_constant_relief_single_region():
    out = watershed_unseeded(FloatImage(np.zeros((5, 8))))
    assert out.num_labels == 1
    assert np.all(out.data == 1)


def test_unseeded_two_pits():
    relief = np.zeros((5, 11))
    relief[2, 2] = -1.0
    relief[2, 8] = -1.0
    out = watershed_unseeded(FloatImage(relief))
    assert out.num_labels == 2
    ridge = out.data == 0
    assert ridge.any()
    assert (out.data == 1).any() and (out.data == 2).any()
    again = watershed_unseeded(FloatImage(relief))
    assert np.array_equal(out.data, again.data)


def test_unseeded_region_count_equals_minima_components():
    rng = np.random.default_rng(407)
    for conn in (C4, C8):
        for _ in range(10):
            relief = rng.integers(0, 4, size=(9, 11)).astype(np.float64)
            out = watershed_unseeded(FloatImage(relief), conn)
            minima = regional_extrema_naive(relief, int(conn.value), maxima=False)
            want = label_components(BinaryImage(minima), conn).num_labels
            assert out.num_labels == want
            # non-ridge pixels all carry a region label
            assert set(np.unique(out.data)) <= set(range(out.num_labels + 1))


# ---------------------------------------------------------------------------
# region stats


def test_region_stats_single_region():
    img = GrayImage8(np.full((4, 5), 9, dtype=np.uint8))
    labels = LabelImage(np.ones((4, 5), dtype=np.int32), num_labels=1)
    (s,) = region_stats(img, labels)
    assert s.label == 1
    assert s.area == 20
    assert s.mean == 9.0
    assert s.touches_border
    assert s.centroid == (2.0, 1.5)


def test_region_stats_partition_and_oracle():
    rng = np.random.default_rng(408)
    img = GrayImage8(rng.integers(0, 256, size=(10, 12)).astype(np.uint8))
    relief = FloatImage(rng.integers(0, 4, size=(10, 12)).astype(np.float64))
    labels = watershed_unseeded(relief)
    stats = region_stats(img, labels)
    total = sum(s.area for s in stats) + int((labels.data == 0).sum())
    assert total == 120
    for s in stats:
        mask = labels.data == s.label
        assert s.area == int(mask.sum())
        assert s.mean == pytest.approx(float(img.data[mask].mean()))
        ys, xs = np.nonzero(mask)
        assert s.centroid[0] == pytest.approx(xs.mean())
        assert s.centroid[1] == pytest.approx(ys.mean())
        on_border = (
            ys.min() == 0 or xs.min() == 0 or ys.max() == 9 or xs.max() == 11
        )
        assert s.touches_border == on_border


def test_region_stats_dimension_mismatch():
    img = GrayImage8(np.zeros((3, 3), dtype=np.uint8))
    labels = LabelImage(np.ones((3, 4), dtype=np.int32), num_labels=1)
    with pytest.raises(ValueError):
        region_stats(img, labels)


# ---------------------------------------------------------------------------
# tumor pick


def _three_region_scene():
    """Border region 1, interior regions 2 (large, bright) and 3 (small, brighter)."""
    lab = np.ones((12, 12), dtype=np.int32)
    lab[2:10, 2:7] = 2
    lab[3:6, 8:10] = 3
    img = np.full((12, 12), 30, dtype=np.uint8)
    img[lab == 2] = 120
    img[lab == 3] = 200
    return GrayImage8(img), LabelImage(lab, num_labels=3)


def test_pick_tumor_max_mean_contrast():
    img, labels = _three_region_scene()
    stats = region_stats(img, labels)
    pick = _pick_tumor(labels, stats, img, TumorPolicy.MAX_MEAN_CONTRAST)
    assert pick == 3


def test_pick_tumor_largest_interior():
    img, labels = _three_region_scene()
    stats = region_stats(img, labels)
    pick = _pick_tumor(labels, stats, img, TumorPolicy.LARGEST_INTERIOR)
    assert pick == 2


def test_pick_tumor_none_when_everything_touches_border():
    img = GrayImage8(np.zeros((6, 6), dtype=np.uint8))
    labels = LabelImage(np.ones((6, 6), dtype=np.int32), num_labels=1)
    stats = region_stats(img, labels)
    assert _pick_tumor(labels, stats, img, TumorPolicy.MAX_MEAN_CONTRAST) is None


# ---------------------------------------------------------------------------
# rendering


def test_label_colormap_black_zero_distinct_labels():
    lab = LabelImage(np.array([[0, 1], [2, 1]], dtype=np.int32), num_labels=2)
    rgb = render_label_colormap(lab)
    assert rgb.data[0, 0].tolist() == [0, 0, 0]
    c1 = rgb.data[0, 1].tolist()
    c2 = rgb.data[1, 0].tolist()
    assert c1 != c2
    assert render_label_colormap(lab).data.tobytes() == rgb.data.tobytes()


def test_overlay_alpha_limits():
    img = GrayImage8(np.array([[10, 20]], dtype=np.uint8))
    full = np.ones((1, 2), dtype=bool)
    off = render_overlay(img, BinaryImage(full), (255, 0, 0), 0.0)
    assert off.data[0, 0].tolist() == [10, 10, 10]
    on = render_overlay(img, BinaryImage(full), (255, 0, 0), 1.0)
    assert on.data[0, 1].tolist() == [255, 0, 0]


def test_overlay_blend_rounding():
    img = GrayImage8(np.full((2, 2), 100, dtype=np.uint8))
    mask = np.zeros((2, 2), dtype=bool)
    mask[0, 0] = True
    out = render_overlay(img, BinaryImage(mask), (255, 0, 0), 0.5)
    assert out.data[0, 0].tolist() == [178, 50, 50]
    assert out.data[1, 1].tolist() == [100, 100, 100]


def test_overlay_validation():
    img = GrayImage8(np.zeros((2, 2), dtype=np.uint8))
    mask = BinaryImage(np.zeros((2, 2), dtype=bool))
    with pytest.raises(ValueError):
        render_overlay(img, mask, (255, 0, 0), 1.5)
    with pytest.raises(ValueError):
        render_overlay(img, mask, (300, 0, 0), 0.5)


# ---------------------------------------------------------------------------
# full pipeline


def _blob_image() -> GrayImage8:
    """64x64 synthetic scene: dim disk with a bright inclusion."""
    yy, xx = np.mgrid[0:64, 0:64]
    img = np.full((64, 64), 30, dtype=np.float64)
    organ = (yy - 32) ** 2 / 24.0**2 + (xx - 32) ** 2 / 20.0**2 <= 1.0
    blob = (yy - 36) ** 2 / 6.0**2 + (xx - 37) ** 2 / 5.0**2 <= 1.0
    img[organ] = 120.0
    img[blob] = 190.0
    return GrayImage8(img.astype(np.uint8))


def test_segment_stage_names_in_order():
    res = segment(_blob_image(), PipelineConfig(se_radius=3, min_marker_area=5))
    names = [name for name, _ in res.stages]
    assert names == [
        "01_input",
        "02_otsu_binary",
        "03_gradient",
        "04_open_recon",
        "05_openclose_recon",
        "06_regional_maxima",
        "07_fg_markers",
        "08_threshold_oc",
        "09_bg_ridge",
        "10_imposed_minima",
        "11_label_matrix",
        "12_overlay",
    ]


def test_segment_result_invariants():
    res = segment(_blob_image(), PipelineConfig(se_radius=3, min_marker_area=5))
    assert np.array_equal(res.ridge.data, res.labels.data == 0)
    assert not (res.fg_markers.data & res.bg_markers.data).any()
    assert res.labels.num_labels >= 2
    assert not res.degenerate
    assert res.tumor_label is not None
    tumor_mean = float(
        np.mean(np.asarray(_blob_image().data)[res.labels.data == res.tumor_label])
    )
    assert tumor_mean > 150.0


def test_segment_determinism():
    img = _blob_image()
    cfg = PipelineConfig(se_radius=3, min_marker_area=5)
    a = segment(img, cfg)
    b = segment(img, cfg)
    assert a.labels.data.tobytes() == b.labels.data.tobytes()
    assert a.tumor_label == b.tumor_label


def test_segment_constant_image_degenerate():
    img = GrayImage8(np.full((32, 32), 55, dtype=np.uint8))
    res = segment(img, PipelineConfig(se_radius=2))
    assert res.degenerate
    assert res.tumor_label is None
    assert res.labels.num_labels == 1
    assert not res.ridge.data.any()


def test_segment_marker_error_when_filter_too_strict():
    img = GrayImage8(np.full((16, 16), 99, dtype=np.uint8))
    with pytest.raises(MarkerError, match="no foreground markers"):
        segment(img, PipelineConfig(se_radius=2, min_marker_area=100000))


def test_segment_rejects_tiny_images():
    img = GrayImage8(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        segment(img, PipelineConfig())


def test_pipeline_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(se_radius=0)
    with pytest.raises(ValueError):
        PipelineConfig(min_marker_area=0)


def test_region_stats_type_is_exported():
    assert RegionStats.__name__ == "RegionStats"
