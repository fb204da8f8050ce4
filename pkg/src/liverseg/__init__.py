"""Marker-controlled watershed segmentation with wavelet region features."""

from .enhance import Histogram, OtsuResult, binarize, histogram, otsu_threshold
from .features import (
    FeatureVector,
    Subband,
    SubbandFeature,
    SubbandPyramid,
    WaveletKind,
    dwt2,
    extract_features,
    idwt2,
    max_levels,
)
from .gradient import sobel_gradient_magnitude
from .image import (
    BinaryImage,
    FloatImage,
    GrayImage8,
    LabelImage,
    PgmParseError,
    RgbImage,
    decode_pgm,
    encode_pgm,
    encode_ppm,
    read_pgm,
    rescale_to_u8,
    to_float,
    to_u8,
    write_pgm,
    write_ppm,
)
from .morphology import (
    Connectivity,
    StructuringElement,
    close_by_reconstruction,
    dilate,
    dilate_binary,
    distance_transform,
    erode,
    erode_binary,
    impose_minima,
    label_components,
    open_by_reconstruction,
    reconstruct_by_dilation,
    reconstruct_by_erosion,
    regional_maxima,
)
from .phantom import (
    Ellipse,
    GroundTruth,
    PhantomConfig,
    Tumor,
    dice,
    evaluate,
    generate_phantom,
    jaccard,
)
from .rng import SplitMix64, Xoshiro256pp
from .watershed import (
    MarkerError,
    PipelineConfig,
    RegionStats,
    SegmentationResult,
    TumorPolicy,
    region_stats,
    render_label_colormap,
    render_overlay,
    segment,
    watershed_seeded,
    watershed_unseeded,
)

__all__ = [
    "BinaryImage",
    "Connectivity",
    "Ellipse",
    "FeatureVector",
    "FloatImage",
    "GrayImage8",
    "GroundTruth",
    "Histogram",
    "LabelImage",
    "MarkerError",
    "OtsuResult",
    "PgmParseError",
    "PhantomConfig",
    "PipelineConfig",
    "RegionStats",
    "RgbImage",
    "SegmentationResult",
    "SplitMix64",
    "StructuringElement",
    "Subband",
    "SubbandFeature",
    "SubbandPyramid",
    "Tumor",
    "TumorPolicy",
    "WaveletKind",
    "Xoshiro256pp",
    "binarize",
    "close_by_reconstruction",
    "dice",
    "dilate",
    "dilate_binary",
    "distance_transform",
    "dwt2",
    "erode",
    "erode_binary",
    "evaluate",
    "extract_features",
    "generate_phantom",
    "histogram",
    "idwt2",
    "max_levels",
    "impose_minima",
    "jaccard",
    "label_components",
    "open_by_reconstruction",
    "otsu_threshold",
    "decode_pgm",
    "encode_pgm",
    "encode_ppm",
    "read_pgm",
    "reconstruct_by_dilation",
    "reconstruct_by_erosion",
    "regional_maxima",
    "region_stats",
    "render_label_colormap",
    "render_overlay",
    "rescale_to_u8",
    "segment",
    "sobel_gradient_magnitude",
    "to_float",
    "to_u8",
    "watershed_seeded",
    "watershed_unseeded",
    "write_pgm",
    "write_ppm",
]

__version__ = "0.1.0"
