"""Sobel gradient magnitude."""

from __future__ import annotations

import numpy as np

from .image import FloatImage, GrayImage8


def sobel_gradient_magnitude(img: GrayImage8) -> FloatImage:
    """Euclidean norm of the two 3x3 Sobel responses.

    gx uses [[-1,0,1],[-2,0,2],[-1,0,1]], gy its transpose; the border is
    handled by replicating the edge rows/columns.
    """
    a = img.data.astype(np.float64)
    p = np.pad(a, 1, mode="edge")
    east = p[0:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]
    west = p[0:-2, 0:-2] + 2.0 * p[1:-1, 0:-2] + p[2:, 0:-2]
    south = p[2:, 0:-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]
    north = p[0:-2, 0:-2] + 2.0 * p[0:-2, 1:-1] + p[0:-2, 2:]
    gx = east - west
    gy = south - north
    return FloatImage(np.sqrt(gx * gx + gy * gy))
