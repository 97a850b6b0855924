"""Sparse-depth cleanup before filtering: afterimage and occlusion removal.

RGB images are plain (H, W, 3) float32 arrays with channel values on the
[0, 255] scale; ``rgb_image`` validates and converts external input.
Every operation here is monotone on the depth map: mask bits are only ever
cleared, and surviving depth values are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .config import PipelineConfig
from .geometry import ConfigurationError, SparseDepthMap


def rgb_image(pixels) -> np.ndarray:
    """Validate an RGB image: (H, W, 3), finite, channels in [0, 255]."""
    img = np.asarray(pixels, dtype=np.float32)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ConfigurationError("RGB image must have shape (H, W, 3)")
    if not np.isfinite(img).all():
        raise ConfigurationError("RGB image contains non-finite values")
    if img.min() < 0 or img.max() > 255:
        raise ConfigurationError("RGB channel values must lie in [0, 255]")
    return img


@dataclass
class MotionMask:
    """Binary motion raster plus the RGB-distance threshold that produced it."""

    mask: np.ndarray  # (H, W) uint8 in {0, 1}
    tau_m: float

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=np.uint8)


def motion_mask(prev: np.ndarray, cur: np.ndarray, tau_m: float) -> MotionMask:
    """Mark pixels whose RGB Euclidean distance between frames exceeds tau_m."""
    if prev.shape != cur.shape:
        raise ConfigurationError("motion_mask frames must share dimensions")
    if tau_m < 0:
        raise ConfigurationError("tau_m must be >= 0")
    diff = cur.astype(np.float64) - prev.astype(np.float64)
    dist_sq = np.einsum("ijk,ijk->ij", diff, diff)
    return MotionMask(mask=(dist_sq > tau_m * tau_m).astype(np.uint8), tau_m=tau_m)


def close_mask(m: MotionMask, radius: int) -> MotionMask:
    """Morphological closing with a (2*radius+1)^2 square structuring element.

    Dilation and erosion both treat pixels outside the raster as background,
    which keeps the closing idempotent.
    """
    if radius < 0:
        raise ConfigurationError("closing radius must be >= 0")
    if radius == 0 or not m.mask.any():
        return MotionMask(m.mask.copy(), m.tau_m)
    k = 2 * radius + 1
    struct = np.ones((k, k), dtype=bool)
    dilated = ndimage.binary_dilation(m.mask.astype(bool), structure=struct, border_value=0)
    closed = ndimage.binary_erosion(dilated, structure=struct, border_value=0)
    return MotionMask(closed.astype(np.uint8), m.tau_m)


def remove_afterimages(
    sparse: SparseDepthMap, motion: MotionMask, latest_frame: int
) -> SparseDepthMap:
    """Drop samples inside the motion region that predate the latest frame."""
    if motion.mask.shape != sparse.shape:
        raise ConfigurationError("motion mask and depth map dimensions disagree")
    out = sparse.copy()
    stale = (out.mask == 1) & (motion.mask == 1) & (out.frame_index < latest_frame)
    out.mask[stale] = 0
    out.depth[stale] = 0.0
    out.frame_index[stale] = 0
    return out


def remove_occluded(sparse: SparseDepthMap, window: int, delta: float) -> SparseDepthMap:
    """Drop samples significantly behind the local mean depth.

    The mean is taken over valid pixels in the (2*window+1)^2 neighborhood
    (the pixel itself included), so an isolated sample is never removed.
    """
    if window < 1:
        raise ConfigurationError("occlusion window must be >= 1")
    if delta <= 0:
        raise ConfigurationError("occlusion delta must be > 0")
    out = sparse.copy()
    if not out.mask.any():
        return out
    size = 2 * window + 1
    m = out.mask.astype(np.float64)
    depth_sum = ndimage.uniform_filter(out.depth.astype(np.float64) * m, size=size, mode="constant")
    count = ndimage.uniform_filter(m, size=size, mode="constant")
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(count > 0, depth_sum / np.maximum(count, 1e-300), 0.0)
    occluded = (out.mask == 1) & (out.depth > mean + delta)
    out.mask[occluded] = 0
    out.depth[occluded] = 0.0
    out.frame_index[occluded] = 0
    return out


def preprocess(
    sparse: SparseDepthMap,
    prev_rgb: np.ndarray,
    cur_rgb: np.ndarray,
    cfg: PipelineConfig,
) -> SparseDepthMap:
    """Full cleanup chain: motion mask, closing, afterimage and occlusion removal.

    The latest frame is taken to be the largest frame_index present in the
    map; with no valid samples the input is returned unchanged (as a copy).
    """
    if prev_rgb.shape != cur_rgb.shape or cur_rgb.shape[:2] != sparse.shape:
        raise ConfigurationError("preprocess inputs must share dimensions")
    out = sparse
    if cfg.afterimage_removal and sparse.mask.any():
        motion = close_mask(motion_mask(prev_rgb, cur_rgb, cfg.tau_m), cfg.closing_radius)
        latest = int(out.frame_index[out.mask == 1].max())
        out = remove_afterimages(out, motion, latest)
    if cfg.occlusion_removal:
        out = remove_occluded(out, cfg.occl_window, cfg.occl_delta)
    if out is sparse:
        out = sparse.copy()
    return out
